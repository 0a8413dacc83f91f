import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curtains.braid import BandGeneratorForm, BraidWord, band_word, hurwitz_act, words_equal
from curtains.builder import (
    BuildError,
    CertificateError,
    MonodromyData,
    build_curtain,
    certify_transition,
    plan_build,
    random_admissible_data,
    validate_monodromy_data,
)
from curtains.chart import (
    build_ribbon_chart,
    nest_depths,
    same_geometry,
    simple_loops,
    standard_meridians,
    validate_chart,
)
from curtains.curtain import (
    CERTIFIED_TRANSITION,
    DISK_REPLACEMENT,
    extract_braid,
    internal_boundary,
    meridian_monodromy,
    slice_at,
    validate_curtain,
)
from curtains.geometry import Q


def W(d, *ints):
    return BraidWord.from_ints(d, ints)


def G(d, k, s=1, conj=()):
    return BandGeneratorForm(BraidWord.from_ints(d, conj), k, s)


EX36 = MonodromyData(3, W(2, 1, 1, 1), (G(3, 1), G(3, 2)))
EX4 = MonodromyData(3, W(2, 1, 1, 1), (G(3, 2), G(3, 1, 1, (-2,))))


def non_event_times(cu, per_segment=2):
    for seg in cu.segments:
        for k in range(1, per_segment + 1):
            yield seg.t0 + (seg.t1 - seg.t0) * Q(k, per_segment + 1)


# -- data validation ------------------------------------------------------------------


def test_example_data_valid():
    assert validate_monodromy_data(EX36).ok
    assert validate_monodromy_data(EX4).ok


def test_unfixed_tuple_reports_index():
    rep = validate_monodromy_data(MonodromyData(3, W(2, 1), (G(3, 1), G(3, 2))))
    assert not rep.ok
    assert any("Hurwitz fixedness failed at index 1" in i.message for i in rep.issues)


def test_wrong_tuple_length():
    assert not validate_monodromy_data(MonodromyData(3, W(2, 1), (G(3, 1),))).ok


def test_mixed_degrees_rejected():
    assert not validate_monodromy_data(MonodromyData(3, BraidWord(2), (G(3, 1), G(4, 1)))).ok


def test_build_refuses_invalid_data():
    with pytest.raises(BuildError):
        build_curtain(MonodromyData(3, W(2, 1), (G(3, 1), G(3, 2))))


# -- plan ---------------------------------------------------------------------------


def test_plan_bands_are_ordered_and_mirrored():
    plan = plan_build(EX4)
    bounds = [(a, b) for _, a, b in plan.bands]
    assert all(b0 <= a1 for (_, b0), (a1, _) in zip(bounds, bounds[1:]))
    assert bounds[0][0] == -2 and bounds[-1][1] == 2
    assert plan.band("cap-") == tuple(-t for t in reversed(plan.band("cap+")))
    assert plan.loop_count == 1 and len(plan.removal_times) == 1
    assert all(Q(3, 2) < t < 2 for t in plan.removal_times)


# -- the two worked examples -------------------------------------------------------------


@pytest.fixture(scope="module")
def cu36():
    return build_curtain(EX36)


@pytest.fixture(scope="module")
def cu4():
    return build_curtain(EX4)


def test_example_slice_sequence(cu36):
    labels = []
    for t in (Q(-15, 8), Q(-3, 4), Q(1, 4), Q(3, 4), Q(15, 8)):
        labels.append(sorted(e.label for e in slice_at(cu36, t).edges))
    assert labels == [[], [1, 2], [1, 2], [1, 2], []]
    assert [e.kind for e in cu36.events].count(CERTIFIED_TRANSITION) == 1


def test_example_curtains_verify(cu36, cu4):
    for cu, m in ((cu36, EX36), (cu4, EX4)):
        assert validate_curtain(cu).ok
        assert internal_boundary(cu).braid == m.beta
        assert all(words_equal(a, b) for a, b in zip(meridian_monodromy(cu), m.words()))


def test_second_example_structure(cu4):
    ribbon = slice_at(cu4, Q(3, 4))
    assert sorted(nest_depths(ribbon).values()) == [0, 1]
    loop_slices = [
        seg for seg in cu4.segments
        if seg.t0 >= 1 and not seg.first.vertices and len(seg.first.edges) == 1 and simple_loops(seg.first)
    ]
    assert len(loop_slices) == 1
    assert (loop_slices[0].t0, loop_slices[0].t1) == (Q(1), plan_build(EX4).removal_times[0])


def test_unknot_with_one_strand():
    m = MonodromyData(2, BraidWord(1), (G(2, 1),))
    cu = build_curtain(m)
    assert validate_curtain(cu).ok
    ib = internal_boundary(cu)
    assert ib.components == 1 and len(ib.braid) == 0
    (w,) = meridian_monodromy(cu)
    assert words_equal(w, W(2, 1))
    assert not any(e.kind == CERTIFIED_TRANSITION for e in cu.events)


def test_mirror_symmetry(cu4, cu36):
    for cu in (cu4, cu36):
        for t in non_event_times(cu, 3):
            if t >= Q(1, 2):
                assert same_geometry(slice_at(cu, t), slice_at(cu, -t)), t


def test_drag_reads_beta_letter_by_letter():
    for beta in (W(3, 1, -2, 1, 2), W(3, -1, -1), W(2, 1, -1)):
        forms = (G(4, 1),) * beta.degree
        cu = build_curtain(MonodromyData(4, beta, forms))
        assert extract_braid(cu).letters == beta.letters


def test_loops_removed_innermost_first():
    m = MonodromyData(4, BraidWord(2), (G(4, 1, 1, (2, 3, -2)), G(4, 3, -1, (-2,))))
    cu = build_curtain(m)
    removals = [e for e in cu.events if e.kind == DISK_REPLACEMENT and e.t > 0]
    assert len(removals) == 4
    for ev in removals:
        before = slice_at(cu, ev.t - Q(1, 1000))
        after = slice_at(cu, ev.t + Q(1, 1000))
        assert validate_chart(before).ok and validate_chart(after).ok
        assert len(after.edges) == len(before.edges) - 1
        (gone,) = {e.id for e in before.edges} - {e.id for e in after.edges}
        nest, depth = gone.split(":L")
        same_nest = [int(e.id.split(":L")[1]) for e in before.edges if e.id.startswith(nest + ":L")]
        assert int(depth) == min(same_nest)


# -- certificates ----------------------------------------------------------------------


def test_certificate_reflexive():
    c = build_ribbon_chart([G(3, 1), G(3, 2)])
    cert = certify_transition(c, c, standard_meridians(c).all())
    assert cert.check().ok


def test_example_certificate_tuples(cu36):
    (ev,) = [e for e in cu36.events if e.kind == CERTIFIED_TRANSITION]
    cert = ev.payload
    assert cert.check().ok
    n = 2
    for got, want in ((cert.words_a[:n], EX36.words()), (cert.words_b[:n], EX36.words())):
        assert all(words_equal(a, b) for a, b in zip(got, want))


def test_certificate_refuses_swapped_generators():
    a = build_ribbon_chart([G(3, 1), G(3, 2)])
    b = build_ribbon_chart([G(3, 2), G(3, 1)])
    with pytest.raises(CertificateError):
        certify_transition(a, b, standard_meridians(a).all())


def test_certificate_refuses_different_black_vertices():
    a = build_ribbon_chart([G(3, 1)])
    b = build_ribbon_chart([G(3, 1), G(3, 2)])
    with pytest.raises(CertificateError):
        certify_transition(a, b, standard_meridians(a).all())


# -- random admissible data ---------------------------------------------------------------


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_random_data_is_admissible(seed):
    m = random_admissible_data(random.Random(seed))
    assert 1 <= m.n <= 3 and 2 <= m.degree <= 4
    assert validate_monodromy_data(m).ok
    words = m.words()
    assert all(words_equal(a, b) for a, b in zip(hurwitz_act(m.beta, words), words))


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_roundtrip_on_random_data(seed):
    m = random_admissible_data(random.Random(seed))
    cu = build_curtain(m)
    assert validate_curtain(cu).ok
    assert words_equal(internal_boundary(cu).braid, m.beta)
    got = meridian_monodromy(cu)
    assert len(got) == m.n
    assert all(words_equal(a, band_word(f)) for a, f in zip(got, m.images))

import itertools
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curtains.braid import BandGeneratorForm, BraidWord, band_word, invert, words_equal
from curtains.builder import drag_frames, random_band_form
from curtains.chart import (
    BLACK,
    BOUNDARY,
    CROSSING,
    UNIT_RECT,
    WHITE,
    Chart,
    ChartEdge,
    ChartError,
    ChartVertex,
    PLPath,
    PlacementError,
    apply_disk_replacement,
    apply_keyframe_isotopy,
    build_oval_nest,
    build_ribbon_chart,
    coordinates,
    free_edges,
    intersection_word,
    loop_monodromy,
    loop_removal,
    nest_depths,
    nest_meridian,
    nest_parts,
    same_geometry,
    simple_loops,
    standard_meridians,
    validate_chart,
    vertex_reading,
)
from curtains.geometry import Point, Q
from oracles import random_based_loop


def W(d, *ints):
    return BraidWord.from_ints(d, ints)


def P(x, y):
    return Point(Q(x), Q(y))


def square(x0, y0, x1, y1):
    return (P(x0, y0), P(x1, y0), P(x1, y1), P(x0, y1), P(x0, y0))


def loop_chart(d, label, orient=1):
    return Chart(d, UNIT_RECT, (), (ChartEdge("L", label, square("-1/2", "1/4", "1/2", "3/4"), orient),))


def vertical_edges(d, labels_and_signs, rect=UNIT_RECT):
    """Edges between boundary vertices at x = -3/4 + k/8, each oriented up (+) or down (-)."""
    vs, es = [], []
    for k, (label, s) in enumerate(labels_and_signs):
        x = Q(-3, 4) + Q(k, 8)
        lo, hi = P(x, 0), P(x, 1)
        vs += [ChartVertex(f"b{k}", BOUNDARY, lo), ChartVertex(f"t{k}", BOUNDARY, hi)]
        es.append(ChartEdge(f"e{k}", label, (lo, hi), s, (f"b{k}", f"t{k}")))
    return Chart(d, rect, tuple(vs), tuple(es))


def crossing_chart(d, i, j):
    c = P(0, "1/2")
    ends = [P(-1, "1/2"), P(0, 1), P(1, "1/2"), P(0, 0)]
    vs = [ChartVertex("x", CROSSING, c)]
    es = []
    for k, (p, label) in enumerate(zip(ends, (i, j, i, j))):
        vs.append(ChartVertex(f"b{k}", BOUNDARY, p))
        # label i runs left to right, label j bottom to top
        orient = 1 if k in (2, 1) else -1
        es.append(ChartEdge(f"e{k}", label, (c, p), orient, ("x", f"b{k}")))
    return Chart(d, UNIT_RECT, tuple(vs), tuple(es))


HORIZONTAL = PLPath((P(-1, "1/2"), P(1, "1/2")))


# -- validation ---------------------------------------------------------------


def test_empty_chart_is_valid():
    assert validate_chart(Chart(3, UNIT_RECT)).ok


def test_single_loop_is_valid():
    assert validate_chart(loop_chart(2, 1)).ok


def test_crossing_with_far_labels_is_valid():
    c = crossing_chart(4, 1, 3)
    assert validate_chart(c).ok
    assert words_equal(vertex_reading(c, "x"), BraidWord(4))


def test_crossing_with_adjacent_labels_is_invalid():
    rep = validate_chart(crossing_chart(4, 1, 2))
    assert not rep.ok
    assert "crossing-labels" in rep.codes()
    # the reading around the vertex would be a commutator of adjacent generators
    assert not words_equal(W(4, 1, 2), W(4, 2, 1))


def test_five_valent_vertex_is_invalid():
    c = crossing_chart(5, 1, 3)
    extra = ChartVertex("b9", BOUNDARY, P("1/2", 1))
    e = ChartEdge("e9", 1, (c.vertex_map["x"].pos, extra.pos), 1, ("x", "b9"))
    c = Chart(5, UNIT_RECT, c.vertices + (extra,), c.edges + (e,))
    assert not validate_chart(c).ok


def test_black_vertex_needs_valence_one():
    v = ChartVertex("v", BLACK, P(0, "1/2"))
    c = Chart(2, UNIT_RECT, (v,), ())
    assert not validate_chart(c).ok


def white_star(labels, orients):
    centre = P(0, "1/2")
    dirs = [(4, 0), (2, 3), (-2, 3), (-4, 0), (-2, -3), (2, -3)]
    vs = [ChartVertex("w", WHITE, centre)]
    es = []
    for k, ((dx, dy), lab, o) in enumerate(zip(dirs, labels, orients)):
        p = P(Q(dx, 8), Q(1, 2) + Q(dy, 8))
        es.append(ChartEdge(f"r{k}", lab, (centre, p), o, ("w", f"v{k}")))
        vs.append(ChartVertex(f"v{k}", BLACK, p))
    return Chart(4, UNIT_RECT, tuple(vs), tuple(es))


def test_white_vertex_orientation_patterns():
    valid = []
    for orients in itertools.product((1, -1), repeat=6):
        c = white_star((1, 2, 1, 2, 1, 2), orients)
        if validate_chart(c).ok:
            valid.append(orients)
            assert words_equal(vertex_reading(c, "w"), BraidWord(4))
    # the three outgoing ends are consecutive: six rotations of one pattern
    assert len(valid) == 6
    for o in valid:
        doubled = o + o
        assert any(doubled[k:k + 3] == (1, 1, 1) for k in range(6))


def test_white_vertex_with_far_labels_is_invalid():
    assert not validate_chart(white_star((1, 3, 1, 3, 1, 3), (1, 1, 1, -1, -1, -1))).ok


def test_edges_crossing_without_vertex_are_invalid():
    a = ChartEdge("a", 1, square("-1/2", "1/4", "1/2", "3/4"))
    b = ChartEdge("b", 1, square(0, "1/8", "3/4", "7/8"))
    assert not validate_chart(Chart(2, UNIT_RECT, (), (a, b))).ok


# -- intersection words ------------------------------------------------------------


def test_empty_chart_gives_empty_word():
    assert intersection_word(Chart(3, UNIT_RECT), HORIZONTAL) == BraidWord(3)


def test_loop_crossed_twice_cancels():
    for orient in (1, -1):
        w = intersection_word(loop_chart(3, 2, orient), HORIZONTAL)
        assert len(w) == 2 and {s for _, s in w.letters} == {1, -1}
        assert all(i == 2 for i, _ in w.letters)
        assert words_equal(w, BraidWord(3))


def test_crossing_sign_convention():
    # path to the right, edge upwards: positively oriented frame
    up = vertical_edges(2, [(1, 1)])
    assert intersection_word(up, HORIZONTAL) == W(2, 1)
    down = vertical_edges(2, [(1, -1)])
    assert intersection_word(down, HORIZONTAL) == W(2, -1)


def test_figure_reading_seven_edges():
    signs = [(1, -1), (2, -1), (1, -1), (2, 1), (2, 1), (1, 1), (2, 1)]
    c = vertical_edges(4, signs)
    assert validate_chart(c).ok
    w = intersection_word(c, HORIZONTAL)
    assert w == W(4, -1, -2, -1, 2, 2, 1, 2)
    assert words_equal(w, W(4, 1))


def test_path_with_corner_on_edge_is_perturbed():
    c = vertical_edges(3, [(1, 1)])
    # the middle corner lies on the edge itself
    p = PLPath((P(-1, "1/2"), P(Q(-3, 4), "1/2"), P(1, "1/2")))
    assert intersection_word(c, p) == W(3, 1)


def test_reversed_path_gives_inverse_word():
    c = vertical_edges(4, [(1, -1), (2, -1), (3, 1)])
    assert intersection_word(c, HORIZONTAL.reversed()) == invert(intersection_word(c, HORIZONTAL))


def test_contractible_loop_disjoint_from_chart():
    c = loop_chart(3, 1)
    base = c.basepoint
    loop = PLPath((base, P("1/4", "7/8"), P("-1/4", "7/8"), base), closed=True)
    assert loop_monodromy(c, loop) == BraidWord(3)


def test_loop_monodromy_requires_basepoint():
    c = loop_chart(3, 1)
    with pytest.raises(ChartError):
        loop_monodromy(c, PLPath((P(0, "1/2"), P("1/4", "1/2"), P(0, "1/2")), closed=True))


def test_meridian_around_free_edge_end():
    for k, e in ((1, 1), (2, -1)):
        c = build_ribbon_chart([BandGeneratorForm(BraidWord(3), k, e)])
        ms = standard_meridians(c)
        w = loop_monodromy(c, ms.left[0])
        assert words_equal(w, W(3, e * k))


@settings(max_examples=40)
@given(st.randoms(use_true_random=False))
def test_concatenated_loops_concatenate_words(rng):
    forms = [random_band_form(rng, 4, 3) for _ in range(rng.randint(1, 3))]
    c = build_ribbon_chart(forms)
    a = random_based_loop(rng, c)
    b = random_based_loop(rng, c)
    try:
        wa, wb, wab = (loop_monodromy(c, x) for x in (a, b, a + b))
    except ChartError:
        return  # no general position: resampled by other examples
    assert wab.letters == wa.letters + wb.letters


# -- oval nests and ribbon charts ------------------------------------------------------


def _nest_word(form, center=P(0, "1/2"), r=Q(1, 8)):
    c = build_oval_nest(center, r, form)
    layout, _, _ = nest_parts(center, r, form, "U")
    assert validate_chart(c).ok
    return c, loop_monodromy(c, nest_meridian(c, layout))


def test_nest_without_conjugator_is_free_edge():
    c, w = _nest_word(BandGeneratorForm(BraidWord(2), 1, 1))
    assert len(c.edges) == 1 and len(free_edges(c)) == 1
    assert words_equal(w, W(2, 1))


def test_nest_with_one_loop():
    f = BandGeneratorForm(W(3, -2), 1, 1)
    c, w = _nest_word(f)
    assert len(simple_loops(c)) == 1 and simple_loops(c)[0].label == 2
    assert free_edges(c)[0].label == 1
    assert words_equal(w, W(3, -2, 1, 2))


def test_nest_with_three_loops_outermost_first_letter():
    f = BandGeneratorForm(W(4, 3, -1, 2), 2, -1)
    c, w = _nest_word(f)
    loops = simple_loops(c)
    assert len(loops) == 3
    outer = max(loops, key=lambda e: max(p.x for p in e.polyline))
    assert outer.label == 3
    assert words_equal(w, band_word(f))


@settings(max_examples=150)
@given(st.integers(2, 5), st.data())
def test_nest_roundtrip(d, data):
    ints = data.draw(st.lists(st.integers(1, d - 1).flatmap(lambda i: st.sampled_from((i, -i))), max_size=6))
    k = data.draw(st.integers(1, d - 1))
    e = data.draw(st.sampled_from((1, -1)))
    f = BandGeneratorForm(BraidWord.from_ints(d, ints), k, e)
    _, w = _nest_word(f)
    assert words_equal(w, band_word(f))


def test_nest_collision_rejected():
    f = BandGeneratorForm(BraidWord(2), 1, 1)
    c = build_oval_nest(P(0, "1/2"), Q(1, 8), f, rect=UNIT_RECT)
    with pytest.raises(PlacementError):
        build_oval_nest(P(0, "1/2"), Q(1, 8), f, into=c, prefix="V")


def test_ribbon_chart_generators():
    c = build_ribbon_chart([BandGeneratorForm(BraidWord(3), 1), BandGeneratorForm(BraidWord(3), 2)])
    assert validate_chart(c).ok
    assert sorted(e.label for e in free_edges(c)) == [1, 2]
    assert not simple_loops(c)


def test_ribbon_chart_with_nest():
    c = build_ribbon_chart([BandGeneratorForm(BraidWord(3), 2), BandGeneratorForm(W(3, -2), 1)])
    assert validate_chart(c).ok
    assert sorted(nest_depths(c).values()) == [0, 1]
    assert [e.label for e in simple_loops(c)] == [2]


def test_ribbon_chart_empty():
    assert build_ribbon_chart([], degree=3).is_empty()


def test_ribbon_chart_is_symmetric():
    c = build_ribbon_chart([BandGeneratorForm(W(4, 1, -3), 2), BandGeneratorForm(W(4, 2), 3, -1)])
    pts = {(v.pos.x, v.pos.y) for v in c.vertices}
    assert pts == {(-x, y) for x, y in pts}
    for e in c.edges:
        xs = {p.x for p in e.polyline}
        assert {-x for x in xs} == xs


@settings(max_examples=30)
@given(st.randoms(use_true_random=False))
def test_ribbon_meridians_read_the_forms(rng):
    d = rng.randint(2, 5)
    forms = [random_band_form(rng, d, 3) for _ in range(rng.randint(1, 3))]
    c = build_ribbon_chart(forms)
    assert validate_chart(c).ok
    ms = standard_meridians(c)
    for f, path in zip(forms, ms.left):
        assert words_equal(loop_monodromy(c, path), band_word(f))
    for f, path in zip(forms, ms.right):
        assert words_equal(loop_monodromy(c, path), invert(band_word(f)))


# -- disk replacement -----------------------------------------------------------------


def test_loop_insertion_into_empty_disk():
    c = build_ribbon_chart([BandGeneratorForm(BraidWord(3), 1)])
    disk = square("3/4", "1/8", "15/16", "3/8")
    loop = ChartEdge("new", 2, square("25/32", "5/32", "29/32", "11/32"), -1)
    out = apply_disk_replacement(c, disk, Chart(3, c.rect, (), (loop,)))
    assert validate_chart(out).ok
    assert len(simple_loops(out)) == 1
    rng = random.Random(5)
    for _ in range(20):
        lp = random_based_loop(rng, c, avoid=(Q(3, 4), Q(1, 8), Q(15, 16), Q(3, 8)))
        assert words_equal(loop_monodromy(c, lp), loop_monodromy(out, lp))


def test_innermost_loop_removal():
    c = build_ribbon_chart([BandGeneratorForm(W(3, -2, 1), 1)])
    loops_only = Chart(c.degree, c.rect, (), tuple(simple_loops(c)))
    inner = min(simple_loops(c), key=lambda e: max(p.x for p in e.polyline))
    disk, empty = loop_removal(loops_only, inner.id, Q(1, 200))
    out = apply_disk_replacement(loops_only, disk, empty)
    assert validate_chart(out).ok
    assert [e.id for e in out.edges] == [e.id for e in loops_only.edges if e.id != inner.id]


def test_removing_loop_around_black_vertex_fails():
    c = build_ribbon_chart([BandGeneratorForm(W(3, -2), 1)])
    (loop,) = simple_loops(c)
    disk, empty = loop_removal(c, loop.id, Q(1, 200))
    with pytest.raises(ChartError):
        apply_disk_replacement(c, disk, empty)


def test_replacement_boundary_mismatch_fails():
    c = loop_chart(3, 1)
    disk = square(-1 + Q(1, 16), "1/8", 0, "7/8")  # cuts the loop
    with pytest.raises(ChartError):
        apply_disk_replacement(c, disk, Chart(3, c.rect))


def test_insert_then_remove_restores_chart():
    c = build_ribbon_chart([BandGeneratorForm(BraidWord(3), 2)])
    disk = square("-15/16", "1/16", "-3/4", "1/4")
    loop = ChartEdge("k", 1, square("-29/32", "3/32", "-25/32", "7/32"))
    mid = apply_disk_replacement(c, disk, Chart(3, c.rect, (), (loop,)))
    d2, empty = loop_removal(mid, "k", Q(1, 64))
    assert same_geometry(apply_disk_replacement(mid, d2, empty), c)


# -- isotopies ----------------------------------------------------------------------


def test_identity_keyframes():
    c = build_ribbon_chart([BandGeneratorForm(W(3, 1), 2)])
    snaps = apply_keyframe_isotopy(c, [coordinates(c), coordinates(c)])
    assert all(same_geometry(s, c) for s in snaps)


def test_translating_free_edge():
    c = build_ribbon_chart([BandGeneratorForm(BraidWord(2), 1)])
    shift = P(0, "-1/4")
    moved = replace(
        c,
        vertices=tuple(replace(v, pos=v.pos + shift) for v in c.vertices),
        edges=tuple(replace(e, polyline=tuple(p + shift for p in e.polyline)) for e in c.edges),
    )
    snaps = apply_keyframe_isotopy(c, [coordinates(moved)])
    assert len(snaps) == 2 and all(validate_chart(s).ok for s in snaps)


def test_crossing_keyframes_rejected():
    a = ChartEdge("a", 1, square("-3/4", "1/4", "-1/4", "3/4"))
    b = ChartEdge("b", 1, square("1/4", "1/4", "3/4", "3/4"))
    c = Chart(2, UNIT_RECT, (), (a, b))
    # slide the left loop onto the right one
    kf = coordinates(c)
    kf = {"vertices": dict(kf["vertices"]), "edges": dict(kf["edges"])}
    kf["edges"]["a"] = square("0", "1/4", "1/2", "3/4")
    with pytest.raises(ChartError):
        apply_keyframe_isotopy(c, [kf])


def test_half_twist_snapshots_are_valid():
    forms = [BandGeneratorForm(BraidWord(3), 1), BandGeneratorForm(BraidWord(3), 2)]
    ribbon = build_ribbon_chart(forms)
    for frames in drag_frames(ribbon, W(2, 1, -1, 1)):
        for snap in apply_keyframe_isotopy(frames[0], [coordinates(f) for f in frames[1:]]):
            assert validate_chart(snap).ok

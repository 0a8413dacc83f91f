"""Building a curtain that realizes given braid monodromy over a closed braid."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .braid import (
    BandGeneratorForm,
    BraidWord,
    band_word,
    hurwitz_act,
    permutation_of,
    words_equal,
)
from .chart import (
    Chart,
    PLPath,
    apply_disk_replacement,
    black_positions,
    build_ribbon_chart,
    intersection_word,
    loop_removal,
    map_chart,
    ribbon_layout,
    same_geometry,
    simplify,
    standard_meridians,
    subdivide_for,
)
from .curtain import (
    CERTIFIED_TRANSITION,
    DELETE_FREE_EDGES,
    DISK_REPLACEMENT,
    INSERT_FREE_EDGES,
    Curtain,
    CurtainEvent,
    DiskReplacement,
    FreeEdge,
    Segment,
    TransitionCertificate,
    validate_curtain,
)
from .geometry import Point, Q, half_twist_stages
from .report import ValidationReport

F = Q

# positive letters twist counterclockwise when read from the deletion level down
TWIST_DIRECTION = 1


class BuildError(ValueError):
    def __init__(self, message: str, report: ValidationReport | None = None):
        super().__init__(message)
        self.report = report


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class MonodromyData:
    """A closed braid ``beta`` in B_n with band generator images of its n meridians in B_d."""

    degree: int
    beta: BraidWord
    images: tuple[BandGeneratorForm, ...]

    @property
    def n(self) -> int:
        return self.beta.degree

    def words(self) -> list[BraidWord]:
        return [band_word(f) for f in self.images]


def validate_monodromy_data(m: MonodromyData) -> ValidationReport:
    rep = ValidationReport()
    if m.beta.degree != len(m.images):
        rep.add("length", "images", f"braid degree {m.beta.degree} needs {m.beta.degree} images, got {len(m.images)}")
        return rep
    for i, f in enumerate(m.images, start=1):
        if f.degree != m.degree:
            rep.add("degree", f"image {i}", f"degree {f.degree} differs from the cover degree {m.degree}")
            continue
        w = band_word(f)
        if not permutation_of(w).is_transposition():
            rep.add("band", f"image {i}", "permutation is not a transposition")
        if abs(w.exponent_sum()) != 1:
            rep.add("band", f"image {i}", "exponent sum is not +1 or -1")
    if not rep.ok:
        return rep
    words = m.words()
    acted = hurwitz_act(m.beta, words)
    for i, (a, b) in enumerate(zip(acted, words), start=1):
        if not words_equal(a, b):
            rep.add("hurwitz", f"image {i}", f"Hurwitz fixedness failed at index {i}")
            break
    return rep


# --------------------------------------------------------------------------
# timeline


@dataclass(frozen=True)
class BuildPlan:
    """Time bands of the construction on [-2, 2], mirrored about 0 except the middle."""

    n: int
    loop_count: int
    letters: int
    removal_times: tuple[Fraction, ...]
    bands: tuple[tuple[str, Fraction, Fraction], ...]

    def band(self, name: str) -> tuple[Fraction, Fraction]:
        for nm, a, b in self.bands:
            if nm == name:
                return a, b
        raise KeyError(name)


def plan_build(m: MonodromyData) -> BuildPlan:
    loops = sum(len(f.conjugator) for f in m.images)
    times = tuple(F(3, 2) + F(k, 2 * (loops + 1)) for k in range(1, loops + 1))
    bands = (
        ("cap-", F(-2), F(-1)),
        ("ribbon-", F(-1), F(-1, 2)),
        ("certified", F(-1, 2), F(0)),
        ("drag", F(0), F(1, 2)),
        ("ribbon+", F(1, 2), F(1)),
        ("cap+", F(1), F(2)),
    )
    return BuildPlan(len(m.images), loops, len(m.beta), times, bands)


# --------------------------------------------------------------------------
# construction pieces


def ribbon_free_edges(c: Chart, n: int) -> list[FreeEdge]:
    out = []
    for i in range(1, n + 1):
        e = c.edge_map[f"U{i}:A"]
        out.append(FreeEdge(e, c.vertex_map[f"U{i}-"], c.vertex_map[f"U{i}+"]))
    return out


def _remove_free_edges(c: Chart, edges: Sequence[FreeEdge]) -> Chart:
    eids = {f.edge.id for f in edges}
    vids = {v.id for f in edges for v in (f.start, f.end)}
    return Chart(
        c.degree, c.rect,
        tuple(v for v in c.vertices if v.id not in vids),
        tuple(e for e in c.edges if e.id not in eids),
    )


def loop_removals(c: Chart, m: MonodromyData) -> list[tuple[str, tuple[Point, ...], Chart]]:
    """Loop ids innermost-first per nest, with their removal disks and the charts after each step."""
    layout = ribbon_layout(len(m.images), m.images)
    steps = []
    cur = c
    for i, (f, nest) in enumerate(zip(m.images, layout.nests), start=1):
        for j in range(1, len(f.conjugator) + 1):
            lid = f"U{i}:L{j}"
            disk, empty = loop_removal(cur, lid, nest.spacing / 2)
            cur = apply_disk_replacement(cur, disk, empty)
            steps.append((lid, disk, cur))
    return steps


def twist_geometry(n: int, j: int) -> tuple[Point, tuple[Fraction, Fraction, Fraction]]:
    """Centre and ring radii for swapping the right ends at heights q_j and q_{j+1}."""
    s = F(1, n + 1)
    center = Point(F(1, 2), (F(j) + F(j + 1)) * s / 2)
    return center, (s * F(5, 8), s * F(15, 16), s * F(5, 4))


def drag_frames(ribbon: Chart, beta: BraidWord, direction: int = TWIST_DIRECTION) -> list[list[Chart]]:
    """Per letter of ``beta``: the keyframes [before, quarter, after] of its half twist."""
    n = beta.degree
    cur = ribbon
    out = []
    for j, e in beta.letters:
        center, radii = twist_geometry(n, j)
        stages = half_twist_stages(center, radii, direction * e)
        sub = subdivide_for(cur, stages[1:2])  # all stages share the source triangulation
        frames = [sub, map_chart(sub, stages[1]), map_chart(sub, stages[2])]
        out.append(frames)
        cur = simplify(frames[-1])
    return out


def certify_transition(
    chart_a: Chart, chart_b: Chart, meridians: Sequence[PLPath]
) -> TransitionCertificate:
    """Certificate that ``chart_a`` and ``chart_b`` agree on every meridian, or raise."""
    if black_positions(chart_a) != black_positions(chart_b):
        raise CertificateError("the charts have different black vertex sets")
    words_a = tuple(intersection_word(chart_a, p) for p in meridians)
    words_b = tuple(intersection_word(chart_b, p) for p in meridians)
    for k, (a, b) in enumerate(zip(words_a, words_b), start=1):
        if not words_equal(a, b):
            raise CertificateError(f"monodromy tuples differ at meridian {k}")
    return TransitionCertificate(chart_a, chart_b, tuple(meridians), words_a, words_b)


def build_curtain(m: MonodromyData, *, verify: bool = True, direction: int = TWIST_DIRECTION) -> Curtain:
    """Curtain on [-2, 2] whose internal boundary is the closure of ``m.beta`` and whose
    meridians carry ``m.images``.

    Bands (mirrored for negative times): loops removed one at a time in
    (3/2, 2), loops only in (1, 3/2], free edges deleted at 1, the ribbon
    chart on [1/2, 1], and the braid drag on [0, 1/2].  On [-1/2, 0] the dragged
    chart is joined to the ribbon chart by a certified transition at -1/4.
    """
    rep = validate_monodromy_data(m)
    if not rep.ok:
        raise BuildError(str(rep), rep)
    plan = plan_build(m)
    n, d = plan.n, m.degree
    ribbon = build_ribbon_chart(m.images, degree=d)
    free = ribbon_free_edges(ribbon, n)
    loops_only = _remove_free_edges(ribbon, free)
    removals = loop_removals(loops_only, m)
    states = [loops_only] + [c for _, _, c in removals]
    times = plan.removal_times

    # positive side, listed in increasing time
    pos_segments: list[Segment] = []
    pos_events: list[CurtainEvent] = []
    frames = drag_frames(ribbon, m.beta, direction)
    L = len(frames)
    if L:
        for k in reversed(range(L)):
            t0 = F(1, 2) - F(k + 1, 2 * L)
            t1 = F(1, 2) - F(k, 2 * L)
            pos_segments.append(Segment(t0, t1, tuple(reversed(frames[k]))))
        c0 = frames[-1][-1]
    else:
        pos_segments.append(Segment(F(0), F(1, 2), (ribbon,)))
        c0 = ribbon
    pos_segments.append(Segment(F(1, 2), F(1), (ribbon,)))
    pos_events.append(CurtainEvent(F(1), DELETE_FREE_EDGES, tuple(free)))
    bounds = [F(1)] + list(times) + [F(2)]
    for k, state in enumerate(states):
        pos_segments.append(Segment(bounds[k], bounds[k + 1], (state,)))
        if k < len(removals):
            _, disk, _ = removals[k]
            pos_events.append(CurtainEvent(times[k], DISK_REPLACEMENT, DiskReplacement(disk, Chart(d, ribbon.rect))))

    # negative side: mirror of the caps and the ribbon band
    neg_segments: list[Segment] = []
    neg_events: list[CurtainEvent] = []
    for k in reversed(range(len(states))):
        neg_segments.append(Segment(-bounds[k + 1], -bounds[k], (states[k],)))
        if k:
            lid, disk, _ = removals[k - 1]
            loop = states[k - 1].edge_map[lid]
            neg_events.append(
                CurtainEvent(-times[k - 1], DISK_REPLACEMENT, DiskReplacement(disk, Chart(d, ribbon.rect, (), (loop,))))
            )
    neg_events.append(CurtainEvent(F(-1), INSERT_FREE_EDGES, tuple(free)))
    if same_geometry(c0, ribbon):
        neg_segments.append(Segment(F(-1), F(0), (ribbon,)))
    else:
        cert = certify_transition(ribbon, c0, standard_meridians(ribbon).all())
        neg_segments.append(Segment(F(-1), F(-1, 4), (ribbon,)))
        neg_events.append(CurtainEvent(F(-1, 4), CERTIFIED_TRANSITION, cert))
        neg_segments.append(Segment(F(-1, 4), F(0), (c0,)))

    cu = Curtain(
        d, (F(-2), F(2)),
        tuple(neg_segments + pos_segments),
        tuple(neg_events + pos_events),
        reference_time=F(3, 4),
    )
    if verify:
        rep = validate_curtain(cu)
        if not rep.ok:
            raise BuildError(f"constructed curtain is invalid:\n{rep}", rep)
    return cu


# --------------------------------------------------------------------------
# admissible data


def random_word(rng: random.Random, degree: int, max_len: int) -> BraidWord:
    if degree < 2:
        return BraidWord(degree)
    k = rng.randint(0, max_len)
    return BraidWord(degree, tuple((rng.randint(1, degree - 1), rng.choice((1, -1))) for _ in range(k)))


def random_band_form(rng: random.Random, degree: int, max_conj: int) -> BandGeneratorForm:
    return BandGeneratorForm(random_word(rng, degree, max_conj), rng.randint(1, degree - 1), rng.choice((1, -1)))


def conjugate_forms(forms: Sequence[BandGeneratorForm], w: BraidWord) -> tuple[BandGeneratorForm, ...]:
    return tuple(BandGeneratorForm(w * f.conjugator, f.index, f.sign) for f in forms)


def is_hurwitz_fixed(beta: BraidWord, forms: Sequence[BandGeneratorForm]) -> bool:
    words = [band_word(f) for f in forms]
    return all(words_equal(a, b) for a, b in zip(hurwitz_act(beta, words), words))


def random_admissible_data(
    rng: random.Random,
    max_n: int = 3,
    max_d: int = 4,
    max_beta: int = 4,
    max_conj: int = 3,
    attempts: int = 60,
) -> MonodromyData:
    """Random Hurwitz-fixed data found by search.

    A base tuple with conjugators of length <= 1 is searched for among random
    candidates (falling back to a constant tuple, which every braid fixes), and
    the whole tuple is then conjugated by a random word.  Fixedness is preserved
    by simultaneous conjugation, and is re-checked anyway.
    """
    n = rng.randint(1, max_n)
    d = rng.randint(2, max_d)
    beta = random_word(rng, n, max_beta)
    base = None
    for _ in range(attempts):
        cand = tuple(random_band_form(rng, d, 1) for _ in range(n))
        if is_hurwitz_fixed(beta, cand):
            base = cand
            break
    if base is None:
        f = random_band_form(rng, d, 1)
        base = (f,) * n
    spare = max_conj - max(len(f.conjugator) for f in base)
    forms = conjugate_forms(base, random_word(rng, d, max(spare, 0)))
    if not is_hurwitz_fixed(beta, forms):
        raise AssertionError("conjugation broke Hurwitz fixedness")
    return MonodromyData(d, beta, forms)

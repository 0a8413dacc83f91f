"""Charts: labeled oriented PL graphs in a rectangle, read through intersection words.

Conventions (fixed; see ``ChartConventions``):

* An edge's direction runs along its polyline when ``orient == 1`` and
  against it when ``orient == -1``.
* A path crossing an edge reads ``σ_label^ε`` with ``ε = +1`` exactly when
  ``(path tangent, edge direction)`` is a positively oriented frame.
* The basepoint ``q0*`` is the midpoint of the top side of the rectangle.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .braid import BandGeneratorForm, BraidWord, words_equal
from .geometry import (
    CROSS,
    Q,
    BBox,
    PLMap,
    Point,
    cross,
    lerp,
    linf_point_segment,
    on_segment,
    orient,
    point_in_polygon,
    polygon_area2,
    pt,
    remove_collinear,
    segment_intersection,
)
from .report import ValidationReport

BLACK = "black"
CROSSING = "crossing"
WHITE = "white"
BOUNDARY = "boundary"
VERTEX_KINDS = (BLACK, CROSSING, WHITE, BOUNDARY)
VALENCE = {BLACK: 1, BOUNDARY: 1, CROSSING: 4, WHITE: 6}


class ChartError(ValueError):
    pass


class GeneralPositionError(ChartError):
    """A path could not be put in general position with respect to a chart."""


class PlacementError(ChartError):
    pass


@dataclass(frozen=True)
class ChartConventions:
    """Tunable conventions for the pictorial parts of the chart definition.

    ``sign`` flips every crossing sign.  ``white_pattern`` is
    ``"consecutive"`` (three incoming edge-ends adjacent in the cyclic order)
    or ``"reading"`` (only the small-circle identity check).
    """

    sign: int = 1
    white_pattern: str = "consecutive"


DEFAULT_CONVENTIONS = ChartConventions()


@dataclass(frozen=True)
class ChartVertex:
    id: str
    kind: str
    pos: Point


@dataclass(frozen=True)
class ChartEdge:
    id: str
    label: int
    polyline: tuple[Point, ...]
    orient: int = 1
    ends: tuple[str, str] | None = None

    @property
    def closed(self) -> bool:
        return self.ends is None

    def directed(self) -> tuple[Point, ...]:
        """Polyline listed in the edge's direction."""
        return self.polyline if self.orient == 1 else tuple(reversed(self.polyline))


@dataclass(frozen=True)
class Chart:
    degree: int
    rect: tuple[Fraction, Fraction, Fraction, Fraction]
    vertices: tuple[ChartVertex, ...] = ()
    edges: tuple[ChartEdge, ...] = ()

    @property
    def basepoint(self) -> Point:
        x0, _, x1, y1 = self.rect
        return Point((x0 + x1) / 2, y1)

    @functools.cached_property
    def vertex_map(self) -> dict[str, ChartVertex]:
        return {v.id: v for v in self.vertices}

    @functools.cached_property
    def edge_map(self) -> dict[str, ChartEdge]:
        return {e.id: e for e in self.edges}

    @functools.cached_property
    def segments(self) -> list[tuple[str, int, Point, Point, BBox]]:
        out = []
        for e in self.edges:
            for k, (a, b) in enumerate(zip(e.polyline, e.polyline[1:])):
                out.append((e.id, k, a, b, BBox.of((a, b))))
        return out

    def black_vertices(self) -> list[ChartVertex]:
        return [v for v in self.vertices if v.kind == BLACK]

    def domain(self) -> tuple[Point, ...]:
        return rect_polygon(self.rect)

    def is_empty(self) -> bool:
        return not self.vertices and not self.edges


def rect_polygon(rect) -> tuple[Point, ...]:
    x0, y0, x1, y1 = rect
    return (Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1), Point(x0, y0))


def make_rect(x0, y0, x1, y1) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    return (Q(x0), Q(y0), Q(x1), Q(y1))


UNIT_RECT = make_rect(-1, 0, 1, 1)


@dataclass(frozen=True)
class PLPath:
    points: tuple[Point, ...]
    closed: bool = False

    def __post_init__(self):
        if len(self.points) < 2:
            raise ChartError("a path needs at least two points")
        if self.closed and self.points[0] != self.points[-1]:
            raise ChartError("closed path must end where it starts")

    def reversed(self) -> "PLPath":
        return PLPath(tuple(reversed(self.points)), self.closed)

    def __add__(self, other: "PLPath") -> "PLPath":
        if self.points[-1] != other.points[0]:
            raise ChartError("paths do not concatenate")
        closed = self.points[0] == other.points[-1]
        return PLPath(self.points + other.points[1:], closed)


# --------------------------------------------------------------------------
# local structure


def _edge_ends(c: Chart) -> dict[str, list[tuple[ChartEdge, bool, Point]]]:
    """vertex id -> [(edge, outgoing, direction away from the vertex)]."""
    ends: dict[str, list] = {v.id: [] for v in c.vertices}
    for e in c.edges:
        if e.ends is None or len(e.polyline) < 2:
            continue
        u, v = e.ends
        p = e.polyline
        if u in ends:
            ends[u].append((e, e.orient == 1, p[1] - p[0]))
        if v in ends:
            ends[v].append((e, e.orient == -1, p[-2] - p[-1]))
    return ends


def _half(v: Point) -> int:
    return 0 if (v.y > 0 or (v.y == 0 and v.x > 0)) else 1


def _angle_cmp(a: Point, b: Point) -> int:
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha - hb
    c = cross(a, b)
    return -1 if c > 0 else (1 if c < 0 else 0)


def clockwise_ends(c: Chart, vertex_id: str) -> list[tuple[ChartEdge, bool, Point]]:
    ends = _edge_ends(c)[vertex_id]
    ccw = sorted(ends, key=functools.cmp_to_key(lambda s, t: _angle_cmp(s[2], t[2])))
    return list(reversed(ccw))


def vertex_reading(c: Chart, vertex_id: str, conventions: ChartConventions = DEFAULT_CONVENTIONS) -> BraidWord:
    """Word read along a small clockwise circle around a vertex."""
    letters = tuple(
        (e.label, conventions.sign * (1 if outgoing else -1))
        for e, outgoing, _ in clockwise_ends(c, vertex_id)
    )
    return BraidWord(c.degree, letters)


# --------------------------------------------------------------------------
# validation


def validate_chart(c: Chart, conventions: ChartConventions = DEFAULT_CONVENTIONS) -> ValidationReport:
    """Check every chart invariant; an empty report means ``c`` is a chart."""
    if conventions is not DEFAULT_CONVENTIONS:
        return _validate(c, c.domain(), conventions)
    # charts are immutable, so the issues can be kept on the instance
    issues = c.__dict__.get("_issues")
    if issues is None:
        issues = tuple(_validate(c, c.domain(), conventions).issues)
        object.__setattr__(c, "_issues", issues)
    return ValidationReport(list(issues))


def _where(p: Point, domain: Sequence[Point], rect) -> int:
    if rect is None:
        return point_in_polygon(p, domain)
    x0, y0, x1, y1 = rect
    if x0 < p.x < x1 and y0 < p.y < y1:
        return 1
    if x0 <= p.x <= x1 and y0 <= p.y <= y1:
        return 0
    return -1


def _validate(c: Chart, domain: Sequence[Point], conventions: ChartConventions) -> ValidationReport:
    rep = ValidationReport()
    rect = c.rect if tuple(domain) == rect_polygon(c.rect) else None
    d = c.degree
    if d < 1:
        rep.add("degree", "chart", f"degree must be >= 1, got {d}")
        return rep
    vids = [v.id for v in c.vertices]
    eids = [e.id for e in c.edges]
    for ids, what in ((vids, "vertex"), (eids, "edge")):
        dup = {i for i in ids if ids.count(i) > 1}
        for i in sorted(dup):
            rep.add("duplicate-id", f"{what} {i}", "identifier used more than once")
    vmap = c.vertex_map

    for v in c.vertices:
        if v.kind not in VERTEX_KINDS:
            rep.add("vertex-kind", f"vertex {v.id}", f"unknown kind {v.kind!r}")
            continue
        where = _where(v.pos, domain, rect)
        if v.kind == BOUNDARY and where != 0:
            rep.add("boundary-vertex", f"vertex {v.id}", "boundary vertex must lie on the domain boundary")
        if v.kind != BOUNDARY and where != 1:
            rep.add("interior-vertex", f"vertex {v.id}", f"{v.kind} vertex must lie in the interior")

    for e in c.edges:
        subj = f"edge {e.id}"
        if not 1 <= e.label <= d - 1:
            rep.add("label", subj, f"label {e.label} outside 1..{d - 1}")
        if e.orient not in (1, -1):
            rep.add("orient", subj, "orientation must be +1 or -1")
        p = e.polyline
        if len(p) < 2 or any(a == b for a, b in zip(p, p[1:])):
            rep.add("polyline", subj, "degenerate polyline")
            continue
        if e.ends is None:
            if p[0] != p[-1] or len(p) < 4:
                rep.add("closed-loop", subj, "closed loop must return to its first point")
        else:
            for end, q in zip(e.ends, (p[0], p[-1])):
                if end not in vmap:
                    rep.add("dangling", subj, f"endpoint vertex {end} does not exist")
                elif vmap[end].pos != q:
                    rep.add("endpoint", subj, f"polyline does not end at vertex {end}")
        for k, q in enumerate(p):
            at_boundary_vertex = (
                e.ends is not None
                and ((k == 0 and vmap.get(e.ends[0]) is not None and vmap[e.ends[0]].kind == BOUNDARY)
                     or (k == len(p) - 1 and vmap.get(e.ends[1]) is not None and vmap[e.ends[1]].kind == BOUNDARY))
            )
            if not at_boundary_vertex and _where(q, domain, rect) != 1:
                rep.add("outside", subj, f"point {q} is not in the interior of the domain")
                break

    if not rep.ok:
        return rep

    ends = _edge_ends(c)
    for v in c.vertices:
        val = len(ends[v.id])
        if val != VALENCE[v.kind]:
            if val == 1 and v.kind != BOUNDARY:
                rep.add("valence", f"vertex {v.id}", f"interior degree-1 vertex must be black, got {v.kind}")
            else:
                rep.add("valence", f"vertex {v.id}", f"{v.kind} vertex has valence {val}, expected {VALENCE[v.kind]}")

    _check_embedded(c, rep)
    if not rep.ok:
        return rep

    for v in c.vertices:
        if v.kind == CROSSING:
            _check_crossing(c, v, rep, conventions)
        elif v.kind == WHITE:
            _check_white(c, v, rep, conventions)
    return rep


def _check_crossing(c, v, rep, conventions):
    ends = clockwise_ends(c, v.id)
    labels = [e.label for e, _, _ in ends]
    i, j = labels[0], labels[1]
    if labels != [i, j, i, j]:
        rep.add("crossing-pattern", f"vertex {v.id}", f"labels must alternate around a crossing, got {labels}")
        return
    if abs(i - j) < 2:
        rep.add("crossing-labels", f"vertex {v.id}", "crossing labels must differ by >= 2")
    for a, b in ((0, 2), (1, 3)):
        if ends[a][1] == ends[b][1]:
            rep.add("crossing-orientation", f"vertex {v.id}", "opposite edge-ends must continue through the crossing")
    if not words_equal(vertex_reading(c, v.id, conventions), BraidWord(c.degree)):
        rep.add("vertex-reading", f"vertex {v.id}", "small-circle reading is not the identity")


def _check_white(c, v, rep, conventions):
    ends = clockwise_ends(c, v.id)
    labels = [e.label for e, _, _ in ends]
    i, j = labels[0], labels[1]
    if labels != [i, j] * 3:
        rep.add("white-pattern", f"vertex {v.id}", f"labels must alternate around a white vertex, got {labels}")
        return
    if abs(i - j) != 1:
        rep.add("white-labels", f"vertex {v.id}", "white vertex labels must differ by exactly 1")
    incoming = [not out for _, out, _ in ends]
    if sum(incoming) != 3:
        rep.add("white-orientation", f"vertex {v.id}", "white vertex needs exactly three incoming edge-ends")
    elif conventions.white_pattern == "consecutive":
        rotations = [incoming[k:] + incoming[:k] for k in range(6)]
        if [True] * 3 + [False] * 3 not in rotations:
            rep.add("white-orientation", f"vertex {v.id}", "incoming edge-ends must be consecutive")
    if not words_equal(vertex_reading(c, v.id, conventions), BraidWord(c.degree)):
        rep.add("vertex-reading", f"vertex {v.id}", "small-circle reading is not the identity")


def _check_embedded(c: Chart, rep: ValidationReport) -> None:
    """Edges are embedded and meet only at shared vertices."""
    segs = c.segments
    vertex_at = {v.pos: v.id for v in c.vertices}
    nseg = {e.id: len(e.polyline) - 1 for e in c.edges}
    closed = {e.id for e in c.edges if e.ends is None}
    boxes = [(s[4].x0 - 1e-9, s[4].y0 - 1e-9, s[4].x1 + 1e-9, s[4].y1 + 1e-9) for s in segs]
    order = sorted(range(len(segs)), key=lambda k: boxes[k][0])
    active: list[int] = []
    reported: set[tuple[str, str]] = set()
    for k in order:
        eid, idx, a, b, _ = segs[k]
        x0, y0, x1, y1 = boxes[k]
        active = [m for m in active if boxes[m][2] >= x0]
        for m in active:
            bx0, by0, bx1, by1 = boxes[m]
            if bx0 > x1 or by1 < y0 or by0 > y1:
                continue
            fid, jdx, c0, c1, _ = segs[m]
            hit = segment_intersection(a, b, c0, c1)
            if hit is None:
                continue
            if _allowed_contact(eid, idx, a, b, fid, jdx, c0, c1, nseg, closed, vertex_at, hit):
                continue
            key = tuple(sorted((eid, fid)))
            if key not in reported:
                reported.add(key)
                what = "self-intersection" if eid == fid else f"meets edge {fid}"
                rep.add("embedding", f"edge {eid}", f"{what} away from a shared vertex")
        active.append(k)


def _allowed_contact(eid, idx, a, b, fid, jdx, c0, c1, nseg, closed, vertex_at, hit) -> bool:
    if hit[0] == CROSS:
        return False
    shared = {a, b} & {c0, c1}
    if len(shared) != 1:
        return False
    s = shared.pop()
    if eid == fid:
        n = nseg[eid]
        neighbours = abs(idx - jdx) == 1 or (eid in closed and {idx, jdx} == {0, n - 1})
        if not neighbours:
            return False
    else:
        if s not in vertex_at:
            return False
        for k, p, q, e in ((idx, a, b, eid), (jdx, c0, c1, fid)):
            if not ((k == 0 and p == s) or (k == nseg[e] - 1 and q == s)):
                return False
    u = b if a == s else a
    w = c1 if c0 == s else c0
    return not (on_segment(u, c0, c1) or on_segment(w, a, b))


# --------------------------------------------------------------------------
# intersection words


def _degenerate_contacts(c: Chart, path: PLPath) -> list[str]:
    problems = []
    for k, (p, q) in enumerate(zip(path.points, path.points[1:])):
        if p == q:
            continue
        pb = BBox.of((p, q))
        for eid, _, a, b, bb in c.segments:
            if not pb.overlaps(bb):
                continue
            hit = segment_intersection(p, q, a, b)
            if hit is not None and hit[0] != CROSS:
                problems.append(f"path segment {k} touches edge {eid}")
    return problems


def _perturbed(path: PLPath, attempt: int, scale: Fraction) -> PLPath:
    delta = scale / (10 ** (4 + attempt)) / 7
    pts = list(path.points)
    for k in range(1, len(pts) - 1):
        ox = Q((k * 37 + attempt * 5) % 11 - 5)
        oy = Q((k * 53 + attempt * 3) % 13 - 6)
        pts[k] = Point(pts[k].x + ox * delta, pts[k].y + oy * delta)
    return PLPath(tuple(pts), path.closed)


def general_position(c: Chart, path: PLPath, attempts: int = 3) -> PLPath:
    """Return ``path`` or a deterministic small perturbation of it in general position."""
    if not _degenerate_contacts(c, path):
        return path
    scale = c.rect[2] - c.rect[0]
    for attempt in range(1, attempts + 1):
        cand = _perturbed(path, attempt, scale)
        if not _degenerate_contacts(c, cand):
            return cand
    raise GeneralPositionError(
        "path is not in general position after perturbation: "
        + "; ".join(_degenerate_contacts(c, path)[:3])
    )


def intersection_word(
    c: Chart, path: PLPath, conventions: ChartConventions = DEFAULT_CONVENTIONS
) -> BraidWord:
    """Signed labels of the edges crossed by ``path``, in path order."""
    path = general_position(c, path)
    hits = []
    emap = c.edge_map
    for k, (p, q) in enumerate(zip(path.points, path.points[1:])):
        if p == q:
            continue
        pb = BBox.of((p, q))
        d = q - p
        for eid, _, a, b, bb in c.segments:
            if not pb.overlaps(bb):
                continue
            hit = segment_intersection(p, q, a, b)
            if hit is None:
                continue
            e = emap[eid]
            edir = (b - a) if e.orient == 1 else (a - b)
            sign = 1 if cross(d, edir) > 0 else -1
            hits.append((k, hit[1], e.label, conventions.sign * sign))
    hits.sort(key=lambda h: (h[0], h[1]))
    return BraidWord(c.degree, tuple((lab, s) for _, _, lab, s in hits))


def loop_monodromy(c: Chart, loop: PLPath, conventions: ChartConventions = DEFAULT_CONVENTIONS) -> BraidWord:
    if not loop.closed or loop.points[0] != c.basepoint:
        raise ChartError("monodromy loops must be closed at the basepoint")
    return intersection_word(c, loop, conventions)


# --------------------------------------------------------------------------
# meridians


def small_loop(target: Point, rho: Fraction, side: str) -> tuple[Point, ...]:
    """Counterclockwise square of half-width ``rho`` entered at height ``target.y + rho/2``."""
    x, y = target
    h = rho / 2
    if side == "west":
        return (
            Point(x - rho, y + h), Point(x - rho, y - rho), Point(x + rho, y - rho),
            Point(x + rho, y + rho), Point(x - rho, y + rho), Point(x - rho, y + h),
        )
    return (
        Point(x + rho, y + h), Point(x + rho, y + rho), Point(x - rho, y + rho),
        Point(x - rho, y - rho), Point(x + rho, y - rho), Point(x + rho, y + h),
    )


def hurwitz_meridian(
    basepoint: Point, corridor_x: Fraction, top_y: Fraction, target: Point, rho: Fraction, side: str
) -> PLPath:
    """Arc from the basepoint down a vertical corridor to ``target``, a small loop, and back."""
    approach = (basepoint, Point(corridor_x, top_y), Point(corridor_x, target.y + rho / 2))
    loop = small_loop(target, rho, side)
    pts = approach + loop + tuple(reversed(approach))
    return PLPath(pts, closed=True)


def clearance(c: Chart, v: ChartVertex) -> Fraction:
    """L∞ radius around ``v`` meeting only the first segment of its own edge."""
    best = None
    for e in c.edges:
        segs = list(zip(e.polyline, e.polyline[1:]))
        for k, (a, b) in enumerate(segs):
            own = e.ends is not None and (
                (k == 0 and e.polyline[0] == v.pos) or (k == len(segs) - 1 and e.polyline[-1] == v.pos)
            )
            dist = max(abs(b.x - a.x), abs(b.y - a.y)) if own else linf_point_segment(v.pos, a, b)
            best = dist if best is None else min(best, dist)
    for w in c.vertices:
        if w.id != v.id:
            dist = max(abs(w.pos.x - v.pos.x), abs(w.pos.y - v.pos.y))
            best = dist if best is None else min(best, dist)
    return best if best is not None else Q(1)


@dataclass(frozen=True)
class MeridianSystem:
    """Hurwitz-arc meridians around the black vertices left and right of the y-axis."""

    left: tuple[PLPath, ...]
    right: tuple[PLPath, ...]
    left_points: tuple[Point, ...]
    right_points: tuple[Point, ...]

    def all(self) -> tuple[PLPath, ...]:
        return self.left + self.right


def standard_meridians(c: Chart, split_x: Fraction = Q(0)) -> MeridianSystem:
    """Meridian loops for the black vertices, approached from the outer sides.

    Left points (x < split_x) are reached through vertical corridors between the
    chart and the left side of the rectangle, lower points using corridors
    further out; right points symmetrically.
    """
    x0, _, x1, y1 = c.rect
    pts = [p for e in c.edges for p in e.polyline] + [v.pos for v in c.vertices]
    blacks = c.black_vertices()
    left = sorted((v for v in blacks if v.pos.x < split_x), key=lambda v: (v.pos.y, v.pos.x))
    right = sorted((v for v in blacks if v.pos.x >= split_x), key=lambda v: (v.pos.y, -v.pos.x))
    if not pts:
        return MeridianSystem((), (), (), ())
    xmin = min(p.x for p in pts)
    xmax = max(p.x for p in pts)
    ymax = max(p.y for p in pts)
    top_y = (ymax + y1) / 2
    base = c.basepoint

    def build(vs, side):
        out = []
        n = len(vs)
        for i, v in enumerate(vs, start=1):
            if side == "west":
                cx = x0 + (xmin - x0) * i / (n + 1)
            else:
                cx = x1 - (x1 - xmax) * i / (n + 1)
            rho = clearance(c, v) / 2
            out.append(hurwitz_meridian(base, cx, top_y, v.pos, rho, side))
        return tuple(out)

    return MeridianSystem(
        build(left, "west"), build(right, "east"),
        tuple(v.pos for v in left), tuple(v.pos for v in right),
    )


# --------------------------------------------------------------------------
# oval nests and ribbon charts


def _rect_loop(x0, y0, x1, y1) -> tuple[Point, ...]:
    return (Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1), Point(x0, y0))


@dataclass(frozen=True)
class NestLayout:
    center: Point
    half_length: Fraction
    spacing: Fraction
    depth: int

    @property
    def bbox(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        r = self.spacing * self.depth
        cx, cy = self.center
        return (cx - self.half_length - r, cy - r, cx + self.half_length + r, cy + r)


def nest_parts(
    center: Point, base_radius: Fraction, form: BandGeneratorForm, prefix: str, half_length: Fraction | None = None
) -> tuple[NestLayout, list[ChartVertex], list[ChartEdge]]:
    """Vertices and edges of an oval nest: a free edge inside ``|w|`` rectangular loops.

    Loop ``j`` (1 = innermost) sits at offset ``j * spacing`` from the free edge
    with ``spacing = base_radius / (|w| + 1)``; the outermost loop carries the
    first letter of ``w``.
    """
    base_radius = Q(base_radius)
    a = Q(half_length) if half_length is not None else base_radius
    w = form.conjugator.letters
    m = len(w)
    g = base_radius / (m + 1)
    cx, cy = center
    layout = NestLayout(center, a, g, m)
    left, right = Point(cx - a, cy), Point(cx + a, cy)
    vertices = [ChartVertex(f"{prefix}-", BLACK, left), ChartVertex(f"{prefix}+", BLACK, right)]
    # a counterclockwise meridian around the left end reads σ_k^-orient
    edges = [ChartEdge(f"{prefix}:A", form.index, (left, right), -form.sign, (f"{prefix}-", f"{prefix}+"))]
    for j in range(1, m + 1):
        label, sign = w[m - j]
        r = j * g
        # crossing the left side rightwards reads σ^-orient on a counterclockwise loop
        edges.append(ChartEdge(f"{prefix}:L{j}", label, _rect_loop(cx - a - r, cy - r, cx + a + r, cy + r), -sign))
    return layout, vertices, edges


def _collides(c: Chart, bbox) -> bool:
    x0, y0, x1, y1 = bbox
    box = _rect_loop(x0, y0, x1, y1)
    for v in c.vertices:
        if point_in_polygon(v.pos, box) >= 0:
            return True
    for _, _, a, b, _ in c.segments:
        if point_in_polygon(a, box) >= 0 or point_in_polygon(b, box) >= 0:
            return True
        for p, q in zip(box, box[1:]):
            if segment_intersection(a, b, p, q) is not None:
                return True
    return False


def build_oval_nest(
    center: Point,
    base_radius: Fraction,
    form: BandGeneratorForm,
    *,
    into: Chart | None = None,
    half_length: Fraction | None = None,
    prefix: str = "U",
    rect=None,
) -> Chart:
    """Place an oval nest realizing ``w σ_k^ε w^-1``.

    With ``into`` the nest is added to an existing chart (which must leave room
    for it); otherwise a fresh chart is made whose rectangle leaves a margin
    wide enough for the nest's Hurwitz meridian.
    """
    center = Point(Q(center[0]), Q(center[1]))
    layout, vs, es = nest_parts(center, base_radius, form, prefix, half_length)
    bx0, by0, bx1, by1 = layout.bbox
    if into is None:
        if rect is None:
            m = (bx1 - bx0) / 2 + Q(base_radius)
            rect = (bx0 - m, by0 - m, bx1 + m, by1 + m)
        into = Chart(form.degree, make_rect(*rect))
    if into.degree != form.degree:
        raise PlacementError(f"nest degree {form.degree} differs from chart degree {into.degree}")
    rx0, ry0, rx1, ry1 = into.rect
    if not (rx0 < bx0 and bx1 < rx1 and ry0 < by0 and by1 < ry1):
        raise PlacementError("nest does not fit inside the chart rectangle")
    if _collides(into, layout.bbox):
        raise PlacementError("nest placement collides with existing chart parts")
    taken = set(into.vertex_map) | set(into.edge_map)
    if any(x.id in taken for x in vs + es):
        raise PlacementError(f"identifier prefix {prefix!r} already used")
    return replace(into, vertices=into.vertices + tuple(vs), edges=into.edges + tuple(es))


def nest_meridian(c: Chart, layout: NestLayout) -> PLPath:
    """Hurwitz meridian of a nest: approach the left black vertex from the west."""
    bx0, _, _, by1 = layout.bbox
    x0, _, _, y1 = c.rect
    rho = layout.spacing / 2
    target = Point(layout.center.x - layout.half_length, layout.center.y)
    return hurwitz_meridian(c.basepoint, (x0 + bx0) / 2, (by1 + y1) / 2, target, rho, "west")


@dataclass(frozen=True)
class RibbonLayout:
    n: int
    heights: tuple[Fraction, ...]
    radius: Fraction
    nests: tuple[NestLayout, ...]


def ribbon_layout(n: int, forms: Sequence[BandGeneratorForm] = ()) -> RibbonLayout:
    """Nest centres on the y-axis at heights i/(n+1), free edges from x=-1/2 to 1/2."""
    heights = tuple(Q(i, n + 1) for i in range(1, n + 1))
    radius = Q(1, 4 * (n + 1))
    nests = tuple(
        NestLayout(Point(Q(0), h), Q(1, 2), radius / (len(f.conjugator) + 1), len(f.conjugator))
        for h, f in zip(heights, forms)
    )
    return RibbonLayout(n, heights, radius, nests)


def build_ribbon_chart(
    forms: Sequence[BandGeneratorForm],
    placements: Sequence[tuple[Point, Fraction]] | None = None,
    degree: int | None = None,
) -> Chart:
    """Disjoint union of oval nests, one per band generator, in the rectangle [-1,1]x[0,1].

    The i-th free edge is the segment from (-1/2, q_i) to (1/2, q_i).
    """
    if not forms:
        return Chart(degree or 1, UNIT_RECT)
    d = forms[0].degree
    if any(f.degree != d for f in forms):
        raise PlacementError("band generators have different degrees")
    layout = ribbon_layout(len(forms), forms)
    if placements is None:
        placements = [(Point(Q(0), h), layout.radius) for h in layout.heights]
    if len(placements) != len(forms):
        raise PlacementError("one placement per band generator is required")
    chart = Chart(d, UNIT_RECT)
    for i, (f, (center, radius)) in enumerate(zip(forms, placements), start=1):
        chart = build_oval_nest(center, radius, f, into=chart, half_length=Q(1, 2), prefix=f"U{i}")
    return chart


def enclosing_loops(c: Chart, p: Point) -> list[ChartEdge]:
    return [e for e in c.edges if e.closed and point_in_polygon(p, e.polyline) == 1]


def free_edges(c: Chart) -> list[ChartEdge]:
    vm = c.vertex_map
    return [
        e for e in c.edges
        if e.ends is not None and all(vm[x].kind == BLACK for x in e.ends if x in vm)
    ]


def nest_depths(c: Chart) -> dict[str, int]:
    """Free edge id -> number of closed loops around it."""
    out = {}
    for e in free_edges(c):
        mid = lerp(e.polyline[0], e.polyline[1], Q(1, 2))
        out[e.id] = len(enclosing_loops(c, mid))
    return out


def simple_loops(c: Chart) -> list[ChartEdge]:
    return [e for e in c.edges if e.closed]


# --------------------------------------------------------------------------
# chart moves: disk replacement


def _cut_edge(e: ChartEdge, disk: Sequence[Point]) -> list[tuple[tuple[Point, ...], bool]]:
    """Split the directed polyline of ``e`` at ``∂disk``; pieces tagged inside/outside."""
    pts = e.directed()
    pieces: list[list[Point]] = [[pts[0]]]
    for a, b in zip(pts, pts[1:]):
        cuts = []
        for p, q in zip(disk, disk[1:]):
            hit = segment_intersection(a, b, p, q)
            if hit is None:
                continue
            if hit[0] != CROSS:
                raise ChartError(f"edge {e.id} is not transverse to the disk boundary")
            cuts.append(hit[1])
        for t in sorted(cuts):
            x = lerp(a, b, t)
            pieces[-1].append(x)
            pieces.append([x])
        pieces[-1].append(b)
    out = []
    for piece in pieces:
        probe = lerp(piece[0], piece[1], Q(1, 2))
        out.append((tuple(piece), point_in_polygon(probe, disk) == 1))
    if e.closed and len(out) > 1:
        # a loop's first and last pieces are one piece
        (first, fin), (last, lin) = out[0], out[-1]
        out = [(last + first[1:], lin)] + out[1:-1]
    return out


def boundary_data(c: Chart, disk: Sequence[Point]) -> dict[Point, tuple[int, str]]:
    """Where ``c`` crosses ``∂disk``: point -> (label, "in" | "out")."""
    inner_side = 1 if polygon_area2(disk) > 0 else -1
    data = {}
    for e in c.edges:
        pts = e.directed()
        for a, b in zip(pts, pts[1:]):
            for p, q in zip(disk, disk[1:]):
                hit = segment_intersection(a, b, p, q)
                if hit is None:
                    continue
                if hit[0] != CROSS:
                    raise ChartError(f"edge {e.id} is not transverse to the disk boundary")
                data[lerp(a, b, hit[1])] = (e.label, "in" if orient(p, q, b) == inner_side else "out")
    return data


def replacement_boundary_data(r: Chart) -> dict[Point, tuple[int, str]]:
    data = {}
    for e in r.edges:
        if e.ends is None:
            continue
        for end, outgoing_at in ((e.ends[0], e.orient == 1), (e.ends[1], e.orient == -1)):
            v = r.vertex_map.get(end)
            if v is not None and v.kind == BOUNDARY:
                data[v.pos] = (e.label, "in" if outgoing_at else "out")
    return data


def apply_disk_replacement(c: Chart, disk: Sequence[Point], replacement: Chart) -> Chart:
    """Replace ``c ∩ disk`` by ``replacement`` (a chart with boundary on ``∂disk``)."""
    disk = tuple(Point(Q(p[0]), Q(p[1])) for p in disk)
    if disk[0] != disk[-1]:
        disk = disk + (disk[0],)
    if replacement.degree != c.degree:
        raise ChartError("replacement degree differs from chart degree")
    for v in c.black_vertices():
        if point_in_polygon(v.pos, disk) >= 0:
            raise ChartError(f"black vertex {v.id} lies in the replacement disk")
    if replacement.black_vertices():
        raise ChartError("replacement may not contain black vertices")
    rrep = _validate(replacement, disk, DEFAULT_CONVENTIONS)
    if not rrep.ok:
        raise ChartError(f"invalid replacement: {rrep}")
    for v in c.vertices:
        if point_in_polygon(v.pos, disk) == 0:
            raise ChartError(f"vertex {v.id} lies on the disk boundary")
    mine = boundary_data(c, disk)
    theirs = replacement_boundary_data(replacement)
    if mine != theirs:
        raise ChartError("boundary data of chart and replacement differ")

    rids = {v.id for v in replacement.vertices if v.kind != BOUNDARY}
    clash = rids & {v.id for v in c.vertices}
    renamed = {vid: (f"{vid}'" if vid in clash else vid) for vid in rids}

    # pieces are directed polylines; ends are ("v", vertex id) or ("b", boundary point)
    pieces: list[tuple[str, int, tuple[Point, ...], tuple, tuple]] = []
    kept: list[ChartEdge] = []
    vertex_at = {v.pos: v.id for v in c.vertices}
    for e in c.edges:
        cut = _cut_edge(e, disk)
        if len(cut) == 1:
            if not cut[0][1]:
                kept.append(e)
            continue
        for poly, inside in cut:
            if not inside:
                pieces.append((e.id, e.label, poly, _key(poly[0], vertex_at), _key(poly[-1], vertex_at)))
    rvertex_at = {v.pos: renamed[v.id] for v in replacement.vertices if v.kind != BOUNDARY}
    for e in replacement.edges:
        if e.ends is None:
            kept.append(e)
            continue
        poly = e.directed()
        pieces.append((e.id, e.label, poly, _key(poly[0], rvertex_at), _key(poly[-1], rvertex_at)))

    starts = {pc[3]: k for k, pc in enumerate(pieces) if pc[3][0] == "b"}
    used: set[int] = set()
    names = {e.id for e in kept}
    new_edges = list(kept)

    def fresh(base):
        name, k = base, 1
        while name in names:
            k += 1
            name = f"{base}.{k}"
        names.add(name)
        return name

    def chain(k):
        seq = [k]
        used.add(k)
        while pieces[seq[-1]][4][0] == "b":
            nxt = starts[pieces[seq[-1]][4]]
            if nxt in used:
                break
            seq.append(nxt)
            used.add(nxt)
        poly = list(pieces[seq[0]][2])
        for m in seq[1:]:
            poly.extend(pieces[m][2][1:])
        return pieces[seq[0]], pieces[seq[-1]], tuple(poly)

    for k, pc in enumerate(pieces):
        if k not in used and pc[3][0] == "v":
            first, last, poly = chain(k)
            ends = (first[3][1], last[4][1])
            new_edges.append(ChartEdge(fresh(first[0]), first[1], remove_collinear(poly), 1, ends))
    for k, pc in enumerate(pieces):
        if k not in used:
            first, _, poly = chain(k)
            new_edges.append(ChartEdge(fresh(first[0]), first[1], remove_collinear(poly, closed=True), 1, None))

    inside = {v.id for v in c.vertices if point_in_polygon(v.pos, disk) == 1}
    vertices = [v for v in c.vertices if v.id not in inside]
    vertices += [replace(v, id=renamed[v.id]) for v in replacement.vertices if v.kind != BOUNDARY]
    out = Chart(c.degree, c.rect, tuple(vertices), tuple(new_edges))
    rep = validate_chart(out)
    if not rep.ok:
        raise ChartError(f"disk replacement produced an invalid chart: {rep}")
    return out


def _key(p: Point, vertex_at: Mapping[Point, str]):
    return ("v", vertex_at[p]) if p in vertex_at else ("b", p)


def loop_removal(c: Chart, edge_id: str, margin: Fraction) -> tuple[tuple[Point, ...], Chart]:
    """Disk and (empty) replacement deleting a closed loop edge."""
    e = c.edge_map[edge_id]
    if not e.closed:
        raise ChartError(f"edge {edge_id} is not a closed loop")
    xs = [p.x for p in e.polyline]
    ys = [p.y for p in e.polyline]
    disk = _rect_loop(min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin)
    return disk, Chart(c.degree, c.rect)


# --------------------------------------------------------------------------
# isotopies


Keyframe = Mapping[str, Mapping[str, object]]


def coordinates(c: Chart) -> dict:
    return {
        "vertices": {v.id: v.pos for v in c.vertices},
        "edges": {e.id: e.polyline for e in c.edges},
    }


def with_coordinates(c: Chart, kf: Keyframe) -> Chart:
    vpos, epoly = kf["vertices"], kf["edges"]
    if set(vpos) != set(c.vertex_map) or set(epoly) != set(c.edge_map):
        raise ChartError("keyframe does not assign coordinates to exactly the chart's vertices and edges")
    vertices = tuple(replace(v, pos=vpos[v.id]) for v in c.vertices)
    edges = []
    for e in c.edges:
        poly = tuple(epoly[e.id])
        if len(poly) != len(e.polyline):
            raise ChartError(f"keyframe changes the point count of edge {e.id}")
        edges.append(replace(e, polyline=poly))
    return Chart(c.degree, c.rect, vertices, tuple(edges))


def interpolate(c0: Chart, c1: Chart, t) -> Chart:
    t = Q(t)
    # reuse earlier results so repeated validation of the same motion hits the cache
    memo = c0.__dict__.setdefault("_interp", {})
    hit = memo.get((id(c1), t))
    if hit is not None and hit[0] is c1:
        return hit[1]
    out = _interpolate(c0, c1, t)
    memo[(id(c1), t)] = (c1, out)
    return out


def _interpolate(c0: Chart, c1: Chart, t) -> Chart:
    vertices = tuple(replace(v, pos=lerp(v.pos, c1.vertex_map[v.id].pos, t)) for v in c0.vertices)
    edges = tuple(
        replace(e, polyline=tuple(lerp(p, q, t) for p, q in zip(e.polyline, c1.edge_map[e.id].polyline)))
        for e in c0.edges
    )
    return Chart(c0.degree, c0.rect, vertices, edges)


def apply_keyframe_isotopy(c: Chart, keyframes: Sequence[Keyframe], check_midpoints: bool = True) -> list[Chart]:
    """Snapshots of ``c`` moved through ``keyframes``, each checked to be a valid chart.

    The first snapshot is ``c`` itself.  Linear interpolation midpoints between
    consecutive snapshots are validated too.
    """
    snaps = [c]
    for kf in keyframes:
        snaps.append(with_coordinates(c, kf))
    for v in c.vertices:
        if v.kind == BOUNDARY and any(s.vertex_map[v.id].pos != v.pos for s in snaps):
            raise ChartError(f"boundary vertex {v.id} moves during the isotopy")
    for k, s in enumerate(snaps):
        rep = validate_chart(s)
        if not rep.ok:
            raise ChartError(f"keyframe {k} is not a valid chart: {rep}")
        if check_midpoints and k:
            mid = interpolate(snaps[k - 1], s, Q(1, 2))
            rep = validate_chart(mid)
            if not rep.ok:
                raise ChartError(f"interpolation before keyframe {k} crosses edges: {rep}")
    return snaps


def subdivide_for(c: Chart, maps: Iterable[PLMap]) -> Chart:
    """Refine polylines so every map in ``maps`` is affine on each segment."""
    edges = []
    for e in c.edges:
        poly = e.polyline
        for m in maps:
            poly = m.subdivide(poly)
        edges.append(replace(e, polyline=poly))
    return replace(c, edges=tuple(edges))


def map_chart(c: Chart, m: PLMap) -> Chart:
    vertices = tuple(replace(v, pos=m(v.pos)) for v in c.vertices)
    edges = tuple(replace(e, polyline=m.map_polyline(e.polyline)) for e in c.edges)
    return Chart(c.degree, c.rect, vertices, edges)


def simplify(c: Chart) -> Chart:
    edges = tuple(replace(e, polyline=remove_collinear(e.polyline, closed=e.closed)) for e in c.edges)
    return replace(c, edges=edges)


def canonical(c: Chart):
    """Geometry-only key: equal for charts differing only by collinear subdivision."""
    s = simplify(c)
    verts = tuple(sorted((v.id, v.kind, v.pos) for v in s.vertices))
    edges = []
    for e in s.edges:
        poly = e.directed()
        if e.closed:
            ring = list(poly[:-1])
            k = ring.index(min(ring))
            ring = ring[k:] + ring[:k]
            poly = tuple(ring)
        ends = e.ends if e.orient == 1 or e.ends is None else (e.ends[1], e.ends[0])
        edges.append((e.label, ends is None, poly))
    return (s.degree, s.rect, verts, tuple(sorted(edges, key=repr)))


def same_geometry(c1: Chart, c2: Chart) -> bool:
    return canonical(c1) == canonical(c2)


def black_positions(c: Chart) -> frozenset[Point]:
    return frozenset(v.pos for v in c.black_vertices())

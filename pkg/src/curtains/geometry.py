"""Exact rational PL geometry in the plane."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = None


def Q(v, den=None):
    """Exact rational in the fastest available representation."""
    if den is not None:
        return Q(v) / Q(den)
    if _mpq is None:
        return Fraction(v)
    if type(v) is _mpq:
        return v
    if isinstance(v, Fraction):
        return _mpq(int(v.numerator), int(v.denominator))
    if isinstance(v, str):
        f = Fraction(v)
        return _mpq(f.numerator, f.denominator)
    return _mpq(v)


class Point(tuple):
    """Exact point; ``fx``/``fy`` cache float approximations for predicate filters."""

    def __new__(cls, x, y):
        if type(x) is not _mpq:
            x = Q(x)
        if type(y) is not _mpq:
            y = Q(y)
        self = tuple.__new__(cls, (x, y))
        self.fx = float(x)
        self.fy = float(y)
        return self

    def __getnewargs__(self):
        return tuple(self)

    @property
    def x(self) -> Fraction:
        return self[0]

    @property
    def y(self) -> Fraction:
        return self[1]

    def __add__(self, other):  # type: ignore[override]
        return Point(self[0] + other[0], self[1] + other[1])

    def __sub__(self, other):
        return Point(self[0] - other[0], self[1] - other[1])

    def scale(self, k) -> "Point":
        return Point(self[0] * k, self[1] * k)

    def __repr__(self):
        return f"Point({self[0]!r}, {self[1]!r})"

    def __str__(self):
        return f"({self[0]}, {self[1]})"


def pt(x, y) -> Point:
    return Point(Fraction(x), Fraction(y))


def cross(a: Point, b: Point) -> Fraction:
    return a.x * b.y - a.y * b.x


_EPS = 1e-11


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the turn a -> b -> c; a float filter settles clear cases exactly."""
    ax, ay = a.fx, a.fy
    det = (b.fx - ax) * (c.fy - ay) - (b.fy - ay) * (c.fx - ax)
    if det > _EPS:
        return 1
    if det < -_EPS:
        return -1
    v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    return (v > 0) - (v < 0)


def lerp(a: Point, b: Point, t) -> Point:
    return Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)


def midpoint(a: Point, b: Point) -> Point:
    return lerp(a, b, Fraction(1, 2))


def on_segment(p: Point, a: Point, b: Point) -> bool:
    return (
        orient(a, b, p) == 0
        and min(a.x, b.x) <= p.x <= max(a.x, b.x)
        and min(a.y, b.y) <= p.y <= max(a.y, b.y)
    )


CROSS = "cross"
TOUCH = "touch"


def segment_intersection(p1: Point, p2: Point, q1: Point, q2: Point):
    """Classify how segment p1p2 meets q1q2.

    Returns ``None`` when disjoint, ``(CROSS, s, t)`` for a transverse crossing
    at interior parameters ``s`` on p and ``t`` on q, and ``(TOUCH,)`` for any
    other contact (shared endpoint, a point on the other's interior, overlap).
    """
    ax, ay, bx, by = p1.fx, p1.fy, p2.fx, p2.fy
    cx, cy, dx, dy = q1.fx, q1.fy, q2.fx, q2.fy
    ux, uy = dx - cx, dy - cy
    f1 = ux * (ay - cy) - uy * (ax - cx)
    f2 = ux * (by - cy) - uy * (bx - cx)
    # both ends clearly on one side of q's line
    if (f1 > _EPS and f2 > _EPS) or (f1 < -_EPS and f2 < -_EPS):
        return None
    vx, vy = bx - ax, by - ay
    f3 = vx * (cy - ay) - vy * (cx - ax)
    f4 = vx * (dy - ay) - vy * (dx - ax)
    if (f3 > _EPS and f4 > _EPS) or (f3 < -_EPS and f4 < -_EPS):
        return None
    if abs(f1) > _EPS and abs(f2) > _EPS and abs(f3) > _EPS and abs(f4) > _EPS:
        return _crossing(p1, p2, q1, q2)
    if p1 == q1 or p1 == q2 or p2 == q1 or p2 == q2:
        return (TOUCH,)
    if (
        max(p1.x, p2.x) < min(q1.x, q2.x)
        or max(q1.x, q2.x) < min(p1.x, p2.x)
        or max(p1.y, p2.y) < min(q1.y, q2.y)
        or max(q1.y, q2.y) < min(p1.y, p2.y)
    ):
        return None
    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return _crossing(p1, p2, q1, q2)
    if (
        (d1 == 0 and on_segment(p1, q1, q2))
        or (d2 == 0 and on_segment(p2, q1, q2))
        or (d3 == 0 and on_segment(q1, p1, p2))
        or (d4 == 0 and on_segment(q2, p1, p2))
    ):
        return (TOUCH,)
    return None


def _crossing(p1: Point, p2: Point, q1: Point, q2: Point):
    r, s = p2 - p1, q2 - q1
    den = cross(r, s)
    return (CROSS, cross(q1 - p1, s) / den, cross(q1 - p1, r) / den)


def linf_point_segment(p: Point, a: Point, b: Point) -> Fraction:
    """Exact L∞ distance from ``p`` to segment ``ab``."""
    dx, dy = b.x - a.x, b.y - a.y
    ex, ey = a.x - p.x, a.y - p.y
    candidates = {Fraction(0), Fraction(1)}
    # kinks of max(|ex + t dx|, |ey + t dy|)
    for sgn in (1, -1):
        den = dx - sgn * dy
        if den != 0:
            t = (sgn * ey - ex) / den
            if 0 < t < 1:
                candidates.add(t)
    return min(max(abs(ex + t * dx), abs(ey + t * dy)) for t in candidates)


def polygon_area2(poly: Sequence[Point]) -> Fraction:
    """Twice the signed area of a closed polygon (last point may repeat the first)."""
    pts = list(poly)
    if pts and pts[0] == pts[-1]:
        pts = pts[:-1]
    return sum((cross(pts[k], pts[(k + 1) % len(pts)]) for k in range(len(pts))), Fraction(0))


def point_in_polygon(p: Point, poly: Sequence[Point]) -> int:
    """1 inside, 0 on the boundary, -1 outside (exact crossing-number test)."""
    pts = list(poly)
    if pts[0] != pts[-1]:
        pts.append(pts[0])
    inside = False
    for a, b in zip(pts, pts[1:]):
        if on_segment(p, a, b):
            return 0
        if (a.y > p.y) != (b.y > p.y):
            x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if x_at > p.x:
                inside = not inside
    return 1 if inside else -1


def remove_collinear(points: Sequence[Point], closed: bool = False) -> tuple[Point, ...]:
    """Drop interior polyline points lying on the straight continuation of their neighbours."""
    pts = list(points)
    changed = True
    while changed and len(pts) > 2:
        changed = False
        out = [pts[0]]
        for k in range(1, len(pts) - 1):
            a, b, c = out[-1], pts[k], pts[k + 1]
            if orient(a, b, c) == 0 and (b - a).x * (c - b).x + (b - a).y * (c - b).y > 0:
                changed = True
                continue
            out.append(b)
        out.append(pts[-1])
        pts = out
    if closed and len(pts) > 4:
        a, b, c = pts[-2], pts[0], pts[1]
        if orient(a, b, c) == 0 and (b - a).x * (c - b).x + (b - a).y * (c - b).y > 0:
            pts = pts[1:-1] + [pts[1]]
    return tuple(pts)


@dataclass(frozen=True)
class BBox:
    x0: float
    y0: float
    x1: float
    y1: float

    @classmethod
    def of(cls, points: Iterable[Point]) -> "BBox":
        xs, ys = [], []
        for p in points:
            xs.append(p.fx)
            ys.append(p.fy)
        return cls(min(xs), min(ys), max(xs), max(ys))

    def overlaps(self, other: "BBox", slack: float = 1e-9) -> bool:
        return not (
            self.x1 + slack < other.x0
            or other.x1 + slack < self.x0
            or self.y1 + slack < other.y0
            or other.y1 + slack < self.y0
        )


# --------------------------------------------------------------------------
# piecewise-affine maps


Triangle = tuple[Point, Point, Point]


def _barycentric(p: Point, tri: Triangle):
    (ax, ay), (bx, by), (cx, cy) = tri
    px, py = p
    den = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    l1 = ((bx - px) * (cy - py) - (by - py) * (cx - px)) / den
    l2 = ((cx - px) * (ay - py) - (cy - py) * (ax - px)) / den
    return l1, l2, 1 - l1 - l2


@dataclass(frozen=True)
class PLMap:
    """A PL homeomorphism given by source/target triangle pairs; identity elsewhere.

    The source triangles must tile a region whose boundary the map fixes.
    """

    source: tuple[Triangle, ...]
    target: tuple[Triangle, ...]

    def __post_init__(self):
        xs = [float(v.x) for t in self.source for v in t]
        ys = [float(v.y) for t in self.source for v in t]
        object.__setattr__(self, "_bbox", BBox(min(xs), min(ys), max(xs), max(ys)))
        edges = set()
        for t in self.source:
            for k in range(3):
                e = (t[k], t[(k + 1) % 3])
                edges.add(e if e[0] <= e[1] else (e[1], e[0]))
        object.__setattr__(self, "_edges", tuple(sorted(edges)))

    def orientation_preserving(self) -> bool:
        for s, t in zip(self.source, self.target):
            if orient(*s) == 0 or orient(*s) != orient(*t):
                return False
        return True

    def _locate(self, p: Point) -> int | None:
        for k, tri in enumerate(self.source):
            a, b, c = tri
            o = (orient(a, b, p), orient(b, c, p), orient(c, a, p))
            if min(o) >= 0 or max(o) <= 0:
                return k
        return None

    def __call__(self, p: Point) -> Point:
        bb = self._bbox
        if not (bb.x0 - 1e-9 <= p.fx <= bb.x1 + 1e-9 and bb.y0 - 1e-9 <= p.fy <= bb.y1 + 1e-9):
            return p
        k = self._locate(p)
        if k is None:
            return p
        l1, l2, l3 = _barycentric(p, self.source[k])
        a, b, c = self.target[k]
        return Point(l1 * a.x + l2 * b.x + l3 * c.x, l1 * a.y + l2 * b.y + l3 * c.y)

    def subdivide(self, polyline: Sequence[Point]) -> tuple[Point, ...]:
        """Insert the points where ``polyline`` meets the triangulation's edges."""
        out = [polyline[0]]
        bb = self._bbox
        for a, b in zip(polyline, polyline[1:]):
            if not BBox.of((a, b)).overlaps(bb):
                out.append(b)
                continue
            params = set()
            for e0, e1 in self._edges:
                hit = segment_intersection(a, b, e0, e1)
                if hit is None:
                    continue
                if hit[0] == CROSS:
                    params.add(hit[1])
                else:
                    for q in (e0, e1):
                        if on_segment(q, a, b):
                            params.add(_param_on(q, a, b))
            for t in sorted(params):
                if 0 < t < 1:
                    out.append(lerp(a, b, t))
            out.append(b)
        return tuple(out)

    def map_polyline(self, polyline: Sequence[Point]) -> tuple[Point, ...]:
        return tuple(self(p) for p in polyline)


def _param_on(q: Point, a: Point, b: Point) -> Fraction:
    d = b - a
    if d.x != 0:
        return (q.x - a.x) / d.x
    return (q.y - a.y) / d.y


_SQUARE = ((1, 1), (-1, 1), (-1, -1), (1, -1))  # counterclockwise corners


def square_ring(center: Point, r: Fraction) -> tuple[Point, ...]:
    return tuple(Point(center.x + r * u, center.y + r * v) for u, v in _SQUARE)


def _ring_point(ring: Sequence[Point], param: Fraction) -> Point:
    k = param.numerator // param.denominator
    frac = param - k
    a, b = ring[k % 4], ring[(k + 1) % 4]
    return lerp(a, b, frac)


def twist_map(center: Point, radii: Sequence[Fraction], shifts: Sequence[Fraction]) -> PLMap:
    """PL map fixing the outermost square ring and rotating inner rings combinatorially.

    ``radii`` are the half-widths of the concentric square rings (inner to
    outer); ``shifts[k]`` moves ring k by that many quarter turns
    (counterclockwise when positive).  The inner square is coned to the centre.
    A shift of 2 on the innermost ring is the point reflection through
    ``center``, i.e. a rotation by π.
    """
    rings = [square_ring(center, r) for r in radii]
    shifts = [Fraction(s) for s in shifts]
    src: list[Triangle] = []
    dst: list[Triangle] = []

    def moved(k, j):
        return _ring_point(rings[k], Fraction(j) + shifts[k])

    for j in range(4):
        src.append((center, rings[0][j], rings[0][(j + 1) % 4]))
        dst.append((center, moved(0, j), moved(0, j + 1)))
    # quads between rings are split along the diagonal trailing the rotation; the
    # choice depends only on the direction so all stages share one triangulation
    ccw = all(s >= 0 for s in shifts)
    for k in range(len(rings) - 1):
        for j in range(4):
            if ccw:
                quads = (((k, j), (k + 1, j), (k + 1, j + 1)), ((k, j), (k + 1, j + 1), (k, j + 1)))
            else:
                quads = (((k, j), (k + 1, j), (k, j + 1)), ((k, j + 1), (k + 1, j), (k + 1, j + 1)))
            for tri in quads:
                src.append(tuple(rings[r][i % 4] for r, i in tri))
                dst.append(tuple(moved(r, i) for r, i in tri))
    return PLMap(tuple(src), tuple(dst))


def half_twist_stages(center: Point, radii: Sequence[Fraction], direction: int) -> list[PLMap]:
    """Keyframe maps of a half twist: identity, quarter turn of the core, half turn.

    Stage p gives ring k the shift ``direction * max(0, p - k)`` for three rings,
    so the final stage rotates the core by π and the middle ring by π/2.
    """
    if len(radii) != 3:
        raise ValueError("a half twist uses exactly three square rings")
    stages = []
    for p in range(3):
        shifts = [direction * max(0, p - k) for k in range(3)]
        stages.append(twist_map(center, radii, shifts))
    return stages

"""Curtains: motion pictures of charts over a time interval."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .braid import BraidWord, words_equal
from .chart import (
    BLACK,
    Chart,
    ChartEdge,
    ChartError,
    ChartVertex,
    PLPath,
    apply_disk_replacement,
    black_positions,
    interpolate,
    intersection_word,
    same_geometry,
    standard_meridians,
    validate_chart,
)
from .geometry import Point, Q
from .report import ValidationReport

DISK_REPLACEMENT = "disk_replacement"
INSERT_FREE_EDGES = "insert_free_edges"
DELETE_FREE_EDGES = "delete_free_edges"
CERTIFIED_TRANSITION = "certified_transition"
EVENT_KINDS = (DISK_REPLACEMENT, INSERT_FREE_EDGES, DELETE_FREE_EDGES, CERTIFIED_TRANSITION)


class CurtainError(ValueError):
    pass


@dataclass(frozen=True)
class FreeEdge:
    edge: ChartEdge
    start: ChartVertex
    end: ChartVertex


@dataclass(frozen=True)
class DiskReplacement:
    disk: tuple[Point, ...]
    replacement: Chart


@dataclass(frozen=True)
class TransitionCertificate:
    """Evidence that two charts have the same monodromy on a common meridian system."""

    chart_a: Chart
    chart_b: Chart
    meridians: tuple[PLPath, ...]
    words_a: tuple[BraidWord, ...]
    words_b: tuple[BraidWord, ...]

    def check(self) -> ValidationReport:
        rep = ValidationReport()
        if black_positions(self.chart_a) != black_positions(self.chart_b):
            rep.add("certificate", "black vertices", "the two charts have different black vertex sets")
            return rep
        if not (len(self.meridians) == len(self.words_a) == len(self.words_b)):
            rep.add("certificate", "tuple", "meridian and word tuples have different lengths")
            return rep
        for k, (m, wa, wb) in enumerate(zip(self.meridians, self.words_a, self.words_b), start=1):
            if intersection_word(self.chart_a, m) != wa or intersection_word(self.chart_b, m) != wb:
                rep.add("certificate", f"meridian {k}", "recorded word does not match the chart")
            elif not words_equal(wa, wb):
                rep.add("certificate", f"meridian {k}", "monodromy differs between the two charts")
        return rep


@dataclass(frozen=True)
class CurtainEvent:
    t: Fraction
    kind: str
    payload: object


@dataclass(frozen=True)
class Segment:
    """Charts at evenly spaced parameters across ``[t0, t1]``; linear in between."""

    t0: Fraction
    t1: Fraction
    keyframes: tuple[Chart, ...]

    def at(self, t) -> Chart:
        frames = self.keyframes
        if len(frames) == 1:
            return frames[0]
        s = (Q(t) - self.t0) / (self.t1 - self.t0) * (len(frames) - 1)
        k = min(int(s), len(frames) - 2)
        return interpolate(frames[k], frames[k + 1], s - k)

    def times(self) -> list[Fraction]:
        if len(self.keyframes) == 1:
            return [self.t0, self.t1]
        m = len(self.keyframes) - 1
        return [self.t0 + (self.t1 - self.t0) * k / m for k in range(m + 1)]

    @property
    def first(self) -> Chart:
        return self.keyframes[0]

    @property
    def last(self) -> Chart:
        return self.keyframes[-1]


@dataclass(frozen=True)
class Curtain:
    degree: int
    time_range: tuple[Fraction, Fraction]
    segments: tuple[Segment, ...]
    events: tuple[CurtainEvent, ...] = ()
    reference_time: Fraction | None = None

    def event_times(self) -> list[Fraction]:
        return [e.t for e in self.events]

    def event_at(self, t) -> CurtainEvent | None:
        for e in self.events:
            if e.t == t:
                return e
        return None


def empty_curtain(degree: int, time_range=(Q(-1), Q(1)), rect=None) -> Curtain:
    from .chart import UNIT_RECT

    t0, t1 = (Q(x) for x in time_range)
    return Curtain(degree, (t0, t1), (Segment(t0, t1, (Chart(degree, rect or UNIT_RECT),)),))


def slice_at(cu: Curtain, t) -> Chart:
    """The chart at a non-event time ``t``."""
    t = Q(t)
    lo, hi = cu.time_range
    if not lo <= t <= hi:
        raise CurtainError(f"time {t} outside the curtain's range [{lo}, {hi}]")
    if t in cu.event_times():
        raise CurtainError(f"time {t} is an event time")
    for seg in cu.segments:
        if seg.t0 <= t <= seg.t1:
            return seg.at(t)
    raise CurtainError(f"no segment covers time {t}")


# --------------------------------------------------------------------------
# validation


def _signature(c: Chart):
    return (
        tuple((v.id, v.kind) for v in c.vertices),
        tuple((e.id, e.label, e.orient, e.ends, len(e.polyline)) for e in c.edges),
    )


def _with_free_edges(c: Chart, edges: Sequence[FreeEdge]) -> Chart:
    return Chart(
        c.degree, c.rect,
        c.vertices + tuple(v for f in edges for v in (f.start, f.end)),
        c.edges + tuple(f.edge for f in edges),
    )


def _without_free_edges(c: Chart, edges: Sequence[FreeEdge]) -> Chart:
    eids = {f.edge.id for f in edges}
    vids = {v.id for f in edges for v in (f.start, f.end)}
    return Chart(
        c.degree, c.rect,
        tuple(v for v in c.vertices if v.id not in vids),
        tuple(e for e in c.edges if e.id not in eids),
    )


def _free_edges_present(c: Chart, edges: Sequence[FreeEdge]) -> bool:
    for f in edges:
        e = c.edge_map.get(f.edge.id)
        if e is None or e.polyline != f.edge.polyline or e.ends != (f.start.id, f.end.id):
            return False
        for v in (f.start, f.end):
            if c.vertex_map.get(v.id) != v or v.kind != BLACK:
                return False
    return True


def check_event(ev: CurtainEvent, before: Chart, after: Chart, strict: bool = False) -> ValidationReport:
    rep = ValidationReport()
    subj = f"event at t={ev.t}"
    if ev.kind == INSERT_FREE_EDGES:
        if not _free_edges_present(after, ev.payload) or not same_geometry(_with_free_edges(before, ev.payload), after):
            rep.add("event-payload", subj, "after-slice is not the before-slice plus the inserted free edges")
    elif ev.kind == DELETE_FREE_EDGES:
        if not _free_edges_present(before, ev.payload) or not same_geometry(_without_free_edges(before, ev.payload), after):
            rep.add("event-payload", subj, "after-slice is not the before-slice minus the deleted free edges")
    elif ev.kind == DISK_REPLACEMENT:
        try:
            result = apply_disk_replacement(before, ev.payload.disk, ev.payload.replacement)
        except ChartError as exc:
            rep.add("event-payload", subj, f"disk replacement fails: {exc}")
        else:
            if not same_geometry(result, after):
                rep.add("event-payload", subj, "disk replacement does not produce the after-slice")
    elif ev.kind == CERTIFIED_TRANSITION:
        if strict:
            rep.add("strict", subj, "certified transitions are rejected in strict mode")
        cert: TransitionCertificate = ev.payload
        if not (same_geometry(cert.chart_a, before) and same_geometry(cert.chart_b, after)):
            rep.add("event-payload", subj, "certificate charts do not match the adjacent slices")
        rep.extend(cert.check(), prefix=f"{subj}: ")
    else:
        rep.add("event-kind", subj, f"unknown event kind {ev.kind!r}")
    return rep


def validate_curtain(cu: Curtain, strict: bool = False, check_midpoints: bool = True) -> ValidationReport:
    """Check slices, segment isotopies, event payloads and black-vertex continuity."""
    memo = cu.__dict__.setdefault("_reports", {})
    key = (strict, check_midpoints)
    if key not in memo:
        memo[key] = tuple(_validate_curtain(cu, strict, check_midpoints).issues)
    return ValidationReport(list(memo[key]))


def _validate_curtain(cu: Curtain, strict: bool, check_midpoints: bool) -> ValidationReport:
    rep = ValidationReport()
    lo, hi = cu.time_range
    if not lo < hi:
        rep.add("time-range", "curtain", "time range must be a nonempty interval")
        return rep
    segs = cu.segments
    if not segs:
        rep.add("segments", "curtain", "a curtain needs at least one segment")
        return rep
    if segs[0].t0 != lo or segs[-1].t1 != hi:
        rep.add("segments", "curtain", "segments must cover the time range")
    for a, b in zip(segs, segs[1:]):
        if a.t1 != b.t0:
            rep.add("segments", f"segment at t={b.t0}", "segments must be contiguous")
    boundaries = {s.t1 for s in segs[:-1]}
    times = cu.event_times()
    if any(x >= y for x, y in zip(times, times[1:])):
        rep.add("event-order", "curtain", "event times must be strictly increasing")
    for ev in cu.events:
        if ev.t not in boundaries:
            rep.add("event-time", f"event at t={ev.t}", "events must sit between two segments")
    if not rep.ok:
        return rep

    for k, seg in enumerate(segs):
        subj = f"segment {k} [{seg.t0}, {seg.t1}]"
        if not seg.t0 < seg.t1:
            rep.add("segments", subj, "empty segment")
        if not seg.keyframes:
            rep.add("segments", subj, "segment without keyframes")
            continue
        sig = _signature(seg.first)
        for j, frame in enumerate(seg.keyframes):
            if frame.degree != cu.degree:
                rep.add("degree", f"{subj} keyframe {j}", "keyframe degree differs from the curtain's")
            if frame.rect != seg.first.rect:
                rep.add("rect", f"{subj} keyframe {j}", "keyframes must share the rectangle")
            if _signature(frame) != sig:
                rep.add("combinatorics", f"{subj} keyframe {j}", "combinatorics change inside a segment")
                continue
            rep.extend(validate_chart(frame), prefix=f"{subj} keyframe {j}: ")
            if j and check_midpoints:
                mid = interpolate(seg.keyframes[j - 1], frame, Q(1, 2))
                rep.extend(validate_chart(mid), prefix=f"{subj} before keyframe {j}: ")
    if not rep.ok:
        return rep

    for a, b in zip(segs, segs[1:]):
        ev = cu.event_at(a.t1)
        if ev is None:
            if not same_geometry(a.last, b.first):
                rep.add("continuity", f"t={a.t1}", "slices jump between segments without an event")
        else:
            rep.extend(check_event(ev, a.last, b.first, strict))
    if not rep.ok:
        return rep
    try:
        internal_boundary(cu)
    except CurtainError as exc:
        rep.add("trace", "internal boundary", str(exc))
    return rep


# --------------------------------------------------------------------------
# internal boundary


Point3 = tuple[Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class InternalBoundary:
    """Closed PL curves in (x, y, t) traced by black vertices, capped at free-edge events."""

    curves: tuple[tuple[Point3, ...], ...]
    minima: int
    maxima: int
    braid: BraidWord | None = None
    closed: bool = True

    @property
    def components(self) -> int:
        return len(self.curves)


def _pieces(cu: Curtain):
    """Trace pieces per segment plus event caps, as 3D polylines."""
    pieces = []
    caps = []
    for seg in cu.segments:
        times = seg.times()
        frames = seg.keyframes if len(seg.keyframes) > 1 else seg.keyframes * 2
        for v in seg.first.vertices:
            if v.kind != BLACK:
                continue
            pts = []
            for frame, t in zip(frames, times):
                p = frame.vertex_map[v.id].pos
                q = (p.x, p.y, t)
                if not pts or pts[-1][:2] != q[:2] or frame is frames[-1]:
                    pts.append(q)
            if pts[-1][2] != seg.t1:
                pts.append((pts[-1][0], pts[-1][1], seg.t1))
            pieces.append(tuple(pts))
    for ev in cu.events:
        if ev.kind in (INSERT_FREE_EDGES, DELETE_FREE_EDGES):
            for f in ev.payload:
                poly = tuple((p.x, p.y, ev.t) for p in f.edge.polyline)
                caps.append((ev.kind, poly))
    return pieces, caps


def internal_boundary(cu: Curtain) -> InternalBoundary:
    pieces, caps = _pieces(cu)
    lo, hi = cu.time_range
    all_pieces = list(pieces) + [poly for _, poly in caps]
    ends: dict[Point3, list[int]] = {}
    for k, poly in enumerate(all_pieces):
        for p in (poly[0], poly[-1]):
            ends.setdefault(p, []).append(k)
    loose = [p for p, ks in ends.items() if len(ks) != 2 and p[2] not in (lo, hi)]
    if loose:
        raise CurtainError(f"black vertex traces are discontinuous near {tuple(str(x) for x in loose[0])}")
    open_ends = [p for p, ks in ends.items() if len(ks) == 1]
    used: set[int] = set()
    curves = []
    for start in range(len(all_pieces)):
        if start in used:
            continue
        used.add(start)
        curve = list(all_pieces[start])
        while True:
            tail = curve[-1]
            nxt = [k for k in ends.get(tail, []) if k not in used]
            if not nxt:
                break
            k = nxt[0]
            used.add(k)
            poly = all_pieces[k]
            curve.extend((poly if poly[0] == tail else tuple(reversed(poly)))[1:])
        curves.append(tuple(curve))
    minima = sum(1 for kind, _ in caps if kind == INSERT_FREE_EDGES)
    maxima = sum(1 for kind, _ in caps if kind == DELETE_FREE_EDGES)
    try:
        braid = extract_braid(cu)
    except CurtainError:
        braid = None
    return InternalBoundary(tuple(curves), minima, maxima, braid, closed=not open_ends)


def _strand_frames(cu: Curtain, t_lo, t_hi, split_x) -> list[list[Point]]:
    """Right-side black vertex positions per keyframe in (t_lo, t_hi), latest first.

    Strand k of every frame is the same vertex trace: ids persist inside a
    segment and positions persist across segment boundaries.
    """
    frames: list[list[Point]] = []
    ids: list[str] | None = None
    for seg in reversed(cu.segments):
        if seg.t1 <= t_lo or seg.t0 >= t_hi:
            continue
        first = True
        for frame in reversed(seg.keyframes):
            cur = {v.id: v.pos for v in frame.black_vertices() if v.pos.x > split_x}
            if ids is None:
                ids = sorted(cur, key=lambda i: cur[i].y)
            elif first:
                at = {p: i for i, p in cur.items()}
                try:
                    ids = [at[p] for p in frames[-1]]
                except KeyError:
                    raise CurtainError("black vertex traces jump between segments") from None
            if set(ids) != set(cur):
                raise CurtainError("the number of braid strands changes between slices")
            frames.append([cur[i] for i in ids])
            first = False
    return frames


def _crossings(frames: list[list[Point]]):
    """(time, lower strand, upper strand, x-order sign) for every change of height order."""
    n = len(frames[0])
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            last_k, last_sign = 0, _sgn(frames[0][a].y - frames[0][b].y)
            if last_sign == 0:
                raise CurtainError("two strands start at the same height")
            for k in range(1, len(frames)):
                sg = _sgn(frames[k][a].y - frames[k][b].y)
                if sg == 0 or sg == last_sign:
                    if sg:
                        last_k = k
                    continue
                lower, upper = (a, b) if last_sign < 0 else (b, a)
                if last_k == k - 1:
                    p, q = frames[k - 1], frames[k]
                    y0 = p[lower].y - p[upper].y
                    y1 = q[lower].y - q[upper].y
                    s = y0 / (y0 - y1)
                    xl = p[lower].x + (q[lower].x - p[lower].x) * s
                    xu = p[upper].x + (q[upper].x - p[upper].x) * s
                    when = k - 1 + s
                else:
                    # the pair is level at frames last_k+1 .. k-1; read x at the first
                    f = frames[last_k + 1]
                    xl, xu = f[lower].x, f[upper].x
                    when = Q(last_k + 1)
                if xl == xu:
                    raise CurtainError("two strands collide")
                out.append((when, lower, upper, 1 if xl > xu else -1))
                last_k, last_sign = k, sg
    return sorted(out, key=lambda e: e[0])


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def extract_braid(cu: Curtain, split_x: Fraction = Q(0)) -> BraidWord:
    """Braid traced by the right-side black vertices between the two free-edge events.

    Strands are read from the deletion time downwards with positions counted by
    height from the bottom.  A swap of positions j, j+1 in which the lower strand
    passes to the right of the upper one reads ``σ_j``, otherwise ``σ_j^-1``.
    """
    ins = [e.t for e in cu.events if e.kind == INSERT_FREE_EDGES]
    dels = [e.t for e in cu.events if e.kind == DELETE_FREE_EDGES]
    if len(ins) != 1 or len(dels) != 1 or not ins[0] < dels[0]:
        raise CurtainError("braid extraction needs one insertion followed by one deletion")
    frames = _strand_frames(cu, ins[0], dels[0], split_x)
    if not frames or not frames[0]:
        raise CurtainError("no braid strands between the free-edge events")
    n = len(frames[0])
    order = sorted(range(n), key=lambda k: frames[0][k].y)
    letters = []
    for _, lower, upper, sign in _crossings(frames):
        j = order.index(lower)
        if j + 1 >= n or order[j + 1] != upper:
            raise CurtainError("strands swap heights without being adjacent")
        order[j], order[j + 1] = upper, lower
        letters.append((j + 1, sign))
    if sorted(range(n), key=lambda k: frames[-1][k].y) != order:
        raise CurtainError("strand heights are inconsistent at the end of the braid")
    return BraidWord(n, tuple(letters))


def meridian_monodromy(cu: Curtain, t=None) -> list[BraidWord]:
    """Words of the left-side Hurwitz meridians x_1..x_n in the reference slice."""
    t = cu.reference_time if t is None else Q(t)
    if t is None:
        raise CurtainError("curtain has no reference level")
    c = slice_at(cu, t)
    ms = standard_meridians(c)
    if not ms.left:
        raise CurtainError("reference slice has no black vertices")
    return [intersection_word(c, m) for m in ms.left]


def full_meridian_monodromy(cu: Curtain, t=None) -> tuple[list[BraidWord], list[BraidWord]]:
    t = cu.reference_time if t is None else Q(t)
    c = slice_at(cu, t)
    ms = standard_meridians(c)
    return [intersection_word(c, m) for m in ms.left], [intersection_word(c, m) for m in ms.right]


def slice_loop_monodromy(cu: Curtain, t, loop: PLPath) -> BraidWord:
    """Monodromy of a loop lying in the level ``t``."""
    return intersection_word(slice_at(cu, t), loop)

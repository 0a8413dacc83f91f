"""JSON documents for every domain type (schema version 1).

Rationals are written as ``["num", "den"]`` string pairs.  Unknown fields are
rejected; errors carry a JSON pointer to the offending value.
"""

from __future__ import annotations

import json
from typing import Any, Callable

from .braid import BandGeneratorForm, BraidError, BraidWord, Permutation, parse_word
from .builder import MonodromyData
from .chart import VERTEX_KINDS, Chart, ChartEdge, ChartVertex, PLPath
from .cover import CoverReport, HandleEvent, HandleLedger, HeegaardSummary, SliceEuler
from .curtain import (
    CERTIFIED_TRANSITION,
    DELETE_FREE_EDGES,
    DISK_REPLACEMENT,
    EVENT_KINDS,
    INSERT_FREE_EDGES,
    Curtain,
    CurtainEvent,
    DiskReplacement,
    FreeEdge,
    Segment,
    TransitionCertificate,
)
from .geometry import Point, Q
from .report import ValidationReport

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def _ptr(base: str, key) -> str:
    return f"{base}/{str(key).replace('~', '~0').replace('/', '~1')}"


def _obj(v, ptr: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(v, dict):
        raise SchemaError(ptr, "expected an object")
    for k in v:
        if k not in required and k not in optional:
            raise SchemaError(_ptr(ptr, k), "unknown field")
    for k in required:
        if k not in v:
            raise SchemaError(_ptr(ptr, k), "missing field")
    return v


def _list(v, ptr: str) -> list:
    if not isinstance(v, list):
        raise SchemaError(ptr, "expected an array")
    return v


def _int(v, ptr: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(ptr, "expected an integer")
    return v


def _str(v, ptr: str) -> str:
    if not isinstance(v, str):
        raise SchemaError(ptr, "expected a string")
    return v


# --------------------------------------------------------------------------
# scalars


def dump_rational(q) -> list[str]:
    q = Q(q)
    return [str(q.numerator), str(q.denominator)]


def load_rational(v, ptr: str):
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, str) for x in v)):
        raise SchemaError(ptr, 'expected a rational ["num", "den"]')
    try:
        num, den = int(v[0]), int(v[1])
    except ValueError:
        raise SchemaError(ptr, "rational parts must be integer strings") from None
    if den <= 0:
        raise SchemaError(_ptr(ptr, 1), "denominator must be positive")
    return Q(num, den)


def dump_point(p: Point) -> list:
    return [dump_rational(p.x), dump_rational(p.y)]


def load_point(v, ptr: str) -> Point:
    v = _list(v, ptr)
    if len(v) != 2:
        raise SchemaError(ptr, "a point has two coordinates")
    return Point(load_rational(v[0], _ptr(ptr, 0)), load_rational(v[1], _ptr(ptr, 1)))


def _points(v, ptr: str) -> tuple[Point, ...]:
    return tuple(load_point(p, _ptr(ptr, k)) for k, p in enumerate(_list(v, ptr)))


# --------------------------------------------------------------------------
# braids


def dump_word(w: BraidWord) -> dict:
    return {"degree": w.degree, "letters": [[i, s] for i, s in w.letters]}


def load_word(v, ptr: str, degree: int | None = None) -> BraidWord:
    if isinstance(v, str) and degree is not None:
        try:
            return parse_word(v, degree)
        except BraidError as exc:
            raise SchemaError(ptr, str(exc)) from None
    o = _obj(v, ptr, ("degree", "letters"))
    d = _int(o["degree"], _ptr(ptr, "degree"))
    letters = []
    for k, item in enumerate(_list(o["letters"], _ptr(ptr, "letters"))):
        lp = _ptr(_ptr(ptr, "letters"), k)
        item = _list(item, lp)
        if len(item) != 2:
            raise SchemaError(lp, "a letter is [index, sign]")
        i, s = _int(item[0], _ptr(lp, 0)), _int(item[1], _ptr(lp, 1))
        if not 1 <= i < d:
            raise SchemaError(_ptr(lp, 0), f"generator index {i} out of range for B_{d}")
        if s not in (1, -1):
            raise SchemaError(_ptr(lp, 1), f"letter sign must be +1 or -1, got {s}")
        letters.append((i, s))
    try:
        return BraidWord(d, tuple(letters))
    except BraidError as exc:
        raise SchemaError(ptr, str(exc)) from None


def dump_form(f: BandGeneratorForm) -> dict:
    return {"conjugator": dump_word(f.conjugator), "index": f.index, "sign": f.sign}


def load_form(v, ptr: str, degree: int | None = None) -> BandGeneratorForm:
    o = _obj(v, ptr, ("conjugator", "index"), ("sign",))
    w = load_word(o["conjugator"], _ptr(ptr, "conjugator"), degree)
    try:
        return BandGeneratorForm(w, _int(o["index"], _ptr(ptr, "index")), _int(o.get("sign", 1), _ptr(ptr, "sign")))
    except BraidError as exc:
        raise SchemaError(ptr, str(exc)) from None


def dump_monodromy(m: MonodromyData) -> dict:
    return {"degree": m.degree, "beta": dump_word(m.beta), "images": [dump_form(f) for f in m.images]}


def load_monodromy(v, ptr: str = "") -> MonodromyData:
    o = _obj(v, ptr, ("degree", "beta", "images"), ("n",))
    d = _int(o["degree"], _ptr(ptr, "degree"))
    images = _list(o["images"], _ptr(ptr, "images"))
    n = _int(o.get("n", len(images)), _ptr(ptr, "n"))
    beta = load_word(o["beta"], _ptr(ptr, "beta"), n)
    forms = tuple(load_form(f, _ptr(_ptr(ptr, "images"), k), d) for k, f in enumerate(images))
    return MonodromyData(d, beta, forms)


# --------------------------------------------------------------------------
# charts


def dump_vertex(v: ChartVertex) -> dict:
    return {"id": v.id, "kind": v.kind, "pos": dump_point(v.pos)}


def load_vertex(v, ptr: str) -> ChartVertex:
    o = _obj(v, ptr, ("id", "kind", "pos"))
    kind = _str(o["kind"], _ptr(ptr, "kind"))
    if kind not in VERTEX_KINDS:
        raise SchemaError(_ptr(ptr, "kind"), f"kind must be one of {', '.join(VERTEX_KINDS)}")
    return ChartVertex(_str(o["id"], _ptr(ptr, "id")), kind, load_point(o["pos"], _ptr(ptr, "pos")))


def dump_edge(e: ChartEdge) -> dict:
    return {
        "id": e.id,
        "label": e.label,
        "orient": e.orient,
        "ends": list(e.ends) if e.ends is not None else "closed-loop",
        "polyline": [dump_point(p) for p in e.polyline],
    }


def load_edge(v, ptr: str) -> ChartEdge:
    o = _obj(v, ptr, ("id", "label", "polyline", "ends"), ("orient",))
    ends = o["ends"]
    if ends == "closed-loop":
        ends = None
    else:
        ends = _list(ends, _ptr(ptr, "ends"))
        if len(ends) != 2:
            raise SchemaError(_ptr(ptr, "ends"), 'ends are [start, end] or "closed-loop"')
        ends = (_str(ends[0], _ptr(_ptr(ptr, "ends"), 0)), _str(ends[1], _ptr(_ptr(ptr, "ends"), 1)))
    orient = _int(o.get("orient", 1), _ptr(ptr, "orient"))
    if orient not in (1, -1):
        raise SchemaError(_ptr(ptr, "orient"), "orientation must be 1 or -1")
    return ChartEdge(
        _str(o["id"], _ptr(ptr, "id")),
        _int(o["label"], _ptr(ptr, "label")),
        _points(o["polyline"], _ptr(ptr, "polyline")),
        orient,
        ends,
    )


def dump_chart(c: Chart) -> dict:
    return {
        "degree": c.degree,
        "rect": [dump_rational(x) for x in c.rect],
        "vertices": [dump_vertex(v) for v in c.vertices],
        "edges": [dump_edge(e) for e in c.edges],
    }


def load_chart(v, ptr: str = "") -> Chart:
    o = _obj(v, ptr, ("degree", "rect", "vertices", "edges"))
    rect = _list(o["rect"], _ptr(ptr, "rect"))
    if len(rect) != 4:
        raise SchemaError(_ptr(ptr, "rect"), "rect is [x0, y0, x1, y1]")
    rect = tuple(load_rational(x, _ptr(_ptr(ptr, "rect"), k)) for k, x in enumerate(rect))
    if not (rect[0] < rect[2] and rect[1] < rect[3]):
        raise SchemaError(_ptr(ptr, "rect"), "rect must have positive width and height")
    vertices = tuple(load_vertex(x, _ptr(_ptr(ptr, "vertices"), k)) for k, x in enumerate(_list(o["vertices"], _ptr(ptr, "vertices"))))
    edges = tuple(load_edge(x, _ptr(_ptr(ptr, "edges"), k)) for k, x in enumerate(_list(o["edges"], _ptr(ptr, "edges"))))
    seen: dict[str, int] = {}
    for k, vx in enumerate(vertices):
        if vx.id in seen:
            raise SchemaError(_ptr(_ptr(_ptr(ptr, "vertices"), k), "id"), f"duplicate vertex id {vx.id!r}")
        seen[vx.id] = k
    eseen: set[str] = set()
    for k, e in enumerate(edges):
        if e.id in eseen:
            raise SchemaError(_ptr(_ptr(_ptr(ptr, "edges"), k), "id"), f"duplicate edge id {e.id!r}")
        eseen.add(e.id)
        if e.ends is not None:
            for j, end in enumerate(e.ends):
                if end not in seen:
                    raise SchemaError(_ptr(_ptr(_ptr(_ptr(ptr, "edges"), k), "ends"), j), f"unknown vertex id {end!r}")
    return Chart(_int(o["degree"], _ptr(ptr, "degree")), rect, vertices, edges)


def dump_path(p: PLPath) -> dict:
    return {"points": [dump_point(x) for x in p.points], "closed": p.closed}


def load_path(v, ptr: str) -> PLPath:
    o = _obj(v, ptr, ("points",), ("closed",))
    closed = o.get("closed", False)
    if not isinstance(closed, bool):
        raise SchemaError(_ptr(ptr, "closed"), "expected a boolean")
    try:
        return PLPath(_points(o["points"], _ptr(ptr, "points")), closed)
    except ValueError as exc:
        raise SchemaError(ptr, str(exc)) from None


# --------------------------------------------------------------------------
# curtains


def _dump_free(f: FreeEdge) -> dict:
    return {"edge": dump_edge(f.edge), "start": dump_vertex(f.start), "end": dump_vertex(f.end)}


def _load_free(v, ptr: str) -> FreeEdge:
    o = _obj(v, ptr, ("edge", "start", "end"))
    return FreeEdge(load_edge(o["edge"], _ptr(ptr, "edge")), load_vertex(o["start"], _ptr(ptr, "start")), load_vertex(o["end"], _ptr(ptr, "end")))


def dump_payload(ev: CurtainEvent) -> dict:
    p = ev.payload
    if ev.kind in (INSERT_FREE_EDGES, DELETE_FREE_EDGES):
        return {"free_edges": [_dump_free(f) for f in p]}
    if ev.kind == DISK_REPLACEMENT:
        return {"disk": [dump_point(x) for x in p.disk], "replacement": dump_chart(p.replacement)}
    if ev.kind == CERTIFIED_TRANSITION:
        return {
            "chart_a": dump_chart(p.chart_a),
            "chart_b": dump_chart(p.chart_b),
            "meridians": [dump_path(m) for m in p.meridians],
            "words_a": [dump_word(w) for w in p.words_a],
            "words_b": [dump_word(w) for w in p.words_b],
        }
    raise ValueError(f"unknown event kind {ev.kind!r}")


def load_payload(kind: str, v, ptr: str):
    if kind in (INSERT_FREE_EDGES, DELETE_FREE_EDGES):
        o = _obj(v, ptr, ("free_edges",))
        return tuple(_load_free(x, _ptr(_ptr(ptr, "free_edges"), k)) for k, x in enumerate(_list(o["free_edges"], _ptr(ptr, "free_edges"))))
    if kind == DISK_REPLACEMENT:
        o = _obj(v, ptr, ("disk", "replacement"))
        return DiskReplacement(_points(o["disk"], _ptr(ptr, "disk")), load_chart(o["replacement"], _ptr(ptr, "replacement")))
    o = _obj(v, ptr, ("chart_a", "chart_b", "meridians", "words_a", "words_b"))
    words = lambda key: tuple(load_word(x, _ptr(_ptr(ptr, key), k)) for k, x in enumerate(_list(o[key], _ptr(ptr, key))))
    return TransitionCertificate(
        load_chart(o["chart_a"], _ptr(ptr, "chart_a")),
        load_chart(o["chart_b"], _ptr(ptr, "chart_b")),
        tuple(load_path(x, _ptr(_ptr(ptr, "meridians"), k)) for k, x in enumerate(_list(o["meridians"], _ptr(ptr, "meridians")))),
        words("words_a"),
        words("words_b"),
    )


def dump_curtain(cu: Curtain) -> dict:
    return {
        "degree": cu.degree,
        "time_range": [dump_rational(t) for t in cu.time_range],
        "reference_time": None if cu.reference_time is None else dump_rational(cu.reference_time),
        "segments": [
            {"t0": dump_rational(s.t0), "t1": dump_rational(s.t1), "keyframes": [dump_chart(c) for c in s.keyframes]}
            for s in cu.segments
        ],
        "events": [{"t": dump_rational(e.t), "kind": e.kind, "payload": dump_payload(e)} for e in cu.events],
    }


def load_curtain(v, ptr: str = "") -> Curtain:
    o = _obj(v, ptr, ("degree", "time_range", "segments"), ("events", "reference_time"))
    tr = _list(o["time_range"], _ptr(ptr, "time_range"))
    if len(tr) != 2:
        raise SchemaError(_ptr(ptr, "time_range"), "time range is [t0, t1]")
    time_range = (load_rational(tr[0], _ptr(_ptr(ptr, "time_range"), 0)), load_rational(tr[1], _ptr(_ptr(ptr, "time_range"), 1)))
    segments = []
    for k, s in enumerate(_list(o["segments"], _ptr(ptr, "segments"))):
        sp = _ptr(_ptr(ptr, "segments"), k)
        so = _obj(s, sp, ("t0", "t1", "keyframes"))
        frames = tuple(load_chart(c, _ptr(_ptr(sp, "keyframes"), j)) for j, c in enumerate(_list(so["keyframes"], _ptr(sp, "keyframes"))))
        if not frames:
            raise SchemaError(_ptr(sp, "keyframes"), "a segment needs at least one keyframe")
        segments.append(Segment(load_rational(so["t0"], _ptr(sp, "t0")), load_rational(so["t1"], _ptr(sp, "t1")), frames))
    events = []
    for k, e in enumerate(_list(o.get("events", []), _ptr(ptr, "events"))):
        ep = _ptr(_ptr(ptr, "events"), k)
        eo = _obj(e, ep, ("t", "kind", "payload"))
        kind = _str(eo["kind"], _ptr(ep, "kind"))
        if kind not in EVENT_KINDS:
            raise SchemaError(_ptr(ep, "kind"), f"kind must be one of {', '.join(EVENT_KINDS)}")
        events.append(CurtainEvent(load_rational(eo["t"], _ptr(ep, "t")), kind, load_payload(kind, eo["payload"], _ptr(ep, "payload"))))
    ref = o.get("reference_time")
    ref = None if ref is None else load_rational(ref, _ptr(ptr, "reference_time"))
    return Curtain(_int(o["degree"], _ptr(ptr, "degree")), time_range, tuple(segments), tuple(events), ref)


# --------------------------------------------------------------------------
# reports


def dump_validation(rep: ValidationReport) -> dict:
    return {"valid": rep.ok, "issues": [{"code": i.code, "subject": i.subject, "message": i.message} for i in rep.issues]}


def dump_cover_report(r: CoverReport) -> dict:
    out: dict[str, Any] = {
        "degree": r.degree,
        "note": r.note,
        "permutations": [list(p.images) for p in r.permutations],
        "permutations_cycles": [str(p) for p in r.permutations],
        "components": r.components,
        "orbits": r.orbits,
    }
    if r.euler_profile:
        out["euler_profile"] = [{"t0": dump_rational(s.t0), "t1": dump_rational(s.t1), "chi": s.chi} for s in r.euler_profile]
        out["euler_sequence"] = r.euler_sequence()
    if r.ledger is not None:
        out["handles"] = {
            "one_handles": r.ledger.one_handles,
            "two_handles": r.ledger.two_handles,
            "events": [{"t": dump_rational(e.t), "kind": e.kind, "handles": e.handles} for e in r.ledger.events],
        }
    if r.closed is not None:
        out["closed"] = r.closed
        out["end_slices_trivial"] = r.end_slices_trivial
    if r.heegaard is not None:
        out["heegaard"] = {
            "level": dump_rational(r.heegaard.level),
            "curtain_time": dump_rational(r.heegaard.curtain_time),
            "chi": r.heegaard.chi,
        }
    return out


def _bool(v, ptr: str) -> bool:
    if not isinstance(v, bool):
        raise SchemaError(ptr, "expected a boolean")
    return v


def load_validation(v, ptr: str = "") -> ValidationReport:
    o = _obj(v, ptr, ("valid", "issues"))
    rep = ValidationReport()
    for k, item in enumerate(_list(o["issues"], _ptr(ptr, "issues"))):
        ip = _ptr(_ptr(ptr, "issues"), k)
        i = _obj(item, ip, ("code", "subject", "message"))
        rep.add(_str(i["code"], _ptr(ip, "code")), _str(i["subject"], _ptr(ip, "subject")), _str(i["message"], _ptr(ip, "message")))
    if _bool(o["valid"], _ptr(ptr, "valid")) != rep.ok:
        raise SchemaError(_ptr(ptr, "valid"), "flag disagrees with the issue list")
    return rep


def _load_permutation(v, ptr: str) -> Permutation:
    images = [_int(x, _ptr(ptr, k)) for k, x in enumerate(_list(v, ptr))]
    try:
        return Permutation(tuple(images))
    except BraidError as exc:
        raise SchemaError(ptr, str(exc)) from None


def load_cover_report(v, ptr: str = "") -> CoverReport:
    o = _obj(
        v, ptr,
        ("degree", "note", "permutations", "components", "orbits"),
        ("permutations_cycles", "euler_profile", "euler_sequence", "handles", "closed", "end_slices_trivial", "heegaard"),
    )
    pp = _ptr(ptr, "permutations")
    perms = [_load_permutation(x, _ptr(pp, k)) for k, x in enumerate(_list(o["permutations"], pp))]
    op = _ptr(ptr, "orbits")
    orbs = [[_int(x, _ptr(_ptr(op, k), j)) for j, x in enumerate(_list(orb, _ptr(op, k)))] for k, orb in enumerate(_list(o["orbits"], op))]
    rep = CoverReport(
        _int(o["degree"], _ptr(ptr, "degree")), perms, _int(o["components"], _ptr(ptr, "components")), orbs,
        note=_str(o["note"], _ptr(ptr, "note")),
    )
    if "euler_profile" in o:
        ep = _ptr(ptr, "euler_profile")
        for k, item in enumerate(_list(o["euler_profile"], ep)):
            ip = _ptr(ep, k)
            s = _obj(item, ip, ("t0", "t1", "chi"))
            rep.euler_profile.append(
                SliceEuler(load_rational(s["t0"], _ptr(ip, "t0")), load_rational(s["t1"], _ptr(ip, "t1")), _int(s["chi"], _ptr(ip, "chi")))
            )
    if "handles" in o:
        hp = _ptr(ptr, "handles")
        h = _obj(o["handles"], hp, ("one_handles", "two_handles", "events"))
        events = []
        for k, item in enumerate(_list(h["events"], _ptr(hp, "events"))):
            ip = _ptr(_ptr(hp, "events"), k)
            e = _obj(item, ip, ("t", "kind", "handles"))
            events.append(HandleEvent(load_rational(e["t"], _ptr(ip, "t")), _str(e["kind"], _ptr(ip, "kind")), _int(e["handles"], _ptr(ip, "handles"))))
        rep.ledger = HandleLedger(_int(h["one_handles"], _ptr(hp, "one_handles")), _int(h["two_handles"], _ptr(hp, "two_handles")), tuple(events))
    if "closed" in o:
        rep.closed = _bool(o["closed"], _ptr(ptr, "closed"))
    if "end_slices_trivial" in o:
        rep.end_slices_trivial = _bool(o["end_slices_trivial"], _ptr(ptr, "end_slices_trivial"))
    if "heegaard" in o:
        gp = _ptr(ptr, "heegaard")
        g = _obj(o["heegaard"], gp, ("level", "curtain_time", "chi"))
        rep.heegaard = HeegaardSummary(
            load_rational(g["level"], _ptr(gp, "level")), load_rational(g["curtain_time"], _ptr(gp, "curtain_time")), _int(g["chi"], _ptr(gp, "chi"))
        )
    return rep


# --------------------------------------------------------------------------
# documents


DUMPERS: dict[type, tuple[str, Callable]] = {
    BraidWord: ("braid_word", dump_word),
    BandGeneratorForm: ("band_generator", dump_form),
    MonodromyData: ("monodromy_data", dump_monodromy),
    Chart: ("chart", dump_chart),
    PLPath: ("path", dump_path),
    Curtain: ("curtain", dump_curtain),
    ValidationReport: ("validation_report", dump_validation),
    CoverReport: ("cover_report", dump_cover_report),
}

LOADERS: dict[str, Callable] = {
    "braid_word": lambda v, p: load_word(v, p),
    "band_generator": lambda v, p: load_form(v, p),
    "monodromy_data": load_monodromy,
    "chart": load_chart,
    "path": load_path,
    "curtain": load_curtain,
    "validation_report": load_validation,
    "cover_report": load_cover_report,
}


def to_document(value) -> dict:
    kind, dump = DUMPERS[type(value)]
    return {"schema_version": SCHEMA_VERSION, "type": kind, **dump(value)}


def to_json(value, indent: int | None = None) -> str:
    return json.dumps(to_document(value), indent=indent, sort_keys=False)


def from_document(doc, expected: str | None = None):
    if not isinstance(doc, dict):
        raise SchemaError("", "expected an object")
    body = dict(doc)
    version = body.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise SchemaError("/schema_version", f"unsupported schema version {version!r}, expected {SCHEMA_VERSION}")
    kind = body.pop("type", expected)
    if kind is None:
        raise SchemaError("/type", "missing document type")
    if expected is not None and kind != expected:
        raise SchemaError("/type", f"expected a {expected} document, got {kind!r}")
    if kind not in LOADERS:
        raise SchemaError("/type", f"unknown document type {kind!r}")
    return LOADERS[kind](body, "")


def from_json(text: str, expected: str | None = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None
    return from_document(doc, expected)


def load_file(path, expected: str | None = None):
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read(), expected)


def save_file(path, value, indent: int | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(value, indent))
        fh.write("\n")

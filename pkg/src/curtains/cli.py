"""Command line interface.

Exit status: 0 success, 1 validation failure (or a negative answer), 2
malformed input or any other error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from . import io
from .braid import BraidError, format_word, left_normal_form, normal_form_word, parse_word, words_equal
from .builder import BuildError, build_curtain, random_admissible_data, validate_monodromy_data
from .chart import ChartError, intersection_word, standard_meridians, validate_chart
from .cover import CoverError, analyze
from .curtain import (
    CERTIFIED_TRANSITION,
    CurtainError,
    internal_boundary,
    meridian_monodromy,
    validate_curtain,
)
from .svg import render_chart, render_filmstrip

OK, INVALID, MALFORMED = 0, 1, 2


class Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path: str, kind: str):
    try:
        return io.load_file(path, kind)
    except OSError as exc:
        raise Failure(MALFORMED, f"cannot read {path}: {exc.strerror or exc}") from None
    except io.SchemaError as exc:
        raise Failure(MALFORMED, f"{path}: schema error at {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise Failure(MALFORMED, f"cannot write {path}: {exc.strerror or exc}") from None


def _word(text: str, degree: int):
    try:
        return parse_word(text, degree)
    except BraidError as exc:
        raise Failure(MALFORMED, f"bad braid word {text!r}: {exc}") from None


# --------------------------------------------------------------------------
# braid


def cmd_braid_nf(args) -> int:
    w = _word(args.word, args.degree)
    nf = left_normal_form(w)
    factors = " | ".join(" ".join(map(str, p.images)) for p in nf.factors) or "-"
    print(f"infimum: {nf.infimum}")
    print(f"factors: {factors}")
    print(f"word: {format_word(normal_form_word(nf))}")
    return OK


def cmd_braid_eq(args) -> int:
    a, b = _word(args.left, args.degree), _word(args.right, args.degree)
    if words_equal(a, b):
        print("equal")
        return OK
    print("not equal")
    return INVALID


# --------------------------------------------------------------------------
# chart


def _report(rep, as_json: bool) -> int:
    if as_json:
        print(io.to_json(rep, indent=2))
    else:
        print(rep)
    return OK if rep.ok else INVALID


def cmd_chart_validate(args) -> int:
    c = _load(args.chart, "chart")
    return _report(validate_chart(c), args.json)


def cmd_chart_monodromy(args) -> int:
    c = _load(args.chart, "chart")
    rep = validate_chart(c)
    if not rep.ok:
        print(rep, file=sys.stderr)
        return INVALID
    try:
        if args.path:
            p = _load(args.path, "path")
            print(format_word(intersection_word(c, p)))
            return OK
        ms = standard_meridians(c)
        for name, paths in (("x", ms.left), ("y", ms.right)):
            for k, p in enumerate(paths, start=1):
                print(f"{name}{k}: {format_word(intersection_word(c, p))}")
    except ChartError as exc:
        raise Failure(INVALID, str(exc)) from None
    return OK


def cmd_chart_render(args) -> int:
    c = _load(args.chart, "chart")
    _write(args.out, render_chart(c, width=args.width))
    return OK


# --------------------------------------------------------------------------
# curtain


def _has_certified(cu) -> bool:
    return any(e.kind == CERTIFIED_TRANSITION for e in cu.events)


def cmd_curtain_build(args) -> int:
    m = _load(args.data, "monodromy_data")
    rep = validate_monodromy_data(m)
    if not rep.ok:
        for issue in rep.issues:
            print(issue.message if issue.code == "hurwitz" else str(issue), file=sys.stderr)
        return INVALID
    try:
        cu = build_curtain(m)
    except BuildError as exc:
        print(exc, file=sys.stderr)
        return INVALID
    if args.strict_reject_certified and _has_certified(cu):
        print("the construction needs a certified transition, rejected by --strict-reject-certified", file=sys.stderr)
        return INVALID
    _write(args.out, io.to_json(cu) + "\n")
    print(f"built curtain with {len(cu.segments)} segments and {len(cu.events)} events", file=sys.stderr)
    return OK


def cmd_curtain_validate(args) -> int:
    cu = _load(args.curtain, "curtain")
    return _report(validate_curtain(cu, strict=args.strict_reject_certified), args.json)


def cmd_curtain_boundary(args) -> int:
    cu = _load(args.curtain, "curtain")
    try:
        ib = internal_boundary(cu)
    except CurtainError as exc:
        raise Failure(INVALID, str(exc)) from None
    print(f"components: {ib.components}")
    print(f"minima: {ib.minima}  maxima: {ib.maxima}")
    print(f"closed: {'yes' if ib.closed else 'no'}")
    if ib.braid is not None:
        print(f"closed braid: {format_word(ib.braid) or 'e'} in B_{ib.braid.degree}")
    return OK


def cmd_curtain_monodromy(args) -> int:
    cu = _load(args.curtain, "curtain")
    try:
        words = meridian_monodromy(cu, args.time)
    except (CurtainError, ChartError) as exc:
        raise Failure(INVALID, str(exc)) from None
    for k, w in enumerate(words, start=1):
        print(f"x{k}: {format_word(w)}")
    return OK


def cmd_curtain_render(args) -> int:
    cu = _load(args.curtain, "curtain")
    if args.slices < 1:
        raise Failure(MALFORMED, "--slices must be at least 1")
    try:
        strip = render_filmstrip(cu, count=args.slices)
    except CurtainError as exc:
        raise Failure(INVALID, str(exc)) from None
    os.makedirs(args.out_dir, exist_ok=True)
    for k, (t, svg) in enumerate(strip):
        path = os.path.join(args.out_dir, f"slice_{k:03d}.svg")
        _write(path, svg)
        print(f"{path}  t = {t}")
    return OK


def cmd_curtain_sample(args) -> int:
    m = random_admissible_data(random.Random(args.seed), args.max_n, args.max_d)
    _write(args.out, io.to_json(m, indent=2) + "\n")
    return OK


# --------------------------------------------------------------------------
# cover


def cmd_cover_analyze(args) -> int:
    m = _load(args.data, "monodromy_data")
    cu = _load(args.curtain, "curtain") if args.curtain else None
    try:
        report = analyze(m, cu)
    except CoverError as exc:
        raise Failure(INVALID, str(exc)) from None
    if args.out:
        _write(args.out, io.to_json(report, indent=2) + "\n")
    print(report.to_text())
    return OK


# --------------------------------------------------------------------------
# parser


def _add_braid(sub) -> None:
    p = sub.add_parser("braid", help="braid words")
    s = p.add_subparsers(dest="action", required=True)
    nf = s.add_parser("nf", help="left normal form of a word")
    nf.add_argument("word", help='word such as "s1 s2^-1"; "e" is the identity')
    nf.add_argument("-d", "--degree", type=int, required=True)
    nf.set_defaults(func=cmd_braid_nf)
    eq = s.add_parser("eq", help="decide whether two words are equal")
    eq.add_argument("left")
    eq.add_argument("right")
    eq.add_argument("-d", "--degree", type=int, required=True)
    eq.set_defaults(func=cmd_braid_eq)


def _add_chart(sub) -> None:
    p = sub.add_parser("chart", help="charts")
    s = p.add_subparsers(dest="action", required=True)
    v = s.add_parser("validate")
    v.add_argument("--chart", required=True)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_chart_validate)
    m = s.add_parser("monodromy", help="intersection word of a path, or of the standard meridians")
    m.add_argument("--chart", required=True)
    m.add_argument("--path")
    m.set_defaults(func=cmd_chart_monodromy)
    r = s.add_parser("render")
    r.add_argument("--chart", required=True)
    r.add_argument("--out")
    r.add_argument("--width", type=int, default=480)
    r.set_defaults(func=cmd_chart_render)


def _add_curtain(sub) -> None:
    p = sub.add_parser("curtain", help="curtains")
    s = p.add_subparsers(dest="action", required=True)
    b = s.add_parser("build", help="build a curtain from monodromy data")
    b.add_argument("--data", required=True)
    b.add_argument("--out")
    b.add_argument("--strict-reject-certified", action="store_true")
    b.set_defaults(func=cmd_curtain_build)
    v = s.add_parser("validate")
    v.add_argument("--curtain", required=True)
    v.add_argument("--strict-reject-certified", action="store_true")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_curtain_validate)
    bd = s.add_parser("boundary", help="internal boundary summary")
    bd.add_argument("--curtain", required=True)
    bd.set_defaults(func=cmd_curtain_boundary)
    m = s.add_parser("monodromy", help="meridian monodromy at the reference level")
    m.add_argument("--curtain", required=True)
    m.add_argument("--time", type=io.Q, default=None)
    m.set_defaults(func=cmd_curtain_monodromy)
    r = s.add_parser("render", help="SVG filmstrip")
    r.add_argument("--curtain", required=True)
    r.add_argument("--out-dir", required=True)
    r.add_argument("--slices", type=int, default=9)
    r.set_defaults(func=cmd_curtain_render)
    g = s.add_parser("sample", help="random admissible monodromy data")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-n", type=int, default=3)
    g.add_argument("--max-d", type=int, default=4)
    g.add_argument("--out")
    g.set_defaults(func=cmd_curtain_sample)


def _add_cover(sub) -> None:
    p = sub.add_parser("cover", help="branched cover invariants")
    s = p.add_subparsers(dest="action", required=True)
    a = s.add_parser("analyze")
    a.add_argument("--data", required=True)
    a.add_argument("--curtain")
    a.add_argument("--out")
    a.set_defaults(func=cmd_cover_analyze)


GROUPS = {"braid": _add_braid, "chart": _add_chart, "curtain": _add_curtain, "cover": _add_cover}


def build_parser(groups=tuple(GROUPS)) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curtains", description="braids, charts and curtains")
    sub = parser.add_subparsers(dest="group", required=True)
    for g in groups:
        GROUPS[g](sub)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else MALFORMED
    try:
        return args.func(args)
    except Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (io.SchemaError, BraidError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return MALFORMED
    except Exception as exc:  # never crash: report and map to the error status
        print(f"error: unexpected {type(exc).__name__}: {exc}", file=sys.stderr)
        return MALFORMED


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


def _group_main(group: str) -> int:
    return run([group] + sys.argv[1:])


def braid_main() -> int:
    return _group_main("braid")


def chart_main() -> int:
    return _group_main("chart")


def curtain_main() -> int:
    return _group_main("curtain")


def cover_main() -> int:
    return _group_main("cover")


if __name__ == "__main__":
    sys.exit(main())

"""Invariants of the simple branched cover described by monodromy data or a curtain.

Only quantities computable from permutations and slice combinatorics are
reported; the covering 3-manifold itself is never constructed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .braid import BandGeneratorForm, BraidWord, Permutation, band_word, permutation_of, words_equal
from .builder import MonodromyData
from .chart import Chart, intersection_word, standard_meridians
from .curtain import (
    CERTIFIED_TRANSITION,
    DELETE_FREE_EDGES,
    DISK_REPLACEMENT,
    INSERT_FREE_EDGES,
    Curtain,
)

SCOPE_NOTE = (
    "invariants computed from permutation and slice data only; "
    "the covering manifold is not identified"
)


class CoverError(ValueError):
    pass


def permutation_monodromy(m: MonodromyData | Sequence[BraidWord | BandGeneratorForm]) -> list[Permutation]:
    """Permutation image of each meridian; each must be a transposition.

    Accepts monodromy data or a bare sequence of meridian images.
    """
    images = m.images if isinstance(m, MonodromyData) else m
    out = []
    for i, f in enumerate(images, start=1):
        w = band_word(f) if isinstance(f, BandGeneratorForm) else f
        p = permutation_of(w)
        if not p.is_transposition():
            raise CoverError(f"image {i} has permutation {p}, not a transposition: the cover is not simple")
        out.append(p)
    return out


def orbits(degree: int, perms: Sequence[Permutation]) -> list[list[int]]:
    parent = list(range(degree + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in perms:
        for k in range(1, degree + 1):
            ra, rb = find(k), find(p(k))
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for k in range(1, degree + 1):
        groups.setdefault(find(k), []).append(k)
    return sorted(groups.values())


def cover_components(m: MonodromyData) -> int:
    """Number of connected components of the cover: orbits of the monodromy group."""
    perms = [permutation_of(band_word(f)) for f in m.images]
    return len(orbits(m.degree, perms))


def slice_euler(c: Chart) -> int:
    """Euler characteristic of the d-sheeted simple cover of the disk branched at the black vertices."""
    return c.degree - len(c.black_vertices())


@dataclass(frozen=True)
class HandleEvent:
    t: Fraction
    kind: str
    handles: int


@dataclass(frozen=True)
class HandleLedger:
    one_handles: int
    two_handles: int
    events: tuple[HandleEvent, ...]

    def counts(self) -> tuple[int, int]:
        return (self.one_handles, self.two_handles)


def handle_ledger(cu: Curtain) -> HandleLedger:
    """Free-edge insertions attach 1-handles, deletions 2-handles; other events none."""
    events = []
    ones = twos = 0
    for ev in cu.events:
        if ev.kind == INSERT_FREE_EDGES:
            k = len(ev.payload)
            ones += k
            events.append(HandleEvent(ev.t, "1-handle", k))
        elif ev.kind == DELETE_FREE_EDGES:
            k = len(ev.payload)
            twos += k
            events.append(HandleEvent(ev.t, "2-handle", k))
        elif ev.kind in (DISK_REPLACEMENT, CERTIFIED_TRANSITION):
            events.append(HandleEvent(ev.t, "none", 0))
    return HandleLedger(ones, twos, tuple(events))


@dataclass(frozen=True)
class SliceEuler:
    t0: Fraction
    t1: Fraction
    chi: int


def slice_euler_profile(cu: Curtain) -> list[SliceEuler]:
    """χ of the slice surface per segment, merged across segments where it does not change."""
    out: list[SliceEuler] = []
    for seg in cu.segments:
        chi = slice_euler(seg.first)
        if out and out[-1].chi == chi:
            out[-1] = SliceEuler(out[-1].t0, seg.t1, chi)
        else:
            out.append(SliceEuler(seg.t0, seg.t1, chi))
    return out


def _compress(values):
    out = []
    for v in values:
        if not out or out[-1] != v:
            out.append(v)
    return out


@dataclass(frozen=True)
class HeegaardSummary:
    """Splitting level (normalized to [0, 1]) and χ of the covering surface there."""

    level: Fraction
    curtain_time: Fraction
    chi: int


@dataclass
class CoverReport:
    degree: int
    permutations: list[Permutation]
    components: int
    orbits: list[list[int]]
    euler_profile: list[SliceEuler] = field(default_factory=list)
    ledger: HandleLedger | None = None
    closed: bool | None = None
    end_slices_trivial: bool | None = None
    heegaard: HeegaardSummary | None = None
    note: str = SCOPE_NOTE

    def euler_sequence(self) -> list[int]:
        return _compress([s.chi for s in self.euler_profile])

    def to_text(self) -> str:
        lines = [f"cover of degree {self.degree} ({self.note})"]
        lines.append("meridian permutations: " + ", ".join(str(p) for p in self.permutations))
        lines.append(f"components: {self.components}  orbits: {self.orbits}")
        if self.euler_profile:
            lines.append("slice euler characteristics:")
            for s in self.euler_profile:
                lines.append(f"  [{s.t0}, {s.t1}]  chi = {s.chi}")
        if self.ledger is not None:
            lines.append(f"handles: {self.ledger.one_handles} one-handles, {self.ledger.two_handles} two-handles")
            for e in self.ledger.events:
                if e.handles:
                    lines.append(f"  t = {e.t}: {e.handles} x {e.kind}")
        if self.closed is not None:
            lines.append(f"closed (empty end slices): {'yes' if self.closed else 'no'}")
        if self.end_slices_trivial is not None:
            lines.append(f"end slices trivial (chi = d, no monodromy): {'yes' if self.end_slices_trivial else 'no'}")
        if self.heegaard is not None:
            h = self.heegaard
            lines.append(f"splitting level {h.level} (curtain time {h.curtain_time}), splitting surface chi = {h.chi}")
        return "\n".join(lines)


def _end_slice_trivial(c: Chart) -> bool:
    if slice_euler(c) != c.degree:
        return False
    ident = BraidWord(c.degree)
    return all(words_equal(intersection_word(c, p), ident) for p in standard_meridians(c).all())


def analyze(m: MonodromyData, cu: Curtain | None = None) -> CoverReport:
    perms = permutation_monodromy(m)
    orb = orbits(m.degree, perms)
    rep = CoverReport(m.degree, perms, len(orb), orb)
    if cu is None:
        return rep
    rep.euler_profile = slice_euler_profile(cu)
    rep.ledger = handle_ledger(cu)
    first, last = cu.segments[0].first, cu.segments[-1].last
    rep.closed = first.is_empty() and last.is_empty()
    rep.end_slices_trivial = _end_slice_trivial(first) and _end_slice_trivial(last)
    lo, hi = cu.time_range
    mid = (lo + hi) / 2
    level = (mid - lo) / (hi - lo)
    mid_chart = next(s.first for s in cu.segments if s.t0 <= mid <= s.t1)
    rep.heegaard = HeegaardSummary(level, mid, slice_euler(mid_chart))
    return rep

"""Exact algebra in the Artin braid groups B_d.

Words are immutable tuples of ``(index, sign)`` letters.  Equality of braids
is decided by the left-greedy Garside normal form; simple factors (positive
permutation braids) are stored as arrangements: ``p[j]`` is the strand that
occupies position ``j`` after the factor is applied, 0-based.  With that
convention ``compose(p, q)[j] == p[q[j]]`` is the product ``p * q``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

Letter = tuple[int, int]
Arrangement = tuple[int, ...]


class BraidError(ValueError):
    """Raised for malformed braid words or incompatible degrees."""


@dataclass(frozen=True)
class BraidWord:
    degree: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.degree < 1:
            raise BraidError(f"degree must be >= 1, got {self.degree}")
        letters = tuple((int(i), int(s)) for i, s in self.letters)
        for i, s in letters:
            if not 1 <= i < self.degree:
                raise BraidError(f"generator index {i} out of range for B_{self.degree}")
            if s not in (1, -1):
                raise BraidError(f"letter sign must be +1 or -1, got {s}")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return compose(self, other)

    def __str__(self):
        return format_word(self)

    @classmethod
    def identity(cls, degree: int) -> "BraidWord":
        return cls(degree, ())

    @classmethod
    def from_ints(cls, degree: int, ints: Iterable[int]) -> "BraidWord":
        """Build from the signed-integer encoding: ``[1, -2]`` is s1 s2^-1."""
        return cls(degree, tuple((abs(k), 1 if k > 0 else -1) for k in ints))

    def to_ints(self) -> list[int]:
        return [i * s for i, s in self.letters]

    def exponent_sum(self) -> int:
        return sum(s for _, s in self.letters)


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1..d}`` stored as its list of images."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise BraidError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (p * q)(k) = p(q(k))
        return Permutation(tuple(self(other(k)) for k in range(1, self.degree + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for k, v in enumerate(self.images, start=1):
            inv[v - 1] = k
        return Permutation(tuple(inv))

    def moved(self) -> tuple[int, ...]:
        return tuple(k for k, v in enumerate(self.images, start=1) if k != v)

    def is_transposition(self) -> bool:
        return len(self.moved()) == 2

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest element."""
        seen, out = set(), []
        for start in range(1, self.degree + 1):
            if start in seen or self(start) == start:
                continue
            cyc, k = [], start
            while k not in seen:
                seen.add(k)
                cyc.append(k)
                k = self(k)
            out.append(tuple(cyc))
        return out

    def __str__(self):
        cyc = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(1, degree + 1)))

    @classmethod
    def transposition(cls, degree: int, a: int, b: int) -> "Permutation":
        images = list(range(1, degree + 1))
        images[a - 1], images[b - 1] = b, a
        return cls(tuple(images))


@dataclass(frozen=True)
class NormalForm:
    """Left normal form Δ^infimum · f_1 ⋯ f_k with f_j proper simple braids."""

    degree: int
    infimum: int
    factors: tuple[Permutation, ...]

    @property
    def canonical_length(self) -> int:
        return len(self.factors)

    def is_identity(self) -> bool:
        return self.infimum == 0 and not self.factors


@dataclass(frozen=True)
class BandGeneratorForm:
    """The band generator ``w σ_k^ε w^-1``, kept in conjugate form."""

    conjugator: BraidWord
    index: int
    sign: int = 1

    def __post_init__(self):
        if not 1 <= self.index < self.conjugator.degree:
            raise BraidError(
                f"target index {self.index} out of range for B_{self.conjugator.degree}"
            )
        if self.sign not in (1, -1):
            raise BraidError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def degree(self) -> int:
        return self.conjugator.degree


# --------------------------------------------------------------------------
# word operations


def _check_same_degree(*words: BraidWord) -> int:
    degrees = {w.degree for w in words}
    if len(degrees) != 1:
        raise BraidError(f"degree mismatch: {sorted(degrees)}")
    return degrees.pop()


def compose(*words: BraidWord) -> BraidWord:
    """Concatenate words of equal degree (no reduction)."""
    if not words:
        raise BraidError("compose needs at least one word")
    d = _check_same_degree(*words)
    return BraidWord(d, tuple(l for w in words for l in w.letters))


def invert(w: BraidWord) -> BraidWord:
    return BraidWord(w.degree, tuple((i, -s) for i, s in reversed(w.letters)))


def free_reduce(w: BraidWord) -> BraidWord:
    """Cancel adjacent σ_i σ_i^-1 pairs; nothing else."""
    stack: list[Letter] = []
    for i, s in w.letters:
        if stack and stack[-1] == (i, -s):
            stack.pop()
        else:
            stack.append((i, s))
    return BraidWord(w.degree, tuple(stack))


def power(w: BraidWord, k: int) -> BraidWord:
    if k < 0:
        return power(invert(w), -k)
    return BraidWord(w.degree, w.letters * k)


def conjugate(w: BraidWord, by: BraidWord) -> BraidWord:
    """Literal word ``by · w · by^-1``."""
    return compose(by, w, invert(by))


def band_word(f: BandGeneratorForm) -> BraidWord:
    d = f.degree
    return compose(f.conjugator, BraidWord(d, ((f.index, f.sign),)), invert(f.conjugator))


_TOKEN = re.compile(r"^s(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, degree: int) -> BraidWord:
    """Parse the CLI syntax ``"s1 s2^-1 s1"``; ``"e"`` or ``""`` is the identity.

    Exponents other than ±1 expand into repeated letters.
    """
    letters: list[Letter] = []
    for token in text.replace("*", " ").split():
        if token in ("e", "1"):
            continue
        m = _TOKEN.match(token)
        if m is None:
            raise BraidError(f"cannot parse braid token {token!r}")
        index = int(m.group(1))
        exp = int(m.group(2)) if m.group(2) is not None else 1
        if exp == 0:
            continue
        letters.extend([(index, 1 if exp > 0 else -1)] * abs(exp))
    return BraidWord(degree, tuple(letters))


def format_word(w: BraidWord) -> str:
    if not w.letters:
        return "e"
    return " ".join(f"s{i}" if s == 1 else f"s{i}^-1" for i, s in w.letters)


# --------------------------------------------------------------------------
# permutations


def permutation_of(w: BraidWord) -> Permutation:
    """Image of ``w`` in S_d, with σ_i ↦ (i i+1)."""
    arr = list(range(1, w.degree + 1))
    for i, _ in w.letters:
        arr[i - 1], arr[i] = arr[i], arr[i - 1]
    return Permutation(tuple(arr))


# --------------------------------------------------------------------------
# Garside normal form


def _compose(p: Arrangement, q: Arrangement) -> Arrangement:
    return tuple(p[j] for j in q)


@lru_cache(maxsize=None)
def _identity(d: int) -> Arrangement:
    return tuple(range(d))


@lru_cache(maxsize=None)
def _delta(d: int) -> Arrangement:
    return tuple(range(d - 1, -1, -1))


@lru_cache(maxsize=None)
def _atom(d: int, i: int) -> Arrangement:
    arr = list(range(d))
    arr[i - 1], arr[i] = arr[i], arr[i - 1]
    return tuple(arr)


@lru_cache(maxsize=None)
def _length(p: Arrangement) -> int:
    n = len(p)
    return sum(1 for a in range(n) for b in range(a + 1, n) if p[a] > p[b])


@lru_cache(maxsize=None)
def _tau(p: Arrangement) -> Arrangement:
    d = len(p)
    return tuple(d - 1 - p[d - 1 - j] for j in range(d))


@lru_cache(maxsize=None)
def _starting_set(p: Arrangement) -> frozenset[int]:
    d, n = len(p), _length(p)
    return frozenset(i for i in range(1, d) if _length(_compose(_atom(d, i), p)) < n)


@lru_cache(maxsize=None)
def _finishing_set(p: Arrangement) -> frozenset[int]:
    d, n = len(p), _length(p)
    return frozenset(i for i in range(1, d) if _length(_compose(p, _atom(d, i))) < n)


@lru_cache(maxsize=None)
def _left_weight(a: Arrangement, b: Arrangement) -> tuple[Arrangement, Arrangement]:
    """Move letters from the front of ``b`` onto ``a`` until the pair is left-weighted."""
    d = len(a)
    while True:
        movable = _starting_set(b) - _finishing_set(a)
        if not movable:
            return a, b
        i = min(movable)
        a = _compose(a, _atom(d, i))
        b = _compose(_atom(d, i), b)


def _normalize(d: int, simple_factors: Sequence[Arrangement]) -> tuple[int, tuple[Arrangement, ...]]:
    ident, delta = _identity(d), _delta(d)
    factors: list[Arrangement] = []
    for s in simple_factors:
        factors.append(s)
        for j in range(len(factors) - 2, -1, -1):
            a, b = _left_weight(factors[j], factors[j + 1])
            if (a, b) == (factors[j], factors[j + 1]):
                break
            factors[j], factors[j + 1] = a, b
        while factors and factors[-1] == ident:
            factors.pop()
    lead = 0
    while lead < len(factors) and factors[lead] == delta:
        lead += 1
    return lead, tuple(factors[lead:])


def _arr_to_perm(p: Arrangement) -> Permutation:
    return Permutation(tuple(v + 1 for v in p))


@lru_cache(maxsize=4096)
def _nf_cached(d: int, letters: tuple[Letter, ...]) -> tuple[int, tuple[Arrangement, ...]]:
    # σ_i^-1 = Δ^-1 · (Δ σ_i^-1); every Δ^-1 is pushed to the front, applying τ
    # once to each simple factor it passes.
    delta = _delta(d)
    raw: list[Arrangement] = []
    negatives = 0
    for i, s in letters:
        if s == 1:
            raw.append(_atom(d, i))
        else:
            raw.append(_compose(delta, _atom(d, i)))
            negatives += 1
    remaining = negatives
    twisted = []
    for (i, s), f in zip(letters, raw):
        if s == -1:
            remaining -= 1
        twisted.append(_tau(f) if remaining % 2 else f)
    lead, factors = _normalize(d, twisted)
    return lead - negatives, factors


def left_normal_form(w: BraidWord) -> NormalForm:
    if w.degree == 1:
        return NormalForm(1, 0, ())
    inf, factors = _nf_cached(w.degree, w.letters)
    return NormalForm(w.degree, inf, tuple(_arr_to_perm(f) for f in factors))


def words_equal(w1: BraidWord, w2: BraidWord) -> bool:
    _check_same_degree(w1, w2)
    return left_normal_form(w1) == left_normal_form(w2)


def is_identity(w: BraidWord) -> bool:
    return left_normal_form(w).is_identity()


def normal_form_word(nf: NormalForm) -> BraidWord:
    """A word representing ``nf`` (Δ powers expanded as permutation braids)."""
    d = nf.degree
    letters: list[Letter] = []
    delta_word = _simple_word(_delta(d)) if d > 1 else ()
    if nf.infimum >= 0:
        letters.extend(delta_word * nf.infimum)
    else:
        letters.extend(tuple((i, -1) for i, _ in reversed(delta_word)) * -nf.infimum)
    for f in nf.factors:
        letters.extend(_simple_word(tuple(v - 1 for v in f.images)))
    return BraidWord(d, tuple(letters))


def _simple_word(p: Arrangement) -> tuple[Letter, ...]:
    d = len(p)
    letters = []
    while _length(p):
        i = min(_starting_set(p))
        letters.append((i, 1))
        p = _compose(_atom(d, i), p)
    return tuple(letters)


# --------------------------------------------------------------------------
# Hurwitz action

STANDARD = "standard"
MIRROR = "mirror"


def _hurwitz_step(
    tup: list[BraidWord], i: int, sign: int, convention: str
) -> None:
    a, b = tup[i - 1], tup[i]
    if convention == MIRROR:
        sign = -sign
    if sign == 1:
        # (a, b) -> (a b a^-1, b := a)
        tup[i - 1], tup[i] = compose(a, b, invert(a)), a
    else:
        tup[i - 1], tup[i] = b, compose(invert(b), a, b)


def hurwitz_act(
    b: BraidWord, tup: Sequence[BraidWord], convention: str = STANDARD
) -> list[BraidWord]:
    """Act by the braid ``b`` of B_n on an n-tuple of words in B_d.

    With the standard convention σ_i sends ``(g_i, g_{i+1})`` to
    ``(g_i g_{i+1} g_i^-1, g_i)``; letters act left to right.  The mirror
    convention swaps the roles of σ_i and σ_i^-1.
    """
    if convention not in (STANDARD, MIRROR):
        raise BraidError(f"unknown Hurwitz convention {convention!r}")
    if len(tup) != b.degree:
        raise BraidError(f"tuple length {len(tup)} does not match braid degree {b.degree}")
    if tup:
        _check_same_degree(*tup)
    out = list(tup)
    for i, s in b.letters:
        _hurwitz_step(out, i, s, convention)
    return out


def tuples_equal(t1: Sequence[BraidWord], t2: Sequence[BraidWord]) -> bool:
    return len(t1) == len(t2) and all(words_equal(a, b) for a, b in zip(t1, t2))


def is_band_generator(w: BraidWord) -> bool:
    """Necessary conditions only: transposition image and exponent sum ±1."""
    return permutation_of(w).is_transposition() and abs(w.exponent_sum()) == 1

"""Graded linear algebra over the rationals: bases, elements, linear maps,
Koszul signs and unshuffles.

Permutations are tuples of 0-based images: ``tau[p]`` is the image of
position ``p``.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InputError

Scalar = Fraction


def to_scalar(value) -> Fraction:
    """Parse an exact scalar from an int, Fraction or a ``"p/q"`` string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not an exact rational: {value!r}") from exc
    raise InputError(f"not an exact scalar (floats are rejected): {value!r}")


def format_scalar(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- permutations and signs -------------------------------------------------

def check_permutation(tau: Sequence[int]) -> tuple[int, ...]:
    tau = tuple(tau)
    if sorted(tau) != list(range(len(tau))):
        raise InputError(f"not a permutation of 0..{len(tau) - 1}: {tau}")
    return tau


def perm_sign(tau: Sequence[int]) -> int:
    tau = check_permutation(tau)
    inv = sum(1 for p, q in combinations(range(len(tau)), 2) if tau[p] > tau[q])
    return -1 if inv % 2 else 1


def koszul_epsilon(degs: Sequence[int], tau: Sequence[int]) -> Fraction:
    """Sign with v_{tau(1)}...v_{tau(n)} = eps * v_1...v_n in the graded
    symmetric algebra, for homogeneous v_i of degrees ``degs``.

    Computed by bubble-sorting the permuted word back to the identity and
    accumulating (-1)^{|a||b|} for every adjacent swap.
    """
    tau = check_permutation(tau)
    if len(degs) != len(tau):
        raise InputError(f"{len(degs)} degrees for a permutation of {len(tau)} letters")
    word = list(tau)
    parity = 0
    n = len(word)
    for end in range(n - 1, 0, -1):
        for p in range(end):
            if word[p] > word[p + 1]:
                parity ^= (degs[word[p]] * degs[word[p + 1]]) & 1
                word[p], word[p + 1] = word[p + 1], word[p]
    return Fraction(-1 if parity else 1)


def koszul_chi(degs: Sequence[int], tau: Sequence[int]) -> Fraction:
    return perm_sign(tau) * koszul_epsilon(degs, tau)


def unshuffles(i: int, n_minus_i: int) -> Iterator[tuple[int, ...]]:
    """Enumerate the (i, n-i)-unshuffles, lexicographic in the first block."""
    if i < 0 or n_minus_i < 0:
        raise InputError("unshuffle block sizes must be non-negative")
    n = i + n_minus_i
    everything = range(n)
    for first in combinations(everything, i):
        chosen = set(first)
        yield first + tuple(k for k in everything if k not in chosen)


def sort_word(word: Sequence[int], degs: Sequence[int], symmetric: bool):
    """Sort a word of basis indices into canonical (non-decreasing) order.

    Returns ``(sorted_word, sign)`` such that
    ``B(word) = sign * B(sorted_word)`` for a graded symmetric (or graded
    skew-symmetric) multilinear ``B``.  ``sign`` is 0 when the word vanishes
    identically: a repeated odd entry for symmetric words, a repeated even
    entry for skew words.
    """
    w = tuple(word)
    parity = 0
    n = len(w)
    for p in range(n):
        dp = degs[w[p]]
        for q in range(p + 1, n):
            if w[p] > w[q]:
                parity ^= (dp * degs[w[q]]) & 1
                if not symmetric:
                    parity ^= 1
    s = tuple(sorted(w))
    for p in range(n - 1):
        if s[p] == s[p + 1]:
            odd = degs[s[p]] & 1
            if (symmetric and odd) or (not symmetric and not odd):
                return s, 0
    return s, (-1 if parity else 1)


def canonical_words(degs: Sequence[int], n: int, symmetric: bool) -> Iterator[tuple[int, ...]]:
    """Non-decreasing words of length ``n`` that do not vanish identically."""
    from itertools import combinations_with_replacement

    for w in combinations_with_replacement(range(len(degs)), n):
        ok = True
        for p in range(n - 1):
            if w[p] == w[p + 1]:
                odd = degs[w[p]] & 1
                if (symmetric and odd) or (not symmetric and not odd):
                    ok = False
                    break
        if ok:
            yield w


# -- bases and elements -----------------------------------------------------

class GradedBasis:
    """An ordered basis of a finite-dimensional graded vector space."""

    __slots__ = ("labels", "degrees", "_index")

    def __init__(self, items: Iterable[tuple[str, int]]):
        items = list(items)
        self.labels = tuple(str(label) for label, _ in items)
        self.degrees = tuple(int(d) for _, d in items)
        self._index = {label: k for k, label in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise InputError(f"duplicate basis labels in {self.labels}")

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(zip(self.labels, self.degrees))

    def __eq__(self, other):
        return (isinstance(other, GradedBasis) and self.labels == other.labels
                and self.degrees == other.degrees)

    def __hash__(self):
        return hash((self.labels, self.degrees))

    def __repr__(self):
        inner = ", ".join(f"{l}:{d}" for l, d in self)
        return f"GradedBasis({inner})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown basis label {label!r}") from None

    def shifted(self, k: int = 1) -> "GradedBasis":
        """Basis of V[k]: the same labels with degrees |v| - k."""
        return GradedBasis((l, d - k) for l, d in self)

    def concat(self, other: "GradedBasis") -> "GradedBasis":
        return GradedBasis(list(self) + list(other))

    def element(self, coords: Mapping) -> "Element":
        """Build an element from a mapping keyed by labels or indices."""
        out = {}
        for key, value in coords.items():
            k = self.index(key) if isinstance(key, str) else int(key)
            q = to_scalar(value)
            if q:
                out[k] = out.get(k, 0) + q
        return Element(self, out)

    def basis_vector(self, k) -> "Element":
        if isinstance(k, str):
            k = self.index(k)
        return Element(self, {k: Fraction(1)})

    def zero(self) -> "Element":
        return Element(self, {})


class Element:
    """A vector given by sparse rational coordinates in a GradedBasis."""

    __slots__ = ("base", "coords")

    def __init__(self, base: GradedBasis, coords: Mapping[int, Fraction] | None = None):
        self.base = base
        clean = {}
        for k, v in (coords or {}).items():
            if not 0 <= k < len(base):
                raise InputError(f"index {k} outside basis of size {len(base)}")
            if v:
                clean[k] = Fraction(v)
        self.coords = clean

    def __iter__(self):
        return iter(sorted(self.coords.items()))

    def __bool__(self):
        return bool(self.coords)

    def is_zero(self) -> bool:
        return not self.coords

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.base == other.base and self.coords == other.coords
        if other == 0:
            return not self.coords
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.coords.items())))

    def _check(self, other: "Element"):
        if self.base != other.base:
            raise InputError("elements live in different graded spaces")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        out = dict(self.coords)
        for k, v in other.coords.items():
            out[k] = out.get(k, 0) + v
        return Element(self.base, out)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __neg__(self) -> "Element":
        return Element(self.base, {k: -v for k, v in self.coords.items()})

    def __mul__(self, c) -> "Element":
        c = Fraction(c)
        return Element(self.base, {k: c * v for k, v in self.coords.items()})

    __rmul__ = __mul__

    def degree(self) -> int | None:
        """Homogeneous degree; None for zero; InputError if inhomogeneous."""
        degs = {self.base.degrees[k] for k in self.coords}
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError(f"element {self} is not homogeneous")
        return degs.pop()

    def in_basis(self, base: GradedBasis, offset: int = 0) -> "Element":
        """Re-read the coordinates in another basis (shifted index)."""
        return Element(base, {k + offset: v for k, v in self.coords.items()})

    def __repr__(self):
        return f"Element({self})"

    def __str__(self):
        if not self.coords:
            return "0"
        parts = []
        for k, v in self:
            label = self.base.labels[k]
            if v == 1:
                term = label
            elif v == -1:
                term = f"-{label}"
            else:
                term = f"{format_scalar(v)}*{label}"
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")


class LinearMap:
    """A homogeneous linear map between graded spaces as a sparse matrix.

    ``entries[(row, col)]`` is the coefficient of basis vector ``row`` in the
    image of basis vector ``col``.
    """

    __slots__ = ("source", "target", "entries")

    def __init__(self, source: GradedBasis, target: GradedBasis | None = None,
                 entries: Mapping[tuple[int, int], Fraction] | None = None):
        self.source = source
        self.target = source if target is None else target
        self.entries = {rc: Fraction(v) for rc, v in (entries or {}).items() if v}
        for r, c in self.entries:
            if not (0 <= r < len(self.target) and 0 <= c < len(self.source)):
                raise InputError(f"matrix entry {(r, c)} outside the bases")

    @classmethod
    def identity(cls, base: GradedBasis) -> "LinearMap":
        return cls(base, base, {(k, k): 1 for k in range(len(base))})

    def degree(self) -> int | None:
        degs = {self.target.degrees[r] - self.source.degrees[c] for r, c in self.entries}
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError("linear map is not homogeneous")
        return degs.pop()

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.entries == other.entries)

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items())))

    def __call__(self, v: Element) -> Element:
        out: dict[int, Fraction] = {}
        for (r, c), a in self.entries.items():
            x = v.coords.get(c)
            if x:
                out[r] = out.get(r, 0) + a * x
        return Element(self.target, out)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        out = dict(self.entries)
        for rc, v in other.entries.items():
            out[rc] = out.get(rc, 0) + v
        return LinearMap(self.source, self.target, out)

    def __neg__(self):
        return LinearMap(self.source, self.target, {rc: -v for rc, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c) -> "LinearMap":
        c = Fraction(c)
        return LinearMap(self.source, self.target, {rc: c * v for rc, v in self.entries.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        """Composition self o other."""
        by_row: dict[int, list] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict[tuple[int, int], Fraction] = {}
        for (r, m), a in self.entries.items():
            for c, b in by_row.get(m, ()):
                out[(r, c)] = out.get((r, c), 0) + a * b
        return LinearMap(other.source, self.target, out)

    def commutator(self, other: "LinearMap") -> "LinearMap":
        """Graded commutator AB - (-1)^{|A||B|} BA."""
        da, db = self.degree(), other.degree()
        if da is None or db is None:
            return LinearMap(self.source, self.target)
        sign = -1 if (da * db) % 2 else 1
        return (self @ other) - (other @ self) * sign

    def __repr__(self):
        return f"LinearMap({self})"

    def __str__(self):
        if not self.entries:
            return "0"
        parts = []
        for (r, c), v in sorted(self.entries.items()):
            parts.append(f"{format_scalar(v)}*{self.target.labels[r]}<-{self.source.labels[c]}")
        return " + ".join(parts)

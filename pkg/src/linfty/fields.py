"""Polynomial functions and vector fields on a graded vector space.

Coordinates xi_i are dual to the basis u_i of a GradedBasis and have degree
-deg(u_i).  A monomial is a non-decreasing tuple of coordinate indices in
which odd coordinates appear at most once; the Koszul sign needed to reach
that canonical order is folded into the coefficient.  ``d_i`` (the partial
derivative, acting from the left) and the contraction ``iota_{u_i}`` both
have degree deg(u_i).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InputError
from .graded import Element, GradedBasis, canonical_words, format_scalar, to_scalar
from .report import Report

Mono = tuple  # tuple[int, ...]
Terms = dict  # dict[Mono, Fraction]


class CoordinateSystem:
    """Coordinates on a graded vector space, with an optional weight cutoff."""

    __slots__ = ("basis", "degrees", "parity", "cutoff")

    def __init__(self, basis: GradedBasis, cutoff: int | None = None):
        if cutoff is not None and cutoff < 0:
            raise InputError("weight cutoff must be >= 0")
        self.basis = basis
        self.degrees = tuple(-d for d in basis.degrees)
        self.parity = tuple(d & 1 for d in basis.degrees)
        self.cutoff = cutoff

    def __len__(self):
        return len(self.basis)

    @property
    def labels(self):
        return self.basis.labels

    def __eq__(self, other):
        return (isinstance(other, CoordinateSystem) and self.basis == other.basis
                and self.cutoff == other.cutoff)

    def __hash__(self):
        return hash((self.basis, self.cutoff))

    def __repr__(self):
        return f"CoordinateSystem({self.basis!r}, cutoff={self.cutoff})"

    def with_cutoff(self, cutoff: int | None) -> "CoordinateSystem":
        return CoordinateSystem(self.basis, cutoff)

    def mono_degree(self, m: Mono) -> int:
        return sum(self.degrees[i] for i in m)

    def coordinate(self, i) -> "Poly":
        if isinstance(i, str):
            i = self.basis.index(i)
        return Poly(self, {(i,): Fraction(1)})

    def one(self) -> "Poly":
        return Poly(self, {(): Fraction(1)})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def render_mono(self, m: Mono) -> str:
        if not m:
            return "1"
        parts = []
        p = 0
        while p < len(m):
            q = p
            while q < len(m) and m[q] == m[p]:
                q += 1
            label = self.labels[m[p]]
            parts.append(label if q - p == 1 else f"{label}^{q - p}")
            p = q
        return "*".join(parts)


# -- raw monomial arithmetic ---------------------------------------------------

def mono_mul(parity, m1: Mono, m2: Mono):
    """Product of two canonical monomials: (sign, monomial), sign 0 if it vanishes."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    flips = 0
    for b in m2:
        if parity[b]:
            for a in m1:
                if a == b:
                    return 0, None
                if a > b and parity[a]:
                    flips += 1
    merged = tuple(sorted(m1 + m2))
    return (-1 if flips & 1 else 1), merged


def mono_diff(parity, m: Mono, i: int):
    """Left derivative d_i of a monomial: (factor, monomial) or (0, None)."""
    try:
        p = m.index(i)
    except ValueError:
        return 0, None
    if parity[i]:
        before = sum(parity[a] for a in m[:p])
        return (-1 if before & 1 else 1), m[:p] + m[p + 1:]
    k = m.count(i)
    return k, m[:p] + m[p + 1:]


def _add_into(acc: Terms, m: Mono, c):
    v = acc.get(m, 0) + c
    if v:
        acc[m] = v
    else:
        acc.pop(m, None)


def normalize_word(coords: CoordinateSystem, word: Iterable[int]):
    """Canonical monomial of a product of coordinates in the given order."""
    sign, mono = 1, ()
    for i in word:
        s, mono = mono_mul(coords.parity, mono, (i,))
        if s == 0:
            return 0, None
        sign *= s
    return sign, mono


class Poly:
    """A polynomial in the coordinates of a CoordinateSystem."""

    __slots__ = ("coords", "terms", "truncated")

    def __init__(self, coords: CoordinateSystem, terms: Mapping | None = None,
                 truncated: bool = False):
        self.coords = coords
        clean: Terms = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[tuple(m)] = c
        self.terms = clean
        self.truncated = truncated

    @classmethod
    def from_words(cls, coords: CoordinateSystem, items: Iterable) -> "Poly":
        """Build from (coefficient, word) pairs; words may be unsorted or use labels."""
        acc: Terms = {}
        for c, word in items:
            word = [coords.basis.index(w) if isinstance(w, str) else int(w) for w in word]
            s, m = normalize_word(coords, word)
            if s:
                _add_into(acc, m, s * to_scalar(c))
        return cls(coords, acc)

    def _check(self, other: "Poly"):
        if self.coords.basis != other.coords.basis:
            raise InputError("polynomials on different coordinate systems")

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coords.basis == other.coords.basis and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.terms
            return self.terms == {(): Fraction(other)}
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(acc, m, c)
        return Poly(self.coords, acc, self.truncated or other.truncated)

    def __neg__(self):
        return Poly(self.coords, {m: -c for m, c in self.terms.items()}, self.truncated)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly(self.coords, {m: c * v for m, v in self.terms.items()}, self.truncated)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return poly_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def diff(self, i: int) -> "Poly":
        """Left partial derivative with respect to coordinate i."""
        acc: Terms = {}
        par = self.coords.parity
        for m, c in self.terms.items():
            f, rest = mono_diff(par, m, i)
            if f:
                _add_into(acc, rest, f * c)
        return Poly(self.coords, acc, self.truncated)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def max_length(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def min_length(self) -> int | None:
        return min((len(m) for m in self.terms), default=None)

    def degrees(self) -> set[int]:
        return {self.coords.mono_degree(m) for m in self.terms}

    def degree(self) -> int | None:
        d = self.degrees()
        if not d:
            return None
        if len(d) > 1:
            raise InputError(f"polynomial {self} is not homogeneous")
        return d.pop()

    def reindexed(self, coords: CoordinateSystem, mapping) -> "Poly":
        """Rename coordinate i to mapping[i] (re-normalizing signs)."""
        acc: Terms = {}
        for m, c in self.terms.items():
            s, mm = normalize_word(coords, [mapping[i] for i in m])
            if s:
                _add_into(acc, mm, s * c)
        return Poly(coords, acc, self.truncated)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda mc: (len(mc[0]), mc[0])):
            body = self.coords.render_mono(m)
            if not m:
                parts.append(format_scalar(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{format_scalar(c)}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_mul(a: Poly, b: Poly) -> Poly:
    """Graded-commutative product, truncated at the weight cutoff if one is set."""
    a._check(b)
    coords = a.coords
    cutoff = coords.cutoff
    par = coords.parity
    acc: Terms = {}
    truncated = a.truncated or b.truncated
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            if cutoff is not None and len(m1) + len(m2) > cutoff:
                truncated = True
                continue
            s, m = mono_mul(par, m1, m2)
            if s:
                _add_into(acc, m, s * c1 * c2)
    return Poly(coords, acc, truncated)


def evaluate_at_origin(P) -> Fraction:
    """Constant term of a polynomial."""
    return P.constant_term()


# -- vector fields -------------------------------------------------------------

class VectorField:
    """sum_i P^i d_i with polynomial coefficients P^i."""

    __slots__ = ("coords", "comps", "truncated")

    def __init__(self, coords: CoordinateSystem, comps: Mapping | None = None,
                 truncated: bool = False):
        self.coords = coords
        clean: dict[int, Poly] = {}
        for i, p in (comps or {}).items():
            if isinstance(i, str):
                i = coords.basis.index(i)
            if not isinstance(p, Poly):
                p = Poly(coords, p)
            if p.coords.basis != coords.basis:
                raise InputError("coefficient polynomial on the wrong coordinates")
            if not 0 <= i < len(coords):
                raise InputError(f"no coordinate {i}")
            truncated = truncated or p.truncated
            if p:
                clean[i] = p if p.coords is coords else Poly(coords, p.terms, p.truncated)
        self.comps = clean
        self.truncated = truncated

    @classmethod
    def zero(cls, coords):
        return cls(coords)

    def _check(self, other: "VectorField"):
        if self.coords.basis != other.coords.basis:
            raise InputError("vector fields on different coordinate systems")

    def __bool__(self):
        return bool(self.comps)

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        if isinstance(other, VectorField):
            return self.coords.basis == other.coords.basis and self.comps == other.comps
        if other == 0:
            return not self.comps
        return NotImplemented

    def __hash__(self):
        return hash(tuple((i, hash(p)) for i, p in sorted(self.comps.items())))

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        out = dict(self.comps)
        for i, p in other.comps.items():
            out[i] = out[i] + p if i in out else p
        return VectorField(self.coords, out, self.truncated or other.truncated)

    def __neg__(self):
        return VectorField(self.coords, {i: -p for i, p in self.comps.items()}, self.truncated)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return VectorField(self.coords, {i: p.scale(c) for i, p in self.comps.items()},
                           self.truncated)

    __rmul__ = __mul__

    def times_poly(self, f: Poly) -> "VectorField":
        """The field f * self (f multiplies each coefficient from the left)."""
        return VectorField(self.coords, {i: poly_mul(f, p) for i, p in self.comps.items()},
                           self.truncated or f.truncated)

    def term_degrees(self) -> set[int]:
        out = set()
        for i, p in self.comps.items():
            base = self.coords.basis.degrees[i]
            for m in p.terms:
                out.add(self.coords.mono_degree(m) + base)
        return out

    def degree(self) -> int | None:
        """Homogeneous degree; None for zero; InputError if inhomogeneous."""
        d = self.term_degrees()
        if not d:
            return None
        if len(d) > 1:
            raise InputError(f"vector field is not homogeneous (degrees {sorted(d)})")
        return d.pop()

    def homogeneous_parts(self) -> dict[int, "VectorField"]:
        parts: dict[int, dict] = {}
        base = self.coords.basis.degrees
        for i, p in self.comps.items():
            for m, c in p.terms.items():
                d = self.coords.mono_degree(m) + base[i]
                parts.setdefault(d, {}).setdefault(i, {})[m] = c
        return {d: VectorField(self.coords, comps, self.truncated) for d, comps in parts.items()}

    def __call__(self, f: Poly) -> Poly:
        """Apply the field to a function: sum_i P^i d_i(f)."""
        if f.coords.basis != self.coords.basis:
            raise InputError("function and field on different coordinates")
        out = Poly(self.coords, {}, self.truncated or f.truncated)
        for i, p in self.comps.items():
            df = f.diff(i)
            if df:
                out = out + poly_mul(p, df)
        return out

    def at_origin(self) -> dict[int, Fraction]:
        return {i: p.constant_term() for i, p in self.comps.items() if p.constant_term()}

    def max_length(self) -> int:
        return max((p.max_length() for p in self.comps.values()), default=0)

    def reindexed(self, coords: CoordinateSystem, mapping) -> "VectorField":
        return VectorField(coords, {mapping[i]: p.reindexed(coords, mapping)
                                    for i, p in self.comps.items()}, self.truncated)

    def with_coords(self, coords: CoordinateSystem) -> "VectorField":
        """Same field, re-attached to an equal-basis coordinate system."""
        if coords.basis != self.coords.basis:
            raise InputError("with_coords requires the same basis")
        return VectorField(coords, {i: Poly(coords, p.terms, p.truncated)
                                    for i, p in self.comps.items()}, self.truncated)

    def __repr__(self):
        return f"VectorField({self})"

    def __str__(self):
        if not self.comps:
            return "0"
        parts = []
        for i, p in sorted(self.comps.items()):
            coeff = str(p)
            if len(p.terms) > 1:
                coeff = f"({coeff})"
            parts.append(f"{coeff}*d[{self.coords.labels[i]}]")
        return " + ".join(parts)


def _bracket_homogeneous(X: VectorField, Y: VectorField, dx: int, dy: int) -> VectorField:
    sign = -1 if (dx * dy) & 1 else 1
    out: dict[int, Poly] = {}
    for i in set(X.comps) | set(Y.comps):
        acc = Poly(X.coords, {})
        if i in Y.comps:
            acc = acc + X(Y.comps[i])
        if i in X.comps:
            t = Y(X.comps[i])
            acc = acc - t if sign == 1 else acc + t
        if acc or acc.truncated:
            out[i] = acc
    trunc = X.truncated or Y.truncated or any(p.truncated for p in out.values())
    return VectorField(X.coords, out, trunc)


def bracket_any(X: VectorField, Y: VectorField) -> VectorField:
    """Graded commutator extended bilinearly to inhomogeneous fields."""
    X._check(Y)
    out = VectorField(X.coords)
    for dx, Xd in X.homogeneous_parts().items():
        for dy, Yd in Y.homogeneous_parts().items():
            out = out + _bracket_homogeneous(Xd, Yd, dx, dy)
    out.truncated = out.truncated or X.truncated or Y.truncated
    return out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """Graded commutator [X, Y] = X o Y - (-1)^{|X||Y|} Y o X."""
    X._check(Y)
    dx, dy = X.degree(), Y.degree()
    if dx is None or dy is None:
        return VectorField(X.coords, {}, X.truncated or Y.truncated)
    return _bracket_homogeneous(X, Y, dx, dy)


def contraction(v: Element, coords: CoordinateSystem | None = None,
                offset: int = 0) -> VectorField:
    """The constant field iota_v.

    ``offset`` places v's basis inside a larger coordinate system (as for a
    factor of a product).
    """
    v.degree()
    if coords is None:
        coords = CoordinateSystem(v.base)
    comps = {i + offset: {(): c} for i, c in v.coords.items()}
    return VectorField(coords, comps)


def contract_field(Y: VectorField, i: int, dy: int) -> VectorField:
    """[Y, iota_{u_i}] for homogeneous Y of degree dy, by the closed formula."""
    di = Y.coords.basis.degrees[i]
    sign = 1 if (dy * di) & 1 else -1
    comps = {}
    for k, p in Y.comps.items():
        q = p.diff(i)
        if q:
            comps[k] = q if sign == 1 else -q
    return VectorField(Y.coords, comps, Y.truncated)


def iota_chain_scalar(coords: CoordinateSystem, mono: Mono, word, field_degree: int) -> Fraction:
    """Constant term of [[m d_i, iota_{w1}], ..., iota_{wn}] on d_i, per unit coefficient."""
    poly: Terms = {tuple(mono): Fraction(1)}
    factor = 1
    D = field_degree
    par = coords.parity
    degs = coords.basis.degrees
    for k in word:
        nxt: Terms = {}
        for m, c in poly.items():
            f, rest = mono_diff(par, m, k)
            if f:
                _add_into(nxt, rest, f * c)
        poly = nxt
        if not poly:
            return Fraction(0)
        if not (D * degs[k]) & 1:
            factor = -factor
        D += degs[k]
    return factor * poly.get((), Fraction(0))


def is_homological(Q: VectorField) -> Report:
    """Check Q^2 = 1/2 [Q, Q] = 0 for a degree 1 field."""
    d = Q.degree()
    if d is not None and d != 1:
        raise InputError(f"a homological vector field must have degree 1, got {d}")
    report = Report("homological", notes={"truncated": Q.truncated,
                                          "weight_cutoff": Q.coords.cutoff})
    if Q.is_zero():
        return report
    sq = _bracket_homogeneous(Q, Q, 1, 1) * Fraction(1, 2)
    for i, p in sorted(sq.comps.items()):
        report.add(f"Q^2 on d[{Q.coords.labels[i]}]", p, p)
    if sq.truncated:
        report.notes["truncated"] = True
    return report


def _vector_from_origin(field: VectorField, base: GradedBasis) -> Element:
    return Element(base, field.at_origin())


def derived_brackets(Q: VectorField, max_arity: int | None = None):
    """Higher derived brackets {v_1..v_n} = [[[Q, iota_v1], ...], iota_vn] at the origin."""
    from .brackets import SymBrackets

    d = Q.degree()
    if d is not None and d != 1:
        raise InputError(f"derived brackets need a degree 1 field, got degree {d}")
    if Q.at_origin():
        raise InputError("Q does not vanish at the origin")
    coords = Q.coords
    base = coords.basis
    top = Q.max_length()
    if max_arity is None:
        max_arity = max(top, 1)
    tables: dict[int, dict] = {}
    memo: dict[tuple, VectorField] = {(): Q}

    def chain(word):
        if word in memo:
            return memo[word]
        prev = chain(word[:-1])
        if prev.is_zero():
            memo[word] = prev
            return prev
        e = contraction(base.basis_vector(word[-1]), coords)
        res = lie_bracket(prev, e)
        memo[word] = res
        return res

    for n in range(1, top + 1):
        for word in canonical_words(base.degrees, n, True):
            val = chain(word)
            if val:
                el = _vector_from_origin(val, base)
                if el:
                    tables.setdefault(n, {})[word] = el
    return SymBrackets(base, tables, max(max_arity, top, 1))


def brackets_to_field(S, cutoff: int | None = None) -> VectorField:
    """The field vanishing at the origin whose derived brackets are S."""
    coords = CoordinateSystem(S.base, cutoff)
    comps: dict[int, Terms] = {}
    for k, word, value in S.entries():
        s = iota_chain_scalar(coords, word, word, 1)
        if s == 0:
            raise InputError(f"word {S.render_word(word)} cannot be realized by a monomial")
        for i, c in value.coords.items():
            _add_into(comps.setdefault(i, {}), word, c / s)
    return VectorField(coords, comps)

"""Actions of a finite-dimensional L-infinity[1]-algebra U on a graded space M.

An action datum is a degree 1 vector field X on U x M with no d/d(U)
components.  Three descriptions are kept in sync:

* the field X itself (and Q_tot = X + Q_U),
* the component family phi_X(e_1...e_n) = [[X, iota_e1], ..., iota_en] at U = 0,
* the series sum_m sP_m (x) m in X(M)[1] (x) S(U*).

Writing X = sum_m m * P_m (m a monomial in the U-coordinates, P_m a field on
M), the series is obtained by moving P_m past m with its Koszul sign.  Under
this identification the series-side phi equals the field-side phi, the
series bracket {X, X} corresponds to -[X, X], and Q_U(X) to [Q_U, X].
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .brackets import MorphismFamily, SymBrackets, check_curved_morphism
from .errors import InputError, KernelError
from .fields import (CoordinateSystem, Poly, VectorField, _add_into, bracket_any,
                     brackets_to_field, contraction, is_homological, iota_chain_scalar,
                     lie_bracket, mono_mul, poly_mul)
from .graded import Element, GradedBasis, canonical_words
from .report import Report


class ProductSpace:
    """Coordinates on U x M: the U block first, then the M block."""

    def __init__(self, U: GradedBasis, M: GradedBasis, cutoff: int | None = None):
        clash = set(U.labels) & set(M.labels)
        if clash:
            raise InputError(f"labels shared between U and M: {sorted(clash)}")
        self.U = U
        self.M = M
        self.nU = len(U)
        self.coords = CoordinateSystem(U.concat(M), cutoff)
        self.U_coords = CoordinateSystem(U, cutoff)
        self.M_coords = CoordinateSystem(M, cutoff)

    def __eq__(self, other):
        return (isinstance(other, ProductSpace) and self.U == other.U and self.M == other.M
                and self.coords.cutoff == other.coords.cutoff)

    def __hash__(self):
        return hash((self.U, self.M))

    def is_U(self, i: int) -> bool:
        return i < self.nU

    def u_part(self, m) -> tuple:
        return tuple(i for i in m if i < self.nU)

    # moving data between the factors and the product
    def lift_U_field(self, Q: VectorField) -> VectorField:
        return Q.reindexed(self.coords, range(self.nU))

    def lift_M_field(self, P: VectorField) -> VectorField:
        return P.reindexed(self.coords, [self.nU + k for k in range(len(self.M))])

    def lift_M_poly(self, f: Poly) -> Poly:
        return f.reindexed(self.coords, [self.nU + k for k in range(len(self.M))])

    def lift_U_poly(self, f: Poly) -> Poly:
        return f.reindexed(self.coords, range(self.nU))

    def restrict_M(self, f: Poly) -> Poly:
        """Pull back along the inclusion M -> U x M (set U-coordinates to zero)."""
        nU = self.nU
        return Poly(self.M_coords, {tuple(i - nU for i in m): c for m, c in f.terms.items()
                                    if not m or m[0] >= nU}, f.truncated)

    def restrict_M_field(self, F: VectorField) -> VectorField:
        comps = {}
        for i, p in F.comps.items():
            if i >= self.nU:
                q = self.restrict_M(p)
                if q:
                    comps[i - self.nU] = q
        return VectorField(self.M_coords, comps, F.truncated)

    def U_element(self, e) -> Element:
        if isinstance(e, Element):
            if e.base != self.U:
                raise InputError("word entry is not an element of U")
            return e
        if isinstance(e, str):
            return self.U.basis_vector(e)
        return self.U.basis_vector(int(e))


def split_U(space: ProductSpace, A: VectorField) -> dict[tuple, VectorField]:
    """Decompose a field with only M-components as sum_m m * P_m."""
    nU = space.nU
    acc: dict[tuple, dict[int, dict]] = {}
    for i, p in A.comps.items():
        if i < nU:
            raise InputError("field has components along U")
        for m, c in p.terms.items():
            k = 0
            while k < len(m) and m[k] < nU:
                k += 1
            mu, mm = m[:k], tuple(j - nU for j in m[k:])
            acc.setdefault(mu, {}).setdefault(i - nU, {})[mm] = c
    return {mu: VectorField(space.M_coords, comps) for mu, comps in acc.items()}


def join_U(space: ProductSpace, parts: Mapping[tuple, VectorField]) -> VectorField:
    """Inverse of :func:`split_U`."""
    nU = space.nU
    comps: dict[int, dict] = {}
    for mu, P in parts.items():
        for i, p in P.comps.items():
            for mm, c in p.terms.items():
                _add_into(comps.setdefault(i + nU, {}), tuple(mu) + tuple(j + nU for j in mm), c)
    return VectorField(space.coords, comps)


# -- series in X(M)[1] (x) S(U*) ---------------------------------------------------

class FieldSeries:
    """sum_m sP_m (x) m: a field P_m on M (read in X(M)[1]) times a U-monomial m.

    The X(M)[1] factor is written on the left.  In this ordering the bracket
    extended by graded linearity, the contraction-based phi and the bracket
    expansion over unshuffles are mutually consistent.
    """

    def __init__(self, space: ProductSpace, terms: Mapping[tuple, VectorField] | None = None):
        self.space = space
        self.terms = {tuple(m): P for m, P in (terms or {}).items() if P}

    def __eq__(self, other):
        return (isinstance(other, FieldSeries) and self.space == other.space
                and self.terms == other.terms)

    def __add__(self, other: "FieldSeries") -> "FieldSeries":
        out = dict(self.terms)
        for m, P in other.terms.items():
            out[m] = out[m] + P if m in out else P
        return FieldSeries(self.space, out)

    def __neg__(self):
        return FieldSeries(self.space, {m: -P for m, P in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return FieldSeries(self.space, {m: P * c for m, P in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degrees(self) -> set[int]:
        """Degrees |m| + |P| - 1 of the homogeneous pieces."""
        out = set()
        ud = self.space.U_coords
        for m, P in self.terms.items():
            for d in P.term_degrees():
                out.add(ud.mono_degree(m) + d - 1)
        return out

    def degree(self):
        d = self.degrees()
        if not d:
            return None
        if len(d) > 1:
            raise InputError("series is not homogeneous")
        return d.pop()

    def __str__(self):
        if not self.terms:
            return "0"
        U = self.space.U_coords
        return " + ".join(f"({P}) [{U.render_mono(m)}]" for m, P in sorted(self.terms.items()))

    __repr__ = __str__


def _swap_signed(space: ProductSpace, parts: Mapping[tuple, VectorField]) -> dict:
    ud = space.U_coords
    out: dict[tuple, VectorField] = {}
    for m, P in parts.items():
        dm = ud.mono_degree(m)
        for dp, Pd in P.homogeneous_parts().items():
            term = -Pd if (dm * dp) % 2 else Pd
            out[m] = out[m] + term if m in out else term
    return out


def to_series(space: ProductSpace, X: VectorField) -> FieldSeries:
    """m * P  |->  (-1)^{|m||P|} sP (x) m."""
    return FieldSeries(space, _swap_signed(space, split_U(space, X)))


def from_series(A: FieldSeries) -> VectorField:
    return join_U(A.space, _swap_signed(A.space, A.terms))


def fiber_bracket(P: VectorField, R: VectorField) -> VectorField:
    """{P, R} = (-1)^{|P|} [P, R] on X(M)[1], |P| the degree as a vector field."""
    out = VectorField(P.coords)
    for dp, Pd in P.homogeneous_parts().items():
        t = bracket_any(Pd, R)
        out = out + (t if dp % 2 == 0 else -t)
    return out


def extended_bracket(A: FieldSeries, B: FieldSeries) -> FieldSeries:
    """{v (x) f, v' (x) f'} = (-1)^{|f||v'|} {v, v'} (x) ff', extended bilinearly."""
    if A.space != B.space:
        raise InputError("series live on different product spaces")
    space = A.space
    ud = space.U_coords
    out: dict[tuple, VectorField] = {}
    for m, P in A.terms.items():
        dm = ud.mono_degree(m)
        for m2, R in B.terms.items():
            s, mm = mono_mul(ud.parity, m, m2)
            if s == 0:
                continue
            for dr, Rd in R.homogeneous_parts().items():
                val = fiber_bracket(P, Rd)
                if not val:
                    continue
                sign = -s if (dm * (dr - 1)) % 2 else s
                val = val * sign
                out[mm] = out[mm] + val if mm in out else val
    return FieldSeries(space, out)


def series_apply_Q(Q_U: VectorField, A: FieldSeries) -> FieldSeries:
    """Q_U(X): the series of the field [Q_U, X], i.e. sP (x) f |-> (-1)^{|P|} sP (x) Q_U(f)."""
    space = A.space
    out: dict[tuple, VectorField] = {}
    for m, P in A.terms.items():
        f = Q_U(Poly(Q_U.coords, {m: 1}))
        if not f:
            continue
        for dp, Pd in P.homogeneous_parts().items():
            for m2, c in f.terms.items():
                val = Pd * (-c if dp % 2 else c)
                out[m2] = out[m2] + val if m2 in out else val
    return FieldSeries(space, out)


def phi_series(A: FieldSeries, word) -> VectorField:
    """phi_A(e_1...e_n) evaluated on the series side: iterated contractions,
    each passing the X(M)[1] factor, then evaluation at the origin of U."""
    space = A.space
    word = [space.U_element(e) for e in word]
    ud = space.U_coords
    udeg = space.U.degrees
    out = VectorField(space.M_coords)
    for m, P in A.terms.items():
        if len(m) != len(word):
            continue
        for dp, Pd in P.homogeneous_parts().items():
            D = ud.mono_degree(m) + dp - 1
            total = Fraction(0)
            for coeff, basis_word in _expand(word):
                s = iota_chain_scalar(ud, m, basis_word, D)
                if s and ((dp - 1) * sum(udeg[k] for k in basis_word)) % 2:
                    s = -s
                total += coeff * s
            if total:
                out = out + Pd * total
    return out


def _expand(word):
    """Multilinear expansion of a word of elements into basis words."""
    acc = [(Fraction(1), ())]
    for e in word:
        acc = [(c * v, w + (k,)) for c, w in acc for k, v in e.coords.items()]
    return acc


# -- the action datum ----------------------------------------------------------------

class FieldTarget:
    """X(M)[1] as a Lie[1] algebra, optionally with differential {Q, .}."""

    def __init__(self, coords: CoordinateSystem, twist: VectorField | None = None):
        self.coords = coords
        self.twist = twist

    def zero(self):
        return VectorField(self.coords)

    def d(self, x):
        if self.twist is None:
            return self.zero()
        return fiber_bracket(self.twist, x)

    def bracket(self, x, y):
        return fiber_bracket(x, y)

    def is_zero(self, x):
        return not x

    def has_differential(self):
        return self.twist is not None

    def twisted(self, mc):
        return FieldTarget(self.coords, mc if self.twist is None else self.twist + mc)


class ActionDatum:
    """A degree 1 field X on U x M annihilated by the projection onto U."""

    def __init__(self, space: ProductSpace, X: VectorField, U_brackets: SymBrackets):
        if X.coords.basis != space.coords.basis:
            raise InputError("X is not a field on the product space")
        if U_brackets.base != space.U:
            raise InputError("U brackets live on a different basis")
        X = X.with_coords(space.coords)
        bad = [space.coords.labels[i] for i in X.comps if space.is_U(i)]
        if bad:
            raise InputError(f"X has components along U ({', '.join(bad)}); "
                             "it must be annihilated by the projection onto U")
        d = X.degree()
        if d is not None and d != 1:
            raise InputError(f"an action datum has degree 1, got {d}")
        self.space = space
        self.X = X
        self.U_brackets = U_brackets
        self.Q_U_local = brackets_to_field(U_brackets, space.coords.cutoff)
        self.Q_U = space.lift_U_field(self.Q_U_local)

    def u_length(self) -> int:
        return max((len(self.space.u_part(m)) for p in self.X.comps.values() for m in p.terms),
                   default=0)

    def series(self) -> FieldSeries:
        return to_series(self.space, self.X)

    def phi(self) -> MorphismFamily:
        """The full component family of phi_X on canonical basis words."""
        comps = {}
        degs = self.space.U.degrees
        for n in range(0, self.u_length() + 1):
            for word in canonical_words(degs, n, True):
                P = phi_of_X(self, word)
                if P:
                    comps[word] = P
        return MorphismFamily(self.U_brackets, FieldTarget(self.space.M_coords), comps)


def phi_of_X(datum: ActionDatum, word) -> VectorField:
    """[[X, iota_e1], ..., iota_en] evaluated at the origin of U: a field on M."""
    space = datum.space
    current = datum.X
    for e in word:
        el = space.U_element(e)
        el.degree()
        current = lie_bracket(current, contraction(el, space.coords))
        if not current:
            break
    return space.restrict_M_field(current)


def X_of_phi(space: ProductSpace, components: Mapping, U_brackets: SymBrackets) -> ActionDatum:
    """The action datum whose phi-components are the given fields on M.

    ``components`` maps U-words (labels or indices, any order) to fields on M.
    """
    ud = space.U_coords
    parts: dict[tuple, VectorField] = {}
    degs = space.U.degrees
    from .graded import sort_word
    for word, P in components.items():
        word = tuple(space.U.index(w) if isinstance(w, str) else int(w) for w in word)
        s, sign = sort_word(word, degs, True)
        if sign == 0 or not P:
            continue
        if P.coords.basis != space.M:
            raise InputError("phi component is not a field on M")
        for dp, Pd in P.homogeneous_parts().items():
            D = ud.mono_degree(s) + dp
            pairing = iota_chain_scalar(ud, s, s, D)
            term = Pd * (Fraction(sign) / pairing)
            parts[s] = parts[s] + term if s in parts else term
    return ActionDatum(space, join_U(space, parts), U_brackets)


def build_Qtot(datum: ActionDatum) -> VectorField:
    return datum.X + datum.Q_U


def check_action_mc(datum: ActionDatum) -> Report:
    """Q_U(X) - 1/2 {X, X} computed on the series side.

    Q_U(X) is the series of [Q_U, X] (see :func:`series_apply_Q`)."""
    A = datum.series()
    lhs = series_apply_Q(datum.Q_U_local, A)
    rhs = extended_bracket(A, A) * Fraction(1, 2)
    res = lhs - rhs
    report = Report("action-mc", notes={"truncated": datum.X.truncated})
    ud = datum.space.U_coords
    for m, P in sorted(res.terms.items()):
        report.add(f"U-monomial [{ud.render_mono(m)}]", P, P)
    return report


# -- eta-relatedness ---------------------------------------------------------------------

class OneForm:
    """sum_a dx_a g_a on M (dx_a written to the left of its coefficient)."""

    def __init__(self, coords: CoordinateSystem, coeffs: Mapping[int, Poly]):
        self.coords = coords
        self.coeffs = {a: g for a, g in coeffs.items() if g}

    @classmethod
    def exact(cls, f: Poly) -> "OneForm":
        return cls(f.coords, {a: f.diff(a) for a in range(len(f.coords))})


def eta_pullback(datum: ActionDatum, alpha) -> Poly:
    """eta_X^*: identity on functions of M, <X, alpha> on one-forms."""
    space = datum.space
    if isinstance(alpha, Poly):
        return space.lift_M_poly(alpha)
    out = Poly(space.coords, {})
    for a, g in alpha.coeffs.items():
        Xa = datum.X.comps.get(space.nU + a)
        if Xa:
            out = out + poly_mul(Xa, space.lift_M_poly(g))
    return out


def check_eta_related(datum: ActionDatum) -> Report:
    """Q_tot(eta^* f) = eta^*(df) and Q_tot(eta^* df) = 0 on coordinate functions f."""
    space = datum.space
    Qtot = build_Qtot(datum)
    report = Report("eta-related")
    for a in range(len(space.M)):
        f = space.M_coords.coordinate(a)
        lhs = Qtot(eta_pullback(datum, f))
        rhs = eta_pullback(datum, OneForm.exact(f))
        if lhs != rhs:
            report.add(f"Q_tot(eta* {space.M.labels[a]}) - eta*(d{space.M.labels[a]})",
                       lhs - rhs, lhs - rhs)
        second = Qtot(eta_pullback(datum, OneForm.exact(f)))
        if second:
            report.add(f"Q_tot(eta* d{space.M.labels[a]})", second, second)
    return report


def verify_equivalence_triple(datum: ActionDatum) -> Report:
    """Evaluate the three equivalent conditions independently and compare."""
    if not is_homological(datum.Q_U_local).ok:
        raise InputError("Q_U is not homological: U is not an L-infinity[1]-algebra")
    r1 = is_homological(build_Qtot(datum))
    r2 = check_action_mc(datum)
    r2b = check_curved_morphism(datum.phi(), datum.U_brackets)
    r3 = check_eta_related(datum)
    verdicts = {"homological": r1.ok, "curved-morphism": r2.ok,
                "curved-morphism-components": r2b.ok, "eta-related": r3.ok}
    if len(set(verdicts.values())) != 1:
        raise KernelError(f"equivalent conditions disagree: {verdicts}")
    report = Report("equivalence-triple", notes={"verdicts": verdicts})
    report.merge(r1, "(1) ").merge(r2, "(2) ").merge(r3, "(3) ")
    return report


def check_compatible(datum: ActionDatum, Q_M: VectorField) -> Report:
    """Zero component equals Q_M, the action is MC, and both maps of
    M -> U x M -> U relate the homological fields."""
    space = datum.space
    Q_M = Q_M.with_coords(space.M_coords)
    report = Report("compatible")
    zero = phi_of_X(datum, ())
    if zero != Q_M:
        report.add("phi_X() - Q_M", zero - Q_M, zero - Q_M)
    report.merge(check_action_mc(datum))
    Qtot = build_Qtot(datum)
    for j in range(len(space.coords)):
        xj = space.coords.coordinate(j)
        lhs = space.restrict_M(Qtot(xj))
        if space.is_U(j):
            rhs = Poly(space.M_coords, {})
        else:
            rhs = Q_M(space.M_coords.coordinate(j - space.nU))
        if lhs != rhs:
            report.add(f"inclusion on {space.coords.labels[j]}", lhs - rhs, lhs - rhs)
    for j in range(space.nU):
        lhs = Qtot(space.coords.coordinate(j))
        rhs = space.lift_U_poly(datum.Q_U_local(space.U_coords.coordinate(j)))
        if lhs != rhs:
            report.add(f"projection on {space.U.labels[j]}", lhs - rhs, lhs - rhs)
    return report

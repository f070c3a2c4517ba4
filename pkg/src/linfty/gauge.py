"""Maurer-Cartan elements X + Q_U, the gauge action of degree 0 fields and
the induced isomorphisms of Q-manifolds."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .actions import ActionDatum, ProductSpace, build_Qtot
from .errors import InputError, NilpotencyError
from .fields import Poly, VectorField, lie_bracket
from .report import Report

DEFAULT_MAX_TERMS = 64


class GaugeParameter:
    """A degree 0 field lambda on U x M with no components along U."""

    def __init__(self, space: ProductSpace, lam: VectorField, max_terms: int = DEFAULT_MAX_TERMS):
        if lam.coords.basis != space.coords.basis:
            raise InputError("lambda is not a field on the product space")
        lam = lam.with_coords(space.coords)
        d = lam.degree()
        if d is not None and d != 0:
            raise InputError(f"a gauge parameter has degree 0, got {d}")
        bad = [space.coords.labels[i] for i in lam.comps if space.is_U(i)]
        if bad:
            raise InputError("lambda must be annihilated by the projection onto U; "
                             f"it has components along {', '.join(bad)}")
        self.space = space
        self.lam = lam
        self.max_terms = max_terms
        self.plus = all(len(space.u_part(m)) >= 1
                        for p in lam.comps.values() for m in p.terms)

    def __neg__(self):
        return GaugeParameter(self.space, -self.lam, self.max_terms)

    def is_zero(self):
        return self.lam.is_zero()


def check_mc(datum: ActionDatum) -> Report:
    """[Q_U, X] + 1/2 [X, X] = 0 in the DGLA of vector fields on U x M."""
    res = lie_bracket(datum.Q_U, datum.X) + lie_bracket(datum.X, datum.X) * Fraction(1, 2)
    report = Report("maurer-cartan", notes={"truncated": res.truncated})
    for i, p in sorted(res.comps.items()):
        report.add(f"d[{datum.space.coords.labels[i]}]", p, p)
    return report


def _series(step, start, max_terms: int, what: str):
    """sum_k T_k with T_0 = start, T_{k+1} = step(T_k) / (k+1), until T_k = 0."""
    total = start
    term = start
    for k in range(max_terms):
        term = step(term) * Fraction(1, k + 1)
        if not term:
            return total, k + 1
        total = total + term
    raise NilpotencyError(
        f"{what}: no vanishing term after {max_terms} iterations; lambda is not "
        "certified nilpotent (set a weight cutoff or raise the term bound)")


def exp_ad(lam: GaugeParameter, Y: VectorField) -> VectorField:
    """e^{ad_lambda} Y = sum_k ad_lambda^k(Y) / k!."""
    Y = Y.with_coords(lam.space.coords)
    out, _ = _series(lambda T: lie_bracket(lam.lam, T), Y, lam.max_terms, "exp(ad lambda)")
    return out


def exp_ad_terms(lam: GaugeParameter, Y: VectorField) -> int:
    """Number of nonzero terms in the e^{ad_lambda} series applied to Y."""
    _, k = _series(lambda T: lie_bracket(lam.lam, T), Y.with_coords(lam.space.coords),
                   lam.max_terms, "exp(ad lambda)")
    return k


def _check_same_space(datum: ActionDatum, lam: GaugeParameter):
    if datum.space != lam.space:
        raise InputError("gauge parameter and action live on different product spaces")


def gauge_transform(datum: ActionDatum, lam: GaugeParameter) -> ActionDatum:
    """X^lambda = e^{ad_lambda}(X + Q_U) - Q_U."""
    _check_same_space(datum, lam)
    new = exp_ad(lam, build_Qtot(datum)) - datum.Q_U
    return ActionDatum(datum.space, new, datum.U_brackets)


def gauge_transform_left_form(datum: ActionDatum, lam: GaugeParameter) -> VectorField:
    """e^{ad_lambda} X + ((1 - e^{ad_lambda}) / ad_lambda) [Q_U, lambda].

    The operator (1 - e^a)/a is the terminating series -sum_k a^k / (k+1)!.
    """
    _check_same_space(datum, lam)
    first = exp_ad(lam, datum.X)
    seed = lie_bracket(datum.Q_U, lam.lam)
    total = VectorField(datum.space.coords)
    term = seed
    fact = Fraction(1)
    for k in range(lam.max_terms + 1):
        fact *= k + 1
        if not term:
            break
        total = total - term * (1 / fact)
        term = lie_bracket(lam.lam, term)
    else:
        raise NilpotencyError("(1 - e^{ad lambda}) / ad lambda did not terminate")
    return first + total


def gauge_chain(datum: ActionDatum, lambdas: Iterable[GaugeParameter]) -> tuple[ActionDatum, Report]:
    """Apply several gauge parameters in turn, checking the MC equation after each step."""
    report = Report("gauge-chain")
    current = datum
    for k, lam in enumerate(lambdas):
        current = gauge_transform(current, lam)
        report.merge(check_mc(current), f"step {k}: ")
    return current, report


def check_gauge_preserves_compatibility(datum: ActionDatum, Q_M: VectorField,
                                        lam: GaugeParameter) -> Report:
    """Zero component of X^lambda still equals Q_M."""
    from .actions import phi_of_X

    new = gauge_transform(datum, lam)
    Q_M = Q_M.with_coords(datum.space.M_coords)
    report = Report("gauge-compatibility", notes={"plus": lam.plus})
    before = phi_of_X(datum, ())
    after = phi_of_X(new, ())
    if before != Q_M:
        report.add("input zero component - Q_M", before - Q_M, before - Q_M)
    if after != Q_M:
        report.add("zero component of X^lambda - Q_M", after - Q_M, after - Q_M)
    return report


class GaugeIsomorphism:
    """The algebra automorphism e^{-lambda} of functions on U x M."""

    def __init__(self, lam: GaugeParameter):
        self.lam = lam

    def pullback(self, f: Poly) -> Poly:
        neg = -self.lam.lam
        out, _ = _series(lambda g: neg(g), f, self.lam.max_terms, "exp(-lambda)")
        return out

    __call__ = pullback


def isomorphism_from_gauge(datum: ActionDatum, lam: GaugeParameter):
    """Return (e^{-lambda}, report); the report verifies
    e^{-lambda}(Q2 f) = Q1(e^{-lambda} f) on every coordinate, with
    Q1 = Q_tot(X) and Q2 = Q_tot(X^lambda).  For lambda in the plus class it
    also verifies commutation with M -> U x M -> U."""
    space = datum.space
    new = gauge_transform(datum, lam)
    Q1, Q2 = build_Qtot(datum), build_Qtot(new)
    psi = GaugeIsomorphism(lam)
    report = Report("gauge-isomorphism", notes={"plus": lam.plus})
    for j in range(len(space.coords)):
        xj = space.coords.coordinate(j)
        lhs = psi(Q2(xj))
        rhs = Q1(psi(xj))
        if lhs != rhs:
            report.add(f"intertwining on {space.coords.labels[j]}", lhs - rhs, lhs - rhs)
    if lam.plus:
        for j in range(len(space.coords)):
            xj = space.coords.coordinate(j)
            img = psi(xj)
            if space.restrict_M(img) != space.restrict_M(xj):
                report.add(f"inclusion of M on {space.coords.labels[j]}",
                           img - xj, img - xj)
            if space.is_U(j) and img != xj:
                report.add(f"projection to U on {space.coords.labels[j]}", img - xj, img - xj)
    return psi, report

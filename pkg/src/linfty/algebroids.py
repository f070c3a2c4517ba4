"""Lie algebroids with polynomial structure functions on an affine base, their
extensions by Lie algebra actions, and twisting by a linear map.

Coordinates on A[1]: base coordinates x (degree 0) followed by fiber
coordinates xi (degree 1).  A section is a dict fiber-index -> polynomial in x.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .actions import (ActionDatum, ProductSpace, X_of_phi, build_Qtot, extended_bracket,
                      series_apply_Q)
from .brackets import SkewBrackets, decalage
from .errors import InputError
from .fields import CoordinateSystem, Poly, VectorField, lie_bracket, poly_mul
from .gauge import GaugeParameter, gauge_transform, isomorphism_from_gauge
from .graded import GradedBasis
from .report import Report

Section = dict


class PolyAlgebroid:
    """Anchor rho_alpha (fields on the base) and structure functions c^gamma_{alpha beta}(x)
    for the constant frame of the fiber."""

    def __init__(self, base: list[str], fiber: list[str], anchor: Mapping | None = None,
                 structure: Mapping | None = None):
        self.base_labels = list(base)
        self.fiber_labels = list(fiber)
        self.nb = len(self.base_labels)
        self.basis = GradedBasis([(l, 0) for l in self.base_labels]
                                 + [(l, -1) for l in self.fiber_labels])
        self.coords = CoordinateSystem(self.basis)
        self.anchor: dict[int, VectorField] = {}
        for a, field in (anchor or {}).items():
            alpha = self._fiber_index(a)
            field = self._as_base_field(field)
            if field:
                self.anchor[alpha] = field
        self.structure: dict[tuple[int, int], Section] = {}
        for pair, sec in (structure or {}).items():
            a, b = (self._fiber_index(p) for p in pair)
            sec = self.section(sec)
            if a == b:
                if sec:
                    raise InputError("[a, a] must vanish for a fiber basis element of degree 0")
                continue
            lo, hi, s = (a, b, 1) if a < b else (b, a, -1)
            cur = _sec_add(self.structure.get((lo, hi), {}), _sec_scale(sec, s))
            if cur:
                self.structure[(lo, hi)] = cur
            else:
                self.structure.pop((lo, hi), None)

    # -- data helpers -------------------------------------------------------------
    def _fiber_index(self, a) -> int:
        if isinstance(a, str):
            return self.fiber_labels.index(a) if a in self.fiber_labels else _missing(a)
        return int(a)

    def fiber_coord(self, alpha: int) -> int:
        return self.nb + alpha

    def base_poly(self, p) -> Poly:
        if not isinstance(p, Poly):
            p = Poly.from_words(self.coords, p) if isinstance(p, list) else Poly(self.coords, p)
        p = Poly(self.coords, p.terms)
        if any(i >= self.nb for m in p.terms for i in m):
            raise InputError("structure functions must be polynomials in the base coordinates")
        return p

    def _as_base_field(self, field) -> VectorField:
        if not isinstance(field, VectorField):
            field = VectorField(self.coords, {k: self.base_poly(v) for k, v in field.items()})
        field = field.with_coords(self.coords)
        for i, p in field.comps.items():
            if i >= self.nb:
                raise InputError("an anchor value must be a vector field on the base")
            self.base_poly(p)
        return field

    def section(self, sec) -> Section:
        out = {}
        for a, p in (sec or {}).items():
            alpha = self._fiber_index(a)
            p = self.base_poly(p)
            if p:
                out[alpha] = p
        return out

    def c(self, a: int, b: int) -> Section:
        if a == b:
            return {}
        if a < b:
            return self.structure.get((a, b), {})
        return _sec_scale(self.structure.get((b, a), {}), -1)

    # -- anchor and bracket on polynomial sections ------------------------------------
    def rho(self, sec: Section) -> VectorField:
        out = VectorField(self.coords)
        for a, p in sec.items():
            if a in self.anchor:
                out = out + self.anchor[a].times_poly(p)
        return out

    def bracket(self, s: Section, t: Section) -> Section:
        """[f a_al, g a_be] = fg c_{al be} + f rho_al(g) a_be - g rho_be(f) a_al."""
        out: Section = {}
        for a, f in s.items():
            for b, g in t.items():
                fg = poly_mul(f, g)
                out = _sec_add(out, {k: poly_mul(fg, q) for k, q in self.c(a, b).items()})
                if a in self.anchor:
                    out = _sec_add(out, {b: poly_mul(f, self.anchor[a](g))})
                if b in self.anchor:
                    out = _sec_add(out, {a: -poly_mul(g, self.anchor[b](f))})
        return out

    def iota(self, sec: Section) -> VectorField:
        return VectorField(self.coords, {self.fiber_coord(a): p for a, p in sec.items()})

    def section_of(self, F: VectorField) -> Section:
        """Inverse of :meth:`iota` on degree -1 fields."""
        out = {}
        for i, p in F.comps.items():
            if i < self.nb:
                raise InputError("field has a base component: not a section")
            out[i - self.nb] = self.base_poly(p)
        return out

    def basis_section(self, alpha: int) -> Section:
        return {alpha: self.coords.one()}

    def __eq__(self, other):
        return (isinstance(other, PolyAlgebroid) and self.basis == other.basis
                and self.anchor == other.anchor and self.structure == other.structure)

    def __str__(self):
        lines = [f"base: {', '.join(self.base_labels) or '(point)'}",
                 f"fiber: {', '.join(self.fiber_labels)}"]
        for a, F in sorted(self.anchor.items()):
            lines.append(f"rho({self.fiber_labels[a]}) = {F}")
        for (a, b), sec in sorted(self.structure.items()):
            lines.append(f"[{self.fiber_labels[a]}, {self.fiber_labels[b]}] = "
                         f"{render_section(self, sec)}")
        return "\n".join(lines)


def _missing(a):
    raise InputError(f"unknown fiber label {a!r}")


def _sec_add(s: Section, t: Section) -> Section:
    out = dict(s)
    for k, p in t.items():
        q = out[k] + p if k in out else p
        if q:
            out[k] = q
        else:
            out.pop(k, None)
    return out


def _sec_scale(s: Section, c) -> Section:
    return {k: p.scale(c) for k, p in s.items() if c}


def render_section(A: PolyAlgebroid, sec: Section) -> str:
    if not sec:
        return "0"
    return " + ".join(f"({p})*{A.fiber_labels[k]}" for k, p in sorted(sec.items()))


def algebroid_to_Q(A: PolyAlgebroid) -> VectorField:
    """Q = xi^al rho_al^i d_{x_i} - sum_{al<be} c^ga_{al be} xi^al xi^be d_{xi^ga}."""
    comps: dict[int, Poly] = {}
    for a, F in A.anchor.items():
        xa = A.coords.coordinate(A.fiber_coord(a))
        for i, p in F.comps.items():
            term = poly_mul(xa, p)
            comps[i] = comps[i] + term if i in comps else term
    for (a, b), sec in A.structure.items():
        xx = poly_mul(A.coords.coordinate(A.fiber_coord(a)), A.coords.coordinate(A.fiber_coord(b)))
        for g, p in sec.items():
            k = A.fiber_coord(g)
            term = -poly_mul(xx, p)
            comps[k] = comps[k] + term if k in comps else term
    return VectorField(A.coords, comps)


def check_algebroid_axioms(A: PolyAlgebroid) -> Report:
    """Anchor is a bracket morphism and the Jacobi identity holds on the frame.

    The Leibniz rule is built into :meth:`PolyAlgebroid.bracket`.
    """
    report = Report("algebroid-axioms")
    r = len(A.fiber_labels)
    e = A.basis_section
    for a in range(r):
        for b in range(a + 1, r):
            lhs = A.rho(A.bracket(e(a), e(b)))
            rhs = lie_bracket(A.rho(e(a)), A.rho(e(b)))
            if lhs != rhs:
                report.add(f"anchor on [{A.fiber_labels[a]}, {A.fiber_labels[b]}]",
                           lhs - rhs, lhs - rhs)
    for a in range(r):
        for b in range(a + 1, r):
            for c in range(b + 1, r):
                tot: Section = {}
                for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                    tot = _sec_add(tot, A.bracket(A.bracket(e(x), e(y)), e(z)))
                if tot:
                    labels = ", ".join(A.fiber_labels[i] for i in (a, b, c))
                    report.add(f"Jacobi on ({labels})", render_section(A, tot), tot)
    return report


# -- CDO elements and action pairs ------------------------------------------------------

def cdo_act(A: PolyAlgebroid, Y: VectorField, sec: Section) -> Section:
    """Y . a = [Y, iota_a] for a degree 0 field Y on A[1]."""
    return A.section_of(lie_bracket(Y, A.iota(sec)))


def cdo_symbol(A: PolyAlgebroid, Y: VectorField) -> VectorField:
    return VectorField(A.coords, {i: p for i, p in Y.comps.items() if i < A.nb})


def _check_cdo_field(A: PolyAlgebroid, Y: VectorField):
    Y = Y.with_coords(A.coords)
    d = Y.degree()
    if d is not None and d != 0:
        raise InputError(f"sigma(x) must be a degree 0 field on A[1], got degree {d}")
    return Y


def check_cdo_compatibility(A: PolyAlgebroid, sigma: Mapping[str, VectorField]) -> Report:
    """Y[a,b] = [Ya,b] + [a,Yb] and sym(Y)(rho(a) f) = rho(Ya) f + rho(a) sym(Y) f."""
    report = Report("cdo-compatibility")
    r = len(A.fiber_labels)
    e = A.basis_section
    for name, Y in sorted(sigma.items()):
        Y = _check_cdo_field(A, Y)
        sym = cdo_symbol(A, Y)
        for a in range(r):
            for b in range(a + 1, r):
                lhs = cdo_act(A, Y, A.bracket(e(a), e(b)))
                rhs = _sec_add(A.bracket(cdo_act(A, Y, e(a)), e(b)),
                               A.bracket(e(a), cdo_act(A, Y, e(b))))
                diff = _sec_add(lhs, _sec_scale(rhs, -1))
                if diff:
                    report.add(f"sigma({name}) on [{A.fiber_labels[a]}, {A.fiber_labels[b]}]",
                               render_section(A, diff), diff)
        for a in range(r):
            for i in range(A.nb):
                f = A.coords.coordinate(i)
                lhs = sym(A.rho(e(a))(f))
                rhs = A.rho(cdo_act(A, Y, e(a)))(f) + A.rho(e(a))(sym(f))
                if lhs != rhs:
                    report.add(f"sigma({name}) anchor rule on ({A.fiber_labels[a]}, "
                               f"{A.base_labels[i]})", lhs - rhs, lhs - rhs)
    return report


class AlgebroidActionPair:
    """sigma: g -> degree 0 fields on A[1] and a skew psi: g x g -> sections of A."""

    def __init__(self, g: SkewBrackets, A: PolyAlgebroid, sigma: Mapping | None = None,
                 psi: Mapping | None = None):
        if any(d != 0 for d in g.base.degrees) or any(k != 2 for k in g.tables):
            raise InputError("g must be an ordinary Lie algebra (degree 0, binary bracket)")
        self.g = g
        self.A = A
        self.sigma: dict[int, VectorField] = {}
        for x, Y in (sigma or {}).items():
            i = g.base.index(x) if isinstance(x, str) else int(x)
            Y = _check_cdo_field(A, Y)
            if Y:
                self.sigma[i] = Y
        self.psi: dict[tuple[int, int], Section] = {}
        for pair, sec in (psi or {}).items():
            a, b = (g.base.index(p) if isinstance(p, str) else int(p) for p in pair)
            sec = A.section(sec)
            if a == b:
                if sec:
                    raise InputError("psi(x, x) must vanish")
                continue
            lo, hi, s = (a, b, 1) if a < b else (b, a, -1)
            cur = _sec_add(self.psi.get((lo, hi), {}), _sec_scale(sec, s))
            if cur:
                self.psi[(lo, hi)] = cur
            else:
                self.psi.pop((lo, hi), None)

    def sigma_of(self, x: int) -> VectorField:
        return self.sigma.get(x, VectorField(self.A.coords))

    def psi_of(self, x: int, y: int) -> Section:
        if x == y:
            return {}
        if x < y:
            return self.psi.get((x, y), {})
        return _sec_scale(self.psi.get((y, x), {}), -1)

    def labelled_sigma(self) -> dict[str, VectorField]:
        return {self.g.base.labels[i]: Y for i, Y in self.sigma.items()}


def pair_to_action(pair: AlgebroidActionPair) -> ActionDatum:
    """() -> Q_A, (x) -> sigma(x), (x, y) -> iota_psi(x,y) on g[1] x A[1]."""
    A = pair.A
    g1 = decalage(pair.g)
    space = ProductSpace(g1.base, A.basis)
    comps = {(): algebroid_to_Q(A).with_coords(space.M_coords)}
    for x, Y in pair.sigma.items():
        comps[(x,)] = Y.with_coords(space.M_coords)
    for (x, y), sec in pair.psi.items():
        comps[(x, y)] = A.iota(sec).with_coords(space.M_coords)
    return X_of_phi(space, comps, g1)


_WEIGHT_NAMES = {0: "Q_A^2 = 0", 1: "[Q_A, sigma(x)] = 0",
                 2: "analogue of sigma([x,y]) - [sigma x, sigma y] + ad psi(x,y) = 0",
                 3: "analogue of psi(x,[y,z]) + sigma(x) psi(y,z) + c.p. = 0"}


def check_algebroid_pair(pair: AlgebroidActionPair) -> Report:
    """CDO membership of each sigma(x), then Q_tot^2 = 0 split by weight in g.

    Weight 2 and 3 of the Maurer-Cartan residual are the algebroid analogues of
    the two non-abelian cocycle equations.
    """
    report = Report("algebroid-pair", notes={"identities": _WEIGHT_NAMES})
    report.merge(check_cdo_compatibility(pair.A, pair.labelled_sigma()))
    datum = pair_to_action(pair)
    A_ser = datum.series()
    res = series_apply_Q(datum.Q_U_local, A_ser) - extended_bracket(A_ser, A_ser) * Fraction(1, 2)
    ud = datum.space.U_coords
    for m, P in sorted(res.terms.items()):
        name = _WEIGHT_NAMES.get(len(m), "higher")
        report.add(f"weight {len(m)} ({name}) at [{ud.render_mono(m)}]", P, P)
    return report


def build_algebroid_extension(pair: AlgebroidActionPair) -> PolyAlgebroid:
    """(g x M) + A with anchor sym(sigma(x)) + rho_A(a) and
    [(x1,a1),(x2,a2)] = ([x1,x2], [a1,a2] + sigma(x1)a2 - sigma(x2)a1 + psi(x1,x2))."""
    rep = check_algebroid_pair(pair)
    if not rep.ok:
        raise InputError(f"action pair does not verify:\n{rep}")
    g, A = pair.g, pair.A
    clash = set(g.base.labels) & set(A.basis.labels)
    if clash:
        raise InputError(f"labels shared between g and A: {sorted(clash)}")
    ng = len(g.base)
    anchor = {}
    for x, Y in pair.sigma.items():
        sym = cdo_symbol(A, Y)
        if sym:
            anchor[x] = sym
    for a, F in A.anchor.items():
        anchor[ng + a] = F
    fiber = list(g.base.labels) + A.fiber_labels
    ext = PolyAlgebroid(A.base_labels, fiber)
    one = ext.coords.one()

    def lift(sec: Section) -> Section:
        return {ng + k: Poly(ext.coords, p.terms) for k, p in sec.items()}

    ext.anchor = {k: _relabel(F, ext.coords) for k, F in anchor.items()}
    structure: dict = {}
    for _, (x, y), v in g.entries():
        structure[(x, y)] = {i: one.scale(c) for i, c in v.coords.items()}
    for (x, y), sec in pair.psi.items():
        structure[(x, y)] = _sec_add(structure.get((x, y), {}), lift(sec))
    r = len(A.fiber_labels)
    for x in pair.sigma:
        for a in range(r):
            s = cdo_act(A, pair.sigma[x], A.basis_section(a))
            if s:
                structure[(x, ng + a)] = lift(s)
    for (a, b), sec in A.structure.items():
        structure[(ng + a, ng + b)] = lift(sec)
    ext.structure = {k: v for k, v in structure.items() if v}
    return ext


def _relabel(F: VectorField, coords: CoordinateSystem) -> VectorField:
    """Move F to coordinates sharing its labels (only labels F uses must exist)."""
    target = set(coords.labels)
    mapping = {i: coords.basis.index(l) for i, l in enumerate(F.coords.labels) if l in target}
    try:
        return F.reindexed(coords, mapping)
    except KeyError:
        raise InputError("field uses a coordinate missing from the target") from None


def check_algebroid_extension(pair: AlgebroidActionPair) -> Report:
    """The extension algebroid against the action: Q of the extension equals Q_tot,
    and A -> (g x M) + A -> g are strict (tablewise)."""
    ext = build_algebroid_extension(pair)
    datum = pair_to_action(pair)
    report = Report("algebroid-extension")
    Qext = _relabel(algebroid_to_Q(ext), datum.space.coords)
    Qtot = build_Qtot(datum)
    if Qext != Qtot:
        report.add("Q of the extension - Q_tot", Qext - Qtot, Qext - Qtot)
    ng = len(pair.g.base)
    A = pair.A
    for (a, b), sec in ext.structure.items():
        where = f"[{ext.fiber_labels[a]}, {ext.fiber_labels[b]}]"
        gpart = {k: p for k, p in sec.items() if k < ng}
        if a >= ng and gpart:
            report.add(f"g-component of {where}", render_section(ext, gpart), gpart)
        if a < ng and b < ng:
            want = pair.g.bracket(a, b)
            got = {k: p for k, p in gpart.items()}
            exp = {i: ext.coords.one().scale(c) for i, c in want.coords.items()}
            if got != exp:
                report.add(f"projection on {where}", render_section(ext, got), got)
        if a >= ng:
            want = A.c(a - ng, b - ng)
            got = {k - ng: Poly(A.coords, p.terms) for k, p in sec.items() if k >= ng}
            if got != want:
                report.add(f"inclusion on {where}", render_section(A, got), got)
    for a, F in A.anchor.items():
        if _relabel(ext.anchor.get(ng + a, VectorField(ext.coords)), A.coords) != F:
            report.add(f"anchor of {A.fiber_labels[a]}", F, F)
    report.merge(check_algebroid_axioms(ext), "extension ")
    return report


# -- twisting by a linear map ----------------------------------------------------------------

def twist_by_map(g: SkewBrackets, A: PolyAlgebroid, phi: Mapping) -> AlgebroidActionPair:
    """sigma(x) = [phi(x), .]_A as the field [Q_A, iota_phi(x)], psi = [phi x, phi y] - phi[x,y]."""
    Q = algebroid_to_Q(A)
    phis = {}
    for x, sec in phi.items():
        i = g.base.index(x) if isinstance(x, str) else int(x)
        phis[i] = A.section(sec)
    n = len(g.base)

    def phi_el(v) -> Section:
        out: Section = {}
        for i, c in v.coords.items():
            out = _sec_add(out, _sec_scale(phis.get(i, {}), c))
        return out

    sigma = {x: lie_bracket(Q, A.iota(s)) for x, s in phis.items() if s}
    psi = {}
    for x in range(n):
        for y in range(x + 1, n):
            sec = _sec_add(A.bracket(phis.get(x, {}), phis.get(y, {})),
                           _sec_scale(phi_el(g.bracket(x, y)), -1))
            if sec:
                psi[(x, y)] = sec
    pair = AlgebroidActionPair(g, A, sigma, psi)
    pair.phi = phis
    return pair


def product_pair(g: SkewBrackets, A: PolyAlgebroid) -> AlgebroidActionPair:
    return AlgebroidActionPair(g, A)


def check_twist_isomorphism(pair: AlgebroidActionPair) -> Report:
    """(x, a) -> (x, a + phi(x)) is an algebroid isomorphism from the twisted
    extension onto the product extension, checked on the frame."""
    phis = getattr(pair, "phi", None)
    if phis is None:
        raise InputError("pair was not produced by twist_by_map")
    ext = build_algebroid_extension(pair)
    prod = build_algebroid_extension(product_pair(pair.g, pair.A))
    ng = len(pair.g.base)

    def F(sec: Section) -> Section:
        out = dict(sec)
        for k, p in sec.items():
            if k < ng:
                for a, q in phis.get(k, {}).items():
                    out = _sec_add(out, {ng + a: poly_mul(p, Poly(ext.coords, q.terms))})
        return out

    report = Report("twist-isomorphism")
    r = len(ext.fiber_labels)
    e = ext.basis_section
    for s in range(r):
        lhs = prod.rho(F(e(s)))
        rhs = ext.rho(e(s))
        if lhs != rhs:
            report.add(f"anchor on {ext.fiber_labels[s]}", lhs - rhs, lhs - rhs)
        for t in range(s + 1, r):
            lhs = F(ext.bracket(e(s), e(t)))
            rhs = prod.bracket(F(e(s)), F(e(t)))
            diff = _sec_add(lhs, _sec_scale(rhs, -1))
            if diff:
                report.add(f"bracket on [{ext.fiber_labels[s]}, {ext.fiber_labels[t]}]",
                           render_section(ext, diff), diff)
    return report


def canonical_lambda(pair: AlgebroidActionPair) -> GaugeParameter:
    """lambda = sum_x eta^x iota_phi(x) on g[1] x A[1] for a twisted pair."""
    phis = getattr(pair, "phi", None)
    if phis is None:
        raise InputError("pair was not produced by twist_by_map")
    datum = pair_to_action(pair)
    space = datum.space
    lam = VectorField(space.coords)
    for x, sec in phis.items():
        io = space.lift_M_field(pair.A.iota(sec).with_coords(space.M_coords))
        lam = lam + io.times_poly(space.coords.coordinate(x)) * LAMBDA_SIGN
    return GaugeParameter(space, lam)


LAMBDA_SIGN = 1


def verify_algebroid_iso_equivalence(pair1: AlgebroidActionPair, pair2: AlgebroidActionPair,
                                     lam: GaugeParameter | VectorField | None) -> Report:
    """The gauge transform of pair1's action by lambda is pair2's action, and
    e^{-lambda} intertwines the two Q_tot fields."""
    d1, d2 = pair_to_action(pair1), pair_to_action(pair2)
    if d1.space != d2.space:
        raise InputError("pairs live on different spaces")
    if lam is None:
        lam = VectorField(d1.space.coords)
    if isinstance(lam, VectorField):
        lam = GaugeParameter(d1.space, lam)
    report = Report("algebroid-equivalence", notes={"plus": lam.plus})
    moved = gauge_transform(d1, lam)
    if moved.X != d2.X:
        diff = moved.X - d2.X
        report.add("gauge transform of action 1 - action 2", diff, diff)
    _, iso = isomorphism_from_gauge(d1, lam)
    report.merge(iso)
    return report

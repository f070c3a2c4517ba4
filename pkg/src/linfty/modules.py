"""Linear actions: L-infinity modules, the adjoint module via the complete
lift, and representations up to homotopy of ordinary Lie algebras.

Conventions: a module is stored on E = W[1] (basis degrees |w| - 1).  End(W)
and End(E) are identified index by index; an endomorphism keeps its degree.
The module maps f_k act on E and are indexed by sorted skew words of g.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .actions import ActionDatum, ProductSpace, X_of_phi, build_Qtot, phi_of_X
from .brackets import SkewBrackets, SymBrackets, check_linfty_jacobi, decalage, decalage_inv
from .errors import InputError
from .fields import (CoordinateSystem, Poly, VectorField, brackets_to_field, derived_brackets,
                     _add_into, mono_mul, poly_mul)
from .graded import (GradedBasis, LinearMap, canonical_words, format_scalar,
                     sort_word)
from .report import Report


def endo_to_linear_field(A: LinearMap, coords: CoordinateSystem | None = None,
                         offset: int = 0) -> VectorField:
    """The linear field Y_A with [Y_A, iota_w] = iota_{Aw}.

    ``offset`` embeds the space of A as a block of a larger coordinate system.
    """
    if A.source != A.target:
        raise InputError("endo_to_linear_field needs an endomorphism")
    if coords is None:
        coords = CoordinateSystem(A.source)
    dA = A.degree() or 0
    degs = A.source.degrees
    comps: dict[int, dict] = {}
    for (c, b), a in A.entries.items():
        coeff = -a if (dA * degs[b]) % 2 == 0 else a
        _add_into(comps.setdefault(c + offset, {}), (b + offset,), coeff)
    return VectorField(coords, comps)


def linear_field_to_endo(Y: VectorField, base: GradedBasis, offset: int = 0) -> LinearMap:
    """Inverse of :func:`endo_to_linear_field` (Y must be linear)."""
    entries = {}
    dY = Y.degree() or 0
    for i, p in Y.comps.items():
        for m, c in p.terms.items():
            if len(m) != 1:
                raise InputError("vector field is not linear")
            b = m[0] - offset
            entries[(i - offset, b)] = -c if (dY * base.degrees[b]) % 2 == 0 else c
    return LinearMap(base, base, entries)


class DGVectorSpace:
    """(E, d) with E = W[1] and d a degree 1 square-zero endomorphism."""

    def __init__(self, E: GradedBasis, d: LinearMap | None = None):
        d = LinearMap(E, E) if d is None else d
        if d.source != E or d.target != E:
            raise InputError("differential must be an endomorphism of E")
        deg = d.degree()
        if deg is not None and deg != 1:
            raise InputError(f"differential must have degree 1, got {deg}")
        if not (d @ d).is_zero():
            raise InputError("differential does not square to zero")
        self.E = E
        self.d = d

    @property
    def W(self) -> GradedBasis:
        return self.E.shifted(-1)


class ModuleStructure:
    """Maps f_k: wedge^k g -> End_{1-k}(E) on sorted skew words of g."""

    def __init__(self, g: SkewBrackets, E: GradedBasis, maps: Mapping | None = None):
        self.g = g
        self.E = E
        clean: dict[tuple, LinearMap] = {}
        for word, A in (maps or {}).items():
            word = tuple(g.base.index(w) if isinstance(w, str) else int(w) for w in word)
            if not word:
                raise InputError("module maps start at arity 1")
            if A.source != E or A.target != E:
                raise InputError("module map must be an endomorphism of E")
            s, sign = sort_word(word, g.base.degrees, False)
            if sign == 0:
                if not A.is_zero():
                    raise InputError("nonzero module map on a vanishing word")
                continue
            want = sum(g.base.degrees[i] for i in word) + 1 - len(word)
            dA = A.degree()
            if dA is not None and dA != want:
                raise InputError(f"f_{len(word)}{g.render_word(word)} must have degree {want}, "
                                 f"got {dA}")
            total = clean.get(s, LinearMap(E, E)) + A * sign
            if total.is_zero():
                clean.pop(s, None)
            else:
                clean[s] = total
        self.maps = clean

    def map(self, word) -> LinearMap:
        s, sign = sort_word(tuple(word), self.g.base.degrees, False)
        A = self.maps.get(s)
        if sign == 0 or A is None:
            return LinearMap(self.E, self.E)
        return A * sign

    def max_arity(self) -> int:
        return max((len(w) for w in self.maps), default=0)

    def __eq__(self, other):
        return (isinstance(other, ModuleStructure) and self.g == other.g and self.E == other.E
                and self.maps == other.maps)

    def __str__(self):
        if not self.maps:
            return "(all module maps zero)"
        return "\n".join(f"f{self.g.render_word(w)} = {A}" for w, A in sorted(self.maps.items()))


def module_extension(mod: ModuleStructure, dg: DGVectorSpace) -> SkewBrackets:
    """The L-infinity algebra g |x W: [v_1..v_k, w] = (-1)^{sum |v|} f_k(v) w, [w] = -dw."""
    if mod.E != dg.E:
        raise InputError("module and differential live on different spaces")
    g = mod.g
    W = dg.W
    base = g.base.concat(W)
    n = len(g.base)
    tables: dict[int, dict] = {}
    for k, word, value in g.entries():
        tables.setdefault(k, {})[word] = value.in_basis(base)
    for b in range(len(W)):
        img = dg.d(dg.E.basis_vector(b))
        if img:
            tables.setdefault(1, {})[(n + b,)] = -(img.in_basis(base, n))
    for word, A in mod.maps.items():
        sign = -1 if sum(g.base.degrees[i] for i in word) % 2 else 1
        for b in range(len(W)):
            img = A(dg.E.basis_vector(b))
            if img:
                key = word + (n + b,)
                tables.setdefault(len(key), {})[key] = img.in_basis(base, n) * sign
    top = max([g.max_arity] + [len(w) + 1 for w in mod.maps])
    return SkewBrackets(base, tables, top)


def check_module(mod: ModuleStructure, dg: DGVectorSpace, up_to_arity: int | None = None) -> Report:
    """Module axioms, verified as the Jacobi identities of g |x W."""
    ext = module_extension(mod, dg)
    rep = check_linfty_jacobi(ext, up_to_arity)
    rep.name = "module"
    return rep


def _decalage_word_sign(degs) -> int:
    k = len(degs)
    e = sum((k - 1 - j) * d for j, d in enumerate(degs))
    return -1 if e % 2 else 1


def module_to_action(mod: ModuleStructure, dg: DGVectorSpace) -> ActionDatum:
    """The linear action of g on E = W[1] compatible with -Y_d."""
    g1 = decalage(mod.g)
    space = ProductSpace(g1.base, mod.E)
    comps = {(): -endo_to_linear_field(dg.d, space.M_coords)}
    for word, A in mod.maps.items():
        sign = _decalage_word_sign([mod.g.base.degrees[i] for i in word])
        comps[word] = endo_to_linear_field(A * sign, space.M_coords)
    return X_of_phi(space, comps, g1)


def _check_linear(datum: ActionDatum):
    nU = datum.space.nU
    for i, p in datum.X.comps.items():
        for m in p.terms:
            if sum(1 for j in m if j >= nU) != 1:
                raise InputError("action is not linear in the coordinates of M")


def action_to_module(datum: ActionDatum) -> tuple[ModuleStructure, DGVectorSpace]:
    """Read a linear action back as a module, through the mixed brackets of g |x W."""
    _check_linear(datum)
    space = datum.space
    sym = derived_brackets(build_Qtot(datum))
    skew = decalage_inv(sym)
    g = decalage_inv(datum.U_brackets)
    E = space.M
    n = space.nU
    d_entries = {}
    maps: dict[tuple, dict] = {}
    for k, word, value in skew.entries():
        if word[-1] < n:
            continue
        if any(i >= n for i in word[:-1]):
            raise InputError("bracket with two module entries: not a linear action")
        b = word[-1] - n
        gw = word[:-1]
        for c, q in value.coords.items():
            if c < n:
                raise InputError("mixed bracket with a g-component: not a linear action")
            if not gw:
                d_entries[(c - n, b)] = -q
            else:
                sign = -1 if sum(g.base.degrees[i] for i in gw) % 2 else 1
                maps.setdefault(gw, {})[(c - n, b)] = q * sign
    dg = DGVectorSpace(E, LinearMap(E, E, d_entries))
    mod = ModuleStructure(g, E, {w: LinearMap(E, E, e) for w, e in maps.items()})
    return mod, dg


# -- complete lift and the adjoint module ------------------------------------------

def tangent_basis(base: GradedBasis) -> GradedBasis:
    return base.concat(GradedBasis((f"~{l}", d) for l, d in base))


def complete_lift(Q: VectorField) -> VectorField:
    """Q^i d_i + xi~^j d_j(Q^i) d~_i on the doubled coordinates (xi, xi~)."""
    base = Q.coords.basis
    n = len(base)
    coords = CoordinateSystem(tangent_basis(base), Q.coords.cutoff)
    embed = list(range(n))
    comps: dict[int, Poly] = {}
    for i, p in Q.comps.items():
        comps[i] = p.reindexed(coords, embed)
        acc = Poly(coords, {})
        for j in range(n):
            dj = p.diff(j)
            if dj:
                acc = acc + poly_mul(coords.coordinate(n + j), dj.reindexed(coords, embed))
        if acc:
            comps[n + i] = acc
    return VectorField(coords, comps, Q.truncated)


class AdjointModule:
    def __init__(self, module, dg, extension, datum, report):
        self.module = module
        self.dg = dg
        self.extension = extension
        self.datum = datum
        self.report = report


def adjoint_module(g: SymBrackets) -> AdjointModule:
    """The module (g~[1], -d) whose extension is Tg = derived brackets of the complete lift."""
    Q = brackets_to_field(g)
    QT = complete_lift(Q)
    tb = QT.coords.basis
    n = len(g.base)
    space = ProductSpace(g.base, GradedBasis(list(tb)[n:]))
    QT = QT.with_coords(space.coords)
    X = QT - space.lift_U_field(Q)
    datum = ActionDatum(space, X, g)
    from .extensions import ExtensionStructure

    h_tables = {1: {(i,): v.in_basis(space.M) for (i,), v in g.tables.get(1, {}).items()}}
    h = SymBrackets(space.M, h_tables, 1)
    ext = ExtensionStructure(derived_brackets(QT.with_coords(space.coords)), g, h)
    mod, dg = action_to_module(datum)
    report = Report("adjoint")
    report.merge(ext.check_strictness())
    for k in range(0, g.max_arity):
        for word in canonical_words(g.base.degrees, k, True):
            P = phi_of_X(datum, word)
            entries = {}
            for b in range(n):
                v = g.bracket(*(word + (b,)))
                for c, q in v.coords.items():
                    entries[(c, b)] = q
            A = LinearMap(space.M, space.M, entries)
            want = endo_to_linear_field(A, space.M_coords)
            if P != want:
                report.add(f"phi_X{g.render_word(word)} - {{w, .}}", P - want, P - want)
    return AdjointModule(mod, dg, ext, datum, report)


# -- representations up to homotopy ------------------------------------------------

class RepUpToHomotopy:
    """omega = sum_w xi^w (x) omega_w on S(g[1]*) (x) E, for g an ordinary Lie algebra.

    ``omega[()]`` is the degree 1 differential of E.
    """

    def __init__(self, g: SkewBrackets, E: GradedBasis, omega: Mapping | None = None):
        _require_ordinary(g)
        self.g = g
        self.E = E
        clean = {}
        for word, A in (omega or {}).items():
            word = tuple(g.base.index(w) if isinstance(w, str) else int(w) for w in word)
            s, sign = sort_word(word, [1] * len(g.base), True)
            if A.source != E or A.target != E:
                raise InputError("omega components must be endomorphisms of E")
            if sign == 0 or A.is_zero():
                continue
            want = 1 - len(word)
            if A.degree() is not None and A.degree() != want:
                raise InputError(f"omega_{len(word)} must have degree {want}")
            total = clean.get(s, LinearMap(E, E)) + A * sign
            if total.is_zero():
                clean.pop(s, None)
            else:
                clean[s] = total
        self.omega = clean
        self.Q_g = brackets_to_field(decalage(g))

    def __eq__(self, other):
        return (isinstance(other, RepUpToHomotopy) and self.g == other.g and self.E == other.E
                and self.omega == other.omega)

    def apply_D(self, vec: dict) -> dict:
        """D on a vector {(monomial, e): coeff} of S(g[1]*) (x) E."""
        coords = self.Q_g.coords
        out: dict = {}
        for (p, e), c in vec.items():
            qp = self.Q_g(Poly(coords, {p: 1}))
            for m, a in qp.terms.items():
                _add_into(out, (m, e), c * a)
            dp = coords.mono_degree(p)
            for m, A in self.omega.items():
                s, mp = mono_mul(coords.parity, m, p)
                if not s:
                    continue
                dA = A.degree() or 0
                if (dA * dp) % 2:
                    s = -s
                img = A(self.E.basis_vector(e))
                for f, a in img.coords.items():
                    _add_into(out, (mp, f), c * s * a)
        return out


def _require_ordinary(g: SkewBrackets):
    if any(d != 0 for d in g.base.degrees) or any(k != 2 for k in g.tables):
        raise InputError("representations up to homotopy need an ordinary Lie algebra "
                         "(degree 0 basis, binary bracket only)")


def check_rephom(rep: RepUpToHomotopy) -> Report:
    """D^2 = 0 on every basis element p (x) e of S(g[1]*) (x) E."""
    report = Report("rephom")
    n = len(rep.g.base)
    coords = rep.Q_g.coords
    for k in range(n + 1):
        for p in combinations(range(n), k):
            for e in range(len(rep.E)):
                sq = rep.apply_D(rep.apply_D({(p, e): Fraction(1)}))
                if sq:
                    text = " + ".join(f"{format_scalar(c)}*[{coords.render_mono(m)}]{rep.E.labels[f]}"
                                      for (m, f), c in sorted(sq.items()))
                    report.add(f"D^2 on [{coords.render_mono(p)}]{rep.E.labels[e]}", text, sq)
    return report


def module_to_rephom(mod: ModuleStructure, dg: DGVectorSpace) -> RepUpToHomotopy:
    """omega_n = (-1)^{floor(n/2)} xi^{v_1}...xi^{v_n} (x) f_n(v_1..v_n), omega_0 = -d."""
    _require_ordinary(mod.g)
    omega = {(): -dg.d}
    for word, A in mod.maps.items():
        sign = -1 if (len(word) // 2) % 2 else 1
        omega[word] = A * sign
    return RepUpToHomotopy(mod.g, mod.E, omega)


def rephom_to_module(rep: RepUpToHomotopy) -> tuple[ModuleStructure, DGVectorSpace]:
    """Inverse of :func:`module_to_rephom`; refuses when D^2 != 0."""
    r = check_rephom(rep)
    if not r.ok:
        raise InputError(f"not a representation up to homotopy (D^2 != 0):\n{r}")
    d = -rep.omega.get((), LinearMap(rep.E, rep.E))
    maps = {}
    for word, A in rep.omega.items():
        if word:
            maps[word] = A * (-1 if (len(word) // 2) % 2 else 1)
    return ModuleStructure(rep.g, rep.E, maps), DGVectorSpace(rep.E, d)

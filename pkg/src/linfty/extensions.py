"""Extensions g[1] x h[1] of L-infinity[1]-algebras built from actions, and
non-abelian cocycles of ordinary Lie algebras."""
from __future__ import annotations

from typing import Mapping

from .actions import ActionDatum, ProductSpace, X_of_phi, build_Qtot, check_compatible
from .brackets import SkewBrackets, SymBrackets, check_linfty_jacobi, decalage
from .errors import InputError, NotADerivationError
from .fields import VectorField, brackets_to_field, derived_brackets
from .graded import Element, LinearMap, canonical_words
from .modules import endo_to_linear_field
from .report import Report


class ExtensionStructure:
    """Brackets on g[1] x h[1] (g block first) together with both factors."""

    def __init__(self, brackets: SymBrackets, g: SymBrackets, h: SymBrackets):
        if brackets.base != g.base.concat(h.base):
            raise InputError("extension basis must be the g basis followed by the h basis")
        self.brackets = brackets
        self.g = g
        self.h = h
        self.n = len(g.base)

    def __eq__(self, other):
        return (isinstance(other, ExtensionStructure) and self.brackets == other.brackets
                and self.g == other.g and self.h == other.h)

    def _split(self, v: Element):
        gp = {i: c for i, c in v.coords.items() if i < self.n}
        hp = {i - self.n: c for i, c in v.coords.items() if i >= self.n}
        return Element(self.g.base, gp), Element(self.h.base, hp)

    def check_strictness(self) -> Report:
        """Projection to g and inclusion of h are strict maps.

        Checked on the stored brackets: pure g-words project to the g-brackets,
        words touching h have no g-component, and pure h-words reproduce h.
        """
        report = Report("extension-strictness")
        n = self.n
        g_words = {w for _, w, _ in self.g.entries()}
        h_words = {tuple(i + n for i in w) for _, w, _ in self.h.entries()}
        for k, word, value in self.brackets.entries():
            if all(i < n for i in word):
                g_words.add(word)
            elif all(i >= n for i in word):
                h_words.add(word)
            elif self._split(value)[0]:
                gv = self._split(value)[0]
                report.add(f"g-component of {self.brackets.render_word(word)}", gv, gv)
        for word in sorted(g_words):
            gv, _ = self._split(self.brackets.bracket(*word))
            want = self.g.bracket(*word)
            if gv != want:
                report.add(f"projection on {self.g.render_word(word)}", gv - want, gv - want)
        for word in sorted(h_words):
            hw = tuple(i - n for i in word)
            gv, hv = self._split(self.brackets.bracket(*word))
            want = self.h.bracket(*hw)
            if gv:
                report.add(f"g-component of {self.brackets.render_word(word)}", gv, gv)
            if hv != want:
                report.add(f"inclusion on {self.h.render_word(hw)}", hv - want, hv - want)
        return report


def _space_for(g: SymBrackets, h: SymBrackets, cutoff=None) -> ProductSpace:
    return ProductSpace(g.base, h.base, cutoff)


def build_extension(datum: ActionDatum, h: SymBrackets) -> ExtensionStructure:
    """Derived brackets of Q_tot = X + Q_g on g[1] x h[1].

    Refuses an action not compatible with the brackets of h.
    """
    if datum.space.M != h.base:
        raise InputError("the action acts on a different space than h[1]")
    Q_h = brackets_to_field(h)
    rep = check_compatible(datum, Q_h)
    if not rep.ok:
        raise InputError(f"action is not compatible with the brackets of h:\n{rep}")
    Qtot = build_Qtot(datum)
    if Qtot.at_origin():
        raise InputError("Q_tot has a constant term")
    E = derived_brackets(Qtot)
    ext = ExtensionStructure(E, datum.U_brackets, h)
    strict = ext.check_strictness()
    if not strict.ok:
        raise InputError(f"extension fails strictness:\n{strict}")
    return ext


def extract_action_from_extension(ext: ExtensionStructure) -> ActionDatum:
    """X = Q_E - Q_g, after checking both structure maps are strict."""
    strict = ext.check_strictness()
    if not strict.ok:
        raise InputError(f"not an extension with strict structure maps:\n{strict}")
    space = _space_for(ext.g, ext.h)
    QE = brackets_to_field(ext.brackets).with_coords(space.coords)
    X = QE - space.lift_U_field(brackets_to_field(ext.g))
    return ActionDatum(space, X, ext.g)


def is_semidirect(ext: ExtensionStructure) -> tuple[bool, list[str]]:
    """Whether g[1] sits in the extension as a sub-algebra.

    The witness lists every pure g-word whose bracket has an h-component.
    """
    witness = []
    for k, word, value in ext.brackets.entries():
        if all(i < ext.n for i in word):
            _, hv = ext._split(value)
            if hv:
                witness.append(f"{ext.brackets.render_word(word)} has h-component {hv}")
    return not witness, witness


# -- non-abelian cocycles of ordinary Lie algebras ----------------------------------------

def _require_lie(L: SkewBrackets, name: str):
    if any(d != 0 for d in L.base.degrees) or any(k != 2 for k in L.tables):
        raise InputError(f"{name} must be an ordinary Lie algebra (degree 0, binary bracket)")


class NonabelianCocycle:
    """sigma: g -> Der(h) and a skew psi: g x g -> h.

    ``sigma`` maps g-labels to endomorphisms of h; ``psi`` maps label pairs
    to elements of h and is completed by skew-symmetry.
    """

    def __init__(self, g: SkewBrackets, h: SkewBrackets, sigma: Mapping, psi: Mapping):
        _require_lie(g, "g")
        _require_lie(h, "h")
        self.g = g
        self.h = h
        self.sigma: dict[int, LinearMap] = {}
        for x, A in sigma.items():
            i = g.base.index(x) if isinstance(x, str) else int(x)
            if A.source != h.base or A.target != h.base:
                raise InputError("sigma(x) must be an endomorphism of h")
            if A.degree() not in (None, 0):
                raise InputError("sigma(x) must have degree 0")
            self.sigma[i] = A
        self.psi: dict[tuple[int, int], Element] = {}
        for pair, v in psi.items():
            a, b = (g.base.index(p) if isinstance(p, str) else int(p) for p in pair)
            if not isinstance(v, Element):
                v = h.base.element(v)
            if a == b:
                if v:
                    raise InputError("psi(x, x) must vanish")
                continue
            lo, hi, s = (a, b, 1) if a < b else (b, a, -1)
            self.psi[(lo, hi)] = self.psi.get((lo, hi), h.base.zero()) + v * s

    def sigma_of(self, x: Element) -> LinearMap:
        out = LinearMap(self.h.base)
        for i, c in x.coords.items():
            if i in self.sigma:
                out = out + self.sigma[i] * c
        return out

    def psi_of(self, a: int, b: int) -> Element:
        if a == b:
            return self.h.base.zero()
        if a < b:
            return self.psi.get((a, b), self.h.base.zero())
        return -self.psi.get((b, a), self.h.base.zero())

    def psi_el(self, x: Element, y: Element) -> Element:
        out = self.h.base.zero()
        for i, c in x.coords.items():
            for j, d in y.coords.items():
                out = out + self.psi_of(i, j) * (c * d)
        return out


def _ad(h: SkewBrackets, v: Element) -> LinearMap:
    entries = {}
    for b in range(len(h.base)):
        img = h.evaluate(v, h.base.basis_vector(b))
        for c, q in img.coords.items():
            entries[(c, b)] = q
    return LinearMap(h.base, h.base, entries)


def check_nonabelian_cocycle(co: NonabelianCocycle) -> Report:
    """Derivation property, then the two cocycle equations.

    Raises NotADerivationError when some sigma(x) is not a derivation of h.
    """
    g, h = co.g, co.h
    for x, A in sorted(co.sigma.items()):
        for a in range(len(h.base)):
            for b in range(len(h.base)):
                ea, eb = h.base.basis_vector(a), h.base.basis_vector(b)
                lhs = A(h.evaluate(ea, eb))
                rhs = h.evaluate(A(ea), eb) + h.evaluate(ea, A(eb))
                if lhs != rhs:
                    raise NotADerivationError(
                        f"sigma({g.base.labels[x]}) is not a derivation: on "
                        f"({h.base.labels[a]}, {h.base.labels[b]}) the defect is {lhs - rhs}")
    report = Report("nonabelian-cocycle")
    n = len(g.base)
    for x in range(n):
        for y in range(x + 1, n):
            ex, ey = g.base.basis_vector(x), g.base.basis_vector(y)
            lhs = (co.sigma_of(g.evaluate(ex, ey)) - co.sigma_of(ex).commutator(co.sigma_of(ey))
                   + _ad(h, co.psi_of(x, y)))
            if not lhs.is_zero():
                report.add(f"sigma([x,y]) - [sigma x, sigma y] + ad psi(x,y) on "
                           f"({g.base.labels[x]}, {g.base.labels[y]})", lhs, lhs)
    for x in range(n):
        for y in range(x + 1, n):
            for z in range(y + 1, n):
                total = h.base.zero()
                e = g.base.basis_vector
                for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                    total = total + co.psi_el(e(a), g.evaluate(e(b), e(c)))
                    total = total + co.sigma_of(e(a))(co.psi_of(b, c))
                if total:
                    report.add(f"cyclic psi(x,[y,z]) + sigma(x) psi(y,z) on ({g.base.labels[x]}, "
                               f"{g.base.labels[y]}, {g.base.labels[z]})", total, total)
    return report


def cocycle_lie_algebra(co: NonabelianCocycle) -> SkewBrackets:
    """[(x1,a1),(x2,a2)] = ([x1,x2], [a1,a2] + sigma(x1)a2 - sigma(x2)a1 + psi(x1,x2))."""
    g, h = co.g, co.h
    base = g.base.concat(h.base)
    n = len(g.base)
    table = {}
    for _, word, v in g.entries():
        table[word] = v.in_basis(base)
    for _, (a, b), v in h.entries():
        table[(a + n, b + n)] = v.in_basis(base, n)
    for x, A in co.sigma.items():
        for b in range(len(h.base)):
            img = A(h.base.basis_vector(b))
            if img:
                table[(x, b + n)] = img.in_basis(base, n)
    for (x, y), v in co.psi.items():
        if v:
            table[(x, y)] = table.get((x, y), base.zero()) + v.in_basis(base, n)
    return SkewBrackets(base, {2: table}, 2)


def cocycle_action(co: NonabelianCocycle) -> ActionDatum:
    """The action of g[1] on h[1]: () -> Q_h, (x) -> Y_sigma(x), (x,y) -> constant field psi."""
    g1, h1 = decalage(co.g), decalage(co.h)
    space = ProductSpace(g1.base, h1.base)
    comps = {(): brackets_to_field(h1).with_coords(space.M_coords)}
    for x, A in co.sigma.items():
        comps[(x,)] = endo_to_linear_field(LinearMap(h1.base, h1.base, A.entries), space.M_coords)
    for (x, y), v in co.psi.items():
        comps[(x, y)] = VectorField(space.M_coords, {c: {(): q} for c, q in v.coords.items()})
    return X_of_phi(space, comps, g1)


def extension_from_cocycle(co: NonabelianCocycle) -> ExtensionStructure:
    """Extension of g[1] by h[1] built from the action of a valid cocycle."""
    rep = check_nonabelian_cocycle(co)
    if not rep.ok:
        raise InputError(f"not a non-abelian cocycle:\n{rep}")
    datum = cocycle_action(co)
    return build_extension(datum, decalage(co.h))


def check_cocycle_extension(co: NonabelianCocycle) -> Report:
    """The extension from the action agrees with the classical bracket on g x h."""
    ext = extension_from_cocycle(co)
    classical = decalage(cocycle_lie_algebra(co))
    report = Report("cocycle-extension")
    report.merge(check_linfty_jacobi(cocycle_lie_algebra(co)), "classical ")
    if ext.brackets.tables != classical.tables:
        base = ext.brackets.base
        for k in sorted(set(ext.brackets.tables) | set(classical.tables)):
            for word in canonical_words(base.degrees, k, True):
                a, b = ext.brackets.bracket(*word), classical.bracket(*word)
                if a != b:
                    report.add(f"{ext.brackets.render_word(word)}", a - b, a - b)
    return report

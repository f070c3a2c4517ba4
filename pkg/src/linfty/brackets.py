"""Multibracket tables for L-infinity (skew, degree 2-k) and L-infinity[1]
(symmetric, degree 1) structures, their Jacobi identities, the decalage
isomorphism between them, and morphisms into DGL[1]-algebras.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InputError
from .graded import (Element, GradedBasis, canonical_words, koszul_epsilon,
                     koszul_chi, sort_word, unshuffles)
from .report import Report


class _Brackets:
    symmetric: bool = True
    kind = ""

    def __init__(self, base: GradedBasis, tables: Mapping[int, Mapping] | None = None,
                 max_arity: int | None = None):
        self.base = base
        clean: dict[int, dict[tuple[int, ...], Element]] = {}
        for k, table in (tables or {}).items():
            k = int(k)
            if k < 1:
                raise InputError(f"{self.kind} bracket arity must be >= 1, got {k}")
            for word, value in table.items():
                word = tuple(base.index(w) if isinstance(w, str) else int(w) for w in word)
                if len(word) != k:
                    raise InputError(f"word {word} listed under arity {k}")
                if not isinstance(value, Element):
                    value = base.element(value)
                if value.base != base:
                    raise InputError("bracket value lives in the wrong space")
                self._check_degree(word, value)
                s, sign = sort_word(word, base.degrees, self.symmetric)
                if sign == 0:
                    if value:
                        raise InputError(f"word {self.render_word(word)} vanishes identically "
                                         "but was given a nonzero value")
                    continue
                slot = clean.setdefault(k, {})
                total = slot.get(s, base.zero()) + value * sign
                if total:
                    slot[s] = total
                else:
                    slot.pop(s, None)
        self.tables = {k: t for k, t in clean.items() if t}
        top = max(self.tables, default=0)
        if max_arity is None:
            max_arity = max(top, 1)
        if top > max_arity:
            raise InputError(f"bracket of arity {top} exceeds max_arity {max_arity}")
        self.max_arity = max_arity

    # degree rule of a single table entry
    def output_degree(self, word: tuple[int, ...]) -> int:
        raise NotImplementedError

    def _check_degree(self, word, value: Element):
        want = self.output_degree(word)
        for k in value.coords:
            if self.base.degrees[k] != want:
                raise InputError(
                    f"{self.kind} bracket {self.render_word(word)} must have degree {want}, "
                    f"but its value {value} has a component of degree {self.base.degrees[k]}")

    def render_word(self, word) -> str:
        return "(" + ", ".join(self.base.labels[i] for i in word) + ")"

    def bracket(self, *word: int) -> Element:
        """Bracket of basis vectors, in any order."""
        k = len(word)
        table = self.tables.get(k)
        if not table:
            return self.base.zero()
        s, sign = sort_word(word, self.base.degrees, self.symmetric)
        if sign == 0:
            return self.base.zero()
        value = table.get(s)
        if value is None:
            return self.base.zero()
        return value if sign == 1 else -value

    def evaluate(self, *elements: Element) -> Element:
        """Multilinear evaluation on arbitrary elements."""
        k = len(elements)
        if not self.tables.get(k):
            return self.base.zero()
        acc: dict[int, Fraction] = {}

        def rec(pos, word, coeff):
            if pos == k:
                for b, v in self.bracket(*word).coords.items():
                    acc[b] = acc.get(b, 0) + coeff * v
                return
            for i, c in elements[pos].coords.items():
                rec(pos + 1, word + (i,), coeff * c)

        rec(0, (), Fraction(1))
        return Element(self.base, acc)

    def entries(self) -> Iterable[tuple[int, tuple[int, ...], Element]]:
        for k in sorted(self.tables):
            for word in sorted(self.tables[k]):
                yield k, word, self.tables[k][word]

    def is_zero(self) -> bool:
        return not self.tables

    def __eq__(self, other):
        return (type(self) is type(other) and self.base == other.base
                and self.tables == other.tables)

    def __repr__(self):
        return f"{type(self).__name__}({self.base!r}, {len(list(self.entries()))} entries)"

    def __str__(self):
        lines = []
        for k, word, value in self.entries():
            lines.append(f"{self.render_word(word)} -> {value}")
        return "\n".join(lines) if lines else "(all brackets zero)"

    def default_check_arity(self) -> int:
        return max(2 * self.max_arity - 1, 1)

    def with_max_arity(self, max_arity: int):
        return type(self)(self.base, self.tables, max(max_arity, max(self.tables, default=1)))


class SymBrackets(_Brackets):
    """Graded symmetric brackets {...}_k of degree 1 (an L-infinity[1] structure)."""

    symmetric = True
    kind = "symmetric"

    def output_degree(self, word):
        return sum(self.base.degrees[i] for i in word) + 1


class SkewBrackets(_Brackets):
    """Graded skew brackets [...]_k of degree 2-k (an L-infinity structure)."""

    symmetric = False
    kind = "skew"

    def output_degree(self, word):
        return sum(self.base.degrees[i] for i in word) + 2 - len(word)


# -- Jacobi identities --------------------------------------------------------

def _jacobiator(S: _Brackets, word: tuple[int, ...]) -> Element:
    n = len(word)
    degs = [S.base.degrees[i] for i in word]
    total = S.base.zero()
    for i in range(1, n + 1):
        if i > S.max_arity or n - i + 1 > S.max_arity:
            continue
        if not S.tables.get(i) or not S.tables.get(n - i + 1):
            continue
        outer_sign = -1 if (i * (n - i)) % 2 and not S.symmetric else 1
        for tau in unshuffles(i, n - i):
            inner = S.bracket(*(word[p] for p in tau[:i]))
            if not inner:
                continue
            sign = koszul_epsilon(degs, tau) if S.symmetric else koszul_chi(degs, tau)
            rest = [S.base.basis_vector(word[p]) for p in tau[i:]]
            term = S.evaluate(inner, *rest)
            if term:
                total = total + term * (sign * outer_sign)
    return total


def _check_jacobi(S: _Brackets, up_to_arity: int | None, name: str) -> Report:
    if up_to_arity is None:
        up_to_arity = S.default_check_arity()
    if up_to_arity < 1:
        raise InputError("up_to_arity must be >= 1")
    report = Report(name, notes={"up_to_arity": up_to_arity, "max_arity": S.max_arity,
                                 "truncated": up_to_arity < S.default_check_arity()})
    for n in range(1, up_to_arity + 1):
        for word in canonical_words(S.base.degrees, n, S.symmetric):
            r = _jacobiator(S, word)
            if r:
                report.add(f"n={n} word={S.render_word(word)}", r, r)
    return report


def check_linfty_jacobi(S: SkewBrackets, up_to_arity: int | None = None) -> Report:
    """Generalized Jacobi identities of an L-infinity algebra on basis words."""
    if not isinstance(S, SkewBrackets):
        raise InputError("check_linfty_jacobi expects skew brackets")
    return _check_jacobi(S, up_to_arity, "linfty-jacobi")


def check_linfty1_jacobi(S: SymBrackets, up_to_arity: int | None = None) -> Report:
    """Generalized Jacobi identities of an L-infinity[1] algebra on basis words."""
    if not isinstance(S, SymBrackets):
        raise InputError("check_linfty1_jacobi expects symmetric brackets")
    return _check_jacobi(S, up_to_arity, "linfty1-jacobi")


# -- decalage ------------------------------------------------------------------

def decalage_sign(degs: list[int]) -> int:
    """(-1)^{(n-1)|v_1| + ... + 2|v_{n-2}| + |v_{n-1}|} for unshifted degrees."""
    n = len(degs)
    e = sum((n - 1 - p) * d for p, d in enumerate(degs))
    return -1 if e % 2 else 1


def decalage(S: SkewBrackets) -> SymBrackets:
    """L-infinity structure on V -> L-infinity[1] structure on V[1]."""
    shifted = S.base.shifted(1)
    tables = {}
    for k, word, value in S.entries():
        sign = decalage_sign([S.base.degrees[i] for i in word])
        tables.setdefault(k, {})[word] = value.in_basis(shifted) * sign
    return SymBrackets(shifted, tables, S.max_arity)


def decalage_inv(S: SymBrackets) -> SkewBrackets:
    """Inverse of :func:`decalage`."""
    unshifted = S.base.shifted(-1)
    tables = {}
    for k, word, value in S.entries():
        sign = decalage_sign([unshifted.degrees[i] for i in word])
        tables.setdefault(k, {})[word] = value.in_basis(unshifted) * sign
    return SkewBrackets(unshifted, tables, S.max_arity)


# -- targets of morphisms --------------------------------------------------------

class SymBracketsTarget:
    """A finite DGL[1]-algebra (arities 1 and 2 only) as a morphism target.

    ``twist`` adds {mc, .} to the differential.
    """

    def __init__(self, W: SymBrackets, twist: Element | None = None):
        if max(W.tables, default=0) > 2:
            raise InputError("target must be a DGL[1]-algebra: only arities 1 and 2")
        self.W = W
        self.twist = twist

    def zero(self):
        return self.W.base.zero()

    def d(self, x: Element) -> Element:
        out = self.W.evaluate(x)
        if self.twist is not None:
            out = out + self.W.evaluate(self.twist, x)
        return out

    def bracket(self, x: Element, y: Element) -> Element:
        return self.W.evaluate(x, y)

    def is_zero(self, x) -> bool:
        return not x

    def has_differential(self) -> bool:
        return bool(self.W.tables.get(1)) or self.twist is not None

    def twisted(self, mc: Element) -> "SymBracketsTarget":
        return SymBracketsTarget(self.W, mc if self.twist is None else self.twist + mc)

    def as_brackets(self) -> SymBrackets:
        """The (possibly twisted) target as an explicit bracket table."""
        tables = {k: dict(t) for k, t in self.W.tables.items()}
        if self.twist is not None:
            unary = tables.setdefault(1, {})
            for b in range(len(self.W.base)):
                v = self.W.evaluate(self.twist, self.W.base.basis_vector(b))
                if v:
                    unary[(b,)] = unary.get((b,), self.W.base.zero()) + v
        return SymBrackets(self.W.base, tables, 2)


def as_target(W) -> object:
    if isinstance(W, SymBrackets):
        return SymBracketsTarget(W)
    return W


class MorphismFamily:
    """Components phi_n : S^n V -> W on sorted words of V's basis.

    The empty word holds phi_0 (the curvature) when present.
    """

    def __init__(self, source: SymBrackets, target, components: Mapping):
        self.source = source
        self.target = as_target(target)
        comps = {}
        for word, value in components.items():
            word = tuple(source.base.index(w) if isinstance(w, str) else int(w) for w in word)
            s, sign = sort_word(word, source.base.degrees, True)
            if sign == 0:
                continue
            if self.target.is_zero(value):
                continue
            comps[s] = value if sign == 1 else value * -1
        self.components = comps

    @property
    def curved(self) -> bool:
        return () in self.components

    def max_arity(self) -> int:
        return max((len(w) for w in self.components), default=0)

    def value(self, word) -> object:
        s, sign = sort_word(tuple(word), self.source.base.degrees, True)
        if sign == 0:
            return self.target.zero()
        v = self.components.get(s)
        if v is None:
            return self.target.zero()
        return v if sign == 1 else v * -1

    def apply(self, elements) -> object:
        """phi on a word of arbitrary source elements (multilinear)."""
        acc = self.target.zero()

        def rec(pos, word, coeff):
            nonlocal acc
            if pos == len(elements):
                v = self.value(word)
                if not self.target.is_zero(v):
                    acc = acc + v * coeff
                return
            for i, c in elements[pos].coords.items():
                rec(pos + 1, word + (i,), coeff * c)

        rec(0, (), Fraction(1))
        return acc

    def plus_part(self) -> "MorphismFamily":
        return MorphismFamily(self.source, self.target,
                              {w: v for w, v in self.components.items() if w})


def _morphism_residual(phi: MorphismFamily, V: SymBrackets, target, word, curved: bool):
    n = len(word)
    degs = [V.base.degrees[i] for i in word]
    lhs = target.zero()
    for i in range(1, n + 1):
        if not V.tables.get(i):
            continue
        for tau in unshuffles(i, n - i):
            inner = V.bracket(*(word[p] for p in tau[:i]))
            if not inner:
                continue
            rest = [V.base.basis_vector(word[p]) for p in tau[i:]]
            term = phi.apply([inner] + rest)
            if not target.is_zero(term):
                lhs = lhs + term * koszul_epsilon(degs, tau)
    rhs = target.d(phi.value(word))
    lo = 0 if curved else 1
    half = Fraction(1, 2)
    for j in range(lo, n - lo + 1):
        for tau in unshuffles(j, n - j):
            a = phi.value(tuple(word[p] for p in tau[:j]))
            if target.is_zero(a):
                continue
            b = phi.value(tuple(word[p] for p in tau[j:]))
            if target.is_zero(b):
                continue
            term = target.bracket(a, b)
            if not target.is_zero(term):
                rhs = rhs + term * (half * koszul_epsilon(degs, tau))
    return lhs - rhs


def _default_morphism_arity(phi: MorphismFamily, V: SymBrackets) -> int:
    p = max(phi.max_arity(), 1)
    a = max(V.tables, default=1)
    return max(p + a - 1, 2 * p, 1)


def check_morphism(phi: MorphismFamily, V: SymBrackets, W=None,
                   up_to_arity: int | None = None) -> Report:
    """Verify the L-infinity[1] morphism equations into a DGL[1] target."""
    if phi.curved:
        raise InputError("phi has a zero component; use check_curved_morphism")
    target = phi.target if W is None else as_target(W)
    n_max = up_to_arity or _default_morphism_arity(phi, V)
    report = Report("morphism", notes={"up_to_arity": n_max})
    for n in range(1, n_max + 1):
        for word in canonical_words(V.base.degrees, n, True):
            r = _morphism_residual(phi, V, target, word, curved=False)
            if not target.is_zero(r):
                report.add(f"n={n} word={V.render_word(word)}", r, r)
    return report


def check_curved_morphism(phi: MorphismFamily, V: SymBrackets, W=None,
                          up_to_arity: int | None = None) -> Report:
    """Verify the curved morphism equations for n >= 0 (n = 0 is Maurer-Cartan)."""
    target = phi.target if W is None else as_target(W)
    n_max = up_to_arity or _default_morphism_arity(phi, V)
    report = Report("curved-morphism", notes={"up_to_arity": n_max})
    for n in range(0, n_max + 1):
        words = [()] if n == 0 else canonical_words(V.base.degrees, n, True)
        for word in words:
            r = _morphism_residual(phi, V, target, word, curved=True)
            if not target.is_zero(r):
                report.add(f"n={n} word={V.render_word(word)}", r, r)
    return report


class SplitMorphism:
    """phi_0, phi_+ and the target twisted by {phi_0, .}."""

    def __init__(self, mc_element, mc_residual, phi_plus: MorphismFamily, twisted_W):
        self.mc_element = mc_element
        self.mc_residual = mc_residual
        self.phi_plus = phi_plus
        self.twisted_W = twisted_W

    @property
    def mc_ok(self) -> bool:
        return self.twisted_W.is_zero(self.mc_residual)

    def verify(self, V: SymBrackets, up_to_arity: int | None = None) -> Report:
        """Right-hand side of the curved-morphism splitting as one report."""
        report = Report("split-curved-morphism")
        if not self.mc_ok:
            report.add("{phi0,phi0}", self.mc_residual, self.mc_residual)
        report.merge(check_morphism(self.phi_plus, V, self.twisted_W, up_to_arity), "phi+ ")
        return report


def split_curved_morphism(phi: MorphismFamily, W=None) -> SplitMorphism:
    """Split a curved morphism into its Maurer-Cartan part and its tail."""
    target = phi.target if W is None else as_target(W)
    if target.has_differential():
        raise InputError("splitting requires a Lie[1] target (binary bracket only)")
    mc = phi.value(())
    residual = target.bracket(mc, mc)
    twisted = target.twisted(mc)
    plus = MorphismFamily(phi.source, twisted,
                          {w: v for w, v in phi.components.items() if w})
    return SplitMorphism(mc, residual, plus, twisted)

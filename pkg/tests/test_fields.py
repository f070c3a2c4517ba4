import random
from fractions import Fraction

import pytest

from generators import rand_basis, rand_brackets, rand_field, sl2
from linfty.brackets import SkewBrackets, SymBrackets, check_linfty1_jacobi, decalage
from linfty.errors import InputError
from linfty.fields import (CoordinateSystem, Poly, VectorField, brackets_to_field, contract_field,
                           contraction, derived_brackets, evaluate_at_origin, is_homological,
                           lie_bracket, poly_mul)
from linfty.graded import GradedBasis


def coords_of(*items, cutoff=None):
    return CoordinateSystem(GradedBasis(items), cutoff)


def test_poly_unit_and_odd_antisymmetry():
    C = coords_of(("a", -1), ("b", -1), ("x", 0))
    xi, eta, x = C.coordinate(0), C.coordinate(1), C.coordinate(2)
    assert poly_mul(xi, C.one()) == xi
    assert poly_mul(xi, eta) == -poly_mul(eta, xi)
    assert poly_mul(xi, xi).is_zero()
    # odd generators anticommute, so the square of a sum of them vanishes
    assert poly_mul(xi + eta, xi + eta).is_zero()
    assert poly_mul(x + xi, x + xi) == poly_mul(x, x) + poly_mul(x, xi) * 2


def test_poly_even_square_expansion():
    C = coords_of(("a", 0), ("b", 2))
    x, y = C.coordinate(0), C.coordinate(1)
    lhs = poly_mul(x + y, x + y)
    assert lhs == poly_mul(x, x) + poly_mul(x, y) * 2 + poly_mul(y, y)


def test_poly_rejects_mixed_coordinates():
    C1 = coords_of(("a", 0))
    C2 = coords_of(("b", 0))
    with pytest.raises(InputError):
        poly_mul(C1.coordinate(0), C2.coordinate(0))


def test_weight_cutoff_flags_truncation():
    C = coords_of(("a", 0), cutoff=2)
    x = C.coordinate(0)
    sq = poly_mul(x, x)
    assert not sq.truncated
    cube = poly_mul(sq, x)
    assert cube.is_zero() and cube.truncated


def test_evaluate_at_origin():
    C = coords_of(("a", 0), ("b", -1))
    assert evaluate_at_origin(Poly(C, {(): 3})) == 3
    assert evaluate_at_origin(C.coordinate(0)) == 0
    assert evaluate_at_origin(Poly(C, {(): Fraction(1, 2), (0,): 5})) == Fraction(1, 2)


def test_lie_bracket_small_cases():
    C = coords_of(("a", 0))
    d = VectorField(C, {0: {(): 1}})
    euler = VectorField(C, {0: {(0,): 1}})
    assert lie_bracket(d, euler) == d
    assert lie_bracket(euler, euler).is_zero()


def test_lie_bracket_graded_jacobi():
    rng = random.Random(6)
    checked = 0
    for _ in range(150):
        C = CoordinateSystem(rand_basis(rng, rng.randint(1, 3), (-1, 0, 1)))
        fields = [rand_field(C, rng.choice([-1, 0, 1]), 3, rng, 0.3) for _ in range(3)]
        try:
            X, Y, Z = fields
            dx, dy, dz = (F.degree() or 0 for F in fields)
        except InputError:
            continue
        lhs = lie_bracket(X, lie_bracket(Y, Z))
        rhs = lie_bracket(lie_bracket(X, Y), Z) + lie_bracket(Y, lie_bracket(X, Z)) * (-1) ** (dx * dy)
        assert lhs == rhs
        anti = lie_bracket(Y, X) * (-(-1) ** (dx * dy))
        assert lie_bracket(X, Y) == anti
        checked += 1
    assert checked > 50


def test_contraction_basics():
    B = GradedBasis([("a", 0), ("b", -1)])
    C = CoordinateSystem(B)
    assert contraction(B.zero(), C).is_zero()
    for i in range(2):
        iota = contraction(B.basis_vector(i), C)
        for j in range(2):
            assert iota(C.coordinate(j)) == C.one().scale(1 if i == j else 0)
    v, w = B.element({"a": 2}), B.element({"a": -3})
    assert contraction(v + w, C) == contraction(v, C) + contraction(w, C)
    with pytest.raises(InputError):
        contraction(B.element({"a": 1, "b": 1}), C)


def test_bracket_with_contraction_formula():
    rng = random.Random(7)
    for _ in range(80):
        C = CoordinateSystem(rand_basis(rng, rng.randint(1, 3), (-1, 0, 1)))
        X = rand_field(C, rng.choice([0, 1]), 3, rng, 0.3)
        try:
            dX = X.degree() or 0
        except InputError:
            continue
        for k in range(len(C)):
            e = C.basis.basis_vector(k)
            got = lie_bracket(X, contraction(e, C))
            assert got == contract_field(X, k, dX)
            # [X, iota_e] = -(-1)^{|X||e|} iota_e(X) coefficientwise
            sign = -(-1) ** (dX * C.basis.degrees[k])
            want = VectorField(C, {i: p.diff(k).scale(sign) for i, p in X.comps.items()})
            assert got == want


def test_is_homological_examples():
    C = coords_of(("a", -1))
    assert is_homological(VectorField(C)).ok
    assert is_homological(brackets_to_field(decalage(sl2()))).ok
    broken = SkewBrackets(sl2().base, {2: {("h", "e"): {"e": 3}, ("h", "f"): {"f": -2},
                                           ("e", "f"): {"h": 1}}})
    assert not is_homological(brackets_to_field(decalage(broken))).ok
    with pytest.raises(InputError):
        is_homological(VectorField(C, {0: {(): 1}}))


def test_two_dim_lie_algebra_field():
    L = SkewBrackets(GradedBasis([("e1", 0), ("e2", 0)]), {2: {("e1", "e2"): {"e2": 1}}})
    S = decalage(L)
    Q = brackets_to_field(S)
    assert list(Q.comps) == [1]
    assert len(Q.comps[1].terms) == 1
    assert derived_brackets(Q) == S


def test_sl2_field_is_quadratic_on_odd_coordinates():
    S = decalage(sl2())
    Q = brackets_to_field(S)
    assert all(Q.coords.parity)
    assert all(len(m) == 2 for p in Q.comps.values() for m in p.terms)
    assert derived_brackets(Q) == S


def test_cubic_field_direct_expansion():
    # x_a^3 d_b with a even: three contractions by d/dx_a each contribute a minus sign
    C = coords_of(("a", 0), ("b", 1))
    Q = VectorField(C, {1: {(0, 0, 0): 1}})
    S = derived_brackets(Q)
    assert S.bracket(0, 0, 0) == C.basis.element({"b": -6})
    assert brackets_to_field(S) == Q


def test_zero_and_constant_fields():
    C = coords_of(("a", -1))
    assert derived_brackets(VectorField(C)).is_zero()
    assert brackets_to_field(SymBrackets(C.basis, {})).is_zero()
    with pytest.raises(InputError):
        derived_brackets(VectorField(C, {0: {(): 1}}))


def test_derived_round_trips():
    rng = random.Random(8)
    for _ in range(100):
        U = rand_basis(rng, rng.randint(1, 4), (-2, -1, 0, 1))
        S = rand_brackets(SymBrackets, U, rng)
        Q = brackets_to_field(S)
        assert derived_brackets(Q) == S
        assert brackets_to_field(derived_brackets(Q)) == Q
    for _ in range(100):
        C = CoordinateSystem(rand_basis(rng, rng.randint(1, 3), (-2, -1, 0, 1)))
        Q = rand_field(C, 1, 3, rng, 0.3)
        Q = VectorField(C, {i: {m: c for m, c in p.terms.items() if m}
                            for i, p in Q.comps.items()})
        assert brackets_to_field(derived_brackets(Q)) == Q


def test_jacobi_iff_homological_small_corpus():
    rng = random.Random(9)
    seen = set()
    for _ in range(60):
        U = rand_basis(rng, rng.randint(1, 3), (-2, -1, 0, 1))
        S = rand_brackets(SymBrackets, U, rng)
        a = check_linfty1_jacobi(S).ok
        assert a == is_homological(brackets_to_field(S)).ok
        seen.add(a)
    assert seen == {True, False}

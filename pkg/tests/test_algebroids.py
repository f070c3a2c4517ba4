import random

import pytest

from generators import sl2
from linfty.actions import verify_equivalence_triple
from linfty.algebroids import (AlgebroidActionPair, PolyAlgebroid, algebroid_to_Q,
                               build_algebroid_extension, canonical_lambda, cdo_act,
                               check_algebroid_axioms, check_algebroid_extension,
                               check_algebroid_pair, check_cdo_compatibility,
                               check_twist_isomorphism, pair_to_action, product_pair,
                               twist_by_map, verify_algebroid_iso_equivalence)
from linfty.brackets import SkewBrackets, decalage
from linfty.errors import InputError
from linfty.extensions import NonabelianCocycle, cocycle_action, cocycle_lie_algebra
from linfty.fields import VectorField, brackets_to_field, is_homological
from linfty.graded import GradedBasis, LinearMap

SL2_TABLE = {("ah", "ae"): {"ae": {(): 2}}, ("ah", "af"): {"af": {(): -2}},
             ("ae", "af"): {"ah": {(): 1}}}


def point_sl2():
    return PolyAlgebroid([], ["ae", "af", "ah"], {}, SL2_TABLE)


def rand_poly(rng, nb, maxdeg, density):
    monos = [()] + [(i,) for i in range(nb)] + [(i, j) for i in range(nb) for j in range(i, nb)]
    return {m: rng.randint(-2, 2) for m in monos if len(m) <= maxdeg and rng.random() < density}


def rand_algebroid(rng):
    nb, r = rng.randint(0, 2), rng.randint(1, 3)
    base, fib = ["x", "y"][:nb], ["a", "b", "c"][:r]
    anchor = {f: {b: rand_poly(rng, nb, 2, 0.25) for b in base} for f in fib if rng.random() < 0.5}
    structure = {}
    for i in range(r):
        for j in range(i + 1, r):
            if rng.random() < 0.5:
                structure[(fib[i], fib[j])] = {fib[k]: rand_poly(rng, nb, 1, 0.3) for k in range(r)}
    return PolyAlgebroid(base, fib, anchor, structure)


def test_point_algebroid_is_the_lie_algebra():
    A = point_sl2()
    Q = algebroid_to_Q(A)
    assert is_homological(Q).ok
    assert Q.comps == brackets_to_field(decalage(sl2("a"))).with_coords(Q.coords).comps
    assert check_algebroid_axioms(A).ok


def test_tangent_algebroid():
    T = PolyAlgebroid(["x", "y"], ["dx", "dy"], {"dx": {"x": {(): 1}}, "dy": {"y": {(): 1}}}, {})
    assert check_algebroid_axioms(T).ok
    assert is_homological(algebroid_to_Q(T)).ok
    # Q is the de Rham differential: d(x) = dx
    x = T.coords.coordinate(0)
    assert algebroid_to_Q(T)(x) == T.coords.coordinate(2)


def test_axioms_iff_Q_squared_random():
    rng = random.Random(2)
    seen = set()
    for _ in range(200):
        A = rand_algebroid(rng)
        ok = check_algebroid_axioms(A).ok
        assert ok == is_homological(algebroid_to_Q(A)).ok
        seen.add(ok)
    assert seen == {True, False}


def test_point_base_matches_cocycle_extension():
    """Over a point every algebroid operation is the Lie algebra one, table for table."""
    rng = random.Random(3)
    g, h, A = sl2(), sl2("a"), point_sl2()
    for _ in range(5):
        phi = {x: {l: {(): rng.randint(-2, 2)} for l in A.fiber_labels} for x in "efh"}
        pair = twist_by_map(g, A, phi)
        assert check_algebroid_pair(pair).ok
        sigma, fm = {}, {}
        for i, x in enumerate("efh"):
            fm[i] = h.base.element({l: c[()] for l, c in phi[x].items()})
            ent = {}
            for b in range(3):
                for c, q in h.evaluate(fm[i], h.base.basis_vector(b)).coords.items():
                    ent[(c, b)] = q
            sigma[i] = LinearMap(h.base, h.base, ent)
        psi = {k: h.base.element({A.fiber_labels[a]: p.terms.get((), 0) for a, p in sec.items()})
               for k, sec in pair.psi.items()}
        co = NonabelianCocycle(g, h, sigma, psi)
        assert pair_to_action(pair).X == cocycle_action(co).X
        ext = build_algebroid_extension(pair)
        L = cocycle_lie_algebra(co)
        for (a, b), sec in ext.structure.items():
            want = L.bracket(a, b)
            assert {k: p.terms.get((), 0) for k, p in sec.items()} == want.coords
        assert len(ext.structure) == len([w for _, w, _ in L.entries()])


def test_twist_isomorphism_and_canonical_lambda():
    rng = random.Random(4)
    g = SkewBrackets(GradedBasis([("u", 0), ("v", 0)]), {2: {(0, 1): {"v": 1}}})
    T = PolyAlgebroid(["x", "y"], ["dx", "dy"], {"dx": {"x": {(): 1}}, "dy": {"y": {(): 1}}}, {})

    def rp():
        return {m: rng.randint(-2, 2) for m in [(), (0,), (1,), (0, 0), (0, 1)] if rng.random() < 0.4}

    for target, lie in ((T, g), (point_sl2(), sl2())):
        for _ in range(4):
            if target is T:
                phi = {x: {"dx": rp(), "dy": rp()} for x in "uv"}
            else:
                phi = {x: {l: {(): rng.randint(-2, 2)} for l in target.fiber_labels} for x in "efh"}
            pair = twist_by_map(lie, target, phi)
            assert check_algebroid_pair(pair).ok
            assert check_algebroid_extension(pair).ok
            assert check_twist_isomorphism(pair).ok
            lam = canonical_lambda(pair)
            prod = product_pair(lie, target)
            assert verify_algebroid_iso_equivalence(prod, pair, lam).ok
            if any(pair.phi.values()):
                assert not verify_algebroid_iso_equivalence(prod, pair, -lam).ok
                assert not verify_algebroid_iso_equivalence(prod, pair, None).ok


def test_zero_twist_is_the_product():
    A = point_sl2()
    pair = twist_by_map(sl2(), A, {})
    assert not pair.sigma and not pair.psi
    assert build_algebroid_extension(pair) == build_algebroid_extension(product_pair(sl2(), A))


def test_identity_twist_gives_adjoint_sigma():
    A = point_sl2()
    pair = twist_by_map(sl2(), A, {x: {"a" + x: {(): 1}} for x in "efh"})
    assert not pair.psi
    e = A.basis_section
    for i in range(3):
        for k in range(3):
            assert cdo_act(A, pair.sigma_of(i), e(k)) == A.bracket(e(i), e(k))


def test_transformation_algebroid():
    g = SkewBrackets(GradedBasis([("u", 0), ("v", 0)]), {2: {(0, 1): {"v": 1}}})
    Z = PolyAlgebroid(["x"], [])
    wrong = {"u": VectorField(Z.coords, {0: {(0,): 1}}), "v": VectorField(Z.coords, {0: {(): 1}})}
    assert not check_algebroid_pair(AlgebroidActionPair(g, Z, wrong)).ok
    right = {"u": VectorField(Z.coords, {0: {(0,): -1}}), "v": VectorField(Z.coords, {0: {(): 1}})}
    pair = AlgebroidActionPair(g, Z, right)
    assert check_algebroid_pair(pair).ok
    assert verify_equivalence_triple(pair_to_action(pair)).ok
    ext = build_algebroid_extension(pair)
    assert check_algebroid_extension(pair).ok
    assert ext.fiber_labels == ["u", "v"]
    assert ext.rho(ext.basis_section(0)) == VectorField(ext.coords, {0: {(0,): -1}})
    assert ext.rho(ext.basis_section(1)) == VectorField(ext.coords, {0: {(): 1}})
    assert ext.bracket(ext.basis_section(0), ext.basis_section(1)) == ext.basis_section(1)


def test_leibniz_violation_fails_anchor_rule():
    # rho(t) = x d/dx; the field d/dx moves the base but does nothing to t
    A = PolyAlgebroid(["x"], ["t"], {"t": {"x": {(0,): 1}}}, {})
    Y = VectorField(A.coords, {0: {(): 1}})
    rep = check_cdo_compatibility(A, {"u": Y})
    assert not rep.ok
    assert any("anchor rule" in v.where for v in rep.violations)


def test_pair_validation():
    A = point_sl2()
    with pytest.raises(InputError):
        AlgebroidActionPair(SkewBrackets(GradedBasis([("a", 1)]), {}), A)
    with pytest.raises(InputError):
        AlgebroidActionPair(sl2(), A, {}, {("e", "e"): {"ae": {(): 1}}})
    with pytest.raises(InputError):
        check_twist_isomorphism(product_pair(sl2(), A))

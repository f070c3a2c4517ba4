import random

import pytest

from generators import plus_lambda, rand_field, sl2_adjoint_action, two_term_module
from linfty.actions import ActionDatum, ProductSpace, build_Qtot, phi_of_X
from linfty.brackets import SymBrackets
from linfty.errors import InputError, NilpotencyError
from linfty.fields import VectorField, lie_bracket
from linfty.gauge import (GaugeParameter, check_gauge_preserves_compatibility, check_mc, exp_ad,
                          gauge_chain, gauge_transform, gauge_transform_left_form,
                          isomorphism_from_gauge)
from linfty.graded import GradedBasis
from linfty.modules import endo_to_linear_field, module_to_action


def module_datum():
    mod, dg = two_term_module()
    return module_to_action(mod, dg), -endo_to_linear_field(dg.d)


def lambdas(n, seed):
    d, _ = module_datum()
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        lam = plus_lambda(d.space, rng)
        if lam:
            out.append(GaugeParameter(d.space, lam))
    return d, out


def q_model():
    """g[1] = sl2[1] acting trivially on M = (p, q) with Q_M = x_p d_q."""
    S = sl2_adjoint_action().U_brackets
    sp = ProductSpace(S.base, GradedBasis([("p", 0), ("q", 1)]))
    Q_M = VectorField(sp.M_coords, {1: {(0,): 1}})
    return ActionDatum(sp, sp.lift_M_field(Q_M), S), Q_M


def test_check_mc_cases():
    d = sl2_adjoint_action()
    assert check_mc(d).ok
    assert not check_mc(sl2_adjoint_action(sign=-1)).ok
    zero = ActionDatum(d.space, VectorField(d.space.coords), d.U_brackets)
    assert check_mc(zero).ok


def test_gauge_parameter_validation():
    sp = module_datum()[0].space
    # coordinates: xi_e, xi_f, xi_h, x_p0, x_q0, x_p1 (odd), x_q1 (odd)
    with pytest.raises(InputError):
        GaugeParameter(sp, VectorField(sp.coords, {3: {(0, 3): 1}}))
    with pytest.raises(InputError):
        GaugeParameter(sp, VectorField(sp.coords, {0: {(0,): 1}}))
    assert GaugeParameter(sp, VectorField(sp.coords, {3: {(0, 5): 1}})).plus
    assert not GaugeParameter(sp, VectorField(sp.coords, {5: {(5,): 1}})).plus


def test_zero_lambda_is_identity():
    d = sl2_adjoint_action()
    zero = GaugeParameter(d.space, VectorField(d.space.coords))
    assert gauge_transform(d, zero).X == d.X
    psi, rep = isomorphism_from_gauge(d, zero)
    assert rep.ok
    f = d.space.coords.coordinate(4)
    assert psi(f) == f


def test_exp_ad_collapses_when_commuting():
    sp = module_datum()[0].space
    lam = GaugeParameter(sp, VectorField(sp.coords, {3: {(0, 5): 1}}))
    Y = VectorField(sp.coords, {4: {(4,): 1}})
    assert lie_bracket(lam.lam, Y).is_zero()
    assert exp_ad(lam, Y) == Y


def test_gauge_suite_on_module_action():
    d, lams = lambdas(25, seed=3)
    _, Q_M = module_datum()
    for lam in lams:
        new = gauge_transform(d, lam)
        assert check_mc(new).ok
        assert gauge_transform_left_form(d, lam) == new.X
        assert gauge_transform(new, -lam).X == d.X
        _, rep = isomorphism_from_gauge(d, lam)
        assert rep.ok, rep
        assert check_gauge_preserves_compatibility(d, Q_M, lam).ok


def test_exp_ad_is_an_automorphism():
    d, lams = lambdas(20, seed=4)
    rng = random.Random(5)
    Y = build_Qtot(d)
    for lam in lams:
        Z = rand_field(d.space.coords, rng.choice([0, 1]), 3, rng, 0.15, skip=range(d.space.nU))
        try:
            Z.degree()
        except InputError:
            continue
        lhs = exp_ad(lam, lie_bracket(Y, Z))
        rhs = lie_bracket(exp_ad(lam, Y), exp_ad(lam, Z))
        assert lhs == rhs


def test_non_plus_lambda_shifts_zero_component():
    d, Q_M = q_model()
    assert check_mc(d).ok
    translate = GaugeParameter(d.space, VectorField(d.space.coords, {3: {(): 1}}))
    assert not translate.plus
    rep = check_gauge_preserves_compatibility(d, Q_M, translate)
    assert not rep.ok
    shifted = phi_of_X(gauge_transform(d, translate), ())
    assert shifted - Q_M == VectorField(d.space.M_coords, {1: {(): 1}})
    # the transformed element still solves the Maurer-Cartan equation
    assert check_mc(gauge_transform(d, translate)).ok


def test_plus_lambda_preserves_compatibility_with_nonzero_Q_M():
    d, Q_M = q_model()
    rng = random.Random(6)
    done = 0
    while done < 10:
        lam = plus_lambda(d.space, rng, 0.3)
        if not lam:
            continue
        L = GaugeParameter(d.space, lam, max_terms=16)
        try:
            rep = check_gauge_preserves_compatibility(d, Q_M, L)
        except NilpotencyError:
            continue
        assert rep.ok
        assert isomorphism_from_gauge(d, L)[1].ok
        done += 1


def test_non_nilpotent_lambda_refused():
    d, _ = q_model()
    euler = GaugeParameter(d.space, VectorField(d.space.coords, {3: {(3,): 1}}), max_terms=10)
    with pytest.raises(NilpotencyError):
        gauge_transform(d, euler)
    assert issubclass(NilpotencyError, InputError)


def test_gauge_chain_verifies_each_step():
    d, lams = lambdas(3, seed=8)
    end, rep = gauge_chain(d, lams)
    assert rep.ok
    back, rep2 = gauge_chain(end, [-l for l in reversed(lams)])
    assert rep2.ok
    assert back.X == d.X


def test_mismatched_space_rejected():
    d, _ = q_model()
    other = sl2_adjoint_action()
    lam = GaugeParameter(other.space, VectorField(other.space.coords))
    with pytest.raises(InputError):
        gauge_transform(d, lam)
    with pytest.raises(InputError):
        SymBrackets(GradedBasis([("a", 0)]), {2: {("a", "a"): {"a": 1}}})

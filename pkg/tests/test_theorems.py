import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from radial_plap.conditions import check_set
from radial_plap.core import (
    Constant,
    GrowthEnvelope,
    OddPower,
    OpaqueH,
    PowerLaw,
    ProblemSpec,
    SharpnessProduct,
    Sum,
    WeightSpec,
)
from radial_plap.errors import ConstructionRejected, InvalidParameter, PreconditionError
from radial_plap.radial_ode import Direction, ShootSpec, Trajectory, residual, solve
from radial_plap.theorems import (
    PowerParams,
    Region,
    Verdict,
    VerdictStatus,
    a_at_zero,
    apriori_bound,
    monohomo_admissible_C,
    monohomo_threshold_C,
    monohomo_verdict,
    monotonicity_verdict,
    power_region_classify,
    restricted_class_example,
    sharpness_counterexample,
    support_propagation,
    triviality_verdict,
    twprzy_verdict,
    vanishing_flux_verdict,
    verify_apriori,
)

CONSISTENT = VerdictStatus.CONSISTENT
VIOLATED = VerdictStatus.VIOLATED
HYPFAIL = VerdictStatus.HYPOTHESES_FAIL


def osc_spec(p=2.0, a=None, n=1, R=10.0):
    return ProblemSpec(WeightSpec(a or Constant(1.0), n, p), R, OddPower(1.0, 1))


def test_verdict_requires_witness_when_violated():
    with pytest.raises(InvalidParameter):
        Verdict("x", VIOLATED)
    v = Verdict("x", CONSISTENT, numbers={"k": math.inf})
    assert '"k": "inf"' in v.to_json()


# --- a priori bound ----------------------------------------------------------


def test_apriori_bound_examples():
    assert apriori_bound(osc_spec(), 0.5) == pytest.approx(0.5, abs=1e-15)
    assert apriori_bound(osc_spec(a=PowerLaw(1.0, 1.0)), 0.7) == 0.0
    assert apriori_bound(osc_spec(p=3.0), 1.0) == pytest.approx(math.sqrt(4 / 3), rel=1e-12)


@given(st.floats(0.01, 3), st.floats(0.01, 3), st.floats(0.1, 5), st.floats(0.1, 5),
       st.floats(1.2, 4))
def test_apriori_bound_monotone(d1, d2, a1, a2, p):
    lo_d, hi_d = sorted((d1, d2))
    lo_a, hi_a = sorted((a1, a2))
    b = lambda a0, d: apriori_bound(osc_spec(p=p, a=Constant(a0)), d)
    assert b(lo_a, lo_d) <= b(lo_a, hi_d) * (1 + 1e-12)
    assert b(lo_a, lo_d) <= b(hi_a, lo_d) * (1 + 1e-12)
    assert b(lo_a, -hi_d) == b(lo_a, hi_d)


def test_a_at_zero():
    assert a_at_zero(Constant(2.0)) == 2.0
    assert a_at_zero(PowerLaw(1.0, 1.5)) == 0.0
    assert math.isinf(a_at_zero(PowerLaw(1.0, -0.5)))
    assert a_at_zero(Sum([Constant(1.0), PowerLaw(3.0, 2.0)])) == 1.0


def test_verify_apriori_tight():
    spec = osc_spec()
    tr = solve(spec, ShootSpec(epsilon=1e-6, u0=0.0, du0=0.5))
    v = verify_apriori(spec, tr, 0.5)
    assert v.status is CONSISTENT
    assert abs(v.numbers["max_abs_u"] - 0.5) <= 1e-6
    bad = verify_apriori(spec, tr.scaled(1.1), 0.5)
    assert bad.status is VIOLATED and bad.witnesses


def test_verify_apriori_zero():
    spec = osc_spec()
    tr = solve(spec, ShootSpec(epsilon=1e-6, u0=0.0, du0=0.0))
    assert verify_apriori(spec, tr, 0.0).status is CONSISTENT


def test_verify_apriori_needs_u_zero():
    spec = osc_spec()
    tr = solve(spec, ShootSpec(epsilon=1e-6, u0=0.2, du0=0.5))
    assert verify_apriori(spec, tr, 0.5).status is HYPFAIL


def test_verify_apriori_wrong_sign_phi_is_hypothesis_failure():
    spec = ProblemSpec(WeightSpec(Constant(1.0), 1, 2.0), 2.0, OddPower(-1.0, 1))
    tr = solve(spec, ShootSpec(epsilon=1e-6, u0=0.0, du0=0.5))
    v = verify_apriori(spec, tr, 0.5)
    assert v.status is HYPFAIL  # never reported as a violation


# --- triviality --------------------------------------------------------------


def test_triviality_h_zero():
    spec = osc_spec(a=PowerLaw(1.0, 1.0), n=2, R=1.0)
    v = triviality_verdict(spec)
    assert v.status is CONSISTENT and v.numbers["outcome"] == "u = 0 admissible"


def test_triviality_nonexistence_with_witness():
    spec = ProblemSpec(WeightSpec(PowerLaw(1.0, 1.0), 2, 2.0), 1.0, OddPower(1.0, 1),
                       OpaqueH(lambda t, l0, l1: t))
    v = triviality_verdict(spec, enforce_hypotheses=False)
    assert v.numbers["outcome"] == "no solution exists"
    assert v.witnesses[0]["tau"] > 0 and v.witnesses[0]["h(tau,0,0)"] == v.witnesses[0]["tau"]


def test_triviality_not_applicable():
    assert triviality_verdict(osc_spec(), du0=0.3).status is HYPFAIL
    assert triviality_verdict(osc_spec(), du0=0.0).status is CONSISTENT


# --- support -----------------------------------------------------------------


def sinc_spec():
    return ProblemSpec(WeightSpec(Constant(1.0), 3, 2.0), 2 * math.pi, OddPower(1.0, 1))


def test_support_zero_trajectory():
    spec = sinc_spec()
    tr = solve(spec, ShootSpec(epsilon=1e-6, u0=0.0, du0=0.0))
    assert support_propagation(spec, tr, 1.0).status is CONSISTENT


def test_support_simple_zero_is_not_critical():
    spec = sinc_spec()
    eps = 1e-6
    tr = solve(spec, ShootSpec(epsilon=eps, u0=1.0, du0=0.0, rtol=1e-11))
    v = support_propagation(spec, tr, math.pi)
    assert v.status is HYPFAIL


def test_support_restart_from_critical_zero():
    spec = sinc_spec()
    tr = solve(spec, ShootSpec(u0=0.0, du0=0.0, t_start=2.0))
    assert tr.tau[0] == 2.0
    assert support_propagation(spec, tr, 2.0).status is CONSISTENT


def test_support_violation_detected_on_synthetic_trajectory():
    spec = sinc_spec()
    tau = np.linspace(1.0, 3.0, 50)
    tr = Trajectory.from_function(tau, lambda t: (t - 1) ** 3, lambda t: 3 * (t - 1) ** 2, 2.0)
    v = support_propagation(spec, tr, 1.0)
    assert v.status is VIOLATED


# --- monotonicity and vanishing flux -----------------------------------------


def sinh_spec():
    return ProblemSpec(WeightSpec(Constant(1.0), 1, 2.0), 1.0, OddPower(-1.0, 1))


def test_monotonicity_sinh():
    spec = sinh_spec()
    tr = solve(spec, ShootSpec(Direction.BACKWARD, None, 0.0, -1.0))
    assert monotonicity_verdict(tr, spec).status is CONSISTENT
    v = vanishing_flux_verdict(spec, tr)
    assert v.status is CONSISTENT
    t0 = v.numbers["tau_first"]
    assert v.numbers["flux_at_first_node"] == pytest.approx(math.cosh(1.0 - t0) ** 2, rel=1e-7)


def test_monotonicity_synthetic_controls():
    tau = np.linspace(1e-3, 1.0, 400)
    lin = Trajectory.from_function(tau, lambda t: 1 - t, lambda t: -np.ones_like(t), 2.0)
    assert monotonicity_verdict(lin).status is CONSISTENT
    tau = np.linspace(1e-3, math.pi / 3, 400)
    sin3 = Trajectory.from_function(tau, lambda t: np.sin(3 * t), lambda t: 3 * np.cos(3 * t), 2.0)
    v = monotonicity_verdict(sin3)
    assert v.status is VIOLATED
    mono = [w for w in v.witnesses if w["property"] == "monotone"][0]
    assert mono["tau"] == pytest.approx(math.pi / 6, abs=1e-8)


def test_monotonicity_requires_zero_at_R():
    tau = np.linspace(0.1, 1.0, 20)
    tr = Trajectory.from_function(tau, lambda t: 2 - t, lambda t: -np.ones_like(t), 2.0)
    assert monotonicity_verdict(tr).status is HYPFAIL


def test_vanishing_flux_controls():
    spec = sinh_spec()
    tau = np.linspace(1e-3, 1.0, 400)
    zero = Trajectory.from_function(tau, np.zeros_like, np.zeros_like, 2.0)
    assert vanishing_flux_verdict(spec, zero).status is CONSISTENT
    tau = np.linspace(1e-6, 1.0, 400)
    cos = Trajectory.from_function(tau, lambda t: np.cos(np.pi * t / 2),
                                   lambda t: -np.pi / 2 * np.sin(np.pi * t / 2), 2.0)
    assert vanishing_flux_verdict(spec, cos).status is VIOLATED


@settings(max_examples=20)
@given(st.floats(1.05, 3.0), st.floats(1.0, 3.0), st.floats(0.05, 4.0))
def test_monotonicity_random_M_scenarios(p, n, c):
    spec = ProblemSpec(WeightSpec(Constant(1.0), n, p), 1.0, OddPower(-c, 1))
    tr = solve(spec, ShootSpec(Direction.BACKWARD, None, 0.0, -1.0))
    assert monotonicity_verdict(tr, spec).status is CONSISTENT


# --- power family ------------------------------------------------------------


def test_classifier_examples():
    assert power_region_classify(PowerParams(2, 1, 1, 0, 2)).region is Region.NONEXISTENCE
    assert power_region_classify(PowerParams(2, 1, 1, -1, 2, D=5)).region is Region.COUNTEREXAMPLE
    r = power_region_classify(PowerParams(2, 1, 1, 0, 1.4))
    assert r.region is Region.OUTSIDE and r.reason == "n <= alpha(1-1/p)+1"


def test_sharpness_example():
    c = sharpness_counterexample(2, 2, 2, 1, 1, -1, 5)
    assert c.A == 4.0
    assert c.residual_max <= 1e-10 and c.positive
    w = np.linspace(0.01, 1, 20)
    # direct substitution of u = tau^2 into the equation gives 6 sqrt(w)
    np.testing.assert_allclose(c.phi(w), 6 * np.sqrt(w), rtol=1e-13)
    assert c.w(np.array([0.3, 0.4])) == pytest.approx(0.25)


def test_sharpness_listed_phi_does_not_solve_the_equation():
    c = sharpness_counterexample(2, 2, 2, 1, 1, -1, 5)
    alt = ProblemSpec(c.spec.weight, 1.0, OddPower(2.0, 0.5), c.h)
    r = residual(alt, PowerLaw(1.0, 2.0), np.linspace(0.1, 0.9, 9))
    np.testing.assert_allclose(r, -4 * np.linspace(0.1, 0.9, 9), rtol=1e-12)


def test_sharpness_rejections():
    with pytest.raises(ConstructionRejected, match="D > A"):
        sharpness_counterexample(2, 2, 2, 1, 1, -1, 4)
    with pytest.raises(PreconditionError):
        sharpness_counterexample(2, 2, 2, 1, 1, 0, 5)
    with pytest.raises(PreconditionError):
        sharpness_counterexample(1, 2, 2, 1, 1, -1, 5)


def _power_spec(p, l, alpha, gamma, n, D=0.1, s=2.0):
    w = WeightSpec(PowerLaw(1.0, alpha), n, p)
    env = GrowthEnvelope(1.0, l, PowerLaw(abs(D) * s ** l, gamma))
    return ProblemSpec(w, 1.0, OddPower(1.0, 1), SharpnessProduct(D, s, gamma, l), envelope=env)


@settings(max_examples=40)
@given(st.floats(1.2, 4.0), st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(-3.0, 3.0),
       st.integers(2, 4))
def test_classifier_and_constructor_disjoint(p, lf, af, gamma, n):
    l, alpha = lf * p, af * p
    pp = PowerParams(p, l, alpha, gamma, n)
    region = power_region_classify(pp).region
    if region is Region.NONEXISTENCE:
        assert check_set("N_nd", _power_spec(p, l, alpha, gamma, n)).passed
        with pytest.raises(PreconditionError):
            sharpness_counterexample(2.0, p, n, alpha, l, gamma, 1e6)
    else:
        try:
            c = sharpness_counterexample(2.0, p, n, alpha, l, gamma, 10.0 * (p + n) * 2 ** p)
        except (ConstructionRejected, PreconditionError):
            return
        assert c.residual_max <= 1e-10 * max(1.0, float(np.max(np.abs(c.phi(c.radii ** 2)))))
        assert np.max(np.abs(c.u(c.radii))) > 0


def test_monohomo_constants():
    assert monohomo_admissible_C(2, 1, 1, 2) == pytest.approx(1.0, abs=1e-12)
    assert monohomo_admissible_C(2, 1, 0, 2) == pytest.approx(2 * math.sqrt(2), rel=1e-12)
    with pytest.raises(PreconditionError):
        monohomo_admissible_C(2, 1, 2, 2)


@given(st.floats(1.2, 4.0), st.floats(0.02, 0.98), st.floats(2.0, 5.0))
def test_monohomo_bound_is_K_threshold_for_l_one(p, af, n):
    alpha = af * p
    assume(n > (1 - 1 / p) * alpha + 1.01 and 1.0 < p)
    x_over_y = monohomo_admissible_C(p, 1.0, alpha, n)
    assert x_over_y == pytest.approx(monohomo_threshold_C(p, 1.0, alpha, n), rel=1e-9)


def test_restricted_class_examples():
    r = restricted_class_example(0.5, 3, 1, 1, -2)
    assert r.conditions == {"z1": True, "z2": True, "z3": True, "z4": True}
    assert r.G == pytest.approx(-0.5)
    assert r.phi_negative and r.admissible and not r.flux_condition_holds
    assert r.residual_max <= 1e-10
    assert not restricted_class_example(0.5, 2, 1, 1, -2).conditions["z1"]
    pos = restricted_class_example(0.5, 3, 1, 1, 1.0)
    assert not pos.conditions["z1"] and not pos.phi_negative


def test_twprzy_verdicts():
    spec = _power_spec(2.0, 1.0, 1.0, 0.0, 2, D=0.5)
    tr = solve(spec, ShootSpec(epsilon=1e-6, u0=0.0, du0=0.0))
    assert twprzy_verdict(spec, tr).status is CONSISTENT
    tr2 = solve(spec, ShootSpec(epsilon=1e-6, u0=0.0, du0=0.1))
    assert twprzy_verdict(spec, tr2).status is HYPFAIL
    edge = _power_spec(2.0, 1.0, 1.0, -1.0, 2, D=5.0)
    assert twprzy_verdict(edge, tr).status is HYPFAIL


def test_monohomo_verdict():
    spec = ProblemSpec(WeightSpec(PowerLaw(1.0, 1.0), 2, 2.0), 1.0, OddPower(-1.0, 1),
                       SharpnessProduct(-0.5, 2.0, 0.0, 1.0),
                       envelope=GrowthEnvelope(1.0, 1.0, PowerLaw(1.0, 0.0)))
    tr = solve(spec, ShootSpec(Direction.BACKWARD, None, 0.0, -1.0))
    v = monohomo_verdict(spec, tr)
    assert v.status is CONSISTENT, v.to_json()
    over = ProblemSpec(spec.weight, 1.0, spec.phi, spec.h,
                       envelope=GrowthEnvelope(1.0, 1.0, PowerLaw(1.5, 0.0)))
    assert monohomo_verdict(over, tr).status is HYPFAIL

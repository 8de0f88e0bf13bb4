import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from radial_plap.core import (
    Constant,
    Form,
    GrowthEnvelope,
    HZero,
    OddPower,
    Opaque,
    PowerLaw,
    ProblemSpec,
    SharpnessProduct,
    Sum,
    WeightSpec,
    big_phi,
    big_phi_inverse,
    d_a,
    d_a_fn,
    delta_a,
    delta_a_fn,
    is_odd,
    phi_p,
    phi_p_inverse,
)
from radial_plap.errors import (
    DerivativeUnavailable,
    InvalidParameter,
    InverseUndefined,
)


# phi_p / inverse ----------------------------------------------------------


@pytest.mark.parametrize("p, lam, want", [(2, -1.5, -1.5), (1.5, 0.0, 0.0), (3, 2.0, 4.0)])
def test_phi_p_examples(p, lam, want):
    assert phi_p(p, lam) == want


@pytest.mark.parametrize("p, z, want", [(3, 4.0, 2.0), (2, 0.7, 0.7), (1.5, 0.0, 0.0)])
def test_phi_p_inverse_examples(p, z, want):
    assert phi_p_inverse(p, z) == pytest.approx(want, rel=1e-15)


def test_phi_p_inverse_matches_bisection():
    # oracle: bisection on the monotone map
    from scipy.optimize import bisect
    for p in (1.3, 2.5, 4.0):
        for z in (-3.0, 0.2, 7.5):
            ref = bisect(lambda x: phi_p(p, x) - z, -1e4, 1e4, xtol=1e-15)
            assert phi_p_inverse(p, z) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0])
def test_phi_p_rejects_small_p(p):
    with pytest.raises(InvalidParameter):
        phi_p(p, 1.0)
    with pytest.raises(InvalidParameter):
        phi_p_inverse(p, 1.0)


@given(st.sampled_from([1.5, 2.0, 3.0, 4.7]), st.floats(-10, 10))
def test_phi_p_odd_and_invertible(p, lam):
    assume(lam == 0 or abs(lam) ** (p - 1.0) > 1e-300)  # keep |lam|^(p-1) out of underflow
    assert phi_p(p, -lam) == -phi_p(p, lam)
    back = phi_p_inverse(p, phi_p(p, lam))
    assert back == pytest.approx(lam, rel=1e-12, abs=1e-300)


def test_phi_p_vectorised():
    lam = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(phi_p(3.0, lam), np.abs(lam) * lam)


# weight functionals ---------------------------------------------------------


def test_delta_and_d_examples():
    assert delta_a(WeightSpec(Constant(1.0), 3, 2.0), 0.5) == pytest.approx(4.0)
    assert delta_a(WeightSpec(PowerLaw(1.0, 1.0), 2, 2.0), 0.3) == pytest.approx(0.5)
    assert delta_a(WeightSpec(PowerLaw(1.0, 2.0), 2, 2.0), 1.0) == pytest.approx(0.0, abs=1e-15)
    assert d_a(WeightSpec(Constant(1.0), 3, 2.0), 0.5) == pytest.approx(4.0)
    assert d_a(WeightSpec(PowerLaw(1.0, 1.0), 2, 2.0), 1.0) == pytest.approx(1.5)
    assert d_a(WeightSpec(Constant(1.0), 1, 3.3), 0.5) == 0.0


def test_delta_rejects_tau_zero():
    with pytest.raises(InvalidParameter):
        delta_a(WeightSpec(Constant(1.0), 2, 2.0), 0.0)


def test_opaque_weight_without_derivative():
    w = WeightSpec(Opaque(lambda t: 1.0 + np.asarray(t) ** 2), 2, 2.0)
    with pytest.raises(DerivativeUnavailable):
        delta_a(w, 0.5)


def test_opaque_weight_with_finite_differences():
    w = WeightSpec(Opaque(lambda t: 1.0 + np.asarray(t) ** 2, differentiable=True), 2, 2.0)
    ref = WeightSpec(Sum([Constant(1.0), PowerLaw(1.0, 2.0)]), 2, 2.0)
    for t in (0.2, 0.7, 1.3):
        assert delta_a(w, t) == pytest.approx(delta_a(ref, t), rel=1e-8)
        assert d_a(w, t) - delta_a(w, t) == pytest.approx(2 * t, abs=1e-8)


@given(st.floats(-1.5, 3.0), st.floats(1.0, 5.0), st.floats(1.1, 5.0), st.floats(0.01, 10.0))
def test_delta_power_closed_form(alpha, n, p, tau):
    w = WeightSpec(PowerLaw(1.0, alpha), n, p)
    want = ((n - 1) - alpha * (1 - 1 / p)) * tau ** (alpha - 1)
    assert delta_a(w, tau) == pytest.approx(want, rel=1e-12, abs=1e-300)
    # d_a - delta_a = a'
    assert d_a(w, tau) - delta_a(w, tau) == pytest.approx(alpha * tau ** (alpha - 1),
                                                           rel=1e-9, abs=1e-12 * abs(want) + 1e-300)


def test_delta_symbolic_is_power_law():
    f = delta_a_fn(WeightSpec(PowerLaw(2.0, 1.5), 3, 2.0))
    terms = [(c, e) for c, e in f.power_terms() if c != 0]
    assert terms == [(pytest.approx(2.0 * (2 - 1.5 * 0.5)), pytest.approx(0.5))]
    g = d_a_fn(WeightSpec(Constant(1.0), 1, 2.0))
    assert all(c == 0 for c, _ in g.power_terms())


# big_phi -------------------------------------------------------------------


def test_big_phi_examples():
    assert big_phi(OddPower(1.0, 1), 0.5) == pytest.approx(0.125)
    assert big_phi(OddPower(1.0, 1), 0.0) == 0.0
    assert big_phi(OddPower(1.0, 2), 1.0) == pytest.approx(1 / 3)


def test_big_phi_opaque_matches_closed_form():
    phi = Opaque(lambda t: np.sign(t) * np.abs(t) ** 1.5)
    assert big_phi(phi, 2.0) == pytest.approx(2.0 ** 2.5 / 2.5, rel=1e-9)


@given(st.floats(0.0, 20.0), st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_big_phi_even_and_zero(t, d):
    phi = OddPower(1.3, d)
    assert big_phi(phi, -t) == big_phi(phi, t)
    assert big_phi(phi, 0.0) == 0.0


def test_big_phi_inverse_examples():
    assert big_phi_inverse(OddPower(1.0, 1), 0.125) == pytest.approx(0.5)
    assert big_phi_inverse(OddPower(1.0, 1), 0.0) == 0.0
    assert big_phi_inverse(OddPower(1.0, 1), 2 / 3) == pytest.approx(math.sqrt(4 / 3), rel=1e-12)


def test_big_phi_inverse_sum_and_saturation():
    phi = Sum([OddPower(1.0, 1), OddPower(1.0, 3)])
    t = big_phi_inverse(phi, 1.0)
    assert big_phi(phi, t) == pytest.approx(1.0, rel=1e-12)
    # bounded primitive: phi(u) = u / (1 + u^2)^2 has sup Phi = 1/2
    sat = Opaque(lambda u: np.asarray(u) / (1 + np.asarray(u) ** 2) ** 2)
    assert big_phi_inverse(sat, 0.25) == pytest.approx(1.0, rel=1e-8)
    assert big_phi_inverse(sat, 0.75) == math.inf


def test_big_phi_inverse_non_monotone():
    with pytest.raises(InverseUndefined):
        big_phi_inverse(OddPower(-1.0, 1), 0.3)


# types ---------------------------------------------------------------------


def test_oddness_enforced():
    w = WeightSpec(Constant(1.0), 2, 2.0)
    with pytest.raises(InvalidParameter):
        ProblemSpec(w, 1.0, PowerLaw(1.0, 2.0))
    with pytest.raises(InvalidParameter):
        ProblemSpec(w, 1.0, Opaque(lambda u: np.asarray(u) ** 2))
    assert is_odd(Opaque(lambda u: np.sin(u)))
    assert is_odd(PowerLaw(2.0, 3.0))
    assert not is_odd(Constant(1.0))


def test_spec_validation():
    with pytest.raises(InvalidParameter):
        WeightSpec(Constant(1.0), 0.5, 2.0)
    with pytest.raises(InvalidParameter):
        WeightSpec(Constant(1.0), 2, 1.0)
    with pytest.raises(InvalidParameter):
        GrowthEnvelope(1.5, 1.0, Constant(1.0))
    w = WeightSpec(Constant(1.0), 2, 2.0)
    with pytest.raises(InvalidParameter):
        ProblemSpec(w, 1.0, OddPower(1.0, 1), SharpnessProduct(1.0, 2.0, 0.0, 2.0))
    with pytest.raises(InvalidParameter):
        ProblemSpec(w, -1.0, OddPower(1.0, 1))
    spec = ProblemSpec(w, math.inf, OddPower(1.0, 1), form="divergent")
    assert spec.form is Form.DIVERGENT and spec.p == 2.0 and spec.n == 2


def test_power_law_singular_point_and_eval():
    f = PowerLaw(2.0, -0.5)
    assert 0.0 in tuple(f.singular_points)
    assert f(4.0) == pytest.approx(1.0)
    assert isinstance(f(4.0), float)
    np.testing.assert_allclose(f(np.array([1.0, 4.0])), [2.0, 1.0])


def test_symbolic_derivatives():
    f = Sum([PowerLaw(3.0, 2.0), Constant(5.0), OddPower(2.0, 3.0)])
    df = f.derivative()
    for t in (-1.2, 0.4, 2.0):
        assert df(t) == pytest.approx(6 * t + 6 * t * t, rel=1e-14)


def test_h_specs():
    h = SharpnessProduct(5.0, 2.0, -1.0, 1.0)
    # p - l - 1 = 0: the lambda1 factor is 1
    assert h.evaluate(0.5, 0.25, -3.0, 2.0) == pytest.approx(5 * 2 * 2 * 0.25)
    assert h.evaluate(0.5, 0.0, -3.0, 2.0) == 0.0
    assert HZero().evaluate(0.3, 1.0, 2.0, 2.0) == 0.0

import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from polyharm.operators import apply_L
from polyharm.special import (
    GammaPoleError,
    HypergeometricParameterError,
    SeriesDivergenceError,
    ball_volume,
    c_theta,
    gamma,
    gauss_value,
    hyp2f1,
    hyp2f1_exact,
    hyp2f1_near_one,
    i_closed_form,
    phi_theta,
    pochhammer,
    sphere_volume,
)


def test_gamma_examples():
    assert gamma(1) == pytest.approx(1.0, rel=1e-15)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(5) == pytest.approx(24.0, rel=1e-14)


@pytest.mark.parametrize("x", [0, -1, -2, -17])
def test_gamma_poles(x):
    with pytest.raises(GammaPoleError):
        gamma(x)


@settings(max_examples=200, deadline=None)
@given(st.floats(-40, 40).filter(lambda x: abs(x - round(x)) > 1e-6 or x > 0.5))
def test_gamma_matches_stdlib(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-13)


def test_pochhammer_examples():
    assert pochhammer(Fraction(7, 3), 0) == 1
    for k in range(8):
        assert pochhammer(1, k) == math.factorial(k)
    assert pochhammer(-2, 3) == 0
    assert isinstance(pochhammer(Fraction(1, 2), 3), Fraction)
    assert pochhammer(0.5, 3) == pytest.approx(0.5 * 1.5 * 2.5)


def test_hyp2f1_examples():
    for z in (0.0, 0.3, -0.7, 0.99):
        assert hyp2f1(0, 1.3, 2.1, z) == 1.0
    for t in (0.5, 1, 2):
        assert hyp2f1(t, t - 0.5, 1.5, 0.0) == 1.0
    assert hyp2f1(1, 1, 2, 0.5) == pytest.approx(2 * math.log(2), rel=1e-14)


@settings(max_examples=80, deadline=None)
@given(
    a=st.floats(-3, 3), b=st.floats(-3, 3), c=st.floats(0.2, 5),
    z=st.floats(-0.9, 0.9),
)
def test_hyp2f1_matches_scipy(a, b, c, z):
    ref = sc.hyp2f1(a, b, c, z)
    assert hyp2f1(a, b, c, z) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_terminating_series_exact():
    a, b, c, z = Fraction(-4), Fraction(1, 3), Fraction(5, 2), Fraction(3, 4)
    exact = hyp2f1_exact(a, b, c, z)
    assert isinstance(exact, Fraction)
    assert hyp2f1(a, b, c, z) == float(exact)
    assert hyp2f1(-4.0, 1 / 3, 2.5, 0.75) == pytest.approx(float(exact), rel=1e-14)
    # terminating series are fine at and beyond z = 1
    assert hyp2f1(Fraction(-2), Fraction(1, 2), Fraction(3, 2), 1) == float(
        hyp2f1_exact(Fraction(-2), Fraction(1, 2), Fraction(3, 2), Fraction(1))
    )


def test_hyp2f1_errors():
    with pytest.raises(HypergeometricParameterError):
        hyp2f1(0.5, 0.5, -1, 0.3)
    with pytest.raises(HypergeometricParameterError):
        hyp2f1(0.5, 0.5, 2, 1.0)
    with pytest.raises(SeriesDivergenceError):
        hyp2f1(1, 1, 1.5, 1 - 1e-8, max_terms=1000)


def test_gauss_value_examples():
    assert gauss_value(0, 0.7, 2.3) == 1.0
    assert gauss_value(-1, 1, 3) == pytest.approx(1 - 1 / 3)
    with pytest.raises(SeriesDivergenceError):
        gauss_value(1, 1, 2)
    with pytest.raises(GammaPoleError):
        gauss_value(-3.5, -1.5, -2)
    # c - a is a nonpositive integer: the finite limit is 0
    assert gauss_value(3, -2.5, 2) == 0.0


def test_gauss_value_vs_series_near_one():
    s = hyp2f1(0.3, 0.4, 2, 1 - 1e-6, tol=1e-10)
    assert abs(gauss_value(0.3, 0.4, 2) - s) <= 1e-4


@pytest.mark.parametrize("a,b,c", [(0.3, 0.4, 2), (0.5, 0.5, 2.25), (1, 1, 2.5), (0.25, 0.5, 1.5), (0.5, 1, 2)])
def test_gauss_value_vs_extrapolated_series(a, b, c):
    # F(1-h) = F(1) + Σ A_k h^k + Σ B_k h^{s+k} for non-integer s = c-a-b
    s = c - a - b
    hs = np.geomspace(1e-3, 5e-2, 30)
    F = np.array([hyp2f1(a, b, c, 1 - h) for h in hs])
    basis = np.stack([hs**k for k in range(4)] + [hs ** (s + k) for k in range(4)], axis=1)
    coef = np.linalg.lstsq(basis, F, rcond=None)[0]
    assert abs(coef[0] - gauss_value(a, b, c)) <= 1e-6


@pytest.mark.parametrize("a,b,c,z", [(0.3, 0.4, 2, 0.9), (0.25, -0.5, 1.5, 0.97), (1.25, 0.75, 1.5, 0.999)])
def test_near_one_connection_formula(a, b, c, z):
    assert hyp2f1_near_one(a, b, c, z) == pytest.approx(sc.hyp2f1(a, b, c, z), rel=1e-11)
    with pytest.raises(HypergeometricParameterError):
        hyp2f1_near_one(1, 1, 3, 0.9)


def test_phi_theta_examples():
    phi0 = phi_theta(0, 3)
    assert phi0.is_polynomial and phi0.coefficients == (Fraction(1),)
    phi1 = phi_theta(1, 3)
    assert phi1.coefficients == (Fraction(1), Fraction(1, 3))
    assert phi_theta(Fraction(-1, 4), 3).bounded
    assert not phi_theta(Fraction(-1, 2), 3).bounded
    assert not phi_theta(Fraction(-3, 4), 3).bounded


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("theta", range(6))
def test_phi_integer_theta_annihilated_exactly(n, theta):
    profile = phi_theta(theta, n)
    assert profile.is_polynomial
    assert apply_L(theta, profile.as_polynomial()).is_zero()


def test_phi_non_polynomial_raises():
    with pytest.raises(ValueError):
        phi_theta(Fraction(1, 2), 2).as_polynomial()


@pytest.mark.parametrize("theta", [Fraction(-1, 4), Fraction(1, 4), Fraction(3, 4), Fraction(1, 2)])
def test_profile_evaluate_and_derivatives(theta):
    prof = phi_theta(theta, 2)
    a, b, c = (float(v) for v in prof.params)
    for t in (0.1, 0.5, 0.8, 0.95):
        assert prof.evaluate(t) == pytest.approx(sc.hyp2f1(a, b, c, t), rel=1e-11)
        d1 = a * b / c * sc.hyp2f1(a + 1, b + 1, c + 1, t)
        assert prof.derivative(t, 1) == pytest.approx(d1, rel=1e-10)


@pytest.mark.parametrize("theta", [-0.25, 0.25, 0.75])
def test_coefficient_decay_slope(theta):
    mags = phi_theta(Fraction(theta), 3).coefficient_magnitudes(10_000)
    ks = np.arange(100, 10_001)
    slope = np.polyfit(np.log(ks), np.log(np.asarray(mags)[ks]), 1)[0]
    assert abs(slope - (-2 * theta - 2)) <= 0.15


def test_c_theta_examples():
    for n in (2, 3, 4):
        assert c_theta(0, n) == pytest.approx(1.0, rel=1e-14)
    assert c_theta(0.5, 3) == pytest.approx(1.0, rel=1e-14)
    assert c_theta(1, 2) == pytest.approx(0.5, rel=1e-14)
    assert c_theta(1, 3) == pytest.approx(0.75, rel=1e-14)


@pytest.mark.parametrize("theta", [0.5, 1, 1.5, 2.5])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_c_theta_inverts_phi_at_boundary(theta, n):
    a, b, c = (float(v) for v in phi_theta(Fraction(theta), n).params)
    assert c_theta(theta, n) * gauss_value(a, b, c) == pytest.approx(1.0, rel=1e-13)


def test_i_closed_form_examples():
    assert i_closed_form(0, -2, 2) == pytest.approx(math.pi, rel=1e-14)
    assert i_closed_form(-1, -2, 3) == math.inf
    assert i_closed_form(1, 0, 3) == math.inf
    assert i_closed_form(-1.5, -1, 2) == math.inf


def test_volumes():
    assert sphere_volume(3) == pytest.approx(4 * math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert ball_volume(2) == pytest.approx(math.pi)

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyharm.exactpoly import ExactPolynomial
from polyharm.operators import (
    Atom,
    OperatorWord,
    PreconditionError,
    apply_L,
    apply_L_chain,
    as_theta,
    commutation_residual,
    correspondence_residual,
    factorization_residual,
    iterated_identity_residual,
    laplacian,
    laplacian_power,
    m_power,
    radial,
)
from polyharm.structure import cellular_decompose, random_polyharmonic, random_polynomial

THETAS = [Fraction(t) for t in ("-1", "-1/2", "0", "1/2", "1", "3/2", "2")]


def var(n, i):
    return ExactPolynomial.variable(n, i)


def rho(n):
    return ExactPolynomial.norm_squared(n)


def test_laplacian_examples():
    x1 = var(3, 0)
    assert laplacian(x1 * x1) == ExactPolynomial.constant(3, 2)
    for n in (2, 3, 5):
        assert laplacian(rho(n)) == ExactPolynomial.constant(n, 2 * n)
    assert laplacian(x1 * x1 - rho(3).scale(Fraction(1, 3))).is_zero()


def test_radial_examples():
    assert radial(ExactPolynomial.constant(3, 7)).is_zero()
    x1x2 = var(3, 0) * var(3, 1)
    assert radial(x1x2) == x1x2.scale(2)
    assert radial(ExactPolynomial.one_minus_norm_squared(3)) == rho(3).scale(-2)


def test_m_power_examples():
    u = var(2, 0) + 3
    assert m_power(u, 0) == u
    one = ExactPolynomial.constant(2, 1)
    assert m_power(one, 1) == ExactPolynomial.one_minus_norm_squared(2)
    expected = ExactPolynomial(2, {(0, 0): 1, (2, 0): -2, (0, 2): -2, (4, 0): 1, (2, 2): 2, (0, 4): 1})
    assert m_power(one, 2) == expected
    with pytest.raises(ValueError):
        m_power(one, -1)


def test_apply_L_examples():
    h = var(3, 0) * var(3, 1)
    assert apply_L(0, h).is_zero()
    c = ExactPolynomial.constant(3, 5)
    assert apply_L(1, c) == c.scale(-2)
    phi1 = ExactPolynomial.constant(3, 1) + rho(3).scale(Fraction(1, 3))
    assert apply_L(1, phi1).is_zero()


def test_theta_must_be_exact():
    assert as_theta("3/2") == Fraction(3, 2)
    with pytest.raises(TypeError):
        apply_L(0.5, ExactPolynomial.constant(2, 1))


def test_L_is_linear_over_rationals():
    u = random_polynomial(3, 4, seed=1)
    v = random_polynomial(3, 4, seed=2)
    a, b = Fraction(2, 7), Fraction(-5, 3)
    for theta in THETAS:
        assert apply_L(theta, u.scale(a) + v.scale(b)) == apply_L(theta, u).scale(a) + apply_L(theta, v).scale(b)


def test_operator_words_compose_right_to_left():
    u = random_polynomial(2, 4, seed=3)
    word = OperatorWord([Atom("laplacian"), Atom("M", Fraction(1))])
    assert word(u) == laplacian(m_power(u, 1))
    assert OperatorWord([Atom("L", Fraction(1, 2))])(u) == apply_L(Fraction(1, 2), u)
    assert OperatorWord([Atom("scalar", Fraction(3)), Atom("radial")])(u) == radial(u).scale(3)
    with pytest.raises(ValueError):
        Atom("M", Fraction(1, 2))
    with pytest.raises(ValueError):
        OperatorWord([])


def test_correspondence_lambda_one_form():
    # L_θ M = M L_{θ-1} - 8θ I
    u = random_polynomial(3, 4, seed=4)
    for theta in THETAS:
        lhs = apply_L(theta, m_power(u, 1))
        rhs = m_power(apply_L(theta - 1, u), 1) - u.scale(8 * theta)
        assert lhs == rhs


def test_correspondence_kernel_exponent_case():
    # λ = 1 + 2θ: L_θ M^{1+2θ} = M^{1+2θ} L_{-θ-1}
    u = random_polynomial(2, 4, seed=5)
    for theta in (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2)):
        lam = int(1 + 2 * theta)
        assert apply_L(theta, m_power(u, lam)) == m_power(apply_L(-theta - 1, u), lam)
        assert correspondence_residual(theta, lam, u).is_zero()


def test_residual_trivial_cases():
    zero = ExactPolynomial.zero(3)
    assert correspondence_residual(1, 2, zero).is_zero()
    assert commutation_residual(Fraction(3, 2), 2, ExactPolynomial.constant(3, 1)).is_zero()
    h = var(3, 0) * var(3, 2)
    assert commutation_residual(1, 1, h).is_zero()
    u = random_polynomial(3, 6, seed=6)
    assert commutation_residual(Fraction(3, 2), 2, u).is_zero()
    assert factorization_residual(1, u).is_zero()
    assert factorization_residual(3, u).is_zero()


def test_factorization_independent_expansion():
    u = random_polynomial(2, 6, seed=7)
    chain = apply_L(0, apply_L(1, apply_L(2, u)))
    assert chain == m_power(laplacian(laplacian(laplacian(u))), 3)
    assert apply_L_chain([0, 1, 2], u) == chain


def test_factorization_kills_polyharmonic():
    u = random_polyharmonic(3, 3, 3, seed=8)
    assert apply_L_chain(range(3), u).is_zero()


def test_iterated_identity_cases():
    N = 3
    v = random_polyharmonic(3, N, 2, seed=9)
    cells = cellular_decompose(v, N)
    for j, w in enumerate(cells.components):
        for k in range(1, N + 1):
            assert iterated_identity_residual(N, j, k, w).is_zero()
        # k = N: the full chain annihilates M^j w
        assert apply_L_chain(range(N), m_power(w, j)).is_zero()
    h = var(2, 0) * var(2, 1)
    assert iterated_identity_residual(1, 0, 1, h).is_zero()


def test_iterated_identity_precondition():
    with pytest.raises(PreconditionError):
        iterated_identity_residual(2, 0, 1, var(3, 0) ** 2)
    with pytest.raises(ValueError):
        iterated_identity_residual(2, 2, 1, var(3, 0))


@settings(max_examples=25, deadline=None)
@given(
    n=st.sampled_from([2, 3, 4]),
    seed=st.integers(0, 10_000),
    theta=st.sampled_from(THETAS),
    lam=st.integers(1, 3),
    j=st.integers(1, 2),
    N=st.integers(1, 4),
)
def test_identities_property(n, seed, theta, lam, j, N):
    u = random_polynomial(n, 5, seed, terms_per_degree=2)
    assert correspondence_residual(theta, lam, u).is_zero()
    assert commutation_residual(theta, j, u).is_zero()
    assert factorization_residual(N, u).is_zero()


def test_laplacian_power_matches_repeated():
    u = random_polynomial(3, 6, seed=10)
    assert laplacian_power(u, 2) == laplacian(laplacian(u))
    assert laplacian_power(u, 0) == u

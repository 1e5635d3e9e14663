import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyharm.exactpoly import ExactPolynomial
from polyharm.operators import apply_L, laplacian, m_power
from polyharm.structure import (
    CellularComponents,
    NotPolyharmonicError,
    almansi,
    almansi_rearranged,
    cellular_decompose,
    harmonic_decomposition,
    harmonic_projection,
    is_polyharmonic,
    random_harmonic,
    random_polyharmonic,
    random_polynomial,
)


def rho(n):
    return ExactPolynomial.norm_squared(n)


def one(n):
    return ExactPolynomial.constant(n, 1)


def test_is_polyharmonic_examples():
    for N in (1, 2, 3, 4):
        assert is_polyharmonic(ExactPolynomial.one_minus_norm_squared(3) ** (N - 1), N)
    x1 = ExactPolynomial.variable(3, 0)
    assert not is_polyharmonic(x1 * x1, 1)
    assert is_polyharmonic(random_polynomial(3, 5, seed=1), 3)


def test_harmonic_decomposition_examples():
    x1 = ExactPolynomial.variable(3, 0)
    parts = harmonic_decomposition(x1 * x1)
    assert parts[0] == x1 * x1 - rho(3).scale(Fraction(1, 3))
    assert parts[1] == one(3).scale(Fraction(1, 3))
    h = ExactPolynomial.variable(3, 0) * ExactPolynomial.variable(3, 1)
    assert harmonic_decomposition(h) == [h]
    parts = harmonic_decomposition(rho(3))
    assert parts[0].is_zero() and parts[1] == one(3)
    with pytest.raises(ValueError):
        harmonic_decomposition(x1 + one(3))


@settings(max_examples=30, deadline=None)
@given(n=st.sampled_from([2, 3, 4]), d=st.integers(0, 7), seed=st.integers(0, 10_000))
def test_harmonic_decomposition_property(n, d, seed):
    q = random_polynomial(n, d, seed).homogeneous_part(d)
    parts = harmonic_decomposition(q)
    total = ExactPolynomial.zero(n)
    for j, h in enumerate(parts):
        assert laplacian(h).is_zero()
        total = total + rho(n) ** j * h
    assert total == q


def test_harmonic_projection_is_harmonic():
    u = random_polynomial(3, 6, seed=2)
    assert laplacian(harmonic_projection(u)).is_zero()


def test_almansi_examples():
    h = ExactPolynomial.variable(3, 0) * ExactPolynomial.variable(3, 2)
    assert almansi(h, 1).components == (h,)
    form = almansi(rho(3), 2)
    assert form.components[0].is_zero() and form.components[1] == one(3)
    form = almansi(ExactPolynomial.one_minus_norm_squared(3), 2)
    assert form.components == (one(3), -one(3))
    v = almansi_rearranged(ExactPolynomial.one_minus_norm_squared(3), 2)
    assert v == (ExactPolynomial.zero(3), one(3))


@pytest.mark.parametrize("seed", range(12))
def test_almansi_round_trip_and_binomial_transform(seed):
    n, N = 2 + seed % 3, 1 + seed % 4
    u = random_polyharmonic(n, N, 4, seed)
    form = almansi(u, N)
    assert form.reconstruct() == u
    v = almansi_rearranged(u, N)
    total = ExactPolynomial.zero(n)
    for j, vj in enumerate(v):
        assert laplacian(vj).is_zero()
        total = total + m_power(vj, j)
    assert total == u
    if N == 2:
        u0, u1 = form.components
        assert v == (u0 + u1, -u1)


def test_almansi_rejects_non_polyharmonic():
    x1 = ExactPolynomial.variable(2, 0)
    with pytest.raises(NotPolyharmonicError):
        almansi(x1**4, 2)


def test_worked_case():
    cells = cellular_decompose(one(3), 2)
    w0, w1 = cells.components
    assert w0 == one(3) - ExactPolynomial.one_minus_norm_squared(3).scale(Fraction(1, 4))
    assert w0 == one(3).scale(Fraction(3, 4)) + rho(3).scale(Fraction(1, 4))
    assert w1 == one(3).scale(Fraction(1, 4))
    assert apply_L(1, w0).is_zero()
    assert cells.reconstruct() == one(3)


def test_N_equal_one_echoes_input():
    h = random_harmonic(3, 4, random.Random(5))
    assert cellular_decompose(h, 1).components == (h,)


def test_zero_input_gives_zero_components():
    for N in (1, 2, 3, 4):
        cells = cellular_decompose(ExactPolynomial.zero(2), N)
        assert len(cells.components) == N
        assert all(w.is_zero() for w in cells.components)


def test_g_zero_branch():
    # L_{N-1} u = 0 already: the decomposition is (u, 0, ..., 0)
    N = 3
    u = cellular_decompose(random_polyharmonic(3, N, 3, seed=4), N).components[0]
    assert apply_L(N - 1, u).is_zero()
    cells = cellular_decompose(u, N)
    assert cells.components[0] == u
    assert all(w.is_zero() for w in cells.components[1:])


def test_not_polyharmonic_carries_residue():
    x1 = ExactPolynomial.variable(3, 0)
    with pytest.raises(NotPolyharmonicError) as info:
        cellular_decompose(x1**4, 2)
    assert info.value.residue == ExactPolynomial.constant(3, 24)


@pytest.mark.parametrize("seed", range(24))
def test_cellular_round_trip_and_idempotence(seed):
    n, N = 2 + seed % 3, 1 + (seed // 3) % 4
    u = random_polyharmonic(n, N, 4, seed)
    cells = cellular_decompose(u, N)
    assert cells.reconstruct() == u
    assert all(r.is_zero() for r in cells.annihilation_residuals())
    for j, w in enumerate(cells.components):
        single = cellular_decompose(m_power(w, j), N).components
        for i, c in enumerate(single):
            assert c == (w if i == j else ExactPolynomial.zero(n))


def test_cellular_serialization_round_trip():
    cells = cellular_decompose(random_polyharmonic(3, 3, 3, seed=11), 3)
    back = CellularComponents.from_dict(cells.to_dict())
    assert back == cells
    assert back.to_json() == cells.to_json()
    doc = cells.to_dict()
    doc["N"] = 2
    with pytest.raises(ValueError):
        CellularComponents.from_dict(doc)


def test_random_polyharmonic_contract():
    assert random_polyharmonic(3, 2, 4, seed=3) == random_polyharmonic(3, 2, 4, seed=3)
    c = random_polyharmonic(3, 1, 0, seed=3)
    assert c.degree <= 0
    with pytest.raises(ValueError):
        random_polyharmonic(1, 2, 3, seed=0)

"""Seeded exact identity suites shared by the ``verify`` command and the tests.

Each case draws a random polynomial and checks that the operator identities
and the cellular decomposition hold with residual exactly zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .operators import (
    commutation_residual,
    correspondence_residual,
    factorization_residual,
    iterated_identity_residual,
)
from .structure import cellular_decompose, random_polyharmonic, random_polynomial

SHIPPED_SEED = 20240
THETAS = tuple(Fraction(t) for t in ("-1", "-1/2", "0", "1/2", "1", "3/2", "2"))

EXACT_ZERO = "exact-zero"
NONZERO = "nonzero"


def _status(residual) -> str:
    return EXACT_ZERO if residual.is_zero() else NONZERO


def case_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def run_case(seed: int, index: int, n_list: Sequence[int], max_N: int, max_degree: int) -> dict:
    """One seeded case exercising every exact identity at a single (n, N, θ)."""
    n = n_list[index % len(n_list)]
    N = 1 + (index // len(n_list)) % max_N
    theta = THETAS[index % len(THETAS)]
    s = case_seed(seed, index)
    u = random_polynomial(n, max_degree, s, terms_per_degree=2)
    lam = 1 + index % 3
    j_comm = 1 + index % 2

    # Keep the total degree of the N-harmonic input within max_degree.
    ph_degree = max(0, max_degree - 2 * (N - 1))
    v = random_polyharmonic(n, N, ph_degree, s + 1)
    cells = cellular_decompose(v, N)
    j = index % N
    k = 1 + (index // 7) % N

    checks = {
        "correspondence": _status(correspondence_residual(theta, lam, u)),
        "commutation": _status(commutation_residual(theta, j_comm, u)),
        "factorization": _status(factorization_residual(N, u)),
        "iterated": _status(iterated_identity_residual(N, j, k, cells.components[j])),
        "cellular_round_trip": _status(cells.reconstruct() - v),
        "cellular_annihilation": (
            EXACT_ZERO if all(r.is_zero() for r in cells.annihilation_residuals()) else NONZERO
        ),
    }
    return {
        "case": index,
        "seed": s,
        "n": n,
        "N": N,
        "theta": str(theta),
        "lambda": lam,
        "j": j,
        "k": k,
        "degree": max_degree,
        "checks": checks,
        "passed": all(v == EXACT_ZERO for v in checks.values()),
    }


def run_suite(seed: int = SHIPPED_SEED, n_list: Sequence[int] = (2, 3, 4), max_N: int = 4,
              max_degree: int = 6, cases: int = 200) -> dict:
    if cases < 0:
        raise ValueError("cases must be >= 0")
    if max_N < 1 or max_degree < 0 or not n_list or any(n < 2 for n in n_list):
        raise ValueError("need max_N >= 1, max_degree >= 0 and dimensions >= 2")
    results: List[dict] = [run_case(seed, i, list(n_list), max_N, max_degree) for i in range(cases)]
    passed = sum(r["passed"] for r in results)
    return {
        "suite": "exact-identities",
        "seed": seed,
        "n_list": list(n_list),
        "max_N": max_N,
        "max_degree": max_degree,
        "cases": results,
        "summary": {"total": len(results), "passed": passed, "failed": len(results) - passed},
        "status": "pass" if passed == len(results) else "fail",
    }

"""Exact differential operators on polynomials and residuals of their identities.

Operators act on :class:`ExactPolynomial` values:

* ``laplacian``     Δu
* ``radial``        R[u] = x · ∇u
* ``m_power``       M^j[u] = (1 - |x|^2)^j u, integer j >= 0
* ``apply_L``       L_θ[u] = (1 - |x|^2) Δu + 4θ R[u] + 2θ(n - 2 - 2θ) u

The ``*_residual`` functions return ``lhs - rhs`` of an operator identity;
each is identically zero for every valid input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence, Tuple, Union

from .exactpoly import ExactPolynomial, Monomial

ThetaLike = Union[int, Fraction, str]


def as_theta(theta: ThetaLike) -> Fraction:
    """Coerce θ to an exact rational; floats are rejected on the exact path."""
    if isinstance(theta, float):
        raise TypeError("θ must be rational on the exact path; pass a Fraction or 'p/q' string")
    return Fraction(theta)


class PreconditionError(ValueError):
    pass


def laplacian(u: ExactPolynomial) -> ExactPolynomial:
    n = u.dimension
    out: Dict[Monomial, Fraction] = {}
    for m, c in u.items():
        for i, e in enumerate(m):
            if e >= 2:
                dm = m[:i] + (e - 2,) + m[i + 1:]
                out[dm] = out.get(dm, 0) + e * (e - 1) * c
    return ExactPolynomial._raw(n, {m: c for m, c in out.items() if c})


def laplacian_power(u: ExactPolynomial, k: int) -> ExactPolynomial:
    for _ in range(k):
        if u.is_zero():
            break
        u = laplacian(u)
    return u


def radial(u: ExactPolynomial) -> ExactPolynomial:
    # x·∇ acts on a monomial by its total degree (Euler).
    return ExactPolynomial._raw(
        u.dimension, {m: sum(m) * c for m, c in u.items() if sum(m)}
    )


def _times_norm_squared(u: ExactPolynomial) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    for m, c in u.items():
        for i in range(len(m)):
            dm = m[:i] + (m[i] + 2,) + m[i + 1:]
            out[dm] = out.get(dm, 0) + c
    return out


def m_once(u: ExactPolynomial) -> ExactPolynomial:
    """M[u] = (1 - |x|^2) u."""
    out = dict(u.items())
    for m, c in _times_norm_squared(u).items():
        out[m] = out.get(m, 0) - c
    return ExactPolynomial._raw(u.dimension, {m: c for m, c in out.items() if c})


def m_power(u: ExactPolynomial, j: int) -> ExactPolynomial:
    if not isinstance(j, int) or j < 0:
        raise ValueError(f"M^j needs an integer j >= 0 on the exact path, got {j!r}")
    for _ in range(j):
        u = m_once(u)
    return u


def apply_L(theta: ThetaLike, u: ExactPolynomial) -> ExactPolynomial:
    theta = as_theta(theta)
    n = u.dimension
    zeroth = 2 * theta * (n - 2 - 2 * theta)
    out: Dict[Monomial, Fraction] = {}
    for m, c in u.items():
        coeff = 4 * theta * sum(m) + zeroth
        if coeff:
            out[m] = out.get(m, 0) + coeff * c
    lap = laplacian(u)
    for m, c in lap.items():
        out[m] = out.get(m, 0) + c
    for m, c in _times_norm_squared(lap).items():
        out[m] = out.get(m, 0) - c
    return ExactPolynomial._raw(n, {m: c for m, c in out.items() if c})


def apply_L_chain(thetas: Sequence[ThetaLike], u: ExactPolynomial) -> ExactPolynomial:
    """L_{θ_0} L_{θ_1} ... L_{θ_k}[u]; the rightmost operator acts first."""
    for theta in reversed(list(thetas)):
        if u.is_zero():
            break
        u = apply_L(theta, u)
    return u


# -- operator words ----------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """One factor of an operator word.

    ``kind`` is one of ``"laplacian"``, ``"radial"``, ``"M"`` (with integer
    ``param`` = power), ``"L"`` (``param`` = θ) or ``"scalar"`` (``param`` =
    the multiplier).
    """

    kind: str
    param: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("laplacian", "radial", "M", "L", "scalar"):
            raise ValueError(f"unknown operator atom {self.kind!r}")
        if self.kind == "M" and (Fraction(self.param).denominator != 1 or self.param < 0):
            raise ValueError("M^k atoms need an integer k >= 0")

    def __call__(self, u: ExactPolynomial) -> ExactPolynomial:
        if self.kind == "laplacian":
            return laplacian(u)
        if self.kind == "radial":
            return radial(u)
        if self.kind == "M":
            return m_power(u, int(self.param))
        if self.kind == "L":
            return apply_L(self.param, u)
        return u.scale(self.param)


class OperatorWord(Tuple[Atom, ...]):
    """A nonempty composition of atoms, applied right to left."""

    def __new__(cls, atoms):
        atoms = tuple(atoms)
        if not atoms:
            raise ValueError("operator word must be nonempty")
        return super().__new__(cls, atoms)

    def __call__(self, u: ExactPolynomial) -> ExactPolynomial:
        for atom in reversed(self):
            u = atom(u)
        return u


# -- identity residuals ------------------------------------------------------


def correspondence_residual(theta: ThetaLike, lam: int, u: ExactPolynomial) -> ExactPolynomial:
    """L_θ M^λ u - M^λ L_{θ-λ} u - 4λ(λ-1-2θ) M^{λ-1} u."""
    theta = as_theta(theta)
    if not isinstance(lam, int) or lam < 1:
        raise ValueError("λ must be an integer >= 1")
    lhs = apply_L(theta, m_power(u, lam))
    rhs = m_power(apply_L(theta - lam, u), lam)
    rhs = rhs + m_power(u, lam - 1).scale(4 * lam * (lam - 1 - 2 * theta))
    return lhs - rhs


def commutation_residual(theta: ThetaLike, j: int, u: ExactPolynomial) -> ExactPolynomial:
    """Δ^j L_θ u - L_{θ-j} Δ^j u."""
    theta = as_theta(theta)
    if not isinstance(j, int) or j < 1:
        raise ValueError("j must be an integer >= 1")
    return laplacian_power(apply_L(theta, u), j) - apply_L(theta - j, laplacian_power(u, j))


def factorization_residual(N: int, u: ExactPolynomial) -> ExactPolynomial:
    """L_0 L_1 ... L_{N-1} u - (1 - |x|^2)^N Δ^N u."""
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be an integer >= 1")
    return apply_L_chain(range(N), u) - m_power(laplacian_power(u, N), N)


def pochhammer_exact(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= a + i
    return out


def iterated_identity_residual(N: int, j: int, k: int, u: ExactPolynomial) -> ExactPolynomial:
    """L_{N-k} ... L_{N-1} M^j u - 4^k (j-k+1)_k (j-2N+1)_k M^{j-k} u.

    Requires L_{N-j-1} u = 0.  For k > j the right-hand side is zero since
    (j-k+1)_k contains a zero factor.
    """
    if not (1 <= k <= N and 0 <= j <= N - 1):
        raise ValueError(f"need 1 <= k <= N and 0 <= j <= N-1, got N={N}, j={j}, k={k}")
    if not apply_L(N - j - 1, u).is_zero():
        raise PreconditionError(f"input is not annihilated by L_{N - j - 1}")
    lhs = apply_L_chain(range(N - k, N), m_power(u, j))
    coeff = 4**k * pochhammer_exact(Fraction(j - k + 1), k) * pochhammer_exact(Fraction(j - 2 * N + 1), k)
    if coeff == 0:
        return lhs
    return lhs - m_power(u, j - k).scale(coeff)

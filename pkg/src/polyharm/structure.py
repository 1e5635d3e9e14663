"""Almansi representations and the cellular decomposition of polyharmonic polynomials.

Every N-harmonic polynomial u splits uniquely as

    u = w_0 + M[w_1] + ... + M^{N-1}[w_{N-1}],   L_{N-j-1}[w_j] = 0,

and :func:`cellular_decompose` computes the pieces by induction on N: the
order-(N-1) decomposition of L_{N-1}[u] is lifted back with the explicit
coefficients 1/(4(j+1)(2(N-1)-j)).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Sequence, Tuple

from .exactpoly import ExactPolynomial, Monomial
from .operators import apply_L, laplacian, laplacian_power, m_power


class NotPolyharmonicError(ValueError):
    """The input polynomial is not annihilated by Δ^N."""

    def __init__(self, N: int, residue: ExactPolynomial):
        super().__init__(f"polynomial is not {N}-harmonic")
        self.N = N
        self.residue = residue


def is_polyharmonic(u: ExactPolynomial, N: int) -> bool:
    if N < 1:
        raise ValueError("N must be >= 1")
    return laplacian_power(u, N).is_zero()


def _require_polyharmonic(u: ExactPolynomial, N: int) -> None:
    residue = laplacian_power(u, N)
    if not residue.is_zero():
        raise NotPolyharmonicError(N, residue)


# -- exact linear algebra ----------------------------------------------------


def _solve_sparse(rows: Dict[Monomial, Dict[Monomial, Fraction]],
                  rhs: Dict[Monomial, Fraction],
                  unknowns: List[Monomial]) -> Dict[Monomial, Fraction]:
    """Solve a square nonsingular system over Q by Gauss-Jordan elimination.

    ``rows[r][c]`` is the coefficient of unknown ``c`` in equation ``r``.
    """
    eqs = [(dict(rows.get(r, {})), rhs.get(r, Fraction(0))) for r in unknowns]
    pivots: List[Tuple[Monomial, Dict[Monomial, Fraction], Fraction]] = []
    for col in unknowns:
        idx = next((i for i, (row, _) in enumerate(eqs) if row.get(col)), None)
        if idx is None:
            raise ArithmeticError("singular system in harmonic decomposition")
        prow, pval = eqs.pop(idx)
        inv = 1 / prow[col]
        prow = {c: v * inv for c, v in prow.items()}
        pval *= inv
        for i, (row, val) in enumerate(eqs):
            f = row.get(col)
            if f:
                for c, v in prow.items():
                    nv = row.get(c, 0) - f * v
                    if nv:
                        row[c] = nv
                    else:
                        row.pop(c, None)
                eqs[i] = (row, val - f * pval)
        pivots.append((col, prow, pval))
    sol: Dict[Monomial, Fraction] = {}
    for col, prow, pval in reversed(pivots):
        sol[col] = pval - sum(v * sol[c] for c, v in prow.items() if c != col)
    return sol


def _monomials(n: int, d: int) -> List[Monomial]:
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def _lap_of_norm_times(mono: Monomial) -> Dict[Monomial, Fraction]:
    """Δ(|x|^2 x^β) as a sparse vector."""
    n = len(mono)
    out: Dict[Monomial, Fraction] = {}
    for j in range(n):
        lifted = mono[:j] + (mono[j] + 2,) + mono[j + 1:]
        for i, e in enumerate(lifted):
            if e >= 2:
                m = lifted[:i] + (e - 2,) + lifted[i + 1:]
                out[m] = out.get(m, 0) + e * (e - 1)
    return {m: Fraction(c) for m, c in out.items() if c}


def _parity(m: Monomial) -> Tuple[int, ...]:
    return tuple(e & 1 for e in m)


def harmonic_decomposition(q: ExactPolynomial) -> List[ExactPolynomial]:
    """Split a homogeneous q of degree m as q = Σ_j |x|^{2j} h_j, h_j harmonic.

    h_0 = q - |x|^2 s where s solves Δ(|x|^2 s) = Δq on the monomials of
    degree m-2; the remaining h_j come from decomposing s.  The map
    s -> Δ(|x|^2 s) preserves the parity pattern of exponents, so the system
    is solved block by block.
    """
    if not q.is_homogeneous():
        raise ValueError("harmonic_decomposition needs a homogeneous polynomial")
    n = q.dimension
    m = max(q.degree, 0)
    if m < 2:
        return [q]
    target = laplacian(q)
    if target.is_zero():
        return [q]
    blocks: Dict[Tuple[int, ...], List[Monomial]] = {}
    for mono in _monomials(n, m - 2):
        blocks.setdefault(_parity(mono), []).append(mono)
    rhs = dict(target.items())
    s_terms: Dict[Monomial, Fraction] = {}
    for parity, basis in blocks.items():
        block_rhs = {r: v for r, v in rhs.items() if _parity(r) == parity}
        if not block_rhs:
            continue
        rows: Dict[Monomial, Dict[Monomial, Fraction]] = {}
        for col in basis:
            for r, v in _lap_of_norm_times(col).items():
                rows.setdefault(r, {})[col] = v
        s_terms.update(_solve_sparse(rows, block_rhs, basis))
    s = ExactPolynomial(n, s_terms)
    h0 = q - ExactPolynomial.norm_squared(n) * s
    return [h0] + harmonic_decomposition(s)


def harmonic_projection(q: ExactPolynomial) -> ExactPolynomial:
    """Harmonic part h_0 of each homogeneous piece of q, summed."""
    out = ExactPolynomial.zero(q.dimension)
    for part in q.homogeneous_parts().values():
        out = out + harmonic_decomposition(part)[0]
    return out


# -- Almansi -----------------------------------------------------------------


@dataclass(frozen=True)
class AlmansiForm:
    """u = Σ_k |x|^{2k} u_k with every u_k harmonic."""

    N: int
    components: Tuple[ExactPolynomial, ...]

    def reconstruct(self) -> ExactPolynomial:
        n = self.components[0].dimension
        rho = ExactPolynomial.norm_squared(n)
        out = ExactPolynomial.zero(n)
        for k, uk in enumerate(self.components):
            out = out + rho**k * uk
        return out


def almansi(u: ExactPolynomial, N: int) -> AlmansiForm:
    _require_polyharmonic(u, N)
    n = u.dimension
    comps = [ExactPolynomial.zero(n) for _ in range(N)]
    for part in u.homogeneous_parts().values():
        for k, h in enumerate(harmonic_decomposition(part)):
            if h.is_zero():
                continue
            if k >= N:
                raise AssertionError("Almansi component beyond order N for an N-harmonic input")
            comps[k] = comps[k] + h
    return AlmansiForm(N, tuple(comps))


def almansi_rearranged(u: ExactPolynomial, N: int) -> Tuple[ExactPolynomial, ...]:
    """Harmonic v_j with u = Σ_j (1 - |x|^2)^j v_j.

    v_j = (-1)^j Σ_{k=j}^{N-1} C(k, j) u_k, from |x|^2 = 1 - (1 - |x|^2).
    """
    comps = almansi(u, N).components
    out = []
    for j in range(N):
        v = ExactPolynomial.zero(u.dimension)
        for k in range(j, N):
            v = v + comps[k].scale(comb(k, j))
        out.append(v if j % 2 == 0 else -v)
    return tuple(out)


# -- cellular decomposition --------------------------------------------------


@dataclass(frozen=True)
class CellularComponents:
    N: int
    components: Tuple[ExactPolynomial, ...]

    def reconstruct(self) -> ExactPolynomial:
        out = ExactPolynomial.zero(self.components[0].dimension)
        for j, w in enumerate(self.components):
            out = out + m_power(w, j)
        return out

    def annihilation_residuals(self) -> Tuple[ExactPolynomial, ...]:
        return tuple(apply_L(self.N - j - 1, w) for j, w in enumerate(self.components))

    def to_dict(self) -> dict:
        return {"N": self.N, "components": [w.to_dict() for w in self.components]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> "CellularComponents":
        comps = tuple(ExactPolynomial.from_dict(c) for c in doc["components"])
        if len(comps) != doc["N"]:
            raise ValueError("component count does not match N")
        return cls(int(doc["N"]), comps)


def _cellular(u: ExactPolynomial, N: int) -> List[ExactPolynomial]:
    n = u.dimension
    if N == 1:
        return [u]
    N0 = N - 1
    g = apply_L(N0, u)
    if g.is_zero():
        return [u] + [ExactPolynomial.zero(n)] * N0
    v = _cellular(g, N0)
    V = ExactPolynomial.zero(n)
    for j, vj in enumerate(v):
        V = V + m_power(vj, j + 1).scale(Fraction(1, 4 * (j + 1) * (2 * N0 - j)))
    w = [u + V]
    for j in range(1, N0 + 1):
        w.append(v[j - 1].scale(Fraction(-1, 4 * j * (2 * N0 - j + 1))))
    return w


def cellular_decompose(u: ExactPolynomial, N: int) -> CellularComponents:
    if N < 1:
        raise ValueError("N must be >= 1")
    _require_polyharmonic(u, N)
    return CellularComponents(N, tuple(_cellular(u, N)))


# -- random test inputs ------------------------------------------------------


def _random_homogeneous(rng: random.Random, n: int, d: int, terms: int) -> ExactPolynomial:
    coeffs: Dict[Monomial, Fraction] = {}
    for _ in range(terms):
        mono = [0] * n
        for _ in range(d):
            mono[rng.randrange(n)] += 1
        num = rng.randint(-4, 4)
        coeffs[tuple(mono)] = coeffs.get(tuple(mono), 0) + Fraction(num, rng.randint(1, 3))
    return ExactPolynomial(n, coeffs)


def random_polynomial(n: int, max_degree: int, seed: int, terms_per_degree: int = 3) -> ExactPolynomial:
    """Seeded random polynomial with small rational coefficients."""
    rng = random.Random(seed)
    out = ExactPolynomial.zero(n)
    for d in range(max_degree + 1):
        out = out + _random_homogeneous(rng, n, d, terms_per_degree)
    return out


def random_harmonic(n: int, max_degree: int, rng: random.Random, terms_per_degree: int = 2) -> ExactPolynomial:
    out = ExactPolynomial.zero(n)
    for d in range(max_degree + 1):
        q = _random_homogeneous(rng, n, d, terms_per_degree)
        if not q.is_zero():
            out = out + harmonic_decomposition(q)[0]
    return out


def random_polyharmonic(n: int, N: int, max_degree: int, seed: int) -> ExactPolynomial:
    """Σ_{k<N} |x|^{2k} h_k with random harmonic h_k of degree <= max_degree."""
    if n < 2 or N < 1:
        raise ValueError("need n >= 2 and N >= 1")
    rng = random.Random(seed)
    rho = ExactPolynomial.norm_squared(n)
    u = ExactPolynomial.zero(n)
    for k in range(N):
        u = u + rho**k * random_harmonic(n, max_degree, rng)
    if not is_polyharmonic(u, N):
        raise AssertionError("random_polyharmonic produced a non-polyharmonic output")
    return u

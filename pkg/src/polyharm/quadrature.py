"""Product quadrature on the unit sphere and ball of R^n, 2 <= n <= 6.

Sphere rules use hyperspherical angles

    ζ_1 = cos φ_1,  ζ_2 = sin φ_1 cos φ_2,  ...,  ζ_n = sin φ_1 ... sin φ_{n-1},

with u = cos φ_k turning sin^{n-1-k} φ_k dφ_k into the Jacobi weight
(1 - u^2)^{(n-2-k)/2}.  Surface measure is normalised so σ(S) = 1.

Integrands are vectorised: ``f(X)`` takes an ``(m, n)`` array of points and
returns ``m`` values.  Sums go through ``math.fsum`` so results do not depend
on evaluation order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .special import ball_volume, gamma, sphere_volume

Integrand = Callable[[np.ndarray], np.ndarray]

MIN_DIM, MAX_DIM = 2, 6


class UnsupportedDimension(ValueError):
    pass


def _check_dim(n: int) -> None:
    if not MIN_DIM <= n <= MAX_DIM:
        raise UnsupportedDimension(f"quadrature supports 2 <= n <= 6, got n = {n}")


# -- one-dimensional Gauss rules ---------------------------------------------


def gauss_jacobi(k: int, alpha: float = 0.0, beta: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ∫_{-1}^{1} (1-x)^α (1+x)^β f(x) dx (Golub-Welsch)."""
    if k < 1:
        raise ValueError("node count must be >= 1")
    if alpha <= -1 or beta <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    ab = alpha + beta
    i = np.arange(k, dtype=float)
    diag = np.empty(k)
    diag[0] = (beta - alpha) / (ab + 2)
    if k > 1:
        j = i[1:]
        diag[1:] = (beta**2 - alpha**2) / ((2 * j + ab) * (2 * j + ab + 2))
    off = np.empty(max(k - 1, 0))
    if k > 1:
        off[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        if k > 2:
            j = i[2:]
            off[1:] = (
                4 * j * (j + alpha) * (j + beta) * (j + ab)
                / ((2 * j + ab) ** 2 * (2 * j + ab + 1) * (2 * j + ab - 1))
            )
        off = np.sqrt(off)
    mu0 = 2 ** (ab + 1) * gamma(alpha + 1) * gamma(beta + 1) / gamma(ab + 2)
    if k == 1:
        return diag.copy(), np.array([mu0])
    nodes, vecs = eigh_tridiagonal(diag, off)
    weights = mu0 * vecs[0, :] ** 2
    return nodes, weights


def gauss_rule(kind: str, k: int, alpha: float = 0.0, beta: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """``kind`` is ``"legendre"`` or ``"jacobi"`` (weight (1-x)^α (1+x)^β)."""
    if kind == "legendre":
        return gauss_jacobi(k, 0.0, 0.0)
    if kind == "jacobi":
        return gauss_jacobi(k, alpha, beta)
    raise ValueError(f"unknown rule kind {kind!r}")


def mapped_jacobi(k: int, a: float = 0.0, b: float = 0.0, lo: float = 0.0, hi: float = 1.0):
    """Rule for ∫_lo^hi (hi - t)^a (t - lo)^b f(t) dt."""
    x, w = gauss_jacobi(k, a, b)
    half = (hi - lo) / 2
    return lo + half * (x + 1), w * half ** (a + b + 1)


# -- rules in R^n ------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, f: Integrand) -> float:
        values = np.asarray(f(self.nodes), dtype=float)
        return math.fsum((self.weights * values).tolist())

    def total_weight(self) -> float:
        return math.fsum(self.weights.tolist())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{i + 1}" for i in range(self.n)] + ["weight"])
        for node, w in zip(self.nodes, self.weights):
            writer.writerow([repr(float(v)) for v in node] + [repr(float(w))])
        return buf.getvalue()


def _householder_to(pole: Sequence[float]) -> Optional[np.ndarray]:
    """Orthogonal matrix sending e_1 to ``pole`` (None when pole == e_1)."""
    p = np.asarray(pole, dtype=float)
    p = p / np.linalg.norm(p)
    e1 = np.zeros_like(p)
    e1[0] = 1.0
    v = e1 - p
    nv = np.linalg.norm(v)
    if nv < 1e-15:
        return None
    v /= nv
    return np.eye(len(p)) - 2.0 * np.outer(v, v)


def _polar_angle_rule(n: int, level: int, depth: int) -> Tuple[np.ndarray, np.ndarray]:
    """Rule in φ_1 ∈ [0, π] for the weight sin^{n-2} φ_1.

    ``depth > 0`` subdivides dyadically toward φ_1 = 0, i.e. toward e_1.
    """
    if depth == 0:
        u, w = gauss_jacobi(level, (n - 3) / 2, (n - 3) / 2)
        return np.arccos(u), w
    x, w = gauss_jacobi(level)
    edges = [0.0] + [math.pi * 2.0**-d for d in range(depth, -1, -1)]
    phis, wts = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        phi = lo + (hi - lo) / 2 * (x + 1)
        phis.append(phi)
        wts.append(w * (hi - lo) / 2 * np.sin(phi) ** (n - 2))
    return np.concatenate(phis), np.concatenate(wts)


def sphere_rule(n: int, level: int, pole: Optional[Sequence[float]] = None, pole_depth: int = 0) -> QuadratureRule:
    """Product rule on S with σ(S) = 1.

    ``level`` Gauss nodes per polar angle and ``2*level`` azimuthal nodes,
    exact for polynomials of degree <= 2*level - 1.  With ``pole_depth > 0``
    the first polar angle is refined dyadically toward ``pole`` (default e_1).
    """
    _check_dim(n)
    if level < 1:
        raise ValueError("level must be >= 1")
    m_az = 2 * level
    az = 2 * math.pi * np.arange(m_az) / m_az
    az_w = np.full(m_az, 2 * math.pi / m_az)
    # Angle grids: polar angles φ_1..φ_{n-2}, then the azimuth.
    grids = []
    for k in range(1, n - 1):
        if k == 1:
            grids.append(_polar_angle_rule(n, level, pole_depth))
        else:
            u, w = gauss_jacobi(level, (n - 2 - k) / 2, (n - 2 - k) / 2)
            grids.append((np.arccos(u), w))
    grids.append((az, az_w))
    mesh = np.meshgrid(*[g[0] for g in grids], indexing="ij")
    wmesh = np.meshgrid(*[g[1] for g in grids], indexing="ij")
    angles = [m.ravel() for m in mesh]
    weights = np.prod([m.ravel() for m in wmesh], axis=0)
    pts = np.empty((len(weights), n))
    sin_prod = np.ones(len(weights))
    for i, phi in enumerate(angles):
        if i == n - 2:
            pts[:, i] = sin_prod * np.cos(phi)
            pts[:, i + 1] = sin_prod * np.sin(phi)
        else:
            pts[:, i] = sin_prod * np.cos(phi)
            sin_prod = sin_prod * np.sin(phi)
    weights = weights / sphere_volume(n)
    if pole is not None:
        rot = _householder_to(pole)
        if rot is not None:
            pts = pts @ rot.T
    meta = {"level": level, "azimuth_nodes": m_az, "pole_depth": pole_depth}
    return QuadratureRule(n, pts, weights, "sphere", meta)


def ball_rule(n: int, levels, radial_exponent: float = 0.0, pole=None, pole_depth: int = 0) -> QuadratureRule:
    """Rule for ∫_B (1 - |x|)^a g(x) dV with a = ``radial_exponent``.

    ``levels`` is an int (used for both) or a (radial, angular) pair.  The
    radial factor r^{n-1} (1-r)^a is absorbed by Gauss-Jacobi on [0, 1].
    """
    _check_dim(n)
    if isinstance(levels, int):
        radial_level, angular_level = levels, levels
    else:
        radial_level, angular_level = levels
    r, wr = mapped_jacobi(radial_level, radial_exponent, n - 1, 0.0, 1.0)
    sph = sphere_rule(n, angular_level, pole=pole, pole_depth=pole_depth)
    nodes = (r[:, None, None] * sph.nodes[None, :, :]).reshape(-1, n)
    weights = (sphere_volume(n) * wr[:, None] * sph.weights[None, :]).ravel()
    meta = {"radial": "jacobi", "radial_exponent": radial_exponent, "radial_level": radial_level,
            "angular_level": angular_level}
    return QuadratureRule(n, nodes, weights, "ball", meta)


# -- singular ball integral -------------------------------------------------


def _zonal_constant(n: int) -> float:
    # dσ for zonal functions of ζ_1 = cos φ: c_n sin^{n-2} φ dφ on [0, π].
    return gamma(n / 2) / (math.sqrt(math.pi) * gamma((n - 1) / 2))


def corner_graded_integral(g: Callable[[np.ndarray, np.ndarray], np.ndarray], n: int, a: float,
                           depth: int, q: int = 20) -> float:
    """∫_0^1 ∫_0^π s^a g(s, φ) dφ ds with refinement toward the corner (0, 0).

    The unit square in (s, φ/π) is split into L-shaped dyadic layers, each
    made of three rectangles; rectangles touching s = 0 use Gauss-Jacobi in s
    to absorb s^a.  The innermost square of side 2^-depth is dropped.
    """
    xl, wl = gauss_jacobi(q)
    xj, wj = gauss_jacobi(q, 0.0, a)  # (1+x)^a weight: singular end at s = lo = 0
    parts = []
    for k in range(depth):
        h = 2.0**-k
        rects = [((h / 2, h), (0.0, h / 2)), ((0.0, h / 2), (h / 2, h)), ((h / 2, h), (h / 2, h))]
        for (s0, s1), (t0, t1) in rects:
            hs = (s1 - s0) / 2
            if s0 == 0.0:
                s = s0 + hs * (xj + 1)
                ws = wj * hs ** (a + 1)
            else:
                s = s0 + hs * (xl + 1)
                ws = wl * hs * s**a
            ht = (t1 - t0) / 2 * math.pi
            phi = t0 * math.pi + ht * (xl + 1)
            wp = wl * ht
            S, P = np.meshgrid(s, phi, indexing="ij")
            W = np.outer(ws, wp)
            parts.extend((W * g(S, P)).ravel().tolist())
    return math.fsum(parts)


def i_numeric(a: float, b: float, n: int, tol: float = 1e-8, q: int = 20) -> float:
    """Numerical ∫_B (1-|x|^2)^a / |x - e_1|^{n+a+b} dV for a > -1, b < 0."""
    _check_dim(n)
    if not (a > -1 and b < 0):
        raise ValueError(f"I(a, b) diverges for a = {a}, b = {b}")
    power = n + a + b
    # The dropped corner square contributes O(2^{depth·b}).
    depth = min(200, max(8, math.ceil(math.log2(1 / tol) / -b) + 4))

    def g(s, phi):
        r = 1.0 - s
        d2 = s * s + 4.0 * r * np.sin(phi / 2) ** 2
        return r ** (n - 1) * (2.0 - s) ** a * np.sin(phi) ** (n - 2) * d2 ** (-power / 2)

    return sphere_volume(n) * _zonal_constant(n) * corner_graded_integral(g, n, a, depth, q)


# -- weighted norms ----------------------------------------------------------


def truncation_radius(m: int) -> float:
    return 1.0 - 2.0**-m


def annulus_masses(f: Integrand, p: float, alpha: float, n: int, m_max: int,
                   sphere_level: int = 8, radial_level: int = 8,
                   pole=None, pole_depth: Optional[int] = None) -> list:
    """∫_{r_k <= |x| <= r_{k+1}} |f|^p (1-|x|^2)^α dV for k = 0..m_max-1, r_0 = 0."""
    _check_dim(n)
    if pole is not None and pole_depth is None:
        pole_depth = max(12, m_max + 3)
    sph = sphere_rule(n, sphere_level, pole=pole, pole_depth=pole_depth or 0)
    xr, wr = gauss_jacobi(radial_level)
    omega = sphere_volume(n)
    masses = []
    edges = [0.0] + [truncation_radius(k) for k in range(1, m_max + 1)]
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = (hi - lo) / 2
        r = lo + half * (xr + 1)
        # 1 - r^2 computed from 1 - r to keep precision near the boundary.
        one_minus = (1.0 - lo) - half * (xr + 1)
        radial_w = omega * wr * half * r ** (n - 1) * (one_minus * (1.0 + r)) ** alpha
        pts = (r[:, None, None] * sph.nodes[None, :, :]).reshape(-1, n)
        vals = np.abs(np.asarray(f(pts), dtype=float)) ** p
        w = (radial_w[:, None] * sph.weights[None, :]).ravel()
        masses.append(math.fsum((w * vals).tolist()))
    return masses


@dataclass(frozen=True)
class WeightedNormResult:
    radii: Tuple[float, ...]
    truncated: Tuple[float, ...]
    verdict: str  # "convergent" | "divergent" | "inconclusive"


def finiteness_verdict(truncated: Sequence[float], growth: float = 1.2, shrink: float = 0.9) -> str:
    """Three-way verdict from truncated norms T_m on r_m = 1 - 2^-m.

    divergent: T grows by >= ``growth`` across each of the last three steps,
    or the last three increment ratios are all >= 1 (non-summable).
    convergent: the last three increment ratios are all <= ``shrink``.
    """
    t = list(truncated)
    if len(t) < 5:
        return "inconclusive"
    inc = [b - a for a, b in zip(t[:-1], t[1:])]
    ratios = [inc[i + 1] / inc[i] if inc[i] > 0 else math.inf for i in range(len(inc) - 1)][-3:]
    growths = [t[i + 1] / t[i] if t[i] > 0 else math.inf for i in range(len(t) - 1)][-3:]
    if all(g >= growth for g in growths) or all(r >= 1.0 for r in ratios):
        return "divergent"
    if all(0 <= r <= shrink for r in ratios):
        return "convergent"
    return "inconclusive"


def weighted_norm(f: Integrand, p: float, alpha: float, n: int, levels: Sequence[int] = tuple(range(1, 13)),
                  sphere_level: int = 8, radial_level: int = 8, pole=None,
                  pole_depth: Optional[int] = None) -> WeightedNormResult:
    """Truncated ‖f‖^p_{p,α} = ∫_{|x| <= r_m} |f|^p (1-|x|^2)^α dV for each m in ``levels``.

    The weight is (1-|x|^2)^α; it is comparable to dist(x, S)^α = (1-|x|)^α
    within the factor 2^α.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    levels = list(levels)
    if levels != sorted(set(levels)) or levels[0] < 1:
        raise ValueError("refinement levels must be strictly increasing positive integers")
    masses = annulus_masses(f, p, alpha, n, levels[-1], sphere_level, radial_level, pole, pole_depth)
    truncated = tuple(math.fsum(masses[:m]) for m in levels)
    return WeightedNormResult(
        tuple(truncation_radius(m) for m in levels), truncated, finiteness_verdict(truncated)
    )


def radial_mean(f: Integrand, p: float, r: float, n: int, sphere_level: int = 8) -> float:
    """M_p(f, r) = (∫_S |f(rζ)|^p dσ)^{1/p}."""
    if not 0 <= r < 1:
        raise ValueError("need 0 <= r < 1")
    if p <= 0:
        raise ValueError("p must be positive")
    sph = sphere_rule(n, sphere_level)
    vals = np.abs(np.asarray(f(r * sph.nodes), dtype=float)) ** p
    return math.fsum((sph.weights * vals).tolist()) ** (1 / p)


@dataclass(frozen=True)
class BetaEstimate:
    beta: float
    slope: float
    residual: float
    levels: Tuple[int, ...]


def estimate_beta_p(f: Integrand, p: float, n: int, levels: Sequence[int] = tuple(range(6, 15)),
                    sphere_level: int = 8, radial_level: int = 8, pole=None) -> BetaEstimate:
    """Heuristic critical exponent inf{α : f ∈ L^p_α}.

    Fits log(A_m / width_m) against log(1 - r_m), where A_m is the unweighted
    mass of |f|^p on the annulus [r_m, r_{m+1}]; a density behaving like
    (1-r)^s gives β_p = -1 - s.  ``residual`` is the RMS fit residual.
    """
    levels = list(levels)
    m_max = levels[-1] + 1
    masses = annulus_masses(f, p, 0.0, n, m_max, sphere_level, radial_level, pole)
    xs, ys = [], []
    for m in levels:
        width = truncation_radius(m + 1) - truncation_radius(m)
        if masses[m] > 0:
            xs.append(math.log(1 - truncation_radius(m)))
            ys.append(math.log(masses[m] / width))
    if len(xs) < 2:
        raise ValueError("degenerate fit: annulus masses vanish")
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = np.asarray(ys) - (slope * np.asarray(xs) + intercept)
    return BetaEstimate(-1.0 - float(slope), float(slope), float(np.sqrt(np.mean(resid**2))), tuple(levels))


def sphere_integral_check(t: float, y: Sequence[float], level: int = 40) -> float:
    """∫_S |y - ζ|^{-2t} dσ(ζ) by quadrature, poles aligned with y."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    norm = float(np.linalg.norm(y))
    pole = y / norm if norm > 0 else None
    sph = sphere_rule(n, level, pole=pole)
    d2 = np.sum((sph.nodes - y[None, :]) ** 2, axis=1)
    return math.fsum((sph.weights * d2 ** (-t)).tolist())


def ball_volume_check(n: int) -> float:
    return ball_volume(n)

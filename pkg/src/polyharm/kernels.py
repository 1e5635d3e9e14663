"""Pointwise kernels and second-order forward-mode jets.

A :class:`Jet2` carries value, gradient and Hessian of a scalar field at a
point.  Values may be arrays (a batch over kernel poles, say) as long as the
shapes broadcast: value ``(...)``, gradient ``(..., n)``, Hessian
``(..., n, n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exactpoly import ExactPolynomial
from .quadrature import sphere_rule
from .special import RadialProfile, c_theta, phi_theta

BOUNDARY_GUARD = 1e-12
POLE_GUARD = 1e-10


class KernelDomainError(ValueError):
    """Evaluation at or beyond the boundary, or at the kernel pole."""


class Jet2:
    __slots__ = ("v", "g", "h")

    def __init__(self, v, g, h):
        self.v = v
        self.g = g
        self.h = h

    @classmethod
    def variables(cls, x: Sequence[float]) -> list:
        x = np.asarray(x, dtype=float)
        n = len(x)
        eye = np.eye(n)
        zero = np.zeros((n, n))
        return [cls(x[i], eye[i].copy(), zero.copy()) for i in range(n)]

    @classmethod
    def constant(cls, c, n: int) -> "Jet2":
        c = np.asarray(c, dtype=float)
        return cls(c, np.zeros(c.shape + (n,)), np.zeros(c.shape + (n, n)))

    @property
    def dim(self) -> int:
        return self.g.shape[-1]

    @property
    def value(self):
        return self.v

    @property
    def gradient(self):
        return self.g

    @property
    def hessian(self):
        return self.h

    def laplacian(self):
        return np.trace(self.h, axis1=-2, axis2=-1)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.v + other.v, self.g + other.g, self.h + other.h)
        return Jet2(self.v + other, self.g, self.h)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.v, -self.g, -self.h)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            c = np.asarray(other, dtype=float)
            return Jet2(self.v * c, self.g * c[..., None], self.h * c[..., None, None])
        a, b = self, other
        av, bv = np.asarray(a.v)[..., None], np.asarray(b.v)[..., None]
        cross = a.g[..., :, None] * b.g[..., None, :]
        return Jet2(
            a.v * b.v,
            av * b.g + bv * a.g,
            av[..., None] * b.h + bv[..., None] * a.h + cross + np.swapaxes(cross, -1, -2),
        )

    __rmul__ = __mul__

    def compose(self, f0, f1, f2) -> "Jet2":
        """Chain rule for φ(self) given φ, φ', φ'' evaluated at self.v."""
        f1a = np.asarray(f1)
        f2a = np.asarray(f2)
        outer = self.g[..., :, None] * self.g[..., None, :]
        return Jet2(
            f0,
            f1a[..., None] * self.g,
            f1a[..., None, None] * self.h + f2a[..., None, None] * outer,
        )

    def __pow__(self, k):
        if isinstance(k, int) and k >= 0:
            if k == 0:
                return Jet2.constant(np.ones_like(np.asarray(self.v, dtype=float)), self.dim)
            out = self
            for _ in range(k - 1):
                out = out * self
            return out
        v = np.asarray(self.v, dtype=float)
        return self.compose(v**k, k * v ** (k - 1), k * (k - 1) * v ** (k - 2))

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet2":
        v = np.asarray(self.v, dtype=float)
        return self.compose(1 / v, -1 / v**2, 2 / v**3)

    def sqrt(self) -> "Jet2":
        v = np.asarray(self.v, dtype=float)
        s = np.sqrt(v)
        return self.compose(s, 0.5 / s, -0.25 / (s * v))

    def log(self) -> "Jet2":
        v = np.asarray(self.v, dtype=float)
        return self.compose(np.log(v), 1 / v, -1 / v**2)

    def exp(self) -> "Jet2":
        e = np.exp(np.asarray(self.v, dtype=float))
        return self.compose(e, e, e)

    def weighted_sum(self, weights) -> "Jet2":
        """Σ_i w_i jet_i over the leading batch axis."""
        w = np.asarray(weights, dtype=float)
        return Jet2(
            float(np.dot(w, self.v)),
            np.tensordot(w, self.g, axes=(0, 0)),
            np.tensordot(w, self.h, axes=(0, 0)),
        )


Field = Callable[[list], Jet2]


def norm_squared(xs: list) -> Jet2:
    out = xs[0] * xs[0]
    for xi in xs[1:]:
        out = out + xi * xi
    return out


def jet_eval(field: Field, x: Sequence[float]) -> Jet2:
    """Second-order Taylor data of ``field`` at ``x`` by forward-mode jets."""
    return field(Jet2.variables(x))


def polynomial_field(u: ExactPolynomial) -> Field:
    terms = [(m, float(c)) for m, c in u.items()]

    def field(xs):
        n = len(xs)
        out = Jet2.constant(0.0, n)
        for mono, c in terms:
            t = Jet2.constant(c, n)
            for xi, e in zip(xs, mono):
                if e:
                    t = t * xi**e
            out = out + t
        return out

    return field


def radial_profile_field(profile: RadialProfile) -> Field:
    """x -> profile(|x|^2)."""

    def field(xs):
        t = norm_squared(xs)
        tv = float(t.v)
        return t.compose(profile.evaluate(tv), profile.derivative(tv, 1), profile.derivative(tv, 2))

    return field


@dataclass(frozen=True)
class KernelSpec:
    theta: float
    pole: tuple
    n: int

    def __post_init__(self):
        if len(self.pole) != self.n:
            raise ValueError("pole dimension mismatch")
        if abs(math.fsum(z * z for z in self.pole) - 1.0) > 1e-14:
            raise ValueError("pole must be a unit vector")


def _guard(x, pole=None):
    x = np.asarray(x, dtype=float)
    r2 = float(np.dot(x, x))
    if math.sqrt(r2) > 1 - BOUNDARY_GUARD:
        raise KernelDomainError(f"|x| = {math.sqrt(r2)} is not inside the ball")
    if pole is not None and float(np.linalg.norm(x - np.asarray(pole, dtype=float))) < POLE_GUARD:
        raise KernelDomainError("evaluation at the kernel pole")
    return x


def poisson_kernel(spec: KernelSpec, x: Sequence[float]) -> float:
    """P_θ(x, ζ) = C_θ (1 - |x|^2)^{1+2θ} / |x - ζ|^{n+2θ}."""
    x = _guard(x, spec.pole)
    zeta = np.asarray(spec.pole, dtype=float)
    theta = float(spec.theta)
    one_minus = 1.0 - float(np.dot(x, x))
    dist = float(np.linalg.norm(x - zeta))
    return c_theta(theta, spec.n) * one_minus ** (1 + 2 * theta) / dist ** (spec.n + 2 * theta)


def poisson_kernel_field(theta: float, pole, n: int, normalized: bool = True) -> Field:
    """Jet field of P_θ(·, ζ); ``pole`` may be an (m, n) batch of poles."""
    zeta = np.asarray(pole, dtype=float)
    theta = float(theta)
    const = c_theta(theta, n) if normalized else 1.0

    def field(xs):
        m = 1 - norm_squared(xs)
        d2 = None
        for i, xi in enumerate(xs):
            diff = xi - zeta[..., i]
            d2 = diff * diff if d2 is None else d2 + diff * diff
        return (m ** (1 + 2 * theta)) * (d2 ** (-(n + 2 * theta) / 2)) * const

    return field


def L_residual_jet(theta: float, jet: Jet2, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    n = len(x)
    theta = float(theta)
    return float(
        (1 - np.dot(x, x)) * jet.laplacian()
        + 4 * theta * np.dot(x, jet.g)
        + 2 * theta * (n - 2 - 2 * theta) * jet.v
    )


def L_residual_at(theta: float, field: Field, x: Sequence[float]) -> float:
    """(1 - |x|^2) Δf + 4θ x·∇f + 2θ(n - 2 - 2θ) f at the point x."""
    return L_residual_jet(theta, jet_eval(field, x), x)


def u_jn(j: int, N: int, x: Sequence[float], n: int | None = None) -> float:
    """U_{j,N}(x) = (1-|x|^2)^{N+j-1} / |x - e_1|^{n+2(j-1)}; U_{0,N} = (1-|x|^2)^{N-1}."""
    x = np.asarray(x, dtype=float)
    n = len(x) if n is None else n
    if not 0 <= j <= N:
        raise ValueError("need 0 <= j <= N")
    e1 = np.zeros(n)
    e1[0] = 1.0
    x = _guard(x, e1 if j > 0 else None)
    one_minus = 1.0 - float(np.dot(x, x))
    if j == 0:
        return one_minus ** (N - 1)
    return one_minus ** (N + j - 1) / float(np.linalg.norm(x - e1)) ** (n + 2 * (j - 1))


def u_jn_vectorized(j: int, N: int, n: int) -> Callable[[np.ndarray], np.ndarray]:
    """Batch evaluator of U_{j,N} on an (m, n) array of interior points."""

    def f(X):
        X = np.asarray(X, dtype=float)
        one_minus = 1.0 - np.sum(X * X, axis=1)
        if j == 0:
            return one_minus ** (N - 1)
        d2 = (X[:, 0] - 1.0) ** 2 + np.sum(X[:, 1:] ** 2, axis=1)
        return one_minus ** (N + j - 1) / d2 ** ((n + 2 * (j - 1)) / 2)

    return f


def u_jn_field(j: int, N: int, n: int) -> Field:
    e1 = np.zeros(n)
    e1[0] = 1.0

    def field(xs):
        m = 1 - norm_squared(xs)
        if j == 0:
            return m ** (N - 1) if N > 1 else Jet2.constant(1.0, n)
        # U_{j,N} = M^{N-j}[P_{j-1}(·, e_1)] / C_{j-1}
        return m ** (N - j) * poisson_kernel_field(j - 1, e1, n, normalized=False)(xs)

    return field


def _m_power_field(field: Field, lam: float) -> Field:
    def out(xs):
        return (1 - norm_squared(xs)) ** lam * field(xs)

    return out


def u_jn_chain_residuals(j: int, N: int, n: int, x: Sequence[float]) -> list:
    """Stepwise residuals showing L_0 ... L_{N-1} annihilates U_{j,N} at x.

    With h = P_{j-1}(·, e_1)/C_{j-1} and i = N - j, step k checks
    L_{N-k}[M^{i-k+1} h] = 4(i-k+1)(i-2N+k) M^{i-k} h, and the last entry is
    L_{j-1}[h].  Each is divided by 1 + |left-hand value|.
    """
    if not 1 <= j <= N:
        raise ValueError("need 1 <= j <= N")
    x = _guard(x, [1.0] + [0.0] * (n - 1))
    e1 = np.zeros(n)
    e1[0] = 1.0
    h = poisson_kernel_field(j - 1, e1, n, normalized=False)
    i = N - j
    out = []
    for k in range(1, i + 1):
        lhs = jet_eval(_m_power_field(h, i - k + 1), x)
        rhs = jet_eval(_m_power_field(h, i - k), x).v * 4 * (i - k + 1) * (i - 2 * N + k)
        out.append(abs(L_residual_jet(N - k, lhs, x) - rhs) / (1.0 + abs(float(lhs.v))))
    hj = jet_eval(h, x)
    out.append(abs(L_residual_jet(j - 1, hj, x)) / (1.0 + abs(float(hj.v))))
    return out


def theta_poisson_integral(theta: float, f: Callable[[np.ndarray], np.ndarray], x: Sequence[float],
                           sphere_level: int = 20) -> float:
    """P_θ[f](x) = ∫_S P_θ(x, ζ) f(ζ) dσ(ζ), for θ > -1/2."""
    return theta_poisson_jet(theta, f, x, sphere_level).v


def theta_poisson_jet(theta: float, f: Callable[[np.ndarray], np.ndarray], x: Sequence[float],
                      sphere_level: int = 20) -> Jet2:
    """Jet of the θ-Poisson integral at x (differentiating under the integral).

    The sphere rule is refined dyadically toward x/|x|, where the kernel
    peaks with width about 1 - |x|.
    """
    theta = float(theta)
    if theta <= -0.5:
        raise ValueError("θ-Poisson integrals need θ > -1/2")
    x = _guard(x)
    n = len(x)
    norm = float(np.linalg.norm(x))
    pole = x / norm if norm > 0 else None
    depth = max(0, math.ceil(math.log2(1.0 / (1.0 - norm)))) + 1 if pole is not None else 0
    sph = sphere_rule(n, sphere_level, pole=pole, pole_depth=depth)
    kernel = poisson_kernel_field(theta, sph.nodes, n)(Jet2.variables(x))
    values = np.asarray(f(sph.nodes), dtype=float)
    return kernel.weighted_sum(sph.weights * values)


def phi_field(theta, n: int) -> Field:
    return radial_profile_field(phi_theta(theta, n))

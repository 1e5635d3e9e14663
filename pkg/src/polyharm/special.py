"""Real special functions: Gamma, Pochhammer, Gauss 2F1 and derived constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Callable, Optional, Tuple

from .exactpoly import ExactPolynomial


class GammaPoleError(ArithmeticError):
    """Gamma evaluated at a nonpositive integer."""


class SeriesDivergenceError(ArithmeticError):
    pass


class HypergeometricParameterError(ValueError):
    pass


# Godfrey's coefficients for g = 607/128.
_LANCZOS_G = 607 / 128
_LANCZOS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_SQRT_2PI = math.sqrt(2 * math.pi)


def is_nonpositive_integer(x) -> bool:
    if isinstance(x, Fraction):
        return x.denominator == 1 and x <= 0
    return float(x) <= 0 and float(x) == math.floor(float(x))


def _sin_pi(x: float) -> float:
    # Reduce mod 2 first so sin(πx) keeps full relative accuracy for large |x|.
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r == 0.0 or abs(r) == 1.0:
        return 0.0
    if abs(r) == 0.5:
        return math.copysign(1.0, r)
    # sin(πr) = sin(π(1-r)); the subtraction is exact for 1/2 <= |r| <= 1.
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def gamma(x: float) -> float:
    """Lanczos approximation with the reflection formula below 1/2."""
    x = float(x)
    if is_nonpositive_integer(x):
        raise GammaPoleError(f"Gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (_sin_pi(x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    # Split the power to delay overflow for large arguments.
    half = t ** ((z + 0.5) / 2)
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


def pochhammer(a, k: int):
    """(a)_k = a (a+1) ... (a+k-1); exact when ``a`` is int or Fraction."""
    if k < 0:
        raise ValueError("k must be >= 0")
    exact = isinstance(a, (int, Fraction))
    out = Fraction(1) if exact else 1.0
    for i in range(k):
        out *= a + i
    return out


def _terminating_index(a) -> Optional[int]:
    if is_nonpositive_integer(a):
        return int(-a)
    return None


def hyp2f1_terms(a, b, c, z, count: int):
    """First ``count`` terms (a)_k (b)_k / ((c)_k k!) z^k of the series."""
    terms = []
    t = 1.0
    for k in range(count):
        terms.append(t)
        t *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
    return terms


def hyp2f1(a, b, c, z, tol: float = 1e-15, max_terms: int = 100_000) -> float:
    """Gauss series 2F1(a, b; c; z) for real arguments.

    Terminating series (a or b a nonpositive integer) are summed exactly when
    all inputs are rational.  Nonterminating series are summed until
    |term| < tol·|partial sum| and are only accepted for |z| <= 1 - 1e-8.
    """
    stop = [i for i in (_terminating_index(a), _terminating_index(b)) if i is not None]
    last = min(stop) if stop else None
    if is_nonpositive_integer(c) and (last is None or last >= -int(c) + 1):
        raise HypergeometricParameterError(f"c = {c} hits a pole before the series terminates")
    if last is not None:
        if all(isinstance(v, (int, Fraction)) for v in (a, b, c, z)):
            return float(hyp2f1_exact(Fraction(a), Fraction(b), Fraction(c), Fraction(z)))
        a, b, c, z = float(a), float(b), float(c), float(z)
        return math.fsum(hyp2f1_terms(a, b, c, z, last + 1))
    a, b, c, z = float(a), float(b), float(c), float(z)
    if abs(z) > 1 - 1e-8:
        raise HypergeometricParameterError(
            f"nonterminating series needs |z| <= 1 - 1e-8, got z = {z}; use gauss_value at z = 1"
        )
    total = 1.0
    comp = 0.0
    term = 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        # Kahan summation keeps the long near-boundary sums honest.
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if abs(term) < tol * abs(total):
            return total
    raise SeriesDivergenceError(
        f"2F1({a}, {b}; {c}; {z}) did not converge within {max_terms} terms"
    )


def hyp2f1_exact(a: Fraction, b: Fraction, c: Fraction, z: Fraction) -> Fraction:
    """Exact finite sum of a terminating series."""
    stop = [i for i in (_terminating_index(a), _terminating_index(b)) if i is not None]
    if not stop:
        raise HypergeometricParameterError("series does not terminate")
    total = Fraction(0)
    t = Fraction(1)
    for k in range(min(stop) + 1):
        total += t
        t = t * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
    return total


def gauss_value(a, b, c) -> float:
    """2F1(a, b; c; 1) = Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b)) for c - a - b > 0."""
    s = c - a - b
    if s <= 0:
        raise SeriesDivergenceError(f"2F1 at z = 1 diverges for c - a - b = {s} <= 0")
    if is_nonpositive_integer(c):
        raise GammaPoleError(f"Γ(c) has a pole at c = {c}")
    if is_nonpositive_integer(c - a) or is_nonpositive_integer(c - b):
        return 0.0
    return gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b))


def hyp2f1_near_one(a, b, c, z) -> float:
    """2F1 for z close to 1 through the connection formula in 1 - z.

    Needs c - a - b non-integer.  Used for sampling profiles near the
    boundary where the plain series would need millions of terms.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    s = c - a - b
    if s == math.floor(s):
        raise HypergeometricParameterError("connection formula needs non-integer c - a - b")
    w = 1.0 - z
    first = 0.0
    if not (is_nonpositive_integer(c - a) or is_nonpositive_integer(c - b)):
        first = gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b)) * hyp2f1(a, b, 1 - s, w)
    second = 0.0
    if not (is_nonpositive_integer(a) or is_nonpositive_integer(b)):
        second = (
            w**s * gamma(c) * gamma(-s) / (gamma(a) * gamma(b)) * hyp2f1(c - a, c - b, 1 + s, w)
        )
    return first + second


# -- radial solutions --------------------------------------------------------


@dataclass(frozen=True)
class RadialProfile:
    """t -> 2F1(-θ, n/2 - 1 - θ; n/2; t) on [0, 1), where t = |x|^2."""

    theta: Fraction
    n: int
    coefficients: Optional[Tuple[Fraction, ...]]  # exact form, when the series terminates

    @property
    def params(self) -> Tuple[Fraction, Fraction, Fraction]:
        half = Fraction(self.n, 2)
        return (-self.theta, half - 1 - self.theta, half)

    @property
    def bounded(self) -> bool:
        return self.theta > Fraction(-1, 2)

    @property
    def is_polynomial(self) -> bool:
        return self.coefficients is not None

    def __call__(self, t: float) -> float:
        return self.evaluate(t)

    def evaluate(self, t: float) -> float:
        a, b, c = self.params
        if self.coefficients is not None:
            return math.fsum(float(ck) * t**k for k, ck in enumerate(self.coefficients))
        if t > 0.75 and (c - a - b).denominator != 1:
            return hyp2f1_near_one(a, b, c, t)
        return hyp2f1(float(a), float(b), float(c), t)

    def derivative(self, t: float, order: int = 1) -> float:
        """d^k/dt^k via (a)_k (b)_k / (c)_k · 2F1(a+k, b+k; c+k; t)."""
        a, b, c = self.params
        if self.coefficients is not None:
            total = []
            for k, ck in enumerate(self.coefficients):
                if k >= order:
                    f = math.prod(range(k - order + 1, k + 1))
                    total.append(float(ck) * f * t ** (k - order))
            return math.fsum(total)
        scale = float(pochhammer(a, order) * pochhammer(b, order) / pochhammer(c, order))
        ak, bk, ck = a + order, b + order, c + order
        if t > 0.75 and (ck - ak - bk).denominator != 1:
            return scale * hyp2f1_near_one(ak, bk, ck, t)
        return scale * hyp2f1(float(ak), float(bk), float(ck), t)

    def series_coefficient(self, k: int) -> float:
        a, b, c = self.params
        return float(pochhammer(a, k) * pochhammer(b, k) / (pochhammer(c, k) * math.factorial(k)))

    def coefficient_magnitudes(self, kmax: int) -> list:
        """|c_k| for k = 0..kmax via the term ratio (avoids huge factorials)."""
        a, b, c = (float(v) for v in self.params)
        out = []
        ck = 1.0
        for k in range(kmax + 1):
            out.append(abs(ck))
            ck *= (a + k) * (b + k) / ((c + k) * (k + 1))
        return out

    def as_polynomial(self) -> ExactPolynomial:
        """The exact polynomial Σ c_k |x|^{2k} in n variables."""
        if self.coefficients is None:
            raise ValueError(f"Φ_θ is not a polynomial for θ = {self.theta}, n = {self.n}")
        rho = ExactPolynomial.norm_squared(self.n)
        out = ExactPolynomial.zero(self.n)
        power = ExactPolynomial.constant(self.n, 1)
        for ck in self.coefficients:
            out = out + power.scale(ck)
            power = power * rho
        return out


def phi_theta(theta, n: int) -> RadialProfile:
    theta = Fraction(theta)
    half = Fraction(n, 2)
    a, b, c = -theta, half - 1 - theta, half
    stop = [i for i in (_terminating_index(a), _terminating_index(b)) if i is not None]
    coeffs = None
    if stop:
        coeffs = []
        t = Fraction(1)
        for k in range(min(stop) + 1):
            coeffs.append(t)
            t = t * (a + k) * (b + k) / ((c + k) * (k + 1))
        coeffs = tuple(coeffs)
    return RadialProfile(theta, n, coeffs)


def c_theta(theta, n: int) -> float:
    """C_θ = Γ(n/2+θ) Γ(1+θ) / (Γ(n/2) Γ(1+2θ))."""
    theta = float(theta)
    return gamma(n / 2 + theta) * gamma(1 + theta) / (gamma(n / 2) * gamma(1 + 2 * theta))


def i_closed_form(a: float, b: float, n: int) -> float:
    """Closed form of ∫_B (1-|x|^2)^a / |x - e_1|^{n+a+b} dV; ``math.inf`` if divergent."""
    if not (a > -1 and b < 0):
        return math.inf
    return (
        math.pi ** (n / 2)
        * gamma(1 + a)
        * gamma(-b)
        / (gamma((n + a - b) / 2) * gamma((2 + a - b) / 2))
    )


def sphere_volume(n: int) -> float:
    """Surface area ω_{n-1} = 2π^{n/2}/Γ(n/2) of the unit sphere in R^n."""
    return 2 * math.pi ** (n / 2) / gamma(n / 2)


def ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / gamma(n / 2 + 1)


Profile = Callable[[float], float]

"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``n`` variables is a map from exponent tuples to nonzero
``Fraction`` coefficients.  The zero polynomial has an empty term map.

    x1**2 * x2 - 1/3   (n = 2)  ->  {(2, 1): Fraction(1), (0, 0): Fraction(-1, 3)}

Values are immutable; every operation returns a new polynomial.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]

# Coefficients beyond this magnitude are written as JSON strings.
_JSON_SAFE_INT = 2**53


class DimensionMismatch(ValueError):
    pass


class PolynomialFormatError(ValueError):
    """Raised for malformed polynomial JSON documents."""


def grlex_key(mono: Monomial) -> Tuple[int, Monomial]:
    # Ascending total degree, then ascending lexicographic exponents.
    return (sum(mono), mono)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


class ExactPolynomial:
    """Sparse polynomial in ``n`` variables with exact rational coefficients."""

    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Monomial, Scalar] | None = None):
        if n < 1:
            raise ValueError("dimension must be positive")
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n:
                raise DimensionMismatch(f"monomial {mono} has length {len(mono)}, expected {n}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = _as_fraction(coeff)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self._n = n
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: Dict[Monomial, Fraction]) -> "ExactPolynomial":
        # Trusted constructor: terms already validated and zero-free.
        obj = cls.__new__(cls)
        obj._n = n
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "ExactPolynomial":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, value: Scalar) -> "ExactPolynomial":
        c = _as_fraction(value)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def variable(cls, n: int, i: int) -> "ExactPolynomial":
        """The coordinate function x_{i+1} (``i`` is zero based)."""
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        mono = [0] * n
        mono[i] = 1
        return cls._raw(n, {tuple(mono): Fraction(1)})

    @classmethod
    def norm_squared(cls, n: int) -> "ExactPolynomial":
        """|x|^2 = x1^2 + ... + xn^2."""
        terms = {}
        for i in range(n):
            mono = [0] * n
            mono[i] = 2
            terms[tuple(mono)] = Fraction(1)
        return cls._raw(n, terms)

    @classmethod
    def one_minus_norm_squared(cls, n: int) -> "ExactPolynomial":
        return cls.constant(n, 1) - cls.norm_squared(n)

    # -- accessors --------------------------------------------------------

    @property
    def dimension(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterable[Tuple[Monomial, Fraction]]:
        return self._terms.items()

    def coefficient(self, mono: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def homogeneous_part(self, d: int) -> "ExactPolynomial":
        return ExactPolynomial._raw(self._n, {m: c for m, c in self._terms.items() if sum(m) == d})

    def homogeneous_parts(self) -> Dict[int, "ExactPolynomial"]:
        parts: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            parts.setdefault(sum(m), {})[m] = c
        return {d: ExactPolynomial._raw(self._n, t) for d, t in sorted(parts.items())}

    def sorted_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda mc: grlex_key(mc[0]))

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "ExactPolynomial") -> None:
        if self._n != other._n:
            raise DimensionMismatch(f"dimension {self._n} != {other._n}")

    def _coerce(self, other) -> "ExactPolynomial":
        if isinstance(other, ExactPolynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return ExactPolynomial.constant(self._n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return ExactPolynomial._raw(self._n, out)

    __radd__ = __add__

    def __neg__(self):
        return ExactPolynomial._raw(self._n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c: Scalar) -> "ExactPolynomial":
        c = _as_fraction(c)
        if not c:
            return ExactPolynomial.zero(self._n)
        return ExactPolynomial._raw(self._n, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, ExactPolynomial):
            return NotImplemented
        self._check(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return ExactPolynomial._raw(self._n, {m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "ExactPolynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = ExactPolynomial.constant(self._n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def partial(self, i: int) -> "ExactPolynomial":
        """Exact partial derivative with respect to x_{i+1}."""
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            e = m[i]
            if e:
                dm = m[:i] + (e - 1,) + m[i + 1:]
                out[dm] = out.get(dm, 0) + e * c
        return ExactPolynomial._raw(self._n, out)

    # -- evaluation -------------------------------------------------------

    def eval(self, x: Sequence, mode: str = "float"):
        """Evaluate at ``x``.

        ``mode="exact"`` requires rational coordinates and returns a Fraction;
        ``mode="float"`` sums the terms with ``math.fsum`` so the result does
        not depend on term order.
        """
        if len(x) != self._n:
            raise DimensionMismatch(f"point has {len(x)} coordinates, expected {self._n}")
        if mode == "exact":
            xs = [_as_fraction(v) for v in x]
            total = Fraction(0)
            for m, c in self._terms.items():
                t = c
                for v, e in zip(xs, m):
                    if e:
                        t *= v**e
                total += t
            return total
        if mode != "float":
            raise ValueError(f"unknown evaluation mode {mode!r}")
        xs = [float(v) for v in x]
        if not all(math.isfinite(v) for v in xs):
            raise ValueError("non-finite coordinate")
        parts = []
        for m, c in self._terms.items():
            t = float(c)
            for v, e in zip(xs, m):
                if e:
                    t *= v**e
            parts.append(t)
        return math.fsum(parts)

    def __call__(self, *x):
        if len(x) == 1 and isinstance(x[0], (list, tuple)):
            x = x[0]
        return self.eval(x, mode="exact" if all(isinstance(v, (int, Fraction)) for v in x) else "float")

    # -- comparison / hashing ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactPolynomial.constant(self._n, other)
        if not isinstance(other, ExactPolynomial):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"ExactPolynomial(n={self._n}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for m, c in reversed(self.sorted_terms()):
            vars_ = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(m) if e
            )
            if not vars_:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(vars_)
            elif c == -1:
                pieces.append("-" + vars_)
            else:
                pieces.append(f"{c}*{vars_}")
        return " + ".join(pieces).replace("+ -", "- ")

    # -- JSON -------------------------------------------------------------

    def to_dict(self) -> dict:
        terms = []
        for m, c in self.sorted_terms():
            num = c.numerator if abs(c.numerator) < _JSON_SAFE_INT else str(c.numerator)
            den = c.denominator if c.denominator < _JSON_SAFE_INT else str(c.denominator)
            terms.append({"exps": list(m), "num": num, "den": den})
        return {"n": self._n, "terms": terms}

    @classmethod
    def from_dict(cls, doc) -> "ExactPolynomial":
        if not isinstance(doc, dict) or "n" not in doc or "terms" not in doc:
            raise PolynomialFormatError("expected an object with keys 'n' and 'terms'")
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise PolynomialFormatError(f"invalid dimension {n!r}")
        if not isinstance(doc["terms"], list):
            raise PolynomialFormatError("'terms' must be a list")
        acc: Dict[Monomial, Fraction] = {}
        for t in doc["terms"]:
            if not isinstance(t, dict) or not {"exps", "num", "den"} <= t.keys():
                raise PolynomialFormatError(f"malformed term {t!r}")
            exps = t["exps"]
            if (
                not isinstance(exps, list)
                or len(exps) != n
                or not all(isinstance(e, int) and not isinstance(e, bool) for e in exps)
            ):
                raise PolynomialFormatError(f"exponents {exps!r} must be {n} integers")
            if any(e < 0 for e in exps):
                raise PolynomialFormatError(f"negative exponent in {exps!r}")
            num = _parse_int(t["num"], "num")
            den = _parse_int(t["den"], "den")
            if den <= 0:
                raise PolynomialFormatError("denominator must be a positive integer")
            mono = tuple(exps)
            acc[mono] = acc.get(mono, Fraction(0)) + Fraction(num, den)
        return cls(n, acc)

    def to_json(self) -> str:
        return emit_json(self)


def _parse_int(v, name: str) -> int:
    if isinstance(v, bool):
        raise PolynomialFormatError(f"{name} must be an integer")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v.strip())
        except ValueError:
            pass
    raise PolynomialFormatError(f"{name} must be an integer or integer string, got {v!r}")


def parse_json(text: str) -> ExactPolynomial:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolynomialFormatError(f"invalid JSON: {exc}") from exc
    return ExactPolynomial.from_dict(doc)


def emit_json(p: ExactPolynomial) -> str:
    """Canonical serialization: graded-lex term order, reduced coefficients."""
    return json.dumps(p.to_dict(), separators=(",", ":"))


def add(p: ExactPolynomial, q: ExactPolynomial) -> ExactPolynomial:
    return p + q


def mul(p: ExactPolynomial, q: ExactPolynomial) -> ExactPolynomial:
    return p * q


def evaluate(p: ExactPolynomial, x: Sequence, mode: str = "float"):
    return p.eval(x, mode)

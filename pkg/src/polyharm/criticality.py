"""Critical integrability exponents for N-harmonic functions on the unit ball.

All arithmetic is exact over ``Fraction`` when p and α are rational, so the
strict inequalities in membership tests never wobble.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, List, Optional, Union

Number = Union[int, Fraction, float]


class OutOfRangeError(ValueError):
    """p lies below (n-2)/(n-1), where the critical curve is not characterised."""


class Membership(enum.Enum):
    MEMBER = "member"
    NOT_MEMBER = "not-member"
    UNKNOWN = "unknown"


def _q(x: Number):
    # Keep floats as floats; everything else exact.
    return x if isinstance(x, float) else Fraction(x)


def p_threshold(n: int) -> Fraction:
    """(n-2)/(n-1); for n = 2 this is 0 and the range is read as p > 0."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return Fraction(n - 2, n - 1)


def p_in_range(p: Number, n: int) -> bool:
    p = _q(p)
    if p <= 0:
        return False
    return n == 2 or p >= p_threshold(n)


def _check_p(p) -> None:
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")


def b_jN(j: int, N: int, p: Number, n: int):
    if not 0 <= j <= N:
        raise ValueError(f"need 0 <= j <= N, got j={j}, N={N}")
    p = _q(p)
    _check_p(p)
    if j == 0:
        return -1 - (N - 1) * p
    return max(-1 - (N + j - 1) * p, -n - (N - j - n + 1) * p)


def a_jN(j: int, N: int, p: Number, n: int):
    if not 1 <= j <= N:
        raise ValueError(f"need 1 <= j <= N, got j={j}, N={N}")
    p = _q(p)
    return min(b_jN(j, N, p, n), -1 - (N - j) * p)


def beta_min_formula(N: int, p: Number, n: int):
    """min_{0<=j<=N} b_{j,N}(p), without any range check."""
    return min(b_jN(j, N, p, n) for j in range(N + 1))


def beta_piecewise(N: int, p: Number, n: int):
    """Closed piecewise form of the critical curve for n >= 3."""
    if n < 3:
        raise ValueError("piecewise form applies to n >= 3")
    p = _q(p)
    if not p_in_range(p, n):
        raise OutOfRangeError(f"p = {p} is below (n-2)/(n-1) = {p_threshold(n)}")
    if p < Fraction(n - 1, n):
        return -1 - N * p
    if p < 1:
        return -n - (N - n) * p
    return -1 - (N - 1) * p


def beta_branch(p: Number, n: int) -> int:
    """Index 1, 2 or 3 of the active piece for n >= 3 (0 for n = 2)."""
    if n == 2:
        return 0
    p = _q(p)
    if p < Fraction(n - 1, n):
        return 1
    return 2 if p < 1 else 3


def beta_critical(N: int, p: Number, n: int):
    if N < 1:
        raise ValueError("N must be >= 1")
    p = _q(p)
    _check_p(p)
    if not p_in_range(p, n):
        raise OutOfRangeError(
            f"β(N, p) is not characterised for p = {p} < (n-2)/(n-1) = {p_threshold(n)}"
        )
    beta = beta_min_formula(N, p, n)
    if n >= 3:
        piece = beta_piecewise(N, p, n)
        if isinstance(p, Fraction):
            assert beta == piece, f"min formula {beta} != piecewise {piece}"
        else:
            assert abs(beta - piece) <= 1e-12 * max(1.0, abs(piece)), (beta, piece)
    return beta


def admissible(p: Number, alpha: Number, N: int, n: int) -> Membership:
    p = _q(p)
    _check_p(p)
    if not p_in_range(p, n):
        return Membership.UNKNOWN
    return Membership.MEMBER if _q(alpha) > beta_critical(N, p, n) else Membership.NOT_MEMBER


def j_set(p: Number, alpha: Number, N: int, n: int) -> FrozenSet[int]:
    """Indices j in {0, ..., N-1} with α > a_{N-j,N}(p)."""
    if admissible(p, alpha, N, n) is not Membership.MEMBER:
        raise ValueError(f"(p, α) = ({p}, {alpha}) is not in the characterised admissible region")
    alpha = _q(alpha)
    return frozenset(j for j in range(N) if alpha > a_jN(N - j, N, p, n))


def u_membership(j: int, N: int, p: Number, alpha: Number, n: int) -> bool:
    """Whether U_{j,N} lies in L^p_α: α > b_{j,N}(p)."""
    return _q(alpha) > b_jN(j, N, p, n)


def principal_cell_bound(N: int, p: Number, n: int):
    p = _q(p)
    return min(-n - (N - n - 1) * p, -1 - (N - 2) * p)


def principal_cell(p: Number, alpha: Number, N: int, n: int) -> bool:
    """α <= min{-n-(N-n-1)p, -1-(N-2)p}, for p >= (n-2)/(n-1)."""
    p = _q(p)
    _check_p(p)
    if not p_in_range(p, n):
        raise OutOfRangeError(f"principal cell needs p >= (n-2)/(n-1), got p = {p}")
    return _q(alpha) <= principal_cell_bound(N, p, n)


def entangled_n2(p: Number, alpha: Number, N: int, n: int = 2) -> bool:
    """Entangled region in the plane: admissible, 0 < p < 1/3 and α <= -1-Np."""
    if n != 2:
        raise ValueError("the entangled region is only characterised for n = 2")
    p, alpha = _q(p), _q(alpha)
    if admissible(p, alpha, N, 2) is not Membership.MEMBER:
        return False
    return p < Fraction(1, 3) and alpha <= -1 - N * p


@dataclass(frozen=True)
class CriticalProfile:
    n: int
    N: int
    p: Fraction
    alpha: Optional[Fraction] = None

    def __post_init__(self):
        if self.n < 2 or self.N < 1:
            raise ValueError("need n >= 2 and N >= 1")
        _check_p(self.p)

    @property
    def b(self) -> List:
        return [b_jN(j, self.N, self.p, self.n) for j in range(self.N + 1)]

    @property
    def a(self) -> List:
        return [a_jN(j, self.N, self.p, self.n) for j in range(1, self.N + 1)]

    @property
    def beta(self):
        return beta_critical(self.N, self.p, self.n)

    @property
    def J(self) -> FrozenSet[int]:
        if self.alpha is None:
            raise ValueError("α not set")
        return j_set(self.p, self.alpha, self.N, self.n)


def p_grid(p_min: Fraction, p_max: Fraction, step: Fraction) -> List[Fraction]:
    if step <= 0:
        raise ValueError("step must be positive")
    if p_min > p_max:
        raise ValueError("p_min must not exceed p_max")
    out = []
    p = Fraction(p_min)
    while p <= p_max:
        out.append(p)
        p += step
    return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def critical_curve_rows(n: int, N: int, ps) -> List[dict]:
    rows = []
    for p in ps:
        p = _q(p)
        if p <= 0:
            raise ValueError("p must be positive")
        row = {"p": p}
        for j in range(N + 1):
            row[f"b_{j}"] = b_jN(j, N, p, n)
        for j in range(1, N + 1):
            row[f"a_{j}"] = a_jN(j, N, p, n)
        in_range = p_in_range(p, n)
        row["beta"] = beta_critical(N, p, n) if in_range else "unknown"
        row["in_range"] = in_range
        row["branch"] = beta_branch(p, n) if in_range else ""
        row["principal_cell_bound"] = principal_cell_bound(N, p, n) if in_range else "unknown"
        row["entangled_possible"] = n == 2 and p < Fraction(1, 3)
        rows.append(row)
    return rows


def critical_curve_csv(n: int, N: int, ps) -> str:
    """CSV with columns p, b_0..b_N, a_1..a_N, beta and region flags."""
    rows = critical_curve_rows(n, N, ps)
    header = (["p"] + [f"b_{j}" for j in range(N + 1)] + [f"a_{j}" for j in range(1, N + 1)]
              + ["beta", "in_range", "branch", "principal_cell_bound", "entangled_possible"])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row[h]) for h in header])
    return buf.getvalue()

"""Command-line front-end: ``polyharm <subcommand> [flags]``.

Exit codes: 0 success, 2 domain error, 3 input error, 4 tolerance failure.
JSON goes to stdout; if ``POLYHARM_OUT`` is set, a copy is written there too.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import math
import os
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import criticality as crit
from .exactpoly import ExactPolynomial, PolynomialFormatError
from .kernels import L_residual_jet, jet_eval, poisson_kernel_field, u_jn_vectorized
from .quadrature import i_numeric, weighted_norm
from .special import (
    GammaPoleError,
    HypergeometricParameterError,
    SeriesDivergenceError,
    gauss_value,
    hyp2f1,
    hyp2f1_exact,
    i_closed_form,
    is_nonpositive_integer,
)
from .structure import NotPolyharmonicError, cellular_decompose
from .verification import EXACT_ZERO, NONZERO, SHIPPED_SEED, run_suite

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_INPUT = 3
EXIT_TOLERANCE = 4

KERNEL_TOL = 1e-8


class CliError(Exception):
    def __init__(self, code: int, message: str, payload: Optional[dict] = None):
        super().__init__(message)
        self.code = code
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-1/2" and "-1e-3" through as values, not option flags
        self._negative_number_matcher = re.compile(r"^-(\d+(/\d+)?|\d*\.\d+([eE][-+]?\d+)?|\d+[eE][-+]?\d+)$")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def rational(text: str) -> Fraction:
    """Parse "num/den", an integer or a decimal string exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def load_schema(name: str) -> dict:
    """JSON Schema shipped for the output of subcommand ``name``."""
    ref = importlib.resources.files("polyharm") / "schemas" / f"{name}.json"
    return json.loads(ref.read_text())


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


# -- subcommands -------------------------------------------------------------


def cmd_verify(args) -> tuple:
    try:
        report = run_suite(args.seed, args.n_list, args.max_N, args.max_degree, args.cases)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc))
    code = EXIT_OK if report["status"] == "pass" else EXIT_TOLERANCE
    return _dump(report), code


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc}")


def _load_json(path: str):
    try:
        return json.loads(_read_input(path))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"malformed JSON: {exc}")


def _load_polynomial(doc) -> ExactPolynomial:
    try:
        return ExactPolynomial.from_dict(doc)
    except (PolynomialFormatError, ValueError, TypeError) as exc:
        raise CliError(EXIT_INPUT, f"malformed polynomial: {exc}")


def cmd_decompose(args) -> tuple:
    if args.N < 1:
        raise CliError(EXIT_INPUT, "N must be >= 1")
    u = _load_polynomial(_load_json(args.input))
    try:
        cells = cellular_decompose(u, args.N)
    except NotPolyharmonicError as exc:
        raise CliError(
            EXIT_DOMAIN,
            f"input is not {args.N}-harmonic",
            {"error": "not-polyharmonic", "N": args.N, "laplacian_power": exc.residue.to_dict()},
        )
    round_trip = cells.reconstruct() - u
    annihilation = [EXACT_ZERO if r.is_zero() else NONZERO for r in cells.annihilation_residuals()]
    doc = {
        "n": u.dimension,
        "N": args.N,
        "input": u.to_dict(),
        "components": [w.to_dict() for w in cells.components],
        "verification": {
            "round_trip": EXACT_ZERO if round_trip.is_zero() else NONZERO,
            "annihilation": annihilation,
        },
    }
    ok = round_trip.is_zero() and all(a == EXACT_ZERO for a in annihilation)
    return _dump(doc), EXIT_OK if ok else EXIT_TOLERANCE


def cmd_critcurve(args) -> tuple:
    if args.n < 2 or args.N < 1:
        raise CliError(EXIT_INPUT, "need n >= 2 and N >= 1")
    if args.step <= 0:
        raise CliError(EXIT_INPUT, "step must be positive")
    p_min = args.p_min
    if p_min is None:
        p_min = crit.p_threshold(args.n) if args.n > 2 else args.step
    if p_min <= 0 or args.p_max < p_min:
        raise CliError(EXIT_INPUT, "need 0 < p-min <= p-max")
    ps = crit.p_grid(p_min, args.p_max, args.step)
    return crit.critical_curve_csv(args.n, args.N, ps), EXIT_OK


def cmd_regions(args) -> tuple:
    n, N, p, alpha = args.n, args.N, args.p, args.alpha
    if n < 2 or N < 1:
        raise CliError(EXIT_INPUT, "need n >= 2 and N >= 1")
    if p <= 0:
        raise CliError(EXIT_DOMAIN, "p must be positive")
    membership = crit.admissible(p, alpha, N, n)
    known = membership is not crit.Membership.UNKNOWN
    member = membership is crit.Membership.MEMBER
    doc = {
        "inputs": {"n": n, "N": N, "p": str(p), "alpha": str(alpha)},
        "admissible": member if known else None,
        "membership": membership.value,
        "beta": str(crit.beta_critical(N, p, n)) if known else None,
        "J": sorted(crit.j_set(p, alpha, N, n)) if member else None,
        "u_membership": [crit.u_membership(j, N, p, alpha, n) for j in range(N + 1)],
        "principal_cell": crit.principal_cell(p, alpha, N, n) if known else None,
        "entangled": crit.entangled_n2(p, alpha, N) if n == 2 else None,
    }
    return _dump(doc), EXIT_OK


def cmd_integrate(args) -> tuple:
    a, b, n, tol = float(args.a), float(args.b), args.n, float(args.tol)
    if not 2 <= n <= 6:
        raise CliError(EXIT_DOMAIN, "n must lie in 2..6")
    if tol <= 0:
        raise CliError(EXIT_INPUT, "tol must be positive")
    closed = i_closed_form(a, b, n)
    doc = {"inputs": {"a": str(args.a), "b": str(args.b), "n": n, "tol": tol}}
    if math.isinf(closed):
        doc.update(finite=False, closed_form=None, numeric=None, relative_error=None, verdict="divergent")
        return _dump(doc), EXIT_OK
    numeric = i_numeric(a, b, n, tol=min(tol, 1e-8))
    rel = abs(numeric - closed) / abs(closed)
    ok = rel <= tol
    doc.update(finite=True, closed_form=closed, numeric=numeric, relative_error=rel,
               verdict="ok" if ok else "fail")
    return _dump(doc), EXIT_OK if ok else EXIT_TOLERANCE


def _random_interior_points(rng: np.random.Generator, n: int, count: int, r_max: float = 0.95) -> np.ndarray:
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    r = r_max * rng.random(count) ** (1.0 / n)
    return g * r[:, None]


def cmd_kernelcheck(args) -> tuple:
    theta, n = args.theta, args.n
    if n < 2 or args.points < 0:
        raise CliError(EXIT_INPUT, "need n >= 2 and points >= 0")
    if theta <= Fraction(-1, 2):
        raise CliError(EXIT_DOMAIN, "θ must exceed -1/2")
    e1 = np.zeros(n)
    e1[0] = 1.0
    try:
        field = poisson_kernel_field(float(theta), e1, n)
    except GammaPoleError as exc:
        raise CliError(EXIT_DOMAIN, str(exc))
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    th = float(theta)
    for x in _random_interior_points(rng, n, args.points):
        jet = jet_eval(field, x)
        worst = max(worst, abs(L_residual_jet(th, jet, x)) / (1.0 + abs(float(jet.v))))
    ok = worst <= KERNEL_TOL
    doc = {
        "inputs": {"theta": str(theta), "n": n, "points": args.points, "seed": args.seed},
        "max_relative_residual": worst,
        "tolerance": KERNEL_TOL,
        "verdict": "ok" if ok else "fail",
    }
    return _dump(doc), EXIT_OK if ok else EXIT_TOLERANCE


def cmd_hyp2f1(args) -> tuple:
    a, b, c, z = args.a, args.b, args.c, args.z
    doc = {"inputs": {"a": str(a), "b": str(b), "c": str(c), "z": str(z)}, "exact": None}
    try:
        terminating = is_nonpositive_integer(a) or is_nonpositive_integer(b)
        if terminating:
            exact = hyp2f1_exact(a, b, c, z)
            doc.update(method="terminating", value=float(exact), exact=str(exact))
        elif z == 1:
            doc.update(method="gauss-summation", value=gauss_value(a, b, c))
        else:
            doc.update(method="series", value=hyp2f1(a, b, c, z))
    except (HypergeometricParameterError, SeriesDivergenceError, GammaPoleError, ZeroDivisionError) as exc:
        raise CliError(EXIT_DOMAIN, str(exc))
    return _dump(doc), EXIT_OK


def _polynomial_batch(u: ExactPolynomial) -> Callable[[np.ndarray], np.ndarray]:
    terms = [(np.array(m), float(c)) for m, c in u.items()]

    def f(X):
        X = np.asarray(X, dtype=float)
        out = np.zeros(len(X))
        for mono, c in terms:
            out += c * np.prod(X**mono, axis=1)
        return out

    return f


def _load_norm_target(doc):
    """Either a polynomial document or {"family": "U", "j": j, "N": N, "n": n}."""
    if isinstance(doc, dict) and doc.get("family") == "U":
        try:
            j, N, n = int(doc["j"]), int(doc["N"]), int(doc["n"])
        except (KeyError, TypeError, ValueError):
            raise CliError(EXIT_INPUT, "U family needs integer j, N and n")
        if not (0 <= j <= N and N >= 1 and 2 <= n <= 6):
            raise CliError(EXIT_DOMAIN, "need 0 <= j <= N, N >= 1, 2 <= n <= 6")
        pole = tuple([1.0] + [0.0] * (n - 1)) if j > 0 else None
        return u_jn_vectorized(j, N, n), n, pole, {"family": "U", "j": j, "N": N, "n": n}
    u = _load_polynomial(doc)
    if not 2 <= u.dimension <= 6:
        raise CliError(EXIT_DOMAIN, "n must lie in 2..6")
    return _polynomial_batch(u), u.dimension, None, {"polynomial": u.to_dict()}


def cmd_norm(args) -> tuple:
    if args.p <= 0:
        raise CliError(EXIT_DOMAIN, "p must be positive")
    if args.levels < 5:
        raise CliError(EXIT_INPUT, "levels must be >= 5")
    f, n, pole, target = _load_norm_target(_load_json(args.input))
    res = weighted_norm(f, float(args.p), float(args.alpha), n, range(1, args.levels + 1), pole=pole)
    doc = {
        "inputs": {"target": target, "p": str(args.p), "alpha": str(args.alpha), "levels": args.levels},
        "radii": list(res.radii),
        "truncated": list(res.truncated),
        "verdict": res.verdict,
    }
    return _dump(doc), EXIT_OK


# -- driver ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyharm", description="Polyharmonic functions on the unit ball.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run the exact identity suites")
    p.add_argument("--seed", type=int, default=SHIPPED_SEED)
    p.add_argument("--n-list", type=int_list, default=[2, 3, 4])
    p.add_argument("--max-N", dest="max_N", type=int, default=4)
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--cases", type=int, default=200)
    p.set_defaults(func=cmd_verify, ext="json")

    p = sub.add_parser("decompose", help="cellular decomposition of an N-harmonic polynomial")
    p.add_argument("--in", dest="input", required=True, help="polynomial JSON file, or - for stdin")
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_decompose, ext="json")

    p = sub.add_parser("critcurve", help="CSV of the critical exponents over a p grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p-min", type=rational, default=None)
    p.add_argument("--p-max", type=rational, default=Fraction(5))
    p.add_argument("--step", type=rational, default=Fraction(1, 100))
    p.set_defaults(func=cmd_critcurve, ext="csv")

    p = sub.add_parser("regions", help="classify (p, α)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=rational, required=True)
    p.add_argument("--alpha", type=rational, required=True)
    p.set_defaults(func=cmd_regions, ext="json")

    p = sub.add_parser("integrate", help="model integral: closed form against quadrature")
    p.add_argument("--a", type=rational, required=True)
    p.add_argument("--b", type=rational, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_integrate, ext="json")

    p = sub.add_parser("kernelcheck", help="L_θ annihilation of the θ-Poisson kernel")
    p.add_argument("--theta", type=rational, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=SHIPPED_SEED)
    p.set_defaults(func=cmd_kernelcheck, ext="json")

    p = sub.add_parser("hyp2f1", help="Gauss hypergeometric function")
    for name in ("a", "b", "c", "z"):
        p.add_argument(f"--{name}", type=rational, required=True)
    p.set_defaults(func=cmd_hyp2f1, ext="json")

    p = sub.add_parser("norm", help="truncated weighted norms and a finiteness verdict")
    p.add_argument("--in", dest="input", required=True,
                   help='polynomial JSON, or {"family": "U", "j": .., "N": .., "n": ..}')
    p.add_argument("--p", type=rational, required=True)
    p.add_argument("--alpha", type=rational, required=True)
    p.add_argument("--levels", type=int, default=12)
    p.set_defaults(func=cmd_norm, ext="json")
    return parser


def _write_artifact(command: str, ext: str, text: str) -> None:
    out_dir = os.environ.get("POLYHARM_OUT")
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{command}.{ext}").write_text(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = args.func(args)
    except CliError as exc:
        if exc.payload is not None:
            sys.stderr.write(_dump(exc.payload))
        sys.stderr.write(f"polyharm {args.command}: {exc}\n")
        return exc.code
    sys.stdout.write(text)
    _write_artifact(args.command, args.ext, text)
    return code


if __name__ == "__main__":
    sys.exit(main())

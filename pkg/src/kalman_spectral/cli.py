"""Command-line front end: ``kalman-spectral {gain,verify,sweep}``.

Problems are read from a small JSON document::

    {"n": 2, "m": 1,
     "P": [2.0, 0.5, 0.5, 1.0], "R": [0.1], "H": [1.0, 0.0]}

with matrices as row-major flat lists, or with a seeded random block in
place of the matrices::

    {"n": 3, "m": 2,
     "random": {"seed": 7, "log10_eig_range_P": [-2, 2],
                "log10_eig_range_R": [-2, 2], "H_mode": "gaussian"}}

Exit codes: 0 success / all checks pass, 1 a verification check failed,
2 malformed input or flags, 3 input that parses but is invalid (e.g. a
covariance that is not positive definite), 4 file I/O error.
"""

import argparse
import json
import math
import sys

import numpy as np

from .exceptions import EvalAtEigenvalue, NotPositiveDefinite
from .kalman import H_MODES, KalmanProblem, posterior_cov, random_problem
from .linalg import char_poly_from_spectrum, max_norm, sym_eigen
from .objectives import (
    CharMag,
    CoeffAbsSum,
    CoefficientMag,
    Det,
    ElemSym,
    LogCharMag,
    SmallestEig,
    SymmetricPoly,
    SymmetricPolySpec,
    Trace,
    evaluate_on_cov,
)
from .verify import ProbeConfig, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_IO = 4

STREAM_SWEEP = 4

CSV_HEADER = "epsilon,objective_value,objective_value_at_kstar,margin"

_RANDOM_KEYS = {"seed", "log10_eig_range_P", "log10_eig_range_R", "H_mode"}


class CliError(Exception):
    """Carries the process exit code along with the message."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _parse_error(message):
    return CliError(EXIT_PARSE, message)


# ---------------------------------------------------------------------------
# problem files


def _int_field(doc, key):
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise _parse_error(f"'{key}' must be a positive integer")
    return value


def _number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _parse_error(f"'{key}' must contain only numbers")
    if not math.isfinite(value):
        raise _parse_error(f"'{key}' must contain only finite numbers")
    return float(value)


def _matrix_field(doc, key, rows, cols):
    value = doc.get(key)
    if not isinstance(value, list):
        raise _parse_error(f"'{key}' must be a flat row-major list of {rows * cols} numbers")
    if len(value) != rows * cols:
        raise _parse_error(
            f"'{key}' must have {rows * cols} entries ({rows}x{cols}), got {len(value)}"
        )
    return np.array([_number(x, key) for x in value]).reshape(rows, cols)


def _range_field(block, key):
    value = block.get(key, [-2.0, 2.0])
    if not isinstance(value, list) or len(value) != 2:
        raise _parse_error(f"'random.{key}' must be a list [lo, hi]")
    return tuple(_number(x, f"random.{key}") for x in value)


def parse_problem(doc):
    """Build a :class:`KalmanProblem` from a decoded problem document.

    Raises
    ------
    CliError
        Exit code 2 for structural problems, 3 for SPD or range failures.
    """
    if not isinstance(doc, dict):
        raise _parse_error("problem file must contain a JSON object")
    explicit = {"P", "R", "H"} & doc.keys()
    unknown = doc.keys() - {"n", "m", "P", "R", "H", "random"}
    if unknown:
        raise _parse_error(f"unknown key '{sorted(unknown)[0]}'")
    n = _int_field(doc, "n")
    m = _int_field(doc, "m")
    if ("random" in doc) == bool(explicit):
        raise _parse_error("give either all of 'P', 'R', 'H' or a 'random' block, not both")

    if "random" in doc:
        block = doc["random"]
        if not isinstance(block, dict):
            raise _parse_error("'random' must be an object")
        unknown = block.keys() - _RANDOM_KEYS
        if unknown:
            raise _parse_error(f"unknown key 'random.{sorted(unknown)[0]}'")
        seed = block.get("seed")
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise _parse_error("'random.seed' must be a nonnegative integer")
        range_p = _range_field(block, "log10_eig_range_P")
        range_r = _range_field(block, "log10_eig_range_R")
        h_mode = block.get("H_mode", "gaussian")
        if h_mode not in H_MODES:
            raise _parse_error(f"'random.H_mode' must be one of {', '.join(H_MODES)}")
        for key, (lo, hi) in (("log10_eig_range_P", range_p), ("log10_eig_range_R", range_r)):
            if lo > hi:
                raise CliError(EXIT_INVALID, f"'random.{key}' needs lo <= hi")
        try:
            return random_problem(n, m, seed, range_p, range_r, h_mode)
        except NotPositiveDefinite as exc:
            raise CliError(EXIT_INVALID, str(exc)) from exc

    missing = {"P", "R", "H"} - explicit
    if missing:
        raise _parse_error(f"missing key '{sorted(missing)[0]}'")
    P = _matrix_field(doc, "P", n, n)
    R = _matrix_field(doc, "R", m, m)
    H = _matrix_field(doc, "H", m, n)
    try:
        return KalmanProblem(P, R, H)
    except NotPositiveDefinite as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc


def load_problem(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _parse_error(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return parse_problem(doc)


def problem_to_dict(prob):
    """Explicit-matrix problem document; floats survive a JSON round trip."""
    return {
        "n": prob.n,
        "m": prob.m,
        "P": [float(x) for x in prob.P.ravel()],
        "R": [float(x) for x in prob.R.ravel()],
        "H": [float(x) for x in prob.H.ravel()],
    }


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror}") from exc


# ---------------------------------------------------------------------------
# flag parsing


def load_sympoly(path, n):
    """Read a symmetric polynomial: one term per line, ``coefficient a_1 .. a_n``.

    Blank lines and lines starting with ``#`` are ignored.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from exc
    terms = []
    for lineno, line in enumerate(lines, 1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        try:
            coeff = float(fields[0])
            exps = [int(f) for f in fields[1:]]
        except ValueError as exc:
            raise _parse_error(f"{path}:{lineno}: expected a number then integer exponents") from exc
        if len(exps) != n:
            raise CliError(EXIT_INVALID, f"{path}:{lineno}: expected {n} exponents, got {len(exps)}")
        terms.append((coeff, exps))
    try:
        return SymmetricPolySpec(terms)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, f"{path}: {exc}") from exc


def parse_objective(text, n):
    """``NAME[:PARAM]`` to an objective for an ``n``-dimensional posterior."""
    name, sep, param = text.partition(":")
    plain = {"trace": Trace, "det": Det, "lmin": SmallestEig, "coeffsum": CoeffAbsSum}
    if name in plain:
        if sep:
            raise _parse_error(f"objective '{name}' takes no parameter")
        return plain[name]()
    if not param:
        raise _parse_error(f"objective '{name}' needs a parameter ({name}:VALUE)")
    if name in ("charmag", "logcharmag"):
        try:
            lam = float(param)
        except ValueError as exc:
            raise _parse_error(f"objective '{name}': lambda must be a number") from exc
        if not math.isfinite(lam):
            raise _parse_error(f"objective '{name}': lambda must be finite")
        return CharMag(lam) if name == "charmag" else LogCharMag(lam)
    if name in ("coeff", "esym"):
        try:
            index = int(param)
        except ValueError as exc:
            raise _parse_error(f"objective '{name}': index must be an integer") from exc
        try:
            spec = CoefficientMag(index) if name == "coeff" else ElemSym(index)
            spec.check_dim(n)
        except ValueError as exc:
            raise CliError(EXIT_INVALID, f"objective '{text}': {exc}") from exc
        return spec
    if name == "sympoly-file":
        return SymmetricPoly(load_sympoly(param, n))
    raise _parse_error(f"unknown objective '{name}'")


def parse_epsilons(text):
    """``"lo,hi,count"`` with ``lo < hi`` and ``count >= 2``."""
    parts = text.split(",")
    if len(parts) != 3:
        raise _parse_error("--epsilons must look like lo,hi,count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise _parse_error("--epsilons must look like lo,hi,count") from exc
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi or count < 2:
        raise _parse_error("--epsilons needs finite lo < hi and count >= 2")
    return lo, hi, count


def _sweep_direction(text, prob, seed):
    if text == "random":
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(STREAM_SWEEP,)))
        d = rng.standard_normal((prob.n, prob.m))
        return d / max_norm(d)
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise _parse_error("--direction must be 'random' or n*m comma-separated numbers") from exc
    if len(values) != prob.n * prob.m:
        raise CliError(EXIT_INVALID, f"--direction needs {prob.n * prob.m} entries, got {len(values)}")
    return np.array(values).reshape(prob.n, prob.m)


# ---------------------------------------------------------------------------
# subcommands


def _g12(x):
    return f"{float(x):.12g}"


def _matrix_lines(a):
    return ["  " + "  ".join(_g12(x) for x in row) for row in np.atleast_2d(a)]


def format_gain(prob):
    """Text block printed by ``gain``."""
    post = prob.posterior
    spectrum = sym_eigen(post)
    coeffs = char_poly_from_spectrum(spectrum)
    lines = ["K* ="] + _matrix_lines(prob.gain)
    lines += ["P_K* ="] + _matrix_lines(post)
    lines.append(f"trace = {_g12(np.trace(post))}")
    lines.append(f"det = {_g12(np.prod(spectrum.eigenvalues))}")
    lines.append("eigenvalues = " + " ".join(_g12(x) for x in spectrum.eigenvalues))
    lines.append("coefficients a_0..a_n = " + " ".join(_g12(x) for x in coeffs))
    return "\n".join(lines) + "\n"


def cmd_gain(args):
    prob = load_problem(args.problem)
    sys.stdout.write(format_gain(prob))
    if args.emit_problem:
        _write_text(args.emit_problem, json.dumps(problem_to_dict(prob)) + "\n")
    return EXIT_OK


def cmd_verify(args):
    prob = load_problem(args.problem)
    lo, hi, count = parse_epsilons(args.epsilons)
    if lo <= 0:
        raise _parse_error("verify needs positive epsilons")
    if args.directions < 1:
        raise _parse_error("--directions must be positive")
    cfg = ProbeConfig(
        num_directions=args.directions,
        epsilons=tuple(float(e) for e in np.geomspace(lo, hi, count)),
        seed=args.seed,
        grid=args.grid,
    )
    report = run_suite(prob, cfg)
    if args.report:
        _write_text(args.report, "".join(line + "\n" for line in report.to_lines()))
    sys.stdout.write(report.table() + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def sweep_rows(prob, spec, direction, epsilons):
    """``(epsilon, value, value_at_K*, margin)`` along ``K* + epsilon * direction``.

    A point where the objective is undefined (e.g. ``logcharmag`` exactly
    at an eigenvalue) gets ``nan`` value and margin.
    """
    base = float(evaluate_on_cov(spec, prob.posterior))
    rows = []
    for eps in epsilons:
        K = prob.gain + eps * direction
        try:
            value = float(evaluate_on_cov(spec, posterior_cov(prob, K)))
        except EvalAtEigenvalue:
            value = math.nan
        rows.append((float(eps), value, base, value - base))
    return rows


def format_csv(rows):
    lines = [CSV_HEADER]
    lines += [",".join(f"{x:.17g}" for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_sweep(args):
    prob = load_problem(args.problem)
    lo, hi, count = parse_epsilons(args.epsilons)
    spec = parse_objective(args.objective, prob.n)
    direction = _sweep_direction(args.direction, prob, args.seed)
    try:
        rows = sweep_rows(prob, spec, direction, np.linspace(lo, hi, count))
    except EvalAtEigenvalue as exc:
        raise CliError(EXIT_INVALID, f"objective undefined at K*: {exc}") from exc
    _write_text(args.output, format_csv(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # argparse already exits with 2 on bad flags; keep that, but route
    # through one place so the message format matches the other errors
    def error(self, message):
        raise _parse_error(message)


def _seed(text):
    value = int(text)
    if value < 0:
        raise ValueError(text)
    return value


def build_parser():
    parser = _Parser(prog="kalman-spectral",
                     description="Optimal Kalman gain: compute, certify, sweep.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gain", help="print K*, the posterior covariance, spectrum and coefficients")
    p.add_argument("problem", help="problem file (JSON)")
    p.add_argument("--emit-problem", metavar="PATH",
                   help="also write the problem with explicit matrices to PATH")
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("verify", help="run the full verification suite")
    p.add_argument("problem")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--report", metavar="PATH", help="write JSON-lines records to PATH")
    p.add_argument("--grid", action="store_true", help="add the grid search (n*m <= 4)")
    p.add_argument("--directions", type=int, default=100)
    p.add_argument("--epsilons", default="1e-2,1e-1,2",
                   help="perturbation sizes lo,hi,count (log-spaced)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="objective along K* + eps * direction, as CSV")
    p.add_argument("problem")
    p.add_argument("--output", metavar="PATH", required=True)
    p.add_argument("--objective", default="trace", help="NAME[:PARAM]")
    p.add_argument("--direction", default="random",
                   help="'random' or n*m comma-separated numbers, row-major")
    p.add_argument("--epsilons", default="1e-2,1e-1,2",
                   help="sweep range lo,hi,count (evenly spaced)")
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except np.linalg.LinAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

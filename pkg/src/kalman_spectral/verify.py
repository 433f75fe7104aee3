"""Certification harness for the optimality of the Kalman gain.

The checks come in three flavours:

* first order: analytic gradients at ``K*`` vanish, cross-checked with
  central finite differences;
* local: random perturbations ``K* + eps * D`` never decrease the objective;
* global: the Loewner identity ``P_K - P_{K*} = (K - K*) S (K - K*)^T`` and,
  for tiny problems, an exhaustive grid search.

Every check returns :class:`Record` objects and :func:`run_suite` collects
them into a :class:`VerificationReport`.  A failing check never aborts the
suite.

All randomness comes from ``ProbeConfig.seed`` through fixed child streams
(``SeedSequence(seed, spawn_key=(stream,))``), so a report is a pure
function of the problem and the configuration.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import DegenerateEigenvalue, GridTooLarge, OverflowRisk
from .kalman import (
    gain_residual,
    loewner_gap,
    posterior_cov,
    posterior_cov_standard,
)
from .linalg import max_norm, sym_eigen, sym_eigvals
from .objectives import (
    CharMag,
    CoeffAbsSum,
    CoefficientMag,
    Det,
    ElemSym,
    LogCharMag,
    SmallestEig,
    SymmetricPoly,
    Trace,
    random_symmetric_poly,
)

__all__ = [
    "ClaimKind",
    "ProbeConfig",
    "Record",
    "VerificationReport",
    "finite_diff_grad",
    "gradient_oracle_check",
    "gradient_oracle_records",
    "critical_point_check",
    "critical_point_records",
    "local_min_probe",
    "local_min_records",
    "grid_oracle",
    "grid_check",
    "loewner_identity_check",
    "trace_limit_check",
    "coefficient_parity_study",
    "sample_lambdas",
    "critical_point_catalog",
    "gradient_catalog",
    "local_min_catalog",
    "random_gains",
    "run_suite",
]

log = logging.getLogger(__name__)

CRITICAL_TOL = 1e-8
MARGIN_RTOL = 1e-12
GAIN_RESIDUAL_TOL = 1e-10
JOSEPH_TOL = 1e-10
LOEWNER_TOL = 1e-9
TRACE_LIMIT_TOL = 1e-3
GRAD_ORACLE_RTOL = 1e-5
# finite differences at K* only have to vanish to their own noise floor
FD_ZERO_RTOL = 1e-6
LAMBDA_GUARD = 1e-6
# central differences need lam well clear of the spectrum: log|lam - lam_i|
# bends on the scale of the gap
FD_LAMBDA_GUARD = 5e-3
GRID_MAX_DIM = 4
GRID_CHUNK = 1 << 14
N_LOEWNER_GAINS = 5
N_GRADIENT_GAINS = 3
GRADIENT_SPREAD = 0.3
N_SYMPOLY = 3

# child streams of ProbeConfig.seed
STREAM_DIRECTIONS = 0
STREAM_LOEWNER = 1
STREAM_SYMPOLY = 2
STREAM_GRADIENT = 3


def _rng(seed, stream):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def _scale(value):
    return max(1.0, abs(float(value)))


def _num(x):
    return None if x is None else float(x)


class ClaimKind(str, Enum):
    GAIN_RESIDUAL = "GainResidual"
    JOSEPH_EQUALITY = "JosephEquality"
    CRITICAL_POINT = "CriticalPoint"
    GRADIENT_ORACLE = "GradientOracle"
    LOCAL_MIN = "LocalMin"
    GLOBAL_MIN_GRID = "GlobalMinGrid"
    LOEWNER_IDENTITY = "LoewnerIdentity"
    TRACE_LIMIT = "TraceLimit"
    COEFF_EVEN_MIN = "CoeffEvenMin"


@dataclass(frozen=True)
class ProbeConfig:
    """Knobs for the perturbation, finite-difference and grid checks."""

    num_directions: int = 100
    epsilons: tuple = (1e-2, 1e-1)
    seed: int = 0
    fd_step_scale: float = float(np.finfo(float).eps ** (1.0 / 3.0))
    grid: bool = True
    grid_points: int = 41

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps or any(e <= 0 for e in eps) or list(eps) != sorted(eps):
            raise ValueError("epsilons must be positive and sorted ascending")
        if self.num_directions < 1:
            raise ValueError("num_directions must be positive")
        if not self.fd_step_scale > 0:
            raise ValueError("fd_step_scale must be positive")
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")
        object.__setattr__(self, "epsilons", eps)


# status values: "pass"/"fail" are asserted, "skipped"/"logged" are not
@dataclass
class Record:
    claim: ClaimKind
    objective: str
    status: str
    value: float = None
    grad_norm: float = None
    fd_norm: float = None
    margin: float = None
    fd_error: float = None
    grid_gap: float = None
    residual: float = None
    tolerance: float = None
    detail: str = ""

    @property
    def asserted(self):
        return self.status in ("pass", "fail")

    @property
    def failed(self):
        return self.status == "fail"

    def to_dict(self):
        return {
            "claim": self.claim.value,
            "objective": self.objective,
            "status": self.status,
            "value": _num(self.value),
            "grad_norm": _num(self.grad_norm),
            "fd_norm": _num(self.fd_norm),
            "margin": _num(self.margin),
            "fd_error": _num(self.fd_error),
            "grid_gap": _num(self.grid_gap),
            "residual": _num(self.residual),
            "tolerance": _num(self.tolerance),
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)

    @property
    def passed(self):
        return not any(r.failed for r in self.records)

    @property
    def failures(self):
        return [r for r in self.records if r.failed]

    def to_lines(self):
        """One JSON object per record, fixed field order."""
        return [json.dumps(r.to_dict()) for r in self.records]

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.to_lines():
                fh.write(line + "\n")

    def table(self):
        rows = [("#", "claim", "objective", "status", "key figure", "detail")]
        for i, r in enumerate(self.records):
            label = r.objective if len(r.objective) <= 40 else r.objective[:37] + "..."
            rows.append((str(i), r.claim.value, label, r.status.upper(),
                         _key_figure(r), r.detail))
        widths = [max(len(row[c]) for row in rows) for c in range(5)]
        lines = []
        for row in rows:
            cells = [row[c].ljust(widths[c]) for c in range(5)]
            lines.append("  ".join(cells + [row[5]]).rstrip())
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"overall: {verdict} ({len(self.failures)} failed of "
                     f"{sum(r.asserted for r in self.records)} asserted)")
        return "\n".join(lines)


def _key_figure(r):
    for name in ("margin", "fd_error", "grid_gap", "residual", "grad_norm"):
        v = getattr(r, name)
        if v is not None:
            return f"{name}={v:.3e}"
    return ""


# ---------------------------------------------------------------------------
# shared evaluation helpers


def _values(specs, cov):
    """Evaluate several objectives on one covariance stack.

    Returns a list aligned with ``specs``; entries are arrays or the
    exception raised by that objective.
    """
    evals = None
    if any(s.needs_spectrum for s in specs):
        evals = sym_eigvals(cov)
    out = []
    for s in specs:
        try:
            s.check_dim(cov.shape[-1])
            out.append(np.asarray(s.evaluate(cov, evals), dtype=float))
        except (ValueError, ArithmeticError) as exc:
            out.append(exc)
    return out


def _analytic_grads(prob, K, specs):
    cov = posterior_cov(prob, K)
    spectrum = sym_eigen(cov)
    residual = gain_residual(prob, K)
    out = []
    for s in specs:
        try:
            s.check_dim(prob.n)
            out.append(2.0 * s.grad_cov(cov, spectrum) @ residual)
        except (ValueError, ArithmeticError) as exc:
            out.append(exc)
    return out


def _fd_steps(K, cfg):
    return cfg.fd_step_scale * np.maximum(1.0, np.abs(K))


def _fd_grads(prob, K, specs, cfg):
    # central differences for every entry of K, all entries and both signs
    # stacked into one batch of posterior covariances
    K = np.asarray(K, dtype=float)
    n, m = K.shape
    steps = _fd_steps(K, cfg)
    basis = np.zeros((n * m, n, m))
    rows, cols = np.divmod(np.arange(n * m), m)
    basis[np.arange(n * m), rows, cols] = steps.ravel()
    gains = np.concatenate([K + basis, K - basis])
    values = _values(specs, posterior_cov(prob, gains))
    out = []
    for v in values:
        if isinstance(v, Exception):
            out.append(v)
            continue
        diff = (v[: n * m] - v[n * m:]).reshape(n, m)
        out.append(diff / (2.0 * steps))
    return out


def finite_diff_grad(prob, K, spec, cfg=ProbeConfig()):
    """Central-difference gradient of ``K -> phi(P_K)``.

    The step for entry ``(i, j)`` is ``fd_step_scale * max(1, |K_ij|)``.
    """
    g = _fd_grads(prob, K, [spec], cfg)[0]
    if isinstance(g, Exception):
        raise g
    return g


# ---------------------------------------------------------------------------
# lambda sampling and objective catalogs


def sample_lambdas(evals, guard=LAMBDA_GUARD):
    """Points off the spectrum: below, between and above the eigenvalues.

    Returns ``(below, between, above)`` lists: ``0.5 lam_1`` and
    ``0.9 lam_1``; midpoints of consecutive eigenvalues more than
    ``2 * guard * lam_n`` apart; and ``lam_n + max(1, 2 * guard * lam_n)``.
    Every sample is therefore at least ``guard * lam_n`` from the spectrum.
    """
    evals = np.asarray(evals, dtype=float)
    lam_1, lam_n = float(evals[0]), float(evals[-1])
    min_gap = 2.0 * guard * lam_n
    below = [0.5 * lam_1, 0.9 * lam_1]
    between = [
        0.5 * (float(a) + float(b))
        for a, b in zip(evals[:-1], evals[1:])
        if b - a > min_gap
    ]
    above = [lam_n + max(1.0, min_gap)]
    return below, between, above


def critical_point_catalog(n, evals, rng, n_sympoly=N_SYMPOLY, guard=LAMBDA_GUARD):
    """Every objective whose criticality at ``K*`` is asserted.

    ``evals`` is the posterior spectrum used to place the ``LogCharMag``
    parameters; ``rng`` draws the random symmetric polynomials.
    """
    below, between, above = sample_lambdas(evals, guard)
    specs = [Trace(), Det(), SmallestEig()]
    specs += [LogCharMag(lam) for lam in below + between + above]
    specs += [CoefficientMag(i) for i in range(n)]
    specs += [ElemSym(k) for k in range(1, n + 1)]
    specs.append(CoeffAbsSum())
    specs += [SymmetricPoly(random_symmetric_poly(n, rng)) for _ in range(n_sympoly)]
    return specs


def gradient_catalog(n, evals, rng, n_sympoly=N_SYMPOLY):
    """Critical-point catalog plus the ``CharMag`` probes, with ``lam``
    kept far enough from ``evals`` for central differences to resolve."""
    specs = critical_point_catalog(n, evals, rng, n_sympoly, guard=FD_LAMBDA_GUARD)
    lam_1 = float(evals[0])
    specs += [CharMag(lam) for lam in (-lam_1, 0.0, 0.5 * lam_1, 0.9 * lam_1)]
    return specs


def local_min_catalog(evals):
    """Objectives minimized (not just critical) at ``K*``."""
    lam_1 = float(evals[0])
    specs = [Trace(), Det(), SmallestEig()]
    specs += [CharMag(lam) for lam in (-lam_1, 0.0, 0.5 * lam_1, 0.9 * lam_1)]
    specs.append(CoeffAbsSum())
    return specs


def random_gains(prob, count, rng, spread=1.0, centered=False):
    """Gaussian gains, entry scale ``spread * max(1, max|K*|)``.

    With ``centered`` the gains are ``K* + noise`` rather than pure noise.
    """
    scale = spread * max(1.0, float(max_norm(prob.gain)))
    center = prob.gain if centered else 0.0
    return [center + scale * rng.standard_normal((prob.n, prob.m)) for _ in range(count)]


# ---------------------------------------------------------------------------
# individual checks


def _critical_records(prob, specs, tol, cfg):
    K = prob.gain
    values = _values(specs, prob.posterior)
    analytic = _analytic_grads(prob, K, specs)
    numeric = _fd_grads(prob, K, specs, cfg)
    records = []
    for spec, v, ga, gf in zip(specs, values, analytic, numeric):
        rec = Record(ClaimKind.CRITICAL_POINT, spec.label, "pass", tolerance=tol)
        err = next((x for x in (v, ga, gf) if isinstance(x, Exception)), None)
        if isinstance(err, DegenerateEigenvalue):
            rec.status, rec.detail = "skipped", f"DegenerateEigenvalue: {err}"
        elif err is not None:
            rec.status, rec.detail = "fail", f"{type(err).__name__}: {err}"
        else:
            scale = _scale(v)
            rec.value = float(v)
            rec.grad_norm = float(max_norm(ga))
            rec.fd_norm = float(max_norm(gf))
            fd_tol = max(10 * tol, FD_ZERO_RTOL)
            if rec.grad_norm > tol * scale or rec.fd_norm > fd_tol * scale:
                rec.status = "fail"
                rec.detail = f"scale={scale!r}"
        records.append(rec)
    return records


def critical_point_records(prob, specs, tol=CRITICAL_TOL, cfg=ProbeConfig()):
    """:func:`critical_point_check` for several objectives at once."""
    return _critical_records(prob, list(specs), tol, cfg)


def critical_point_check(prob, spec, tol=CRITICAL_TOL, cfg=ProbeConfig()):
    """Does the gradient of ``spec`` vanish at ``K*``?

    Passes iff the analytic gradient has max-norm at most ``tol * scale``
    and the finite-difference gradient at most
    ``max(10 * tol, FD_ZERO_RTOL) * scale``, with ``scale = max(1, |phi(K*)|)``.
    The finite-difference bound cannot go below the rounding noise of the
    difference quotient, hence the floor.  A degenerate smallest eigenvalue is
    recorded as skipped.
    """
    return _critical_records(prob, [spec], tol, cfg)[0]


def _gradient_records(prob, K, specs, cfg, rtol):
    analytic = _analytic_grads(prob, K, specs)
    numeric = _fd_grads(prob, K, specs, cfg)
    records = []
    for spec, ga, gf in zip(specs, analytic, numeric):
        rec = Record(ClaimKind.GRADIENT_ORACLE, spec.label, "pass", tolerance=rtol)
        err = next((x for x in (ga, gf) if isinstance(x, Exception)), None)
        if isinstance(err, DegenerateEigenvalue):
            rec.status, rec.detail = "skipped", f"DegenerateEigenvalue: {err}"
        elif err is not None:
            rec.status, rec.detail = "fail", f"{type(err).__name__}: {err}"
        else:
            denom = max(float(max_norm(ga)), float(max_norm(gf)))
            rec.grad_norm = float(max_norm(ga))
            rec.fd_norm = float(max_norm(gf))
            rec.fd_error = float(max_norm(ga - gf)) / denom if denom > 0 else 0.0
            if rec.fd_error > rtol:
                rec.status = "fail"
        records.append(rec)
    return records


def gradient_oracle_records(prob, K, rng, cfg=ProbeConfig(), rtol=GRAD_ORACLE_RTOL):
    """Gradient oracle over :func:`gradient_catalog` at the gain ``K``.

    ``lam`` parameters are placed relative to the spectrum of ``P_K``.
    """
    evals = sym_eigvals(posterior_cov(prob, K))
    return _gradient_records(prob, K, gradient_catalog(prob.n, evals, rng), cfg, rtol)


def gradient_oracle_check(prob, K, spec, cfg=ProbeConfig(), rtol=GRAD_ORACLE_RTOL):
    """Analytic vs finite-difference gradient at an arbitrary gain.

    The relative error is ``max|g_an - g_fd| / max(max|g_an|, max|g_fd|)``.
    """
    return _gradient_records(prob, K, [spec], cfg, rtol)[0]


def _directions(prob, cfg):
    rng = _rng(cfg.seed, STREAM_DIRECTIONS)
    g = rng.standard_normal((cfg.num_directions, prob.n, prob.m))
    return g / max_norm(g)[:, None, None]


def _local_min_records(prob, specs, cfg, claim=ClaimKind.LOCAL_MIN):
    K = prob.gain
    dirs = _directions(prob, cfg)
    eps = np.array(cfg.epsilons)
    gains = K + eps[None, :, None, None] * dirs[:, None]
    flat = gains.reshape((-1, prob.n, prob.m))
    base = _values(specs, prob.posterior)
    probed = _values(specs, posterior_cov(prob, flat))
    records = []
    for spec, v0, v in zip(specs, base, probed):
        rec = Record(claim, spec.label, "pass", tolerance=MARGIN_RTOL)
        err = next((x for x in (v0, v) if isinstance(x, Exception)), None)
        if err is not None:
            rec.status, rec.detail = "fail", f"{type(err).__name__}: {err}"
            records.append(rec)
            continue
        v0 = float(v0)
        margins = (v - v0).reshape(len(dirs), len(eps))
        worst = np.unravel_index(np.argmin(margins), margins.shape)
        rec.value = v0
        rec.margin = float(margins[worst])
        if rec.margin < -MARGIN_RTOL * _scale(v0):
            rec.status = "fail"
        rec.detail = (f"worst at seed={cfg.seed} stream={STREAM_DIRECTIONS} "
                      f"direction={int(worst[0])} epsilon={float(eps[worst[1]])!r}")
        records.append(rec)
    return records


def local_min_records(prob, specs, cfg=ProbeConfig()):
    """:func:`local_min_probe` for several objectives sharing one batch of
    perturbed covariances."""
    return _local_min_records(prob, list(specs), cfg)


def local_min_probe(prob, spec, cfg=ProbeConfig()):
    """Check ``phi(K* + eps D) >= phi(K*) - 1e-12 * scale`` on random directions.

    Directions are standard Gaussian matrices normalized to unit max-norm.
    The record keeps the worst margin and the direction index / epsilon
    that produced it, which together with the seed is enough to replay it.
    """
    return _local_min_records(prob, [spec], cfg)[0]


def _grid_axes(prob, half_width, points):
    K = prob.gain
    if half_width is None:
        half_width = 2.0 * float(max_norm(K)) + 0.5
    c = 0.5 * (points - 1)
    offsets = half_width * (np.arange(points) - c) / c
    return K, offsets, 2.0 * half_width / (points - 1)


def _grid_search(prob, specs, half_width, points):
    # exhaustive evaluation over K* + offsets^(n*m); argmin per spec, first
    # occurrence in flattened (row-major) order wins ties
    dim = prob.n * prob.m
    if dim > GRID_MAX_DIM:
        raise GridTooLarge(f"grid search needs n*m <= {GRID_MAX_DIM}, got {dim}")
    K, offsets, spacing = _grid_axes(prob, half_width, points)
    total = points ** dim
    best_val = [np.inf] * len(specs)
    best_idx = [-1] * len(specs)
    for start in range(0, total, GRID_CHUNK):
        idx = np.arange(start, min(total, start + GRID_CHUNK))
        digits = np.unravel_index(idx, (points,) * dim)
        delta = np.stack([offsets[d] for d in digits], axis=-1)
        gains = K + delta.reshape((-1, prob.n, prob.m))
        values = _values(specs, posterior_cov(prob, gains))
        for j, v in enumerate(values):
            if isinstance(v, Exception):
                raise v
            local = int(np.argmin(v))
            if v[local] < best_val[j]:
                best_val[j], best_idx[j] = float(v[local]), int(idx[local])
    results = []
    for j in range(len(specs)):
        digits = np.unravel_index(best_idx[j], (points,) * dim)
        gain = K + np.array([offsets[d] for d in digits]).reshape(prob.n, prob.m)
        results.append((gain, best_val[j]))
    return results, spacing


def grid_oracle(prob, spec, half_width=None, points_per_axis=41):
    """Brute-force argmin of ``spec`` on a uniform grid centred at ``K*``.

    Each gain entry ranges over ``K*_ij +- half_width`` (default
    ``2 max|K*| + 0.5``).  Only for ``n * m <= 4``.

    Returns
    -------
    (argmin_gain, value)
    """
    (result,), _ = _grid_search(prob, [spec], half_width, points_per_axis)
    return result


def grid_check(prob, specs, half_width=None, points_per_axis=41):
    """Grid argmin within one grid spacing of ``K*``, per objective."""
    results, spacing = _grid_search(prob, specs, half_width, points_per_axis)
    records = []
    for spec, (gain, value) in zip(specs, results):
        gap = float(max_norm(gain - prob.gain)) / spacing
        rec = Record(ClaimKind.GLOBAL_MIN_GRID, spec.label, "pass",
                     value=value, grid_gap=gap, tolerance=1.0,
                     detail=f"points={points_per_axis} spacing={spacing!r}")
        if gap > 1.0 + 1e-9:
            rec.status = "fail"
        records.append(rec)
    return records


def loewner_identity_check(prob, K, tol=LOEWNER_TOL):
    """Global certificate: ``P_K - P_{K*} == (K - K*) S (K - K*)^T`` and PSD."""
    K = np.asarray(K, dtype=float)
    gap = loewner_gap(prob, K)
    d = K - prob.gain
    residual = float(max_norm(gap - d @ prob.S @ d.T)) / float(max_norm(prob.P))
    # PSD test as in is_psd, sharing the eigenvalue computation with the detail
    min_eig = float(sym_eigvals(gap)[0])
    psd = min_eig >= -tol * float(max_norm(gap))
    rec = Record(ClaimKind.LOEWNER_IDENTITY, "loewner", "pass",
                 residual=residual, tolerance=tol, detail=f"min_eig={min_eig!r}")
    if residual > tol or not psd:
        rec.status = "fail"
    return rec


def trace_limit_check(prob, K, lam_probe=-1e6, tol=TRACE_LIMIT_TOL):
    """``(|Phi(lam)| - |lam|^n) / |lam|^(n-1) -> trace(P_K)`` as ``lam -> -inf``.

    Raises
    ------
    OverflowRisk
        If ``|lam_probe| ** n`` would overflow a double.
    """
    if not lam_probe < 0:
        raise ValueError("lam_probe must be negative")
    n = prob.n
    if n * np.log10(abs(lam_probe)) > 300:
        raise OverflowRisk(f"|lam|^{n} overflows for lam = {lam_probe!r}")
    cov = posterior_cov(prob, K)
    mag = CharMag(lam_probe).evaluate(cov, sym_eigvals(cov))
    a = abs(lam_probe)
    limit = (float(mag) - a ** n) / a ** (n - 1)
    trace = float(np.trace(cov))
    rec = Record(ClaimKind.TRACE_LIMIT, f"charmag:{lam_probe!r}", "pass",
                 value=limit, residual=abs(limit - trace) / trace, tolerance=tol,
                 detail=f"trace={trace!r}")
    if rec.residual > tol:
        rec.status = "fail"
    return rec


def coefficient_parity_study(prob, cfg=ProbeConfig()):
    """Local-minimum probes of ``|a_i|`` for ``i = 0 .. n-1``.

    Even indices are asserted.  Odd indices are recorded with status
    ``"logged"`` and never fail the report.
    """
    specs = [CoefficientMag(i) for i in range(prob.n)]
    records = _local_min_records(prob, specs, cfg, claim=ClaimKind.COEFF_EVEN_MIN)
    for i, rec in enumerate(records):
        if i % 2:
            log.info("odd coefficient %d: worst margin %r (%s)", i, rec.margin, rec.status)
            rec.detail = f"odd index, not asserted ({rec.status}); {rec.detail}"
            rec.status = "logged"
    return records


# ---------------------------------------------------------------------------


def _guarded(records, claim, label, fn, *args, **kwargs):
    try:
        out = fn(*args, **kwargs)
    except Exception as exc:  # record-and-continue
        records.append(Record(claim, label, "fail", detail=f"{type(exc).__name__}: {exc}"))
        return
    if isinstance(out, Record):
        records.append(out)
    else:
        records.extend(out)


def _gain_residual_record(prob):
    scale = float(max_norm(prob.PHt))
    res = float(max_norm(gain_residual(prob, prob.gain)))
    rel = res / scale if scale > 0 else res
    return Record(ClaimKind.GAIN_RESIDUAL, "gain", "pass" if rel <= GAIN_RESIDUAL_TOL else "fail",
                  residual=rel, tolerance=GAIN_RESIDUAL_TOL)


def _joseph_record(prob):
    gap = float(max_norm(prob.posterior - posterior_cov_standard(prob)))
    rel = gap / float(max_norm(prob.P))
    return Record(ClaimKind.JOSEPH_EQUALITY, "posterior", "pass" if rel <= JOSEPH_TOL else "fail",
                  residual=rel, tolerance=JOSEPH_TOL)


def run_suite(prob, cfg=ProbeConfig()):
    """Run every check on one problem and collect a :class:`VerificationReport`.

    Order: gain residual, Joseph vs standard form, Loewner identity at
    sampled gains, critical points of the full catalog, the finite-difference
    gradient oracle at gains near ``K*``, local-minimum
    probes, coefficient parity, trace limit, and (when ``cfg.grid`` and
    ``n * m <= 4``) the grid oracle.
    """
    records = []
    _guarded(records, ClaimKind.GAIN_RESIDUAL, "gain", _gain_residual_record, prob)
    _guarded(records, ClaimKind.JOSEPH_EQUALITY, "posterior", _joseph_record, prob)

    for K in random_gains(prob, N_LOEWNER_GAINS, _rng(cfg.seed, STREAM_LOEWNER)):
        _guarded(records, ClaimKind.LOEWNER_IDENTITY, "loewner", loewner_identity_check, prob, K)

    evals = sym_eigvals(prob.posterior)
    catalog = critical_point_catalog(prob.n, evals, _rng(cfg.seed, STREAM_SYMPOLY))
    _guarded(records, ClaimKind.CRITICAL_POINT, "catalog",
             _critical_records, prob, catalog, CRITICAL_TOL, cfg)
    grad_rng = _rng(cfg.seed, STREAM_GRADIENT)
    for K in random_gains(prob, N_GRADIENT_GAINS, grad_rng,
                          spread=GRADIENT_SPREAD, centered=True):
        _guarded(records, ClaimKind.GRADIENT_ORACLE, "catalog",
                 gradient_oracle_records, prob, K, grad_rng, cfg)
    _guarded(records, ClaimKind.LOCAL_MIN, "catalog",
             _local_min_records, prob, local_min_catalog(evals), cfg)
    _guarded(records, ClaimKind.COEFF_EVEN_MIN, "coefficients",
             coefficient_parity_study, prob, cfg)

    lam_probe = -1e6 * max(1.0, float(evals[-1]))
    _guarded(records, ClaimKind.TRACE_LIMIT, f"charmag:{lam_probe!r}",
             trace_limit_check, prob, prob.gain, lam_probe)

    if cfg.grid and prob.n * prob.m <= GRID_MAX_DIM:
        specs = [Trace(), Det(), SmallestEig(), CharMag(0.0)]
        _guarded(records, ClaimKind.GLOBAL_MIN_GRID, "grid",
                 grid_check, prob, specs, None, cfg.grid_points)
    return VerificationReport(records)

"""Optimality of the Kalman gain for spectral functions of the posterior covariance.

The optimal gain ``K* = P H^T (H P H^T + R)^{-1}`` minimizes the trace of
the posterior covariance ``P_K``, but also its determinant, its smallest
eigenvalue, ``|det(lam I - P_K)|`` for ``lam`` below the spectrum, and it
is a critical point of every symmetric polynomial of the eigenvalues.  This
package computes ``K*`` and certifies those properties numerically.
"""

from .exceptions import (
    DegenerateEigenvalue,
    EvalAtEigenvalue,
    GridTooLarge,
    NoConvergence,
    NotPositiveDefinite,
    OverflowRisk,
)
from .kalman import (
    KalmanProblem,
    gain_residual,
    innovation_cov,
    loewner_gap,
    optimal_gain,
    posterior_cov,
    posterior_cov_standard,
    posterior_directional_derivative,
    random_problem,
)
from .linalg import (
    Spectrum,
    char_poly_faddeev,
    char_poly_from_spectrum,
    cholesky,
    elem_sym_polys,
    eval_poly,
    is_psd,
    power_sums,
    random_spd,
    solve_spd,
    sym_eigen,
    sym_eigvals,
)
from .objectives import (
    CharMag,
    CoeffAbsSum,
    CoefficientMag,
    Det,
    ElemSym,
    LogCharMag,
    Objective,
    SmallestEig,
    SymmetricPoly,
    SymmetricPolySpec,
    Trace,
    coefficient_vector,
    eval_objective,
    objective_grad_K,
    objective_grad_P,
)
from .verify import (
    ClaimKind,
    ProbeConfig,
    Record,
    VerificationReport,
    critical_point_check,
    finite_diff_grad,
    gradient_oracle_check,
    grid_oracle,
    local_min_probe,
    loewner_identity_check,
    run_suite,
    trace_limit_check,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateEigenvalue",
    "EvalAtEigenvalue",
    "GridTooLarge",
    "NoConvergence",
    "NotPositiveDefinite",
    "OverflowRisk",
    "KalmanProblem",
    "gain_residual",
    "innovation_cov",
    "loewner_gap",
    "optimal_gain",
    "posterior_cov",
    "posterior_cov_standard",
    "posterior_directional_derivative",
    "random_problem",
    "Spectrum",
    "char_poly_faddeev",
    "char_poly_from_spectrum",
    "cholesky",
    "elem_sym_polys",
    "eval_poly",
    "is_psd",
    "power_sums",
    "random_spd",
    "solve_spd",
    "sym_eigen",
    "sym_eigvals",
    "CharMag",
    "CoeffAbsSum",
    "CoefficientMag",
    "Det",
    "ElemSym",
    "LogCharMag",
    "Objective",
    "SmallestEig",
    "SymmetricPoly",
    "SymmetricPolySpec",
    "Trace",
    "coefficient_vector",
    "eval_objective",
    "objective_grad_K",
    "objective_grad_P",
    "ClaimKind",
    "ProbeConfig",
    "Record",
    "VerificationReport",
    "critical_point_check",
    "finite_diff_grad",
    "gradient_oracle_check",
    "grid_oracle",
    "local_min_probe",
    "loewner_identity_check",
    "run_suite",
    "trace_limit_check",
]

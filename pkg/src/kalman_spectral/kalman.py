"""Kalman measurement-update covariance algebra.

Only the covariance side of the update is modelled: there is no state mean
and no predict step.  Gains ``K`` are plain ``(n, m)`` arrays; every function
taking a gain also accepts a stack ``(..., n, m)``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import NotPositiveDefinite
from .linalg import cholesky, random_spd, solve_spd, symmetrize

__all__ = [
    "KalmanProblem",
    "random_problem",
    "innovation_cov",
    "optimal_gain",
    "posterior_cov",
    "posterior_cov_standard",
    "gain_residual",
    "posterior_directional_derivative",
    "loewner_gap",
    "H_MODES",
]

H_MODES = ("gaussian", "identity-block", "zero")


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class KalmanProblem:
    """Prior covariance ``P`` (n x n), likelihood covariance ``R`` (m x m)
    and measurement operator ``H`` (m x n).

    ``P`` and ``R`` are symmetrized on construction and must pass the
    Cholesky certificate.  ``H`` may be rank deficient, including zero.
    """

    P: np.ndarray
    R: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        R = np.asarray(self.R, dtype=float)
        H = np.asarray(self.H, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
            raise ValueError(f"P must be a non-empty square matrix, got shape {P.shape}")
        if R.ndim != 2 or R.shape[0] != R.shape[1] or R.shape[0] < 1:
            raise ValueError(f"R must be a non-empty square matrix, got shape {R.shape}")
        if H.shape != (R.shape[0], P.shape[0]):
            raise ValueError(
                f"H must have shape (m, n) = {(R.shape[0], P.shape[0])}, got {H.shape}"
            )
        for name, mat in (("P", P), ("R", R)):
            try:
                cholesky(mat)
            except NotPositiveDefinite as exc:
                raise NotPositiveDefinite(f"{name} is not positive definite") from exc
        object.__setattr__(self, "P", _readonly(symmetrize(P)))
        object.__setattr__(self, "R", _readonly(symmetrize(R)))
        object.__setattr__(self, "H", _readonly(H))

    @property
    def n(self):
        return self.P.shape[0]

    @property
    def m(self):
        return self.R.shape[0]

    @cached_property
    def S(self):
        return _readonly(innovation_cov(self))

    @cached_property
    def PHt(self):
        return _readonly(self.P @ self.H.T)

    @cached_property
    def gain(self):
        return _readonly(optimal_gain(self))

    @cached_property
    def posterior(self):
        """Posterior covariance at the optimal gain."""
        return _readonly(posterior_cov(self, self.gain))


def random_problem(n, m, seed=0, log10_eig_range_P=(-2.0, 2.0),
                   log10_eig_range_R=(-2.0, 2.0), H_mode="gaussian"):
    """Seeded random :class:`KalmanProblem`.

    ``P``, ``R`` and ``H`` each draw from their own child stream of
    ``seed`` (spawn keys 0, 1, 2), so changing one eigenvalue range leaves
    the other matrices untouched.
    """
    if H_mode not in H_MODES:
        raise ValueError(f"H_mode must be one of {H_MODES}, got {H_mode!r}")
    seed_p, seed_r, seed_h = np.random.SeedSequence(seed).spawn(3)
    P = random_spd(n, log10_eig_range_P, seed_p)
    R = random_spd(m, log10_eig_range_R, seed_r)
    if H_mode == "gaussian":
        H = np.random.default_rng(seed_h).standard_normal((m, n))
    elif H_mode == "identity-block":
        H = np.eye(m, n)
    else:
        H = np.zeros((m, n))
    return KalmanProblem(P, R, H)


def innovation_cov(prob):
    """``S = H P H^T + R``."""
    return symmetrize(prob.H @ prob.P @ prob.H.T + prob.R)


def optimal_gain(prob):
    """Optimal gain ``K* = P H^T S^{-1}``, via the SPD solve ``S X = H P``.

    One step of iterative refinement on the gain residual follows the
    solve; it is cheap and removes most of the rounding from the Cholesky
    pivots (the scalar case ``p = r = h = 1`` comes out as exactly 0.5).
    """
    S = prob.S
    K = solve_spd(S, prob.H @ prob.P).T
    residual = K @ S - prob.PHt
    return K - solve_spd(S, residual.T).T


def posterior_cov(prob, K):
    """Joseph-form posterior covariance for an arbitrary gain.

    ``P_K = (I - K H) P (I - K H)^T + K R K^T``, symmetrized.  This is SPD
    for every ``K`` because ``R`` is.
    """
    K = np.asarray(K, dtype=float)
    A = np.eye(prob.n) - K @ prob.H
    At = np.swapaxes(A, -1, -2)
    Kt = np.swapaxes(K, -1, -2)
    return symmetrize(A @ prob.P @ At + K @ prob.R @ Kt)


def posterior_cov_standard(prob):
    """Short form ``(I - K* H) P``; only valid at the optimal gain."""
    K = prob.gain
    return symmetrize((np.eye(prob.n) - K @ prob.H) @ prob.P)


def gain_residual(prob, K):
    """``K S - P H^T``; vanishes exactly at the optimal gain."""
    return np.asarray(K, dtype=float) @ prob.S - prob.PHt


def posterior_directional_derivative(prob, K, direction):
    """Derivative of ``K -> P_K`` at ``K`` along ``direction``.

    Expanding the Joseph form gives
    ``D (S K^T - H P) + (K S - P H^T) D^T``, which is zero for every ``D``
    exactly when the gain residual is zero.
    """
    D = np.asarray(direction, dtype=float)
    half = gain_residual(prob, K) @ np.swapaxes(D, -1, -2)
    return symmetrize(half + np.swapaxes(half, -1, -2))


def loewner_gap(prob, K):
    """``P_K - P_{K*}``, which equals ``(K - K*) S (K - K*)^T`` and is PSD."""
    return symmetrize(posterior_cov(prob, K) - prob.posterior)

"""Scalar uncertainty measures of the posterior covariance and their gradients.

Each objective is a small frozen dataclass.  Evaluation works on the
posterior covariance ``P_K`` (and its eigenvalues); the gradient is first
taken with respect to ``P_K`` and then pulled back to the gain through the
Joseph form, ``d phi / dK = 2 W (K S - P H^T)`` with ``W = d phi / d P_K``.

Every objective except :class:`SmallestEig` is a symmetric function of the
eigenvalues, so its covariance gradient is ``V diag(d phi / d lam) V^T``.
The characteristic-polynomial family is differentiated exactly through the
elementary symmetric polynomials, using ``d e_k / d lam_j = e_{k-1}`` of the
remaining eigenvalues.
"""

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .exceptions import DegenerateEigenvalue, EvalAtEigenvalue
from .kalman import gain_residual, posterior_cov
from .linalg import (
    _elem_sym_full,
    char_poly_from_spectrum,
    elem_sym_polys,
    eval_poly,
    sym_eigen,
    sym_eigvals,
)

__all__ = [
    "Objective",
    "Trace",
    "Det",
    "SmallestEig",
    "CharMag",
    "LogCharMag",
    "CoefficientMag",
    "ElemSym",
    "CoeffAbsSum",
    "SymmetricPoly",
    "SymmetricPolySpec",
    "random_symmetric_poly",
    "eval_objective",
    "evaluate_on_cov",
    "objective_grad_P",
    "objective_grad_K",
    "coefficient_vector",
    "PHI_FLOOR",
    "DEGENERACY_RTOL",
]

# |Phi| below this is treated as evaluating on an eigenvalue
PHI_FLOOR = 1e-300
# lam_2 - lam_1 <= DEGENERACY_RTOL * lam_n makes lam_1 non-differentiable
DEGENERACY_RTOL = 1e-8


def _fmt(x):
    return repr(float(x))


def _elem_sym_jacobian(evals):
    """``J[j, k-1] = d e_k / d lam_j`` for ``k = 1..n``."""
    n = evals.shape[-1]
    others = np.array([np.delete(evals, j) for j in range(n)]).reshape(n, n - 1)
    return _elem_sym_full(others)


def _spectral_matrix(vecs, weights):
    return (vecs * weights) @ vecs.T


class Objective:
    """Base class for the objective catalog.

    Subclasses implement :meth:`evaluate` (vectorized over stacks) and either
    :meth:`eigen_partials` or :meth:`grad_cov`.
    """

    needs_spectrum: ClassVar[bool] = True

    @property
    def label(self):
        raise NotImplementedError

    def check_dim(self, n):
        pass

    def evaluate(self, cov, evals):
        raise NotImplementedError

    def eigen_partials(self, evals):
        raise NotImplementedError

    def grad_cov(self, cov, spectrum):
        weights = self.eigen_partials(spectrum.eigenvalues)
        return _spectral_matrix(spectrum.eigenvectors, weights)

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class Trace(Objective):
    """Total variance."""

    needs_spectrum: ClassVar[bool] = False

    @property
    def label(self):
        return "trace"

    def evaluate(self, cov, evals):
        return np.trace(cov, axis1=-2, axis2=-1)

    def grad_cov(self, cov, spectrum):
        return np.eye(cov.shape[-1])


@dataclass(frozen=True)
class Det(Objective):
    """Generalized variance."""

    @property
    def label(self):
        return "det"

    def evaluate(self, cov, evals):
        return np.prod(evals, axis=-1)

    def eigen_partials(self, evals):
        # adjugate: d det / d lam_j = prod of the other eigenvalues
        return _elem_sym_jacobian(evals)[:, -1]


@dataclass(frozen=True)
class SmallestEig(Objective):
    @property
    def label(self):
        return "lmin"

    def evaluate(self, cov, evals):
        return evals[..., 0]

    def grad_cov(self, cov, spectrum):
        evals = spectrum.eigenvalues
        if evals.size > 1 and evals[1] - evals[0] <= DEGENERACY_RTOL * evals[-1]:
            raise DegenerateEigenvalue(
                f"smallest eigenvalue is not simple (gap {evals[1] - evals[0]:.3e})"
            )
        v = spectrum.eigenvectors[:, 0]
        return np.outer(v, v)


def _char_value(evals, lam):
    return eval_poly(char_poly_from_spectrum(evals), lam)


@dataclass(frozen=True)
class CharMag(Objective):
    """``|Phi(P_K, lam)| = |det(lam I - P_K)|``."""

    lam: float

    def __post_init__(self):
        if not np.isfinite(self.lam):
            raise ValueError("lam must be finite")
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def label(self):
        return f"charmag:{_fmt(self.lam)}"

    def evaluate(self, cov, evals):
        return np.abs(_char_value(evals, self.lam))

    def eigen_partials(self, evals):
        phi = _char_value(evals, self.lam)
        # d|Phi|/d lam_i = -sign(Phi) prod_{j != i} (lam - lam_j); on the
        # spectrum sign(Phi) = 0 picks the zero subgradient
        n = evals.size
        factors = self.lam - evals
        rest = np.array([np.prod(np.delete(factors, i)) for i in range(n)])
        return -np.sign(phi) * rest


@dataclass(frozen=True)
class LogCharMag(Objective):
    """``log |Phi(P_K, lam)|``; undefined on the spectrum."""

    lam: float

    def __post_init__(self):
        if not np.isfinite(self.lam):
            raise ValueError("lam must be finite")
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def label(self):
        return f"logcharmag:{_fmt(self.lam)}"

    def evaluate(self, cov, evals):
        mag = np.abs(_char_value(evals, self.lam))
        if np.any(mag < PHI_FLOOR):
            raise EvalAtEigenvalue(f"log|Phi| undefined at lam = {self.lam!r}")
        return np.log(mag)

    def eigen_partials(self, evals):
        if abs(_char_value(evals, self.lam)) < PHI_FLOOR:
            raise EvalAtEigenvalue(f"log|Phi| undefined at lam = {self.lam!r}")
        # gradient in P_K is -(lam I - P_K)^{-1}
        return -1.0 / (self.lam - evals)


@dataclass(frozen=True)
class CoefficientMag(Objective):
    """``|a_i|`` for the characteristic polynomial coefficient of ``lam**i``."""

    index: int

    @property
    def label(self):
        return f"coeff:{self.index}"

    def check_dim(self, n):
        if not 0 <= self.index <= n - 1:
            raise ValueError(f"coefficient index must be in 0..{n - 1}, got {self.index}")

    def evaluate(self, cov, evals):
        self.check_dim(evals.shape[-1])
        return np.abs(char_poly_from_spectrum(evals)[..., self.index])

    def eigen_partials(self, evals):
        n = evals.size
        self.check_dim(n)
        k = n - self.index
        e = elem_sym_polys(evals)
        # a_i = (-1)**k e_k, so d|a_i| = sign(a_i) (-1)**k de_k = sign(e_k) de_k
        return np.sign(e[k - 1]) * _elem_sym_jacobian(evals)[:, k - 1]


@dataclass(frozen=True)
class ElemSym(Objective):
    """``e_k`` of the eigenvalues."""

    k: int

    @property
    def label(self):
        return f"esym:{self.k}"

    def check_dim(self, n):
        if not 1 <= self.k <= n:
            raise ValueError(f"elementary symmetric index must be in 1..{n}, got {self.k}")

    def evaluate(self, cov, evals):
        self.check_dim(evals.shape[-1])
        return elem_sym_polys(evals)[..., self.k - 1]

    def eigen_partials(self, evals):
        self.check_dim(evals.size)
        return _elem_sym_jacobian(evals)[:, self.k - 1]


@dataclass(frozen=True)
class CoeffAbsSum(Objective):
    """``sum_i |a_i|`` over ``i = 0..n``, which equals ``|Phi(P_K, -1)|``."""

    @property
    def label(self):
        return "coeffsum"

    def evaluate(self, cov, evals):
        return np.sum(np.abs(char_poly_from_spectrum(evals)), axis=-1)

    def eigen_partials(self, evals):
        e = elem_sym_polys(evals)
        return _elem_sym_jacobian(evals) @ np.sign(e)


@dataclass(frozen=True)
class SymmetricPolySpec:
    """Symmetric polynomial written in the elementary symmetric basis.

    ``terms`` is a sequence of ``(coefficient, exponents)``; each term is
    ``coefficient * prod_k e_k ** exponents[k - 1]``.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple(
            (float(c), tuple(int(a) for a in exps)) for c, exps in self.terms
        )
        if not terms:
            raise ValueError("a symmetric polynomial needs at least one term")
        n = len(terms[0][1])
        if n < 1 or any(len(exps) != n for _, exps in terms):
            raise ValueError("all exponent vectors must share one positive length")
        if any(a < 0 for _, exps in terms for a in exps):
            raise ValueError("exponents must be nonnegative")
        object.__setattr__(self, "terms", terms)

    @property
    def n(self):
        return len(self.terms[0][1])

    def __str__(self):
        parts = []
        for c, exps in self.terms:
            mono = "*".join(
                f"e{k + 1}^{a}" if a > 1 else f"e{k + 1}"
                for k, a in enumerate(exps) if a
            )
            parts.append(f"{_fmt(c)}*{mono}" if mono else _fmt(c))
        return " + ".join(parts)

    def evaluate(self, e):
        """Value at elementary symmetric values ``e`` (shape ``(..., n)``)."""
        e = np.asarray(e, dtype=float)
        out = np.zeros(e.shape[:-1])
        for c, exps in self.terms:
            out = out + c * np.prod(e ** np.array(exps), axis=-1)
        return out

    def gradient(self, e):
        """Partial derivatives with respect to ``e_1 .. e_n`` (single point)."""
        e = np.asarray(e, dtype=float)
        grad = np.zeros(self.n)
        for c, exps in self.terms:
            exps = np.array(exps)
            for k in np.flatnonzero(exps):
                lowered = exps.copy()
                lowered[k] -= 1
                grad[k] += c * exps[k] * np.prod(e ** lowered)
        return grad


def random_symmetric_poly(n, rng, n_terms=3):
    """Random :class:`SymmetricPolySpec` in ``n`` variables.

    Each term has a standard normal coefficient and one or two distinct
    elementary symmetric factors raised to power 1 or 2, which keeps the
    degree (and the dynamic range) moderate.
    """
    terms = []
    for _ in range(n_terms):
        exps = np.zeros(n, dtype=int)
        n_factors = min(n, int(rng.integers(1, 3)))
        picks = rng.choice(n, size=n_factors, replace=False)
        exps[picks] = rng.integers(1, 3, size=n_factors)
        terms.append((float(rng.standard_normal()), tuple(exps.tolist())))
    return SymmetricPolySpec(tuple(terms))


@dataclass(frozen=True)
class SymmetricPoly(Objective):
    spec: SymmetricPolySpec

    @property
    def label(self):
        return f"sympoly[{self.spec}]"

    def check_dim(self, n):
        if self.spec.n != n:
            raise ValueError(f"symmetric polynomial has {self.spec.n} variables, matrix has {n}")

    def evaluate(self, cov, evals):
        self.check_dim(evals.shape[-1])
        return self.spec.evaluate(elem_sym_polys(evals))

    def eigen_partials(self, evals):
        self.check_dim(evals.size)
        e = elem_sym_polys(evals)
        return _elem_sym_jacobian(evals) @ self.spec.gradient(e)


def evaluate_on_cov(spec, cov):
    """Objective value for a covariance matrix or a stack of them."""
    cov = np.asarray(cov, dtype=float)
    spec.check_dim(cov.shape[-1])
    evals = sym_eigvals(cov) if spec.needs_spectrum else None
    out = spec.evaluate(cov, evals)
    return float(out) if np.ndim(out) == 0 else out


def eval_objective(prob, K, spec):
    """``phi(P_K)``; ``K`` may be a stack of gains."""
    return evaluate_on_cov(spec, posterior_cov(prob, K))


def objective_grad_P(spec, cov):
    """Symmetric gradient ``W = d phi / d P_K``."""
    cov = np.asarray(cov, dtype=float)
    spec.check_dim(cov.shape[-1])
    return spec.grad_cov(cov, sym_eigen(cov))


def objective_grad_K(prob, K, spec):
    """Gradient of ``K -> phi(P_K)``: ``2 W (K S - P H^T)``."""
    K = np.asarray(K, dtype=float)
    W = objective_grad_P(spec, posterior_cov(prob, K))
    return 2.0 * W @ gain_residual(prob, K)


def coefficient_vector(prob, K):
    """Characteristic polynomial coefficients ``a_0 .. a_n`` of ``P_K``."""
    return char_poly_from_spectrum(sym_eigvals(posterior_cov(prob, K)))

"""Small dense symmetric / SPD linear algebra.

Everything here works on plain ``numpy`` arrays.  Functions that act on a
single matrix also accept stacks of matrices with shape ``(..., n, n)``
where noted, which is how the verification harness evaluates hundreds of
perturbed covariances at once.

Characteristic polynomial coefficients are stored low order first:
``coeffs[i]`` multiplies ``lam**i`` and ``coeffs[-1] == 1``.
"""

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import NoConvergence, NotPositiveDefinite

__all__ = [
    "Spectrum",
    "symmetrize",
    "max_norm",
    "cholesky",
    "solve_spd",
    "sym_eigen",
    "sym_eigvals",
    "char_poly_from_spectrum",
    "char_poly_faddeev",
    "eval_poly",
    "elem_sym_polys",
    "power_sums",
    "random_spd",
    "is_psd",
]

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 30


class Spectrum(NamedTuple):
    """Ascending eigenvalues and matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def symmetrize(a):
    """Return ``(a + a^T) / 2`` over the last two axes as a float array."""
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def max_norm(a):
    """Largest absolute entry (over the last two axes for stacks)."""
    a = np.asarray(a, dtype=float)
    if a.ndim < 2:
        return np.max(np.abs(a)) if a.size else 0.0
    if a.shape[-1] == 0 or a.shape[-2] == 0:
        return np.zeros(a.shape[:-2])
    return np.max(np.abs(a), axis=(-2, -1))


def cholesky(a):
    """Lower-triangular Cholesky factor of a symmetric matrix.

    This doubles as the positive-definiteness certificate used throughout the
    package: a pivot at or below ``n * eps * max|a|`` is rejected.

    Raises
    ------
    NotPositiveDefinite
        If any pivot fails the threshold.
    """
    a = symmetrize(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    threshold = n * np.finfo(float).eps * max_norm(a)
    low = np.zeros_like(a)
    for j in range(n):
        row = low[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > threshold:
            raise NotPositiveDefinite(
                f"matrix is not positive definite (pivot {j} = {pivot:.3e})"
            )
        d = np.sqrt(pivot)
        low[j, j] = d
        low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ row) / d
    return low


def solve_spd(a, b):
    """Solve ``a @ x = b`` for SPD ``a`` through its Cholesky factor.

    ``b`` may be a vector or a matrix of right-hand sides.
    """
    low = cholesky(a)
    b = np.asarray(b, dtype=float)
    y = solve_triangular(low, b, lower=True, check_finite=False)
    return solve_triangular(low.T, y, lower=False, check_finite=False)


def _jacobi_rotate(a, v, p, q, others):
    # one Jacobi rotation in the (p, q) plane for every matrix in the stack;
    # the stack axis is last so row/column slices are contiguous. Only rows
    # and columns p, q change; rotations with a_pq == 0 are the identity.
    apq = a[p, q].copy()
    nonzero = apq != 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        theta = (a[q, q] - a[p, p]) / (2.0 * apq)
        t = np.copysign(1.0, theta) / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
    t = np.where(nonzero, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    a[p, p] -= t * apq
    a[q, q] += t * apq
    a[p, q] = 0.0
    a[q, p] = 0.0
    if len(others):
        ap = a[others, p]
        aq = a[others, q]
        new_p = c * ap - s * aq
        new_q = s * ap + c * aq
        a[others, p] = new_p
        a[p, others] = new_p
        a[others, q] = new_q
        a[q, others] = new_q

    if v is not None:
        vec_p = v[:, p].copy()
        vec_q = v[:, q]
        v[:, p] = c * vec_p - s * vec_q
        v[:, q] = s * vec_p + c * vec_q


def _off_diagonal_norm(a):
    rows, cols = np.triu_indices(a.shape[0], 1)
    upper = a[rows, cols]
    return np.sqrt(2.0 * np.sum(upper * upper, axis=0))


def _jacobi_single(a, tol, max_sweeps, want_vectors):
    # same sweep order and rotation formulas as the batched path, with the
    # rotation parameters in scalar arithmetic; a lone matrix would
    # otherwise pay numpy call overhead on every length-1 array
    n = a.shape[0]
    v = np.eye(n) if want_vectors else None
    target = tol * math.sqrt(float(np.sum(a * a)))
    rows, cols = np.triu_indices(n, 1)

    def off():
        upper = a[rows, cols]
        return math.sqrt(2.0 * float(upper @ upper))

    sweeps = 0
    while off() > target:
        if sweeps == max_sweeps:
            raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(a[p, q])
                if apq == 0.0:
                    continue
                theta = (float(a[q, q]) - float(a[p, p])) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                new_p = c * col_p - s * col_q
                new_q = s * col_p + c * col_q
                a[:, p] = new_p
                a[p, :] = new_p
                a[:, q] = new_q
                a[q, :] = new_q
                a[p, p] = float(col_p[p]) - t * apq
                a[q, q] = float(col_q[q]) + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if v is not None:
                    vec_p = v[:, p].copy()
                    v[:, p] = c * vec_p - s * v[:, q]
                    v[:, q] = s * vec_p + c * v[:, q]
        sweeps += 1

    evals = np.diagonal(a).copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], (v[:, order] if want_vectors else None)


def _jacobi(a, tol, max_sweeps, want_vectors):
    a = symmetrize(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    lead, n = a.shape[:-2], a.shape[-1]
    if not lead:
        return _jacobi_single(a.copy(), tol, max_sweeps, want_vectors)
    work = np.ascontiguousarray(np.moveaxis(a.reshape((-1, n, n)), 0, -1))
    count = work.shape[-1]
    vecs = np.repeat(np.eye(n)[:, :, None], count, axis=-1) if want_vectors else None
    target = tol * np.sqrt(np.sum(work * work, axis=(0, 1)))
    pairs = [
        (p, q, np.array([r for r in range(n) if r != p and r != q], dtype=np.intp))
        for p in range(n - 1) for q in range(p + 1, n)
    ]

    active = _off_diagonal_norm(work) > target
    sweeps = 0
    while active.any():
        if sweeps == max_sweeps:
            raise NoConvergence(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps"
            )
        if active.all():
            for p, q, others in pairs:
                _jacobi_rotate(work, vecs, p, q, others)
        else:
            idx = np.flatnonzero(active)
            sub_a = work[:, :, idx]
            sub_v = vecs[:, :, idx] if want_vectors else None
            for p, q, others in pairs:
                _jacobi_rotate(sub_a, sub_v, p, q, others)
            work[:, :, idx] = sub_a
            if want_vectors:
                vecs[:, :, idx] = sub_v
        sweeps += 1
        active = _off_diagonal_norm(work) > target

    evals = np.diagonal(work, axis1=0, axis2=1)
    order = np.argsort(evals, axis=-1, kind="stable")
    evals = np.take_along_axis(evals, order, axis=-1).reshape(lead + (n,))
    if not want_vectors:
        return evals, None
    vecs = np.take_along_axis(np.moveaxis(vecs, -1, 0), order[:, None, :], axis=-1)
    return evals, vecs.reshape(lead + (n, n))


def sym_eigen(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : array_like, shape (..., n, n)
        Symmetric matrix or stack of them.  The input is symmetrized first.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is at most
        ``tol * ||a||_F`` (per matrix in a stack).
    max_sweeps : int
        Sweep budget.

    Returns
    -------
    Spectrum
        Eigenvalues ascending along the last axis and eigenvectors as
        columns, both with the leading (stack) shape of ``a``.

    Raises
    ------
    NoConvergence
        If some matrix is still not diagonal after ``max_sweeps`` sweeps.
    """
    return Spectrum(*_jacobi(a, tol, max_sweeps, want_vectors=True))


def sym_eigvals(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Ascending eigenvalues only; same iteration as :func:`sym_eigen`."""
    return _jacobi(a, tol, max_sweeps, want_vectors=False)[0]


def _elem_sym_full(values):
    # e_0 .. e_n along the last axis by multiplying in one linear factor at
    # a time
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    e = np.zeros(values.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for j in range(n):
        x = values[..., j, None]
        e[..., 1:j + 2] = e[..., 1:j + 2] + x * e[..., :j + 1]
    return e


def elem_sym_polys(values):
    """Elementary symmetric polynomials ``e_1 .. e_n`` of ``values``.

    Works along the last axis, so a stack of eigenvalue vectors gives a
    stack of results.

    >>> elem_sym_polys([1.0, 2.0, 3.0])
    array([ 6., 11.,  6.])
    """
    return _elem_sym_full(values)[..., 1:]


def power_sums(values):
    """Power sums ``p_k = sum(values**k)`` for ``k = 1 .. n``."""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    powers = values[..., None, :] ** np.arange(1, n + 1)[:, None]
    return powers.sum(axis=-1)


def _alternating_signs(n):
    # sign of a_i in a monic polynomial with positive roots: (-1)**(n - i)
    return np.where((n - np.arange(n + 1)) % 2 == 0, 1.0, -1.0)


def char_poly_from_spectrum(spectrum):
    """Coefficients ``a_0 .. a_n`` of ``prod_i (lam - lam_i)``.

    ``spectrum`` is a :class:`Spectrum` or just an array of eigenvalues
    (stacks along leading axes are fine).
    """
    evals = spectrum.eigenvalues if isinstance(spectrum, Spectrum) else spectrum
    e = _elem_sym_full(evals)
    n = e.shape[-1] - 1
    return _alternating_signs(n) * e[..., ::-1]


def char_poly_faddeev(a, exact=True):
    """Characteristic polynomial by the Faddeev-LeVerrier trace recursion.

    No eigen-decomposition is involved, which makes this an independent
    check on :func:`char_poly_from_spectrum`.

    The recursion cancels badly in floating point: the power traces grow
    like ``lam_max**k`` while the coefficients can be many orders of
    magnitude smaller, so for a well-spread spectrum at ``n = 8`` it loses
    around ten digits.  With ``exact=True`` (default) it therefore runs in
    rational arithmetic on the exact binary values of ``a`` and rounds once
    at the end; this costs milliseconds for ``n <= 10``.  ``exact=False``
    gives the plain floating-point recursion.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if exact:
        a = np.array([[Fraction(x) for x in row] for row in a.tolist()], dtype=object)
        coeffs = np.array([Fraction(0)] * (n + 1), dtype=object)
        coeffs[n] = Fraction(1)
        m = np.full((n, n), Fraction(0), dtype=object)
    else:
        coeffs = np.zeros(n + 1)
        coeffs[n] = 1.0
        m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a.dot(m)
        m[np.diag_indices(n)] += coeffs[n - k + 1]
        coeffs[n - k] = -np.trace(a.dot(m)) / k
    return coeffs.astype(float)


def eval_poly(coeffs, lam):
    """Horner evaluation of ``sum_i coeffs[i] * lam**i``.

    ``coeffs`` may carry leading stack axes; ``lam`` broadcasts against them.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    out = coeffs[..., -1] * np.ones_like(lam, dtype=float)
    for i in range(coeffs.shape[-1] - 2, -1, -1):
        out = out * lam + coeffs[..., i]
    return out


def random_spd(dim, log10_eig_range, seed):
    """Seeded random SPD matrix ``Q diag(mu) Q^T``.

    ``Q`` comes from a sign-fixed QR factorization of a standard Gaussian
    matrix and the eigenvalues ``mu`` are log-uniform on
    ``[10**lo, 10**hi]``.  ``seed`` is anything :func:`numpy.random.default_rng`
    accepts; the same seed always gives the same bits.
    """
    lo, hi = log10_eig_range
    if lo > hi:
        raise ValueError(f"log10 eigenvalue range must satisfy lo <= hi, got {lo}, {hi}")
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = np.random.default_rng(seed)
    gauss = rng.standard_normal((dim, dim))
    mu = 10.0 ** rng.uniform(lo, hi, size=dim)
    q, r = np.linalg.qr(gauss)
    q = q * np.where(np.diagonal(r) < 0.0, -1.0, 1.0)
    return symmetrize((q * mu) @ q.T)


def is_psd(a, tol=0.0):
    """True iff the smallest eigenvalue of ``a`` is ``>= -tol * max|a|``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    lam_min = sym_eigvals(a)[..., 0]
    return bool(np.all(lam_min >= -tol * max_norm(a)))

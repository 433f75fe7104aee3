import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kalman_spectral.exceptions import NoConvergence, NotPositiveDefinite
from kalman_spectral.linalg import (
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
    symmetrize,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=8)
log_values = arrays(
    np.float64, st.integers(1, 8),
    elements=st.floats(min_value=-2.0, max_value=2.0),
).map(lambda x: 10.0 ** x)


def random_symmetric(n, seed):
    a = np.random.default_rng(seed).standard_normal((n, n))
    return a + a.T


class TestCholesky:
    def test_two_by_two(self):
        low = cholesky([[4.0, 2.0], [2.0, 3.0]])
        np.testing.assert_allclose(low, [[2.0, 0.0], [1.0, np.sqrt(2.0)]], rtol=1e-15)

    def test_identity(self):
        assert np.array_equal(cholesky(np.eye(3)), np.eye(3))

    def test_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky([[1.0, 2.0], [2.0, 1.0]])

    def test_is_a_linalg_error(self):
        with pytest.raises(np.linalg.LinAlgError):
            cholesky(np.zeros((2, 2)))

    def test_pivot_threshold_rejects_rounding_level_pivots(self):
        eps = np.finfo(float).eps
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.diag([1.0, eps]))
        cholesky(np.diag([1.0, 10 * eps]))

    def test_matches_numpy(self):
        a = random_spd(6, (-2, 2), 3)
        np.testing.assert_allclose(cholesky(a), np.linalg.cholesky(a), rtol=1e-12, atol=1e-14)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            cholesky(np.ones((2, 3)))


class TestSolveSpd:
    def test_identity(self):
        assert np.array_equal(solve_spd(np.eye(2), [[5.0], [7.0]]), [[5.0], [7.0]])

    def test_diagonal(self):
        np.testing.assert_allclose(solve_spd(np.diag([2.0, 4.0]), [[2.0], [8.0]]), [[1.0], [2.0]])

    def test_random_residual(self):
        rng = np.random.default_rng(11)
        a = random_spd(5, (-2, 2), 5)
        b = rng.standard_normal((5, 3))
        x = solve_spd(a, b)
        assert np.max(np.abs(a @ x - b)) <= 1e-10 * np.max(np.abs(b))

    def test_propagates_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            solve_spd([[1.0, 2.0], [2.0, 1.0]], [1.0, 1.0])


class TestSymEigen:
    def test_diagonal(self):
        w, v = sym_eigen(np.diag([3.0, 1.0, 2.0]))
        assert np.array_equal(w, [1.0, 2.0, 3.0])
        assert np.array_equal(np.abs(v), np.eye(3)[:, [1, 2, 0]])

    def test_two_by_two(self):
        w, _ = sym_eigen([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(w, [1.0, 3.0], rtol=1e-15)

    def test_returns_spectrum(self):
        assert isinstance(sym_eigen(np.eye(2)), Spectrum)

    def test_reconstruction(self):
        a = random_symmetric(6, 0)
        w, v = sym_eigen(a)
        err = np.linalg.norm(a - v @ np.diag(w) @ v.T)
        assert err <= 1e-9 * np.linalg.norm(a)
        np.testing.assert_allclose(v.T @ v, np.eye(6), atol=1e-13)

    def test_against_lapack(self):
        for n in (1, 2, 5, 16, 40):
            a = random_symmetric(n, n)
            np.testing.assert_allclose(
                sym_eigvals(a), np.linalg.eigvalsh(a),
                atol=1e-12 * np.max(np.abs(a)),
            )

    def test_stack(self):
        stack = np.stack([random_symmetric(4, s) for s in range(7)])
        w, v = sym_eigen(stack)
        assert w.shape == (7, 4) and v.shape == (7, 4, 4)
        for a, wi, vi in zip(stack, w, v):
            np.testing.assert_allclose(vi @ np.diag(wi) @ vi.T, a, atol=1e-12 * np.abs(a).max())
        np.testing.assert_array_equal(sym_eigvals(stack), w)

    def test_zero_and_scalar(self):
        assert np.array_equal(sym_eigvals(np.zeros((3, 3))), np.zeros(3))
        assert np.array_equal(sym_eigvals([[2.5]]), [2.5])

    def test_sweep_budget(self):
        with pytest.raises(NoConvergence):
            sym_eigen(random_symmetric(8, 1), max_sweeps=1)

    def test_input_is_symmetrized(self):
        a = np.array([[1.0, 2.0], [0.0, 1.0]])
        np.testing.assert_allclose(sym_eigvals(a), [0.0, 2.0], atol=1e-15)

    @given(seed=seeds, n=dims)
    def test_orthonormal_and_ascending(self, seed, n):
        w, v = sym_eigen(random_symmetric(n, seed))
        assert np.all(np.diff(w) >= 0)
        np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-13)


class TestCharPoly:
    @pytest.mark.parametrize("evals, expected", [
        ([1.0, 2.0], [2.0, -3.0, 1.0]),
        ([1.0, 2.0, 3.0], [-6.0, 11.0, -6.0, 1.0]),
        ([4.5], [-4.5, 1.0]),
    ])
    def test_from_spectrum(self, evals, expected):
        assert np.array_equal(char_poly_from_spectrum(np.array(evals)), expected)

    def test_accepts_spectrum(self):
        s = sym_eigen(np.diag([2.0, 1.0]))
        assert np.array_equal(char_poly_from_spectrum(s), [2.0, -3.0, 1.0])

    @pytest.mark.parametrize("a, expected", [
        (np.eye(2), [1.0, -2.0, 1.0]),
        ([[2.0, 1.0], [1.0, 2.0]], [3.0, -4.0, 1.0]),
    ])
    def test_faddeev(self, a, expected):
        np.testing.assert_allclose(char_poly_faddeev(a), expected, rtol=1e-15)

    def test_faddeev_against_numpy_poly(self):
        a = random_symmetric(5, 2)
        # numpy.poly returns high order first
        np.testing.assert_allclose(char_poly_faddeev(a), np.poly(a)[::-1], rtol=1e-10, atol=1e-10)

    @given(seed=seeds, n=dims)
    def test_two_routes_agree(self, seed, n):
        a = random_spd(n, (-2, 2), seed)
        vieta = char_poly_from_spectrum(sym_eigen(a))
        faddeev = char_poly_faddeev(a)
        assert np.max(np.abs(vieta - faddeev)) <= 1e-8 * np.max(np.abs(vieta))

    @given(seed=seeds, n=dims)
    def test_trace_and_det(self, seed, n):
        a = random_spd(n, (-2, 2), seed)
        coeffs = char_poly_from_spectrum(sym_eigen(a))
        np.testing.assert_allclose(coeffs[n - 1], -np.trace(a), rtol=1e-9)
        np.testing.assert_allclose(coeffs[0], (-1) ** n * np.linalg.det(a), rtol=1e-9)

    @given(seed=seeds, n=dims)
    def test_eigenvalues_are_roots(self, seed, n):
        s = sym_eigen(random_spd(n, (-2, 2), seed))
        coeffs = char_poly_from_spectrum(s)
        for lam in s.eigenvalues:
            bound = 1e-8 * np.max(np.abs(coeffs)) * max(1.0, abs(lam)) ** n
            assert abs(eval_poly(coeffs, lam)) <= bound


class TestEvalPoly:
    @pytest.mark.parametrize("lam, expected", [(0.0, 2.0), (1.0, 0.0), (-1.0, 6.0)])
    def test_quadratic(self, lam, expected):
        assert eval_poly([2.0, -3.0, 1.0], lam) == expected

    def test_broadcasts(self):
        out = eval_poly([2.0, -3.0, 1.0], np.array([0.0, 1.0, -1.0]))
        assert np.array_equal(out, [2.0, 0.0, 6.0])
        stacked = eval_poly(np.array([[2.0, -3.0, 1.0], [-1.0, 0.0, 1.0]]), 2.0)
        assert np.array_equal(stacked, [0.0, 3.0])


class TestSymmetricFunctions:
    def test_elem_sym(self):
        assert np.array_equal(elem_sym_polys([1.0, 2.0, 3.0]), [6.0, 11.0, 6.0])
        assert np.array_equal(elem_sym_polys([7.25]), [7.25])
        assert np.array_equal(elem_sym_polys([1.0, 1.0, 1.0, 1.0]), [4.0, 6.0, 4.0, 1.0])

    def test_power_sums(self):
        assert np.array_equal(power_sums([1.0, 2.0, 3.0]), [6.0, 14.0, 36.0])
        assert np.array_equal(power_sums([0.0, 0.0]), [0.0, 0.0])

    def test_elem_sym_against_numpy_poly(self):
        x = np.random.default_rng(4).uniform(-3, 3, 6)
        expected = np.poly(x)[1:] * (-1.0) ** np.arange(1, 7)
        np.testing.assert_allclose(elem_sym_polys(x), expected, rtol=1e-12)

    @given(values=log_values)
    def test_newton_identities(self, values):
        n = len(values)
        e = np.concatenate([[1.0], elem_sym_polys(values)])
        p = power_sums(values)
        for k in range(1, n + 1):
            rhs = sum((-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1))
            scale = sum(abs(e[k - i] * p[i - 1]) for i in range(1, k + 1))
            assert abs(k * e[k] - rhs) <= 1e-10 * scale

    def test_stacked(self):
        vals = np.array([[1.0, 2.0, 3.0], [1.0, 1.0, 1.0]])
        assert np.array_equal(elem_sym_polys(vals), [[6.0, 11.0, 6.0], [3.0, 3.0, 1.0]])


class TestRandomSpd:
    def test_forced_eigenvalue(self):
        for seed in (0, 1, 99):
            np.testing.assert_allclose(random_spd(1, (0, 0), seed), [[1.0]], rtol=1e-15)

    def test_deterministic(self):
        a = random_spd(5, (-2, 2), 123)
        b = random_spd(5, (-2, 2), 123)
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, random_spd(5, (-2, 2), 124))

    def test_seed_seven(self):
        cholesky(random_spd(4, (-2, 2), 7))

    def test_bad_range(self):
        with pytest.raises(ValueError):
            random_spd(3, (1, 0), 0)

    @given(seed=seeds, n=dims)
    def test_spd_with_eigenvalues_in_range(self, seed, n):
        a = random_spd(n, (-2, 2), seed)
        cholesky(a)
        assert np.array_equal(a, a.T)
        w = sym_eigvals(a)
        assert np.all(w > 0)
        assert w[0] >= 1e-2 * (1 - 1e-10) and w[-1] <= 1e2 * (1 + 1e-10)


class TestIsPsd:
    def test_cases(self):
        assert is_psd(np.eye(3), 0.0)
        assert not is_psd(np.diag([1.0, -1.0]), 1e-12)
        assert is_psd(np.zeros((2, 2)), 0.0)

    def test_tolerance_is_relative(self):
        a = np.diag([1.0, -1e-13])
        assert not is_psd(a, 0.0)
        assert is_psd(a, 1e-12)
        assert is_psd(1e6 * a, 1e-12)


def test_symmetrize():
    a = np.array([[1.0, 2.0], [4.0, 3.0]])
    assert np.array_equal(symmetrize(a), [[1.0, 3.0], [3.0, 3.0]])

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kalman_spectral.exceptions import DegenerateEigenvalue, EvalAtEigenvalue
from kalman_spectral.kalman import posterior_cov, random_problem
from kalman_spectral.linalg import char_poly_from_spectrum, max_norm, sym_eigvals
from kalman_spectral.objectives import (
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
    coefficient_vector,
    eval_objective,
    evaluate_on_cov,
    objective_grad_K,
    objective_grad_P,
    random_symmetric_poly,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
sizes = st.integers(min_value=1, max_value=6)

DIAG12 = np.diag([1.0, 2.0])


def e1(n):
    return SymmetricPoly(SymmetricPolySpec([(1.0, [1] + [0] * (n - 1))]))


def en(n):
    return SymmetricPoly(SymmetricPolySpec([(1.0, [0] * (n - 1) + [1])]))


def catalog(n, evals, rng):
    """Every objective kind, with lam kept well away from ``evals``."""
    lam_1, lam_n = evals[0], evals[-1]
    specs = [Trace(), Det(), SmallestEig(), CoeffAbsSum()]
    specs += [CharMag(lam) for lam in (-lam_1, 0.0, 0.5 * lam_1)]
    specs += [LogCharMag(lam) for lam in (0.5 * lam_1, 2.0 * lam_n + 1.0)]
    specs += [CoefficientMag(i) for i in range(n)]
    specs += [ElemSym(k) for k in range(1, n + 1)]
    specs += [SymmetricPoly(random_symmetric_poly(n, rng)) for _ in range(2)]
    return specs


def richardson_grad(prob, K, spec, h):
    # central differences at h and h/2 combined to cancel the h^2 term;
    # all perturbed gains go through one stacked evaluation
    n, m = K.shape
    basis = np.eye(n * m).reshape(n * m, n, m)
    steps = np.array([h, -h, h / 2, -h / 2])
    gains = K + steps[:, None, None, None] * basis
    vals = eval_objective(prob, gains.reshape(-1, n, m), spec).reshape(4, n, m)
    coarse = (vals[0] - vals[1]) / (2 * h)
    fine = (vals[2] - vals[3]) / h
    return (4.0 * fine - coarse) / 3.0


class TestValues:
    def test_scalar_trace(self, scalar_problem):
        assert eval_objective(scalar_problem, [[0.5]], Trace()) == 0.5

    @pytest.mark.parametrize("spec, expected", [
        (CharMag(-1.0), 6.0),
        (CoeffAbsSum(), 6.0),
        (SymmetricPoly(SymmetricPolySpec([(1.0, [1, 0])])), 3.0),
        (Det(), 2.0),
        (SmallestEig(), 1.0),
        (CoefficientMag(1), 3.0),
        (ElemSym(2), 2.0),
        (LogCharMag(0.0), np.log(2.0)),
    ])
    def test_diag_one_two(self, spec, expected):
        assert evaluate_on_cov(spec, DIAG12) == pytest.approx(expected, rel=1e-15)

    def test_charmag_on_the_spectrum_is_zero(self):
        assert evaluate_on_cov(CharMag(2.0), DIAG12) == 0.0
        np.testing.assert_array_equal(objective_grad_P(CharMag(2.0), DIAG12), np.zeros((2, 2)))

    def test_logcharmag_on_the_spectrum(self):
        with pytest.raises(EvalAtEigenvalue):
            evaluate_on_cov(LogCharMag(1.0), DIAG12)
        with pytest.raises(EvalAtEigenvalue):
            objective_grad_P(LogCharMag(2.0), DIAG12)

    def test_stack(self):
        stack = np.stack([DIAG12, np.diag([3.0, 4.0])])
        np.testing.assert_allclose(evaluate_on_cov(Det(), stack), [2.0, 12.0])
        np.testing.assert_allclose(evaluate_on_cov(CharMag(0.0), stack), [2.0, 12.0])
        np.testing.assert_allclose(evaluate_on_cov(Trace(), stack), [3.0, 7.0])

    def test_against_numpy(self):
        prob = random_problem(5, 3, 12)
        cov = prob.posterior
        lam = -0.7
        assert evaluate_on_cov(Det(), cov) == pytest.approx(np.linalg.det(cov), rel=1e-10)
        assert evaluate_on_cov(CharMag(lam), cov) == pytest.approx(
            abs(np.linalg.det(lam * np.eye(5) - cov)), rel=1e-10)
        assert evaluate_on_cov(SmallestEig(), cov) == pytest.approx(
            np.linalg.eigvalsh(cov)[0], rel=1e-10)

    def test_labels(self):
        assert [str(s) for s in (Trace(), Det(), SmallestEig(), CoeffAbsSum())] == [
            "trace", "det", "lmin", "coeffsum"]
        assert CharMag(-1).label == "charmag:-1.0"
        assert LogCharMag(0.25).label == "logcharmag:0.25"
        assert CoefficientMag(2).label == "coeff:2"
        assert ElemSym(1).label == "esym:1"
        spec = SymmetricPolySpec([(2.0, [1, 0]), (-1.5, [0, 2])])
        assert SymmetricPoly(spec).label == "sympoly[2.0*e1 + -1.5*e2^2]"


class TestIdentities:
    @given(seed=seeds, n=sizes, m=sizes)
    def test_vieta_identifications(self, seed, n, m):
        prob = random_problem(n, m, seed)
        K = np.random.default_rng(seed).standard_normal((n, m))
        val = lambda spec: eval_objective(prob, K, spec)
        assert val(Trace()) == pytest.approx(val(e1(n)), rel=1e-10)
        assert val(Det()) == pytest.approx(val(en(n)), rel=1e-10)
        assert val(CharMag(0.0)) == pytest.approx(val(Det()), rel=1e-10)
        assert val(CoeffAbsSum()) == pytest.approx(val(CharMag(-1.0)), rel=1e-10)

    @given(seed=seeds, n=sizes, lam=st.floats(-1e3, -1e-3))
    def test_charmag_below_zero_is_absolute_coefficient_sum(self, seed, n, lam):
        prob = random_problem(n, 2, seed)
        a = coefficient_vector(prob, prob.gain)
        expected = np.sum(np.abs(a) * abs(lam) ** np.arange(n + 1))
        assert eval_objective(prob, prob.gain, CharMag(lam)) == pytest.approx(expected, rel=1e-10)

    def test_coefficients(self, scalar_problem):
        np.testing.assert_allclose(coefficient_vector(scalar_problem, [[0.5]]), [-0.5, 1.0])
        assert np.array_equal(char_poly_from_spectrum(sym_eigvals(DIAG12)), [2.0, -3.0, 1.0])
        prob = random_problem(4, 2, 3)
        a = coefficient_vector(prob, prob.gain)
        assert abs(a[3]) == pytest.approx(np.trace(prob.posterior), rel=1e-9)


class TestGradients:
    def test_grad_p_examples(self):
        np.testing.assert_array_equal(objective_grad_P(Trace(), DIAG12), np.eye(2))
        np.testing.assert_allclose(objective_grad_P(Det(), np.diag([2.0, 3.0])), np.diag([3.0, 2.0]),
                                   rtol=1e-15)
        np.testing.assert_allclose(objective_grad_P(LogCharMag(0.0), DIAG12), np.diag([1.0, 0.5]),
                                   rtol=1e-15)

    def test_scalar_grad_k(self, scalar_problem):
        assert np.array_equal(objective_grad_K(scalar_problem, [[0.0]], Trace()), [[-2.0]])

    def test_degenerate_smallest_eigenvalue(self):
        with pytest.raises(DegenerateEigenvalue):
            objective_grad_P(SmallestEig(), np.diag([1.0, 1.0 + 1e-10, 3.0]))
        objective_grad_P(SmallestEig(), np.diag([1.0, 1.0 + 1e-6, 3.0]))

    @given(seed=seeds, n=sizes)
    def test_grad_p_matches_directional_differences(self, seed, n):
        rng = np.random.default_rng(seed)
        cov = random_problem(n, 1, seed).P
        evals = sym_eigvals(cov)
        D = rng.standard_normal((n, n))
        D = (D + D.T) / 2
        h = 1e-5 * evals[0]
        for spec in catalog(n, evals, rng):
            if isinstance(spec, SmallestEig) and n > 1 and evals[1] - evals[0] < 1e-3 * evals[-1]:
                continue
            an = np.sum(objective_grad_P(spec, cov) * D)
            fd = (evaluate_on_cov(spec, cov + h * D) - evaluate_on_cov(spec, cov - h * D)) / (2 * h)
            scale = abs(evaluate_on_cov(spec, cov)) / evals[0] + abs(an)
            assert abs(an - fd) <= 1e-4 * scale, spec.label

    @settings(max_examples=30)
    @given(seed=seeds, n=sizes, m=sizes)
    def test_grad_k_matches_richardson(self, seed, n, m):
        prob = random_problem(n, m, seed, log10_eig_range_P=(-1, 1), log10_eig_range_R=(-1, 1))
        rng = np.random.default_rng(seed)
        K = prob.gain + 0.1 * rng.standard_normal((n, m))
        evals = sym_eigvals(posterior_cov(prob, K))
        for spec in catalog(n, evals, rng):
            try:
                an = objective_grad_K(prob, K, spec)
            except DegenerateEigenvalue:
                continue
            if isinstance(spec, SmallestEig) and n > 1 and evals[1] - evals[0] < 1e-2 * evals[-1]:
                continue
            fd = richardson_grad(prob, K, spec, 1e-3)
            denom = max(max_norm(an), max_norm(fd), 1e-300)
            assert max_norm(an - fd) / denom <= 1e-5, spec.label

    @given(seed=seeds, n=sizes, m=sizes)
    def test_zero_at_optimum(self, seed, n, m):
        prob = random_problem(n, m, seed)
        rng = np.random.default_rng(seed)
        evals = sym_eigvals(prob.posterior)
        for spec in catalog(n, evals, rng):
            try:
                g = objective_grad_K(prob, prob.gain, spec)
            except DegenerateEigenvalue:
                continue
            scale = max(1.0, abs(eval_objective(prob, prob.gain, spec)))
            assert max_norm(g) <= 1e-9 * scale, spec.label


class TestSpecValidation:
    def test_index_bounds(self):
        with pytest.raises(ValueError):
            evaluate_on_cov(CoefficientMag(2), DIAG12)
        with pytest.raises(ValueError):
            evaluate_on_cov(ElemSym(0), DIAG12)
        with pytest.raises(ValueError):
            evaluate_on_cov(ElemSym(3), DIAG12)
        with pytest.raises(ValueError):
            evaluate_on_cov(e1(3), DIAG12)

    def test_lam_must_be_finite(self):
        with pytest.raises(ValueError):
            CharMag(np.inf)
        with pytest.raises(ValueError):
            LogCharMag(np.nan)

    def test_sympoly_spec(self):
        with pytest.raises(ValueError):
            SymmetricPolySpec([])
        with pytest.raises(ValueError):
            SymmetricPolySpec([(1.0, [1, 0]), (1.0, [1])])
        with pytest.raises(ValueError):
            SymmetricPolySpec([(1.0, [-1, 0])])
        spec = SymmetricPolySpec([(2.0, [1, 0]), (3.0, [0, 2])])
        assert spec.n == 2
        # e = (3, 2): 2*3 + 3*2^2
        assert spec.evaluate(np.array([3.0, 2.0])) == 18.0
        np.testing.assert_array_equal(spec.gradient(np.array([3.0, 2.0])), [2.0, 12.0])

    def test_random_sympoly_is_seeded(self):
        a = random_symmetric_poly(4, np.random.default_rng(5))
        b = random_symmetric_poly(4, np.random.default_rng(5))
        assert a == b and a.n == 4 and len(a.terms) == 3

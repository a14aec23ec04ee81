import math

import numpy as np
import pytest

from conegamma import gamma_law as gl
from conegamma import matrix_gamma as mg
from conegamma import mcstats
from conegamma import sampler as sm
from conegamma import spectral as sp
from conegamma.errors import DomainError, ValidationError
from conegamma.verify import importance_levy_integral

SIGMA = np.array([[2.0, 0.5], [0.5, 1.0]])


def random_spd(rng, d):
    g = rng.standard_normal((d, d))
    return g @ g.T + 0.5 * np.eye(d)


class TestParams:
    def test_omega_presets(self):
        assert mg.AGammaParams(3, 2.0).omega == 6.0
        assert mg.AGammaParams(3, 2.0, None, "d").omega == 3.0
        assert mg.AGammaParams(3, 2.0, None, "one").omega == 1.0

    def test_eta_bound(self):
        with pytest.raises((DomainError, ValidationError)):
            mg.AGammaParams(3, 1.0)

    def test_sigma_spd(self):
        with pytest.raises(ValidationError):
            mg.AGammaParams(2, 3.0, [[1.0, 2.0], [2.0, 1.0]])


class TestConstant:
    def test_d1(self):
        for eta in (0.3, 2.0):
            assert mg.agamma_constant(1, eta, 2.5) == pytest.approx(2.5, rel=1e-13)

    def test_d2(self):
        assert mg.agamma_constant(2, 3.0, 1.0) == pytest.approx(120 / (1.5 * math.pi), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            mg.agamma_constant(3, 1.0, 1.0)


class TestLevyDensity:
    def test_one_dimensional(self):
        p = mg.AGammaParams(1, 1.7, [[2.0]], 3.0)
        for x in (0.1, 1.0, 4.0):
            assert mg.agamma_levy_density(np.array([[x]]), p) == pytest.approx(3.0 * math.exp(-x / 2.0) / x, rel=1e-13)

    def test_standard_gamma_levy_density(self):
        p = mg.AGammaParams(1, 1.0, [[1.0]], 1.0)
        assert mg.agamma_levy_density(np.array([[2.0]]), p) == pytest.approx(math.exp(-2.0) / 2.0, rel=1e-13)

    def test_zero_off_cone(self):
        p = mg.AGammaParams(2, 3.0)
        assert mg.agamma_levy_density(np.array([[1.0, 0.0], [0.0, -0.1]]), p) == 0.0

    @pytest.mark.parametrize("d", [2, 3])
    def test_change_of_variables(self, rng, d):
        sigma = random_spd(rng, d)
        lam, vec = np.linalg.eigh(sigma)
        root = (vec * np.sqrt(lam)) @ vec.T
        ps, pi = mg.AGammaParams(d, d + 0.3, sigma, 2.0), mg.AGammaParams(d, d + 0.3, None, 2.0)
        ys = np.array([random_spd(rng, d) for _ in range(100)])
        lhs = mg.agamma_levy_density(root @ ys @ root, ps) * np.linalg.det(sigma) ** ((d + 1) / 2)
        np.testing.assert_allclose(lhs, mg.agamma_levy_density(ys, pi), rtol=1e-10)


class TestLaw:
    def test_identity_gives_unit_beta(self, rng):
        law = mg.agamma_law(mg.AGammaParams(3, 2.0))
        u = law.alpha.sample(rng, 100)
        np.testing.assert_allclose(sp.scale_values_at(law.beta, law.alpha, u), 1.0)

    def test_existence_for_all_eta(self):
        for eta in (0.51, 1.0, 5.0):
            law = mg.agamma_law(mg.AGammaParams(2, eta, SIGMA, 1.0))
            assert gl.existence_check(law.alpha, law.beta).finite
            assert gl.essinf_beta(law) >= 1 / np.linalg.eigvalsh(SIGMA).max() - 1e-12


class TestLevyMoments:
    def test_power_one_is_mean(self):
        p = mg.AGammaParams(3, 2.0, random_spd(np.random.default_rng(0), 3), 1.7)
        np.testing.assert_allclose(mg.levy_moment_integral(p, 1).value, p.omega / 3 * p.sigma, rtol=1e-12)

    def test_det_scalar(self):
        p = mg.AGammaParams(1, 1.3, [[2.5]], 1.7)
        assert mg.levy_moment_integral(p, 1, "det").value == pytest.approx(1.7 * 2.5, rel=1e-12)

    def test_power_two_importance_sampling(self):
        p = mg.AGammaParams(2, 3.0, None, 1.0)
        rhs = mg.levy_moment_integral(p, 2).value
        est, se = importance_levy_integral(p, lambda X: X @ X, 100_000, np.random.default_rng(3))
        assert np.all(np.abs(est - rhs) <= 5 * se)
        # (1/4) B(6, 2) E W^2 with n = 6: E W^2 = n(n+1) I + n tr(I) I = 54 I
        np.testing.assert_allclose(rhs, np.eye(2) * 54 / 4 / 42, rtol=1e-13)

    def test_det_importance_sampling(self):
        p = mg.AGammaParams(2, 3.0, None, 1.0)
        rhs = mg.levy_moment_integral(p, 1, "det").value
        est, se = importance_levy_integral(p, lambda X: np.linalg.det(X), 100_000, np.random.default_rng(4))
        assert abs(est - rhs) <= 5 * se

    def test_third_power_needs_rng(self):
        p = mg.AGammaParams(2, 3.0)
        with pytest.raises(ValidationError):
            mg.levy_moment_integral(p, 3)
        est = mg.levy_moment_integral(p, 3, rng=np.random.default_rng(1), n_mc=20_000)
        assert est.stderr > 0


class TestMoments:
    def test_mean_presets(self):
        assert np.allclose(mg.agamma_mean(mg.AGammaParams(2, 3.0, SIGMA, "d")), SIGMA)
        assert np.allclose(mg.agamma_mean(mg.AGammaParams(2, 3.0, SIGMA, "d_eta")), 3.0 * SIGMA)

    def test_cov_closed_form(self):
        p = mg.AGammaParams(2, 3.0, SIGMA, 2.0)
        d, eta, om = 2, 3.0, 2.0
        K = mg.commutation_matrix(d)
        vs = mg.vec(SIGMA)
        expect = om / (d * (eta * d + 1)) * (0.5 * (np.eye(4) + K) @ np.kron(SIGMA, SIGMA) + eta * np.outer(vs, vs))
        np.testing.assert_allclose(mg.agamma_cov(p), expect, rtol=1e-13)

    def test_scalar_variance_monte_carlo(self):
        p = mg.AGammaParams(1, 2.0, [[1.0]], 1.5)
        x = sm.sample(mg.agamma_law(p), 100_000, np.random.default_rng(2))
        rep = mcstats.moment_report(x.reshape(-1, 1), mg.agamma_mean(p).reshape(-1), mg.agamma_cov(p), threshold=5.0)
        assert rep.passed
        # d = 1 reduces to Gamma(omega, 1/sigma)
        assert mg.agamma_cov(p)[0, 0] == pytest.approx(1.5)


class TestCommutation:
    def test_d1(self):
        np.testing.assert_array_equal(mg.commutation_matrix(1), [[1.0]])

    @pytest.mark.parametrize("d", [2, 3])
    def test_involution(self, d):
        K = mg.commutation_matrix(d)
        np.testing.assert_array_equal(K @ K, np.eye(d * d))

    def test_transpose_action(self, rng):
        A = rng.standard_normal((3, 3))
        np.testing.assert_allclose(mg.commutation_matrix(3) @ mg.vec(A), mg.vec(A.T))


class TestWishart:
    def test_chi_square(self):
        w = mg.wishart_moments(1, 5.0, [[1.0]], 2)
        assert w.mean[0, 0] == 5.0 and w.cov[0, 0] == pytest.approx(10.0)

    def test_d2_identity(self):
        w = mg.wishart_moments(2, 6.0, None, 2)
        np.testing.assert_allclose(w.mean, 6 * np.eye(2))
        np.testing.assert_allclose(w.cov, 6 * (np.eye(4) + mg.commutation_matrix(2)))

    def test_monte_carlo_d3(self, rng):
        sigma = random_spd(rng, 3)
        w = mg.wishart_moments(3, 7.0, sigma, 2)
        draws = sm.sample_wishart(3, 7.0, sigma, np.random.default_rng(11), size=100_000)
        flat = draws.reshape(len(draws), -1)
        # entrywise mean, then the covariance of vec W
        assert mcstats.mean_report(flat, w.mean.reshape(-1)).passed
        vecs = np.stack([mg.vec(x) for x in draws])
        assert mcstats.covariance_report(vecs, w.cov, threshold=4.0).passed


class TestMP:
    def test_p1_eps1(self):
        for d in (2, 7, 30):
            r = mg.mp_trace_asymptotics(d, 1.5 * d, 2.0, 1, 1.0)
            assert r["exact"] == pytest.approx(2.0 / d**2, rel=1e-12)

    def test_ratio_sequence(self):
        for d, tol in ((16, 0.15), (64, 0.05), (256, 0.02)):
            assert abs(mg.mp_trace_asymptotics(d, float(d), "d_eta", 2)["ratio"] - 1) <= tol

    def test_constant(self):
        assert mg.mp_constant(3, 0.5) == pytest.approx(10.0)


class TestBGamma:
    def test_trace_law(self):
        law = mg.bgamma_law(mg.BGammaParams(4, 2, 1.5))
        t = gl.trace_thorin_measure(law)
        np.testing.assert_allclose(t.locations, [1.5])
        np.testing.assert_allclose(t.masses, [4.0])

    def test_trace_ks(self):
        law = mg.bgamma_law(mg.BGammaParams(3, 1, 2.0))
        x = sm.sample(law, 10_000, np.random.default_rng(8))
        tr = np.trace(x, axis1=1, axis2=2)
        assert mcstats.ks_test(tr, lambda v: mcstats.gamma_cdf(v, 3.0, 2.0)).p_value > 0.001

    @pytest.mark.parametrize("k", [0.5, 1, 4, 20])
    def test_all_moments(self, k):
        assert gl.moment_order_check(mg.bgamma_law(mg.BGammaParams(4, 2)), k).finite


class TestGammaNormal:
    def params(self, q=3):
        return mg.GammaNormalParams(mg.agamma_law(mg.AGammaParams(2, 3.0, SIGMA, 2.0)), q)

    def test_zero(self):
        assert mg.gamma_normal_cf(self.params(), np.zeros((2, 3))) == 1.0

    def test_homogeneous_scalar(self):
        law = mg.agamma_law(mg.AGammaParams(2, 3.0, None, 2.0))
        p = mg.GammaNormalParams(law, 2)
        for th in (0.3, 1.0, 2.5):
            assert mg.gamma_normal_cf(p, th * np.eye(2)) == pytest.approx((1 + th**2 / 2) ** -2.0, rel=1e-12)

    def test_real_positive_and_two_paths(self, rng):
        p = self.params()
        for _ in range(100):
            th = rng.uniform(-1, 1, (2, 3))
            v = mg.gamma_normal_cf(p, th)
            assert isinstance(v, float) and 0 < v <= 1
        for _ in range(5):
            th = rng.uniform(-1, 1, (2, 3))
            assert mg.gamma_normal_cf(p, th) == pytest.approx(mg.gamma_normal_cf_via_laplace(p, th), rel=1e-12)

    def test_shape_checked(self):
        with pytest.raises(ValidationError):
            mg.gamma_normal_cf(self.params(), np.zeros((3, 3)))

import math

import numpy as np
import pytest
from scipy import integrate

from conegamma import gamma_law as gl
from conegamma import matrix_gamma as mg
from conegamma import mcstats
from conegamma import sampler as sm
from conegamma import spectral as sp
from conegamma import wiener_gamma as wg
from conegamma.errors import DomainError, UnsupportedError, ValidationError

from conftest import one_dim

ATOM_H = wg.thorin_to_h(wg.ThorinMeasure.from_atoms([2.0], [3.0]))
STABLE_H = wg.ThorinFunction(wg.stable_rule(wg.STABLE_HALF_THETA))


class TestThorinMeasure:
    def test_single_atom_laplace(self):
        t = wg.ThorinMeasure.from_atoms([2.0], [3.0])
        for z in (0.0, 0.5, 3.0, 40.0):
            assert wg.ggc_laplace(t, z) == pytest.approx((1 + z / 2) ** -3, rel=1e-14)

    def test_two_atoms_product(self):
        t = wg.ThorinMeasure.from_atoms([2.0, 5.0], [3.0, 1.0])
        z = 1.7
        assert wg.ggc_laplace(t, z) == pytest.approx((1 + z / 2) ** -3 * (1 + z / 5) ** -1, rel=1e-14)

    def test_merge_repeated(self):
        t = wg.ThorinMeasure.from_atoms([2.0, 2.0, 1.0], [1.0, 2.0, 4.0])
        np.testing.assert_array_equal(t.locations, [1.0, 2.0])
        np.testing.assert_array_equal(t.masses, [4.0, 3.0])

    def test_stable_laplace(self):
        t = wg.ThorinMeasure.stable(1.3, 0.5)
        for z in (0.2, 1.0, 9.0):
            assert wg.ggc_laplace(t, z) == pytest.approx(math.exp(-1.3 * math.sqrt(z)), rel=1e-9)

    def test_integrability_at_construction(self):
        with pytest.raises(ValidationError):
            wg.PowerDensity(1.0, -1.5)  # int_0^1 |ln z| z^-1.5 diverges
        with pytest.raises(ValidationError):
            wg.PowerDensity(1.0, 0.2)  # int_1^inf z^-0.8 diverges
        with pytest.raises(ValidationError):
            wg.ThorinMeasure([0.0], [1.0])


class TestThorinToH:
    def test_atom(self):
        np.testing.assert_allclose(ATOM_H(np.array([1e-9, 1.0, 2.999, 3.0])), 0.5)
        np.testing.assert_allclose(ATOM_H(np.array([3.0001, 10.0])), 0.0)

    def test_zero(self):
        h = wg.thorin_to_h(wg.ThorinMeasure.from_atoms([], []))
        assert np.all(h(np.array([0.1, 1.0, 100.0])) == 0.0)

    def test_stable_preset(self):
        s = np.array([0.3, 1.0, 2.0, 17.0])
        np.testing.assert_allclose(STABLE_H(s), 4 / (np.pi * s**2), rtol=1e-14)

    def test_stable_round_trip(self):
        # image of Lebesgue under s -> 1/h(s) against the stable Thorin density
        img = wg.h_to_thorin(STABLE_H)
        ref = wg.ThorinMeasure.stable(wg.STABLE_HALF_THETA, 0.5)
        grid = np.geomspace(1e-3, 1e3, 30)
        np.testing.assert_allclose(img.density(grid), ref.density(grid), rtol=1e-13)
        np.testing.assert_allclose(img.cdf(grid), ref.cdf(grid), rtol=1e-13)

    def test_stable_via_thorin_to_h(self):
        h = wg.thorin_to_h(wg.ThorinMeasure.stable(wg.STABLE_HALF_THETA, 0.5))
        s = np.array([0.5, 3.0])
        np.testing.assert_allclose(h(s), 4 / (np.pi * s**2), rtol=1e-12)

    def test_atoms_round_trip(self):
        t = wg.ThorinMeasure.from_atoms([0.5, 2.0, 7.0], [1.0, 0.3, 2.0])
        back = wg.h_to_thorin(wg.thorin_to_h(t))
        np.testing.assert_allclose(back.locations, t.locations, rtol=1e-14)
        np.testing.assert_allclose(back.masses, t.masses, rtol=1e-14)

    def test_exponential_inverse(self):
        t = wg.ExponentialRule(2.0, 0.5).thorin_measure()
        h = wg.thorin_to_h(t)
        s = np.array([0.1, 1.0, 6.0])
        np.testing.assert_allclose(h(s), 2.0 * np.exp(-0.5 * s), rtol=1e-12)

    def test_json_round_trip(self):
        for h in (ATOM_H, STABLE_H, wg.ThorinFunction(wg.ExponentialRule(1.0, 2.0), True),
                  wg.ThorinFunction((wg.PowerLawRule(1.0, 2.0), wg.ExponentialRule(1.0, 1.0)), True)):
            again = wg.ThorinFunction.from_json(h.to_json())
            assert again.to_json() == h.to_json()


class TestIntegrability:
    def test_exponential_ok(self):
        hc = wg.h_integrability_check(wg.ThorinFunction(wg.ExponentialRule(1.0, 1.0)), one_dim(1.0, 1.0))
        ref, _ = integrate.quad(lambda s: math.log1p(math.exp(-s)), 0, np.inf)
        assert hc.ok and hc.value == pytest.approx(ref, rel=1e-10)

    def test_one_over_s_fails(self):
        hc = wg.h_integrability_check(wg.ThorinFunction(wg.PowerLawRule(1.0, 1.0)), one_dim(1.0, 1.0))
        assert not hc.ok and hc.value == math.inf

    def test_stable_ok(self):
        hc = wg.h_integrability_check(STABLE_H, one_dim(1.0, 1.0))
        # int log(1 + 4/(pi s^2)) ds = 2 pi sqrt(4/pi) / 2
        assert hc.ok and hc.value == pytest.approx(2 * math.sqrt(math.pi), rel=1e-9)

    def test_power_log_integral(self):
        r = wg.PowerLawRule(0.7, 2.5)
        ref, _ = integrate.quad(lambda s: math.log1p(0.7 * 1.3 * s**-2.5), 0, np.inf, limit=200)
        assert r.log_integral(1.3) == pytest.approx(ref, rel=1e-9)

    def test_exponential_log_integral(self):
        r = wg.ExponentialRule(3.0, 0.4)
        ref, _ = integrate.quad(lambda s: math.log1p(2.0 * 3.0 * math.exp(-0.4 * s)), 0, np.inf, limit=200)
        assert r.log_integral(2.0) == pytest.approx(ref, rel=1e-10)

    def test_non_integrable_rejected_by_transform(self):
        with pytest.raises(DomainError):
            wg.yh_laplace(wg.ThorinFunction(wg.PowerLawRule(1.0, 1.0)), one_dim(1.0, 1.0), [1.0])


class TestYhLaplace:
    def test_atom(self):
        for z in np.linspace(0, 10, 21):
            assert abs(wg.yh_laplace(ATOM_H, one_dim(1.0, 1.0), [z]) - (1 + z / 2) ** -3) <= 1e-8

    def test_stable_closed_form(self):
        for z in (0.5, 2.0, 8.0):
            assert wg.yh_laplace(STABLE_H, one_dim(1.0, 1.0), [z]) == pytest.approx(math.exp(-2 * math.sqrt(math.pi * z)), rel=1e-10)

    def test_stable_slope(self):
        z = np.geomspace(0.5, 8, 12)
        y = [-math.log(wg.yh_laplace(STABLE_H, one_dim(1.0, 1.0), [t])) for t in z]
        slope = np.polyfit(np.log(z), np.log(y), 1)[0]
        assert abs(slope - 0.5) <= 1e-3

    def test_cone_base_homogeneous(self):
        # h = 1/2 on (0, 3] over AGamma(I) base gives AGamma with alpha scaled by 3, beta doubled
        base = mg.agamma_law(mg.AGammaParams(2, 3.0, None, 2.0))
        T = np.array([[0.4, 0.1], [0.1, 0.2]])
        expect = gl.laplace_transform(gl.scale(gl.process_marginal(base, 3.0), 0.5), T)
        assert wg.yh_laplace(ATOM_H, base, T) == pytest.approx(expect, rel=1e-12)

    def test_unsupported_family(self):
        base = mg.agamma_law(mg.AGammaParams(2, 3.0, np.array([[2.0, 0.5], [0.5, 1.0]]), 2.0))
        with pytest.raises(UnsupportedError):
            wg.yh_laplace(ATOM_H, base, np.eye(2))


class TestLevyDensity:
    def test_atom(self):
        base = one_dim(1.0, 1.0)
        for r in (0.1, 1.0, 3.0):
            assert wg.yh_levy_density(ATOM_H, base, [1.0], r) == pytest.approx(3 * math.exp(-2 * r) / r, rel=1e-13)

    def test_completely_monotone(self):
        base = one_dim(1.0, 1.0)
        r = np.linspace(0.5, 3.0, 12)
        for h in (STABLE_H, wg.ThorinFunction(wg.ExponentialRule(1.0, 1.0))):
            k = np.array([wg.k_function(h, base, [1.0], t) for t in r])
            for order in range(1, 5):
                diff = np.diff(k, order)
                assert np.all((-1) ** order * diff > 0)

    def test_vanishes_at_infinity(self):
        base = one_dim(1.0, 1.0)
        k = [wg.k_function(STABLE_H, base, [1.0], t) for t in (1.0, 10.0, 100.0, 1e4)]
        assert np.all(np.diff(k) < 0) and k[-1] < 1e-2


class TestSimulation:
    def test_zero(self):
        h = wg.thorin_to_h(wg.ThorinMeasure.from_atoms([], []))
        y = sm.simulate_wiener_gamma(h, one_dim(1.0, 1.0), rng=np.random.default_rng(0), size=10)
        assert np.all(y == 0)

    def test_atom_ks(self):
        y = sm.simulate_wiener_gamma(ATOM_H, one_dim(1.0, 1.0), eps=1e-8, rng=np.random.default_rng(9), size=10_000)
        assert mcstats.ks_test(y[:, 0], lambda v: mcstats.gamma_cdf(v, 3.0, 2.0)).p_value > 0.001

    def test_two_atoms_moments(self):
        t = wg.ThorinMeasure.from_atoms([2.0, 5.0], [3.0, 1.0])
        y = sm.simulate_wiener_gamma(wg.thorin_to_h(t), one_dim(1.0, 1.0), eps=1e-8, rng=np.random.default_rng(4), size=100_000)
        mean = 3 / 2 + 1 / 5
        var = 3 / 4 + 1 / 25
        assert mcstats.moment_report(y, [mean], [[var]]).passed

    def test_stable_laplace(self):
        base = one_dim(1.0, 1.0)
        y = sm.simulate_wiener_gamma(STABLE_H, base, eps=1e-4, rng=np.random.default_rng(10), size=100_000)
        rep = mcstats.compare_transform(y, lambda z: wg.yh_laplace(STABLE_H, base, [float(np.ravel(z)[0])]),
                                        [[0.5], [1.0], [2.0], [4.0], [8.0]])
        assert rep.passed

    def test_exponential_rule(self):
        base = one_dim(1.0, 1.0)
        h = wg.ThorinFunction(wg.ExponentialRule(2.0, 1.0))
        y = sm.simulate_wiener_gamma(h, base, eps=1e-8, rng=np.random.default_rng(12), size=50_000)
        rep = mcstats.compare_transform(y, lambda z: wg.yh_laplace(h, base, [float(np.ravel(z)[0])]),
                                        [[0.3], [1.0], [3.0]])
        assert rep.passed
        assert mcstats.mean_report(y, [2.0]).passed  # E Y = int h ds / beta

    def test_discrete_cone_base_per_atom(self):
        atoms = [np.diag([1.0, 0.0]), np.array([[0.5, 0.5], [0.5, 0.5]])]
        base = gl.GammaLaw(sp.DiscreteMeasure(atoms, [1.0, 2.0], sp.CONE), sp.PerAtomScale([1.0, 3.0]))
        h = wg.ThorinFunction((wg.PowerLawRule(1.0, 2.0), wg.ExponentialRule(1.0, 1.0)), True)
        y = sm.simulate_wiener_gamma(h, base, eps=1e-6, rng=np.random.default_rng(13), size=40_000)
        assert np.linalg.eigvalsh(y).min() > -1e-12
        T = [np.array([[0.5, 0.1], [0.1, 0.3]]), np.eye(2)]
        rep = mcstats.compare_transform(y.reshape(len(y), -1), lambda z: wg.yh_laplace(h, base, np.reshape(z, (2, 2))),
                                        [t.reshape(-1) for t in T])
        assert rep.passed

    def test_family_base(self):
        base = mg.agamma_law(mg.AGammaParams(2, 3.0, None, 2.0))
        h = wg.ThorinFunction(wg.ExponentialRule(1.0, 0.5))
        y = sm.simulate_wiener_gamma(h, base, eps=1e-6, rng=np.random.default_rng(14), size=20_000)
        T = np.array([[0.5, 0.1], [0.1, 0.3]])
        rep = mcstats.compare_transform(y.reshape(len(y), -1), lambda z: wg.yh_laplace(h, base, np.reshape(z, (2, 2))),
                                        [T.reshape(-1)])
        assert rep.passed

    def test_short_horizon_rejected(self):
        h = wg.ThorinFunction(wg.ExponentialRule(1.0, 0.1))
        with pytest.raises(DomainError):
            sm.simulate_wiener_gamma(h, one_dim(1.0, 1.0), S=1.0, rng=np.random.default_rng(0), size=2)

import math

import numpy as np
import pytest

from conegamma import gamma_law as gl
from conegamma import matrix_gamma as mg
from conegamma import mcstats
from conegamma import spectral as sp
from conegamma.errors import UnsupportedError, ValidationError


class TestDirections:
    def test_euclidean(self):
        np.testing.assert_allclose(sp.validate_direction([3, 4]), [0.6, 0.8], atol=1e-15)

    def test_trace_normalisation(self):
        out = sp.validate_direction(np.diag([2.0, 2.0]), sp.CONE)
        np.testing.assert_allclose(out, np.diag([0.5, 0.5]), atol=1e-15)

    def test_indefinite_rejected(self):
        with pytest.raises(ValidationError):
            sp.validate_direction([[1.0, 2.0], [2.0, 1.0]], sp.CONE)

    def test_zero_rejected(self):
        with pytest.raises(ValidationError):
            sp.validate_direction([0.0, 0.0])

    @pytest.mark.parametrize("norm", ["l1", "l2", "linf", "lp:3"])
    def test_unit_norm_under_declared_norm(self, norm, rng):
        for x in rng.standard_normal((20, 3)):
            out = sp.validate_direction(x, sp.VECTOR, norm)
            assert sp.as_norm(norm)(out) == pytest.approx(1.0, abs=1e-12)


class TestMeasures:
    def test_discrete_normalises_atoms(self):
        m = sp.DiscreteMeasure([[3.0, 4.0], [0.0, 2.0]], [1.0, 2.0])
        np.testing.assert_allclose(m.atoms, [[0.6, 0.8], [0.0, 1.0]])
        assert m.total_mass == 3.0

    def test_discrete_rejects_nonpositive_weight(self):
        with pytest.raises(ValidationError):
            sp.DiscreteMeasure([[1.0]], [0.0])

    def test_wishart_mass_and_eta(self):
        m = sp.WishartInducedMeasure(3, 2.0, 5.5)
        assert m.total_mass == 5.5
        with pytest.raises(ValidationError):
            sp.WishartInducedMeasure(3, 1.0, 1.0)

    def test_rank_q_mass(self):
        assert sp.RankQProjectorMeasure(4, 2).total_mass == 4.0

    def test_scales(self):
        with pytest.raises(ValidationError):
            sp.ConstantScale(0.0)
        sp.PerAtomScale([0.0, 1.0])  # zero allowed here
        with pytest.raises(ValidationError):
            sp.SigmaTraceScale([[1.0, 2.0], [2.0, 1.0]])

    def test_single_atom_sampling(self, rng):
        m = sp.DiscreteMeasure([[0.6, 0.8]], [2.0])
        out = sp.sample_direction(m, rng, 50)
        assert np.all(out == m.atoms[0])

    def test_wishart_directions_on_trace_sphere(self, rng):
        for d, eta in [(2, 0.7), (3, 1.5), (5, 4.0)]:
            u = sp.sample_direction(sp.WishartInducedMeasure(d, eta, 1.0), rng, 100_000)
            np.testing.assert_allclose(np.trace(u, axis1=1, axis2=2), 1.0, atol=1e-12)
            assert np.linalg.eigvalsh(u).min() >= -1e-12

    def test_wishart_eta_three_halves_is_uniform_on_sphere(self, rng):
        # d=2, eta=3/2: the smaller eigenvalue of U is (1 - cos t)/2 for a
        # uniformly distributed angle t on the unit sphere of traceless directions,
        # whose CDF is acos(1 - 2x)/pi on [0, 1/2] after folding
        u = sp.sample_direction(sp.WishartInducedMeasure(2, 1.5, 1.0), rng, 20_000)
        lam = np.linalg.eigvalsh(u)[:, 0]
        # (u11 - 1/2, u12) uniform in the disk of radius 1/2 => lam = 1/2 - rho, rho^2 uniform * 1/4
        cdf = lambda x: 1.0 - (1.0 - 2.0 * np.clip(x, 0, 0.5)) ** 2
        assert mcstats.ks_test(lam, cdf).p_value > 0.001

    def test_rank_q_directions(self, rng):
        u = sp.RankQProjectorMeasure(4, 2).sample(rng, 200)
        lam = np.linalg.eigvalsh(u)
        assert np.all((lam > 1e-10).sum(axis=1) == 2)


class TestNormChange:
    def test_axis_vector_unchanged(self):
        a = sp.DiscreteMeasure([[1.0, 0.0]], [2.0])
        a2, b2 = sp.norm_change(a, sp.ConstantScale(1.5), "l2", "l1")
        np.testing.assert_allclose(a2.atoms, [[1.0, 0.0]])
        np.testing.assert_allclose(b2.values, [1.5])

    def test_diagonal_atom(self):
        v = 1 / math.sqrt(2)
        a = sp.DiscreteMeasure([[v, v]], [1.0])
        a2, b2 = sp.norm_change(a, sp.ConstantScale(1.0), "l2", "l1")
        np.testing.assert_allclose(a2.atoms, [[0.5, 0.5]], atol=1e-15)
        np.testing.assert_allclose(b2.values, [1 / math.sqrt(2)], rtol=1e-14)

    def test_round_trip(self, rng):
        a = sp.DiscreteMeasure(rng.standard_normal((4, 3)), rng.uniform(0.5, 2, 4))
        b = sp.PerAtomScale(rng.uniform(0.5, 2, 4))
        a1, b1 = sp.norm_change(a, b, "l2", "l1")
        a2, b2 = sp.norm_change(a1, b1, "l1", "l2")
        np.testing.assert_allclose(a2.atoms, a.atoms, atol=1e-12)
        np.testing.assert_allclose(b2.values, b.values, atol=1e-12)

    def test_same_law(self, rng):
        a = sp.DiscreteMeasure(rng.standard_normal((3, 2)), [1.0, 2.0, 0.5])
        b = sp.PerAtomScale([1.0, 2.0, 3.0])
        a1, b1 = sp.norm_change(a, b, "l2", "linf")
        law, law1 = gl.GammaLaw(a, b), gl.GammaLaw(a1, b1)
        for z in rng.uniform(-2, 2, (10, 2)):
            assert abs(gl.char_fn(law, z) - gl.char_fn(law1, z)) < 1e-13

    def test_family_unsupported(self):
        with pytest.raises(UnsupportedError):
            sp.norm_change(sp.WishartInducedMeasure(2, 1.0, 1.0), sp.ConstantScale(1.0), None, "l1")


class TestPushforward:
    def test_identity(self, rng):
        a = sp.DiscreteMeasure(rng.standard_normal((3, 2)), [1.0, 2.0, 0.5])
        b = sp.ConstantScale(2.0)
        a1, b1, _ = sp.pushforward_linear(a, b, np.eye(2))
        np.testing.assert_allclose(a1.atoms, a.atoms)
        np.testing.assert_allclose(b1.values, 2.0)

    def test_scalar_multiple_is_scale(self, rng):
        a = sp.DiscreteMeasure(rng.standard_normal((3, 2)), [1.0, 2.0, 0.5])
        b = sp.PerAtomScale([1.0, 2.0, 3.0])
        c = 2.5
        a1, b1, _ = sp.pushforward_linear(a, b, c * np.eye(2), to_norm="l2")
        scaled = gl.scale(gl.GammaLaw(a, b), c)
        np.testing.assert_allclose(b1.values, scaled.beta.values, rtol=1e-14)
        for z in rng.uniform(-2, 2, (10, 2)):
            assert abs(gl.char_fn(gl.GammaLaw(a1, b1), z) - gl.char_fn(scaled, z)) < 1e-12

    def test_general_matrix_transform(self, rng):
        a = sp.DiscreteMeasure(rng.standard_normal((3, 2)), [1.0, 2.0, 0.5])
        b = sp.PerAtomScale([1.0, 2.0, 3.0])
        A = np.array([[1.0, 0.3], [-0.2, 2.0]])
        a1, b1, _ = sp.pushforward_linear(a, b, A)
        law, law1 = gl.GammaLaw(a, b), gl.GammaLaw(a1, b1)
        for z in rng.uniform(-2, 2, (10, 2)):
            assert abs(gl.char_fn(law1, z) - gl.char_fn(law, A.T @ z)) < 1e-12

    def test_singular_rejected(self):
        a = sp.DiscreteMeasure([[1.0, 0.0]], [1.0])
        with pytest.raises(ValidationError):
            sp.pushforward_linear(a, sp.ConstantScale(1.0), [[1.0, 1.0], [1.0, 1.0]])


def _lt_grid(rng, d, n=10):
    out = []
    for _ in range(n):
        g = rng.standard_normal((d, d))
        out.append(g @ g.T / d)
    return out


class TestConjugation:
    def test_identity(self):
        a, b = sp.WishartInducedMeasure(2, 3.0, 2.0), sp.ConstantScale(1.0)
        a1, b1 = sp.conjugation_pushforward(a, b, np.eye(2))
        assert a1 is a and b1 is b

    def test_orthogonal_invariance(self, rng):
        law = mg.agamma_law(mg.AGammaParams(2, 3.0, None, 2.0))
        q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        a1, b1 = sp.conjugation_pushforward(law.alpha, law.beta, q)
        law1 = gl.GammaLaw(a1, b1)
        for T in _lt_grid(rng, 2):
            assert gl.laplace_transform(law1, T) == pytest.approx(gl.laplace_transform(law, T), abs=1e-10)

    def test_sqrt_sigma_gives_agamma_sigma(self, rng):
        sigma = np.array([[2.0, 0.5], [0.5, 1.0]])
        root = np.linalg.cholesky(sigma)
        base = mg.agamma_law(mg.AGammaParams(2, 3.0, None, 2.0))
        a1, b1 = sp.conjugation_pushforward(base.alpha, base.beta, root)
        target = mg.agamma_law(mg.AGammaParams(2, 3.0, sigma, 2.0))
        assert isinstance(a1, sp.WishartInducedMeasure)
        np.testing.assert_allclose(a1.sigma, sigma, atol=1e-14)
        np.testing.assert_allclose(b1.sigma, target.beta.sigma, atol=1e-14)
        for T in _lt_grid(rng, 2, 5):
            # both sides use the same quadrature nodes, so agreement is tight
            assert gl.laplace_transform(gl.GammaLaw(a1, b1), T) == pytest.approx(
                gl.laplace_transform(target, T), rel=1e-12
            )
            # the defining property: C M C^T has LT L_M(C^T T C)
            assert gl.laplace_transform(target, T) == pytest.approx(
                gl.laplace_transform(base, root.T @ T @ root), rel=3e-3
            )

    def test_discrete_cone(self, rng):
        atoms = [np.diag([1.0, 0.0]), np.array([[0.5, 0.5], [0.5, 0.5]])]
        law = gl.GammaLaw(sp.DiscreteMeasure(atoms, [1.0, 2.0], sp.CONE), sp.PerAtomScale([1.0, 3.0]))
        C = np.array([[1.0, 0.4], [0.0, 1.5]])
        a1, b1 = sp.conjugation_pushforward(law.alpha, law.beta, C)
        law1 = gl.GammaLaw(a1, b1)
        for T in _lt_grid(rng, 2, 5):
            assert gl.laplace_transform(law1, T) == pytest.approx(gl.laplace_transform(law, C.T @ T @ C), rel=1e-12)

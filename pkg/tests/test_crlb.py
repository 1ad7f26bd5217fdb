"""Bound oracles: score-variance identities, dense-loop Fisher checks, orderings."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from sirp_radar._errors import ConfigError, NumericalError
from sirp_radar.crlb import (
    crb_standard,
    emcb,
    emcb_from_draws,
    fim_target_block,
    inverse_texture_mean,
    kappa,
    mcrb_hcrb,
    nu,
)
from sirp_radar.radar_model import ArrayGeometry, RadarScene, response_jacobian
from sirp_radar.sirp_clutter import (
    TextureFamily,
    TextureKind,
    sample_texture,
    sigma2_for_scr,
    toeplitz_sigma,
)

OMEGA1 = np.pi * np.sin(np.pi / 3.0)
ALPHA1 = 2.0 + 0.5j
ALPHA2 = 1.0 - 3.0j

K_REF = TextureFamily.k_distributed(2.0, 10.0)
T_REF = TextureFamily.t_distributed(1.1, 2.0)
GAUSS = TextureFamily.gaussian()


def make_scene(m=5, n=4, t=6, delta=1.0, seed=11, alpha2=ALPHA2):
    rng = np.random.default_rng(seed)
    wf = rng.uniform(-1, 1, (m, t)) + 1j * rng.uniform(-1, 1, (m, t))
    return RadarScene(ArrayGeometry.uniform(m, n), OMEGA1, delta, ALPHA1, alpha2, wf)


def scene_with_scr(family, m=5, n=4, t=6, scr_db=0.0, delta=1.0, seed=11):
    scene = make_scene(m=m, n=n, t=t, delta=delta, seed=seed)
    sigma2 = sigma2_for_scr(scene.waveform, family, scr_db)
    return scene, toeplitz_sigma(n, sigma2 / n)


def score_variance_kappa(family, n_rx, n_draws, rng):
    """Monte Carlo estimate of the information weight from the location score.

    For a single observation y = theta*u + sqrt(tau)*x with identity speckle
    covariance, the information about theta is (2|u|^2/N) E{q g'(q)^2} with
    q = |y|^2 and g the log marginal kernel, so kappa = E{q g'(q)^2}.  Both
    texture families give g' in closed form: a Bessel-K ratio for the gamma
    texture and -(a+N)/(b+q) for the inverse-gamma one.  This shares no code
    with the module's squared-Bessel quadrature.
    """
    tau = sample_texture(family, n_draws, rng)
    q = tau * rng.gamma(n_rx, 1.0, size=n_draws)
    if family.kind is TextureKind.T_DISTRIBUTED:
        vals = q * ((family.a + n_rx) / (family.b + q)) ** 2
    else:
        z = 2.0 * np.sqrt(q / family.b)
        order = family.a - n_rx
        ratio = special.kve(order - 1.0, z) / special.kve(order, z)
        vals = q * (2.0 / (family.b * z) * ratio) ** 2
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_draws))


def dense_fim(scene, cov, weight):
    jac = response_jacobian(scene)
    sinv = np.linalg.inv(cov.full)
    phi = np.zeros((5, 5))
    for i in range(5):
        for j in range(5):
            acc = 0.0
            for t in range(scene.n_snapshots):
                acc += np.real(np.conj(jac[:, t, i]) @ sinv @ jac[:, t, j])
            phi[i, j] = weight * acc
    return phi


class TestKappa:
    def test_gaussian_equals_sensor_count(self):
        for n in (1, 4, 9):
            assert kappa(GAUSS, n) == float(n)

    def test_t_kind_closed_form(self):
        # N * a * (a+N) / (b * (a+N+1)) at the reference parameters
        assert kappa(T_REF, 4) == pytest.approx(4 * 1.1 * 5.1 / (2 * 6.1), rel=1e-12)
        assert kappa(TextureFamily.t_distributed(2.5, 1.5), 3) == pytest.approx(
            3 * 2.5 * 5.5 / (1.5 * 6.5), rel=1e-12
        )

    def test_t_kind_matches_score_variance_oracle(self):
        fam = TextureFamily.t_distributed(2.5, 1.5)
        est, se = score_variance_kappa(fam, 3, 400_000, np.random.default_rng(3))
        assert se / est < 0.01
        assert abs(kappa(fam, 3) - est) < 4 * se

    def test_k_kind_matches_score_variance_oracle(self):
        fam = TextureFamily.k_distributed(3.0, 0.7)
        est, se = score_variance_kappa(fam, 3, 400_000, np.random.default_rng(4))
        assert se / est < 0.01
        assert abs(kappa(fam, 3) - est) < 4 * se

    def test_k_kind_reference_regression(self):
        # frozen values from the validated quadrature; guards numerical drift
        assert kappa(K_REF, 4) == pytest.approx(0.32184895931889884, rel=1e-8)
        assert kappa(TextureFamily.k_distributed(1.1, 2.0), 4) == pytest.approx(
            15.131253431720639, rel=1e-6
        )

    def test_k_kind_scale_parameter_factorizes(self):
        # kappa(a, b) = kappa(a, 1) / b exactly
        for a, b in ((1.7, 3.0), (4.0, 0.25)):
            left = kappa(TextureFamily.k_distributed(a, b), 4)
            right = kappa(TextureFamily.k_distributed(a, 1.0), 4) / b
            assert left == pytest.approx(right, rel=1e-9)

    def test_k_kind_gaussian_limit(self):
        # shrinking texture variance at unit mean drives kappa to N
        vals = [kappa(TextureFamily.k_distributed(a, 1.0 / a), 4) for a in (8, 128, 2048)]
        gaps = [abs(v - 4.0) for v in vals]
        assert gaps[0] < 0.25
        assert gaps[2] < gaps[1] < gaps[0]
        assert gaps[2] < 1e-4

    def test_k_kind_diverges_at_small_shape(self):
        for a in (1.0, 0.8):
            with pytest.raises(NumericalError):
                kappa(TextureFamily.k_distributed(a, 1.0), 4)

    def test_rejects_bad_sensor_count(self):
        with pytest.raises(ConfigError):
            kappa(GAUSS, 0)

    @given(a=st.floats(1.05, 6.0), b=st.floats(0.3, 10.0))
    @settings(max_examples=30, deadline=None)
    def test_t_kind_below_modified_weight(self, a, b):
        fam = TextureFamily.t_distributed(a, b)
        val = kappa(fam, 4)
        assert 0.0 < val < 4.0 * a / b

    @given(a=st.floats(1.2, 8.0), b=st.floats(0.3, 10.0))
    @settings(max_examples=10, deadline=None)
    def test_k_kind_below_modified_weight(self, a, b):
        fam = TextureFamily.k_distributed(a, b)
        val = kappa(fam, 4)
        assert 0.0 < val <= 4.0 / (b * (a - 1.0)) * (1.0 + 1e-9)


class TestTextureWeights:
    def test_inverse_mean_closed_forms(self):
        assert inverse_texture_mean(GAUSS) == 1.0
        assert inverse_texture_mean(T_REF) == pytest.approx(0.55, rel=1e-12)
        assert inverse_texture_mean(K_REF) == pytest.approx(0.1, rel=1e-12)

    def test_inverse_mean_needs_shape_above_one(self):
        with pytest.raises(ConfigError):
            inverse_texture_mean(TextureFamily.k_distributed(1.0, 2.0))

    def test_nu_is_doubled_inverse_mean(self):
        assert nu(K_REF) == pytest.approx(0.2, rel=1e-12)
        assert nu(T_REF) == pytest.approx(1.1, rel=1e-12)
        assert nu(GAUSS) == 1.0

    @pytest.mark.parametrize(
        "fam",
        [TextureFamily.k_distributed(3.0, 10.0), T_REF],
        ids=["k", "t"],
    )
    def test_nu_matches_sampling_oracle(self, fam):
        draws = sample_texture(fam, 1_000_000, np.random.default_rng(9))
        inv = 1.0 / draws
        se = inv.std(ddof=1) / np.sqrt(inv.size)
        assert abs(nu(fam) - 2.0 * inv.mean()) < 3 * (2.0 * se)


class TestFisherBlock:
    def test_matches_dense_loop(self):
        scene, cov = scene_with_scr(K_REF)
        fast = fim_target_block(scene, cov, 0.37)
        slow = dense_fim(scene, cov, 0.37)
        scale = np.abs(slow).max()
        assert np.abs(fast - slow).max() < 1e-10 * scale

    def test_symmetric_and_positive_semidefinite(self):
        scene, cov = scene_with_scr(T_REF, seed=5)
        phi = fim_target_block(scene, cov, 2.0)
        assert np.array_equal(phi, phi.T)
        eigs = np.linalg.eigvalsh(phi)
        assert eigs.min() > -1e-10 * eigs.max()

    def test_weight_enters_linearly(self):
        scene, cov = scene_with_scr(K_REF)
        base = fim_target_block(scene, cov, 1.0)
        np.testing.assert_allclose(fim_target_block(scene, cov, 3.5), 3.5 * base, rtol=1e-12)

    def test_absent_second_target_kills_spacing_information(self):
        scene, cov = scene_with_scr(K_REF)
        scene = dataclasses.replace(scene, alpha2=0.0 + 0.0j)
        phi = fim_target_block(scene, cov, 2.0)
        np.testing.assert_array_equal(phi[0, :], np.zeros(5))
        np.testing.assert_array_equal(phi[:, 0], np.zeros(5))


class TestStandardBound:
    def test_t_kind_ratio_to_modified_is_closed_form(self):
        scene, cov = scene_with_scr(T_REF)
        ratio = crb_standard(scene, cov, T_REF) / mcrb_hcrb(scene, cov, T_REF)[0]
        assert ratio == pytest.approx(6.1 / 5.1, rel=1e-12)
        fam = TextureFamily.t_distributed(2.5, 0.7)
        scene, cov = scene_with_scr(fam, m=4, n=3, seed=2)
        ratio = crb_standard(scene, cov, fam) / mcrb_hcrb(scene, cov, fam)[0]
        assert ratio == pytest.approx((2.5 + 3 + 1) / (2.5 + 3), rel=1e-12)

    def test_gaussian_clutter_is_worst_case_at_fixed_scr(self):
        _, cov_g = scene_with_scr(GAUSS)
        scene = make_scene()
        gauss = crb_standard(scene, cov_g, GAUSS)
        for fam in (K_REF, T_REF):
            _, cov = scene_with_scr(fam)
            assert crb_standard(scene, cov, fam) < gauss

    def test_waveform_energy_scales_inverse_square(self):
        scene, cov = scene_with_scr(K_REF)
        boosted = dataclasses.replace(scene, waveform=3.0 * scene.waveform)
        assert crb_standard(boosted, cov, K_REF) == pytest.approx(
            crb_standard(scene, cov, K_REF) / 9.0, rel=1e-12
        )

    def test_vanishing_spacing_is_singular(self):
        scene, cov = scene_with_scr(K_REF, delta=1e-9)
        with pytest.raises(NumericalError):
            crb_standard(scene, cov, K_REF)

    def test_shape_parameter_raises_bounds_at_fixed_scr(self):
        grids = {
            TextureFamily.k_distributed: ((1.5, 2.0, 3.0, 5.0), 10.0),
            TextureFamily.t_distributed: ((1.1, 1.5, 2.0, 3.0), 2.0),
        }
        for build, (a_grid, b) in grids.items():
            crbs, mcrbs = [], []
            for a in a_grid:
                fam = build(a, b)
                scene, cov = scene_with_scr(fam)
                crbs.append(crb_standard(scene, cov, fam))
                mcrbs.append(mcrb_hcrb(scene, cov, fam)[0])
            assert np.all(np.diff(crbs) > 0)
            assert np.all(np.diff(mcrbs) > 0)

    def test_scale_parameter_leaves_bounds_unchanged_at_fixed_scr(self):
        for build, tol in (
            (TextureFamily.k_distributed, 1e-5),
            (TextureFamily.t_distributed, 1e-8),
        ):
            vals = []
            for b in (1.0, 2.0, 5.0, 10.0):
                fam = build(2.0, b)
                scene, cov = scene_with_scr(fam)
                vals.append(crb_standard(scene, cov, fam))
            vals = np.asarray(vals)
            assert (vals.max() - vals.min()) / vals.min() < tol


class TestAveragedBounds:
    def test_modified_and_hybrid_coincide(self):
        scene, cov = scene_with_scr(K_REF)
        m, h = mcrb_hcrb(scene, cov, K_REF)
        assert m == h

    def test_unit_texture_reduces_to_gaussian_bound(self):
        scene, cov = scene_with_scr(K_REF)
        ones = np.ones((1, scene.n_snapshots))
        assert emcb_from_draws(scene, cov, ones) == pytest.approx(
            crb_standard(scene, cov, GAUSS), rel=1e-12
        )

    def test_constant_texture_scales_linearly(self):
        scene, cov = scene_with_scr(K_REF)
        ones = np.ones((1, scene.n_snapshots))
        assert emcb_from_draws(scene, cov, 5.0 * ones) == pytest.approx(
            5.0 * emcb_from_draws(scene, cov, ones), rel=1e-12
        )

    def test_draw_shape_validated(self):
        scene, cov = scene_with_scr(K_REF)
        with pytest.raises(ConfigError):
            emcb_from_draws(scene, cov, np.ones((3, scene.n_snapshots + 1)))

    @pytest.mark.parametrize("fam", [K_REF, T_REF], ids=["k", "t"])
    def test_extended_bound_dominates_modified(self, fam):
        # Jensen: averaging conditional inverses exceeds inverting the average
        scene, cov = scene_with_scr(fam)
        e = emcb(scene, cov, fam, n_mc=2000, rng=np.random.default_rng(5))
        assert e >= mcrb_hcrb(scene, cov, fam)[0] * 0.999

    @pytest.mark.parametrize("fam", [K_REF, T_REF], ids=["k", "t"])
    def test_jensen_gap_shrinks_with_snapshots(self, fam):
        gaps = []
        for t_count in (2, 6, 12):
            scene, cov = scene_with_scr(fam, t=t_count)
            e = emcb(scene, cov, fam, n_mc=2000, rng=np.random.default_rng(5))
            m = mcrb_hcrb(scene, cov, fam)[0]
            gaps.append((e - m) / m)
        assert gaps[2] < gaps[1] < gaps[0]

    def test_default_rng_is_deterministic(self):
        scene, cov = scene_with_scr(T_REF)
        assert emcb(scene, cov, T_REF) == emcb(scene, cov, T_REF)

    def test_ordering_standard_above_modified(self):
        # weight comparison kappa/N <= E{1/tau} realized on actual scenes
        for fam in (K_REF, T_REF, TextureFamily.k_distributed(4.0, 0.25)):
            scene, cov = scene_with_scr(fam)
            assert crb_standard(scene, cov, fam) >= mcrb_hcrb(scene, cov, fam)[0]


@given(a=st.floats(1.05, 6.0), b=st.floats(0.3, 10.0))
@settings(max_examples=30, deadline=None)
def test_t_kind_weight_ratio_identity(a, b):
    # CRB/MCRB for the inverse-gamma texture is (a+N+1)/(a+N) independent of scene
    fam = TextureFamily.t_distributed(a, b)
    n = 4
    ratio = (2.0 * inverse_texture_mean(fam)) / (2.0 * kappa(fam, n) / n)
    assert ratio == pytest.approx((a + n + 1) / (a + n), rel=1e-12)

"""Model-layer tests: steering algebra, responses, and derivative oracles."""

import cmath
import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sirp_radar.radar_model import (
    ArrayGeometry,
    ObservationSet,
    RadarScene,
    response_jacobian,
    steering_derivatives,
    steering_vector,
    target_response,
)
from sirp_radar._errors import ConfigError


def make_scene(m=5, n=4, t=6, omega1=0.7, delta=0.9, alpha1=2 + 0.5j, alpha2=1 - 3j, seed=7):
    rng = np.random.default_rng(seed)
    wf = rng.uniform(-1, 1, (m, t)) + 1j * rng.uniform(-1, 1, (m, t))
    return RadarScene(
        geometry=ArrayGeometry.uniform(m, n),
        omega1=omega1,
        delta=delta,
        alpha1=alpha1,
        alpha2=alpha2,
        waveform=wf,
    )


def loop_response(scene):
    """Independent elementwise oracle for the two-target response."""
    geom = scene.geometry
    n, t_count = geom.n_rx, scene.n_snapshots
    out = np.zeros((n, t_count), dtype=complex)
    for alpha, omega in ((scene.alpha1, scene.omega1), (scene.alpha2, scene.omega2)):
        for i in range(n):
            for t in range(t_count):
                acc = 0j
                for k in range(geom.m_tx):
                    acc += (
                        cmath.exp(1j * omega * geom.rx_offsets[i])
                        * cmath.exp(1j * omega * geom.tx_offsets[k])
                        * scene.waveform[k, t]
                    )
                out[i, t] += alpha * acc
    return out


class TestSteering:
    def test_zero_angle_is_all_ones(self):
        np.testing.assert_array_equal(steering_vector(np.arange(4.0), 0.0), np.ones(4))

    def test_half_wavelength_pi(self):
        a = steering_vector(np.arange(2.0), np.pi)
        np.testing.assert_allclose(a, [1.0, -1.0], atol=1e-12)

    @given(
        omega=st.floats(-np.pi, np.pi),
        m=st.integers(1, 8),
    )
    @settings(max_examples=50, deadline=None)
    def test_unit_modulus_and_conjugate_symmetry(self, omega, m):
        d = np.arange(float(m))
        a = steering_vector(d, omega)
        np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-12)
        np.testing.assert_allclose(steering_vector(d, -omega), np.conj(a), atol=1e-12)

    def test_derivatives_match_finite_differences(self):
        d = np.array([0.0, 1.0, 2.0, 3.5])
        omega, h = 0.83, 1e-6
        adot, addot = steering_derivatives(d, omega)
        fd1 = (steering_vector(d, omega + h) - steering_vector(d, omega - h)) / (2 * h)
        fd2 = (
            steering_vector(d, omega + h)
            - 2 * steering_vector(d, omega)
            + steering_vector(d, omega - h)
        ) / h**2
        np.testing.assert_allclose(1j * adot, fd1, rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(-addot, fd2, rtol=1e-3, atol=1e-4)

    def test_weighting_identities(self):
        d = np.array([0.0, 1.0, 3.0])
        adot, addot = steering_derivatives(d, 0.4)
        a = steering_vector(d, 0.4)
        np.testing.assert_allclose(adot, a * d, atol=1e-15)
        np.testing.assert_allclose(addot, a * d * d, atol=1e-15)


class TestGeometry:
    def test_uniform_offsets(self):
        g = ArrayGeometry.uniform(3, 5)
        np.testing.assert_array_equal(g.tx_offsets, [0.0, 1.0, 2.0])
        assert g.m_tx == 3 and g.n_rx == 5

    def test_rejects_bad_offsets(self):
        with pytest.raises(ConfigError):
            ArrayGeometry(np.array([1.0, 2.0]), np.array([0.0, 1.0]))
        with pytest.raises(ConfigError):
            ArrayGeometry(np.array([0.0, 2.0, 1.0]), np.array([0.0]))


class TestTargetResponse:
    def test_matches_elementwise_oracle(self):
        scene = make_scene()
        resp = target_response(scene)
        np.testing.assert_allclose(resp.v, loop_response(scene), rtol=1e-12, atol=1e-12)

    def test_zero_amplitudes_give_zero_response(self):
        scene = make_scene(alpha1=0.0, alpha2=0.0)
        assert np.all(target_response(scene).v == 0)

    def test_zero_spacing_merges_regressors(self):
        scene = make_scene(delta=0.0)
        resp = target_response(scene)
        np.testing.assert_allclose(resp.b1, resp.b2, atol=1e-14)
        stacked = np.column_stack([resp.stacked_b1, resp.stacked_b2])
        s = np.linalg.svd(stacked, compute_uv=False)
        assert s[1] / s[0] < 1e-10

    def test_stacking_is_snapshot_major(self):
        scene = make_scene(m=2, n=3, t=2)
        resp = target_response(scene)
        np.testing.assert_array_equal(
            resp.stacked_v, np.concatenate([resp.v[:, 0], resp.v[:, 1]])
        )


class TestResponseJacobian:
    def test_imaginary_slices_are_rotated_regressors(self):
        scene = make_scene()
        jac = response_jacobian(scene)
        np.testing.assert_allclose(jac[..., 2], 1j * jac[..., 1], atol=1e-15)
        np.testing.assert_allclose(jac[..., 4], 1j * jac[..., 3], atol=1e-15)

    def test_spacing_slice_vanishes_without_second_target(self):
        scene = make_scene(alpha2=0.0)
        assert np.all(response_jacobian(scene)[..., 0] == 0)

    def test_finite_difference_oracle(self):
        scene = make_scene()
        jac = response_jacobian(scene)
        h = 1e-6

        def v_of(**kw):
            return target_response(dataclasses.replace(scene, **kw)).v

        fd = np.empty_like(jac)
        fd[..., 0] = (v_of(delta=scene.delta + h) - v_of(delta=scene.delta - h)) / (2 * h)
        fd[..., 1] = (v_of(alpha1=scene.alpha1 + h) - v_of(alpha1=scene.alpha1 - h)) / (2 * h)
        fd[..., 2] = (v_of(alpha1=scene.alpha1 + 1j * h) - v_of(alpha1=scene.alpha1 - 1j * h)) / (2 * h)
        fd[..., 3] = (v_of(alpha2=scene.alpha2 + h) - v_of(alpha2=scene.alpha2 - h)) / (2 * h)
        fd[..., 4] = (v_of(alpha2=scene.alpha2 + 1j * h) - v_of(alpha2=scene.alpha2 - 1j * h)) / (2 * h)
        np.testing.assert_allclose(jac, fd, rtol=1e-6, atol=1e-6)


class TestObservationSet:
    def test_shape_validation(self):
        with pytest.raises(ConfigError):
            ObservationSet(y=np.zeros(6))
        with pytest.raises(ConfigError):
            ObservationSet(y=np.zeros((3, 4)), tau_true=np.ones(3))

    def test_accepts_matching_texture(self):
        obs = ObservationSet(y=np.zeros((3, 4)), tau_true=np.ones(4))
        assert obs.n_rx == 3 and obs.n_snapshots == 4

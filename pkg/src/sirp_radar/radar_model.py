"""Colocated MIMO radar signal model for two closely spaced targets.

Transmit and receive arrays are colinear with sensor positions in
half-wavelength units, first sensor at the origin.  A target at electrical
angle ``omega`` (omega = pi * sin(theta) for a half-wavelength grid)
contributes ``alpha * a_rx(omega) a_tx(omega)^T s(t)`` to the snapshot
``y(t)``; the quantity of interest is the angular spacing ``delta`` between
target two and target one, with target one's angle known.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._errors import ConfigError

__all__ = [
    "ArrayGeometry",
    "RadarScene",
    "TargetResponse",
    "ObservationSet",
    "steering_vector",
    "steering_derivatives",
    "target_response",
    "response_jacobian",
]


def steering_vector(offsets, omega):
    """Array response exp(j * omega * d_k) for sensor offsets d_k."""
    return np.exp(1j * float(omega) * np.asarray(offsets, dtype=float))


def steering_derivatives(offsets, omega):
    """Offset-weighted responses (a*d, a*d*d).

    The omega-derivatives of the steering vector are ``j * (a*d)`` and
    ``-(a*d*d)``; returning the weighted vectors keeps the j/-1 factors
    explicit at call sites.
    """
    d = np.asarray(offsets, dtype=float)
    a = np.exp(1j * float(omega) * d)
    return a * d, a * (d * d)


def _check_offsets(offsets, label):
    arr = np.asarray(offsets, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ConfigError(f"{label} offsets must be a non-empty 1-d array")
    if arr[0] != 0.0:
        raise ConfigError(f"{label} offsets must start at 0 (got {arr[0]})")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ConfigError(f"{label} offsets must be strictly increasing")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Sensor positions of the transmit and receive arrays (half-wavelength units)."""

    tx_offsets: np.ndarray
    rx_offsets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tx_offsets", _check_offsets(self.tx_offsets, "tx"))
        object.__setattr__(self, "rx_offsets", _check_offsets(self.rx_offsets, "rx"))

    @classmethod
    def uniform(cls, m_tx: int, n_rx: int) -> "ArrayGeometry":
        """Half-wavelength ULAs with integer offsets 0..M-1 and 0..N-1."""
        if m_tx < 1 or n_rx < 1:
            raise ConfigError("array sizes must be positive")
        return cls(np.arange(m_tx, dtype=float), np.arange(n_rx, dtype=float))

    @property
    def m_tx(self) -> int:
        return self.tx_offsets.size

    @property
    def n_rx(self) -> int:
        return self.rx_offsets.size


@dataclass(frozen=True, eq=False)
class RadarScene:
    """Geometry, target parameters and transmitted waveform for one experiment.

    waveform holds the M x T transmit snapshot matrix; column t is s(t).
    """

    geometry: ArrayGeometry
    omega1: float
    delta: float
    alpha1: complex
    alpha2: complex
    waveform: np.ndarray

    def __post_init__(self):
        wf = np.asarray(self.waveform, dtype=complex)
        if wf.ndim != 2 or wf.shape[0] != self.geometry.m_tx or wf.shape[1] < 1:
            raise ConfigError(
                f"waveform must be (M={self.geometry.m_tx}, T>=1), got {wf.shape}"
            )
        if not np.all(np.isfinite(wf)):
            raise ConfigError("waveform entries must be finite")
        if not np.isfinite(self.delta) or not np.isfinite(self.omega1):
            raise ConfigError("omega1 and delta must be finite")
        wf.setflags(write=False)
        object.__setattr__(self, "waveform", wf)
        object.__setattr__(self, "omega1", float(self.omega1))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "alpha1", complex(self.alpha1))
        object.__setattr__(self, "alpha2", complex(self.alpha2))

    @property
    def m_tx(self) -> int:
        return self.geometry.m_tx

    @property
    def n_rx(self) -> int:
        return self.geometry.n_rx

    @property
    def n_snapshots(self) -> int:
        return self.waveform.shape[1]

    @property
    def omega2(self) -> float:
        return self.omega1 + self.delta


@dataclass(frozen=True, eq=False)
class TargetResponse:
    """Noise-free response and the per-target regressors.

    v is the N x T mean of the observations; b1/b2 are the regressor
    snapshot matrices of targets one and two (v = alpha1*b1 + alpha2*b2).
    stacked_* are the NT vectors with snapshots stacked in time order.
    """

    v: np.ndarray
    b1: np.ndarray
    b2: np.ndarray

    @property
    def stacked_v(self) -> np.ndarray:
        return self.v.ravel(order="F")

    @property
    def stacked_b1(self) -> np.ndarray:
        return self.b1.ravel(order="F")

    @property
    def stacked_b2(self) -> np.ndarray:
        return self.b2.ravel(order="F")


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Received snapshots, optionally with the texture draws that produced them."""

    y: np.ndarray
    tau_true: np.ndarray | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=complex)
        if y.ndim != 2:
            raise ConfigError(f"observations must be 2-d (N, T), got shape {y.shape}")
        object.__setattr__(self, "y", y)
        if self.tau_true is not None:
            tau = np.asarray(self.tau_true, dtype=float)
            if tau.shape != (y.shape[1],):
                raise ConfigError("tau_true must have one entry per snapshot")
            object.__setattr__(self, "tau_true", tau)

    @property
    def n_rx(self) -> int:
        return self.y.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.y.shape[1]


def _regressor(geometry: ArrayGeometry, omega: float, waveform: np.ndarray) -> np.ndarray:
    a_rx = steering_vector(geometry.rx_offsets, omega)
    a_tx = steering_vector(geometry.tx_offsets, omega)
    return np.outer(a_rx, a_tx @ waveform)


def target_response(scene: RadarScene) -> TargetResponse:
    """Noise-free N x T response of the two-target scene."""
    b1 = _regressor(scene.geometry, scene.omega1, scene.waveform)
    b2 = _regressor(scene.geometry, scene.omega2, scene.waveform)
    return TargetResponse(v=scene.alpha1 * b1 + scene.alpha2 * b2, b1=b1, b2=b2)


def response_jacobian(scene: RadarScene) -> np.ndarray:
    """Derivatives of the response wrt (delta, Re a1, Im a1, Re a2, Im a2).

    Returns an N x T x 5 array whose slice [..., i] is the derivative of the
    noise-free response with respect to parameter i.  Only target two moves
    with delta, so slice 0 is alpha2 * j * d(b2)/d(omega).
    """
    geom = scene.geometry
    resp = target_response(scene)
    a_rx = steering_vector(geom.rx_offsets, scene.omega2)
    a_tx = steering_vector(geom.tx_offsets, scene.omega2)
    adot_rx, _ = steering_derivatives(geom.rx_offsets, scene.omega2)
    adot_tx, _ = steering_derivatives(geom.tx_offsets, scene.omega2)
    db2 = np.outer(adot_rx, a_tx @ scene.waveform) + np.outer(a_rx, adot_tx @ scene.waveform)
    jac = np.empty(resp.v.shape + (5,), dtype=complex)
    jac[..., 0] = scene.alpha2 * 1j * db2
    jac[..., 1] = resp.b1
    jac[..., 2] = 1j * resp.b1
    jac[..., 3] = resp.b2
    jac[..., 4] = 1j * resp.b2
    return jac

"""Spherically invariant (compound-Gaussian) clutter.

Each snapshot is n(t) = sqrt(tau(t)) * x(t): a positive texture tau modulating
a zero-mean circular complex Gaussian speckle vector x with covariance
sigma2 * sigma_norm, trace(sigma_norm) = 1.  Gamma texture gives K-distributed
clutter, inverse-gamma texture gives t-distributed clutter, and a degenerate
unit texture recovers plain Gaussian clutter.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._errors import ConfigError
from ._linalg import hermitian_sqrt

__all__ = [
    "TextureKind",
    "TextureFamily",
    "SpeckleCovariance",
    "ClutterDraw",
    "sample_texture",
    "sample_speckle",
    "sample_clutter",
    "toeplitz_sigma",
    "sigma2_for_scr",
]


class TextureKind(str, enum.Enum):
    K_DISTRIBUTED = "k"
    T_DISTRIBUTED = "t"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class TextureFamily:
    """Texture distribution: kind plus shape a and scale b (ignored for Gaussian)."""

    kind: TextureKind
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", TextureKind(self.kind))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if self.kind is not TextureKind.GAUSSIAN and (self.a <= 0 or self.b <= 0):
            raise ConfigError(f"texture parameters must be positive, got a={self.a}, b={self.b}")

    @classmethod
    def k_distributed(cls, a: float, b: float) -> "TextureFamily":
        return cls(TextureKind.K_DISTRIBUTED, a, b)

    @classmethod
    def t_distributed(cls, a: float, b: float) -> "TextureFamily":
        return cls(TextureKind.T_DISTRIBUTED, a, b)

    @classmethod
    def gaussian(cls) -> "TextureFamily":
        return cls(TextureKind.GAUSSIAN)

    def mean_texture(self) -> float:
        """E{tau}; finite for the t kind only when a > 1."""
        if self.kind is TextureKind.K_DISTRIBUTED:
            return self.a * self.b
        if self.kind is TextureKind.T_DISTRIBUTED:
            if self.a <= 1.0:
                raise ConfigError("t-kind texture mean requires a > 1")
            return self.b / (self.a - 1.0)
        return 1.0

    def texture_variance(self) -> float:
        """var{tau}; finite for the t kind only when a > 2."""
        if self.kind is TextureKind.K_DISTRIBUTED:
            return self.a * self.b**2
        if self.kind is TextureKind.T_DISTRIBUTED:
            if self.a <= 2.0:
                raise ConfigError("t-kind texture variance requires a > 2")
            return self.b**2 / ((self.a - 1.0) ** 2 * (self.a - 2.0))
        return 0.0


@dataclass(frozen=True, eq=False)
class SpeckleCovariance:
    """Speckle covariance split into a unit-trace shape and a power scale.

    The full covariance is sigma2 * sigma_norm with trace(sigma_norm) = 1,
    so sigma2 is the total speckle power across the receive array.
    """

    sigma_norm: np.ndarray
    sigma2: float

    def __post_init__(self):
        mat = np.asarray(self.sigma_norm, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ConfigError("sigma_norm must be square")
        scale = max(float(np.abs(mat).max()), 1.0)
        if not np.allclose(mat, mat.conj().T, atol=1e-10 * scale):
            raise ConfigError("sigma_norm must be Hermitian")
        tr = float(np.real(np.trace(mat)))
        if abs(tr - 1.0) > 1e-6:
            raise ConfigError(f"sigma_norm trace must be 1, got {tr}")
        mat = mat / tr
        mat.setflags(write=False)
        object.__setattr__(self, "sigma_norm", mat)
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if self.sigma2 < 0:
            raise ConfigError("sigma2 must be nonnegative")

    @classmethod
    def from_full(cls, full: np.ndarray) -> "SpeckleCovariance":
        full = np.asarray(full, dtype=complex)
        tr = float(np.real(np.trace(full)))
        if tr <= 0:
            raise ConfigError("covariance trace must be positive")
        return cls(sigma_norm=full / tr, sigma2=tr)

    @property
    def n_rx(self) -> int:
        return self.sigma_norm.shape[0]

    @property
    def full(self) -> np.ndarray:
        return self.sigma2 * self.sigma_norm

    def with_power(self, sigma2: float) -> "SpeckleCovariance":
        return SpeckleCovariance(sigma_norm=self.sigma_norm, sigma2=sigma2)


@dataclass(frozen=True, eq=False)
class ClutterDraw:
    """One realization: texture per snapshot and the N x T clutter matrix."""

    tau: np.ndarray
    n: np.ndarray


def sample_texture(family: TextureFamily, t_count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw t_count texture values; Gaussian kind returns exact ones."""
    if family.kind is TextureKind.K_DISTRIBUTED:
        return rng.gamma(shape=family.a, scale=family.b, size=t_count)
    if family.kind is TextureKind.T_DISTRIBUTED:
        return 1.0 / rng.gamma(shape=family.a, scale=1.0 / family.b, size=t_count)
    return np.ones(t_count)


def sample_speckle(cov: SpeckleCovariance, t_count: int, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian snapshots with covariance cov.full (N x T)."""
    root = hermitian_sqrt(cov.full)
    z = rng.standard_normal((cov.n_rx, t_count)) + 1j * rng.standard_normal((cov.n_rx, t_count))
    return root @ (z / np.sqrt(2.0))


def sample_clutter(
    family: TextureFamily, cov: SpeckleCovariance, t_count: int, rng: np.random.Generator
) -> ClutterDraw:
    """Compound draw n(t) = sqrt(tau(t)) * x(t)."""
    tau = sample_texture(family, t_count, rng)
    x = sample_speckle(cov, t_count, rng)
    return ClutterDraw(tau=tau, n=np.sqrt(tau)[None, :] * x)


def toeplitz_sigma(n_rx: int, sigma2: float) -> SpeckleCovariance:
    """Exponentially damped rotating covariance, per-element power sigma2.

    Raw entries sigma2 * 0.9^|m-n| * exp(j*pi/2*(m-n)); the stored unit-trace
    shape absorbs 1/(n_rx*sigma2) and the stored power scale is n_rx*sigma2.
    """
    if n_rx < 1:
        raise ConfigError("n_rx must be positive")
    idx = np.arange(n_rx)
    diff = idx[:, None] - idx[None, :]
    raw = sigma2 * (0.9 ** np.abs(diff)) * np.exp(1j * (np.pi / 2) * diff)
    return SpeckleCovariance.from_full(raw)


def sigma2_for_scr(waveform: np.ndarray, family: TextureFamily, scr_db: float) -> float:
    """Total clutter power scale that realizes the requested signal-to-clutter ratio.

    SCR = sum_t ||s(t)||^2 / (T * E{tau} * sigma2) with a unit-trace speckle
    shape, so sigma2 = energy / (T * E{tau} * 10^(scr_db/10)).
    """
    wf = np.asarray(waveform, dtype=complex)
    if wf.ndim != 2 or wf.shape[1] < 1:
        raise ConfigError("waveform must be (M, T)")
    energy = float(np.sum(np.abs(wf) ** 2))
    if energy <= 0:
        raise ConfigError("waveform energy must be positive")
    t_count = wf.shape[1]
    return energy / (t_count * family.mean_texture() * 10.0 ** (scr_db / 10.0))

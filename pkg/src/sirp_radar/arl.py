"""Angular resolution limit via second-order linearization of the spacing model.

Expanding the second target's regressor around zero spacing turns the response
into a linear combination of three fixed direction matrices R1, R2, R3 with
coefficients (alpha1 + alpha2, j*alpha2*delta, -alpha2*delta^2).  The spacing
CRB then has a closed form in the 3x3 Gram matrix of the stacked directions,
and equating delta^2 with its own CRB (the Smith criterion) reduces to a
quadratic in delta^2:

    A*delta^4 - B*delta^2 - C = 0.

The positive root is the closed-form resolution limit; (C/A)^(1/4) is its
high-SCR asymptote; iterating delta^2 = CRB(delta) on the full nonlinear
model gives the exact fixed-point limit.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ._errors import NumericalError
from ._linalg import hermitian_pinv
from .crlb import crb_standard, kappa
from .radar_model import RadarScene, steering_derivatives, steering_vector
from .sirp_clutter import SpeckleCovariance, TextureFamily

__all__ = [
    "LinearizedModel",
    "ArlClosedForm",
    "ArlFixedPoint",
    "linearize",
    "phi_prime",
    "crb_analytic",
    "arl_closed_form",
    "arl_from_mcrb",
    "arl_asymptotic",
    "arl_exact",
]


@dataclass(frozen=True, eq=False)
class LinearizedModel:
    """Direction matrices of the small-spacing expansion and their Gram matrix.

    gram[i, j] = rho_i^H (I kron Sigma^-1) rho_j for the stacked direction
    vectors rho_i of R_i @ waveform.
    """

    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray
    rho3: np.ndarray
    gram: np.ndarray


@dataclass(frozen=True)
class ArlClosedForm:
    """Quartic coefficients and the closed-form spacing limit."""

    a_coef: float
    b_coef: float
    c_coef: float
    delta: float
    residual: float


@dataclass(frozen=True)
class ArlFixedPoint:
    delta: float
    iterations: int


def linearize(scene: RadarScene, cov: SpeckleCovariance) -> LinearizedModel:
    """Second-order expansion of the two-target response at zero spacing.

    Only the reference angle, geometry, waveform, and clutter covariance
    enter; the scene's delta and amplitudes are ignored.
    """
    geom = scene.geometry
    omega = scene.omega1
    a_rx = steering_vector(geom.rx_offsets, omega)
    a_tx = steering_vector(geom.tx_offsets, omega)
    adot_rx, addot_rx = steering_derivatives(geom.rx_offsets, omega)
    adot_tx, addot_tx = steering_derivatives(geom.tx_offsets, omega)

    r1 = np.outer(a_rx, a_tx)
    r2 = np.outer(adot_rx, a_tx) + np.outer(a_rx, adot_tx)
    r3 = (
        np.outer(adot_rx, adot_tx)
        + 0.5 * np.outer(addot_rx, a_tx)
        + 0.5 * np.outer(a_rx, addot_tx)
    )

    mats = [r1 @ scene.waveform, r2 @ scene.waveform, r3 @ scene.waveform]
    n_rx, t_count = mats[0].shape
    sinv = hermitian_pinv(cov.full, max(n_rx, t_count))
    gram = np.empty((3, 3), dtype=complex)
    whitened = [sinv @ m for m in mats]
    for i in range(3):
        for j in range(3):
            gram[i, j] = np.sum(np.conj(mats[i]) * whitened[j])
    gram = 0.5 * (gram + gram.conj().T)
    return LinearizedModel(
        r1=r1,
        r2=r2,
        r3=r3,
        rho1=mats[0].ravel(order="F"),
        rho2=mats[1].ravel(order="F"),
        rho3=mats[2].ravel(order="F"),
        gram=gram,
    )


def phi_prime(lin: LinearizedModel, delta: float, alpha2: complex, weight: float) -> np.ndarray:
    """5x5 information block of the linearized model at spacing delta.

    Parameter order (delta, Re alpha1, Im alpha1, Re alpha2, Im alpha2);
    weight is the same scalar as in the exact information block (2*kappa/N
    for the standard bound, 2*E{1/tau} for the modified one).
    """
    g = lin.gram
    g11 = g[0, 0].real
    g22 = g[1, 1].real
    g33 = g[2, 2].real
    g12, g13, g23 = g[0, 1], g[0, 2], g[1, 2]
    re2, im2 = alpha2.real, alpha2.imag
    d = float(delta)
    mod2 = re2 * re2 + im2 * im2

    phi = np.zeros((5, 5))
    phi[0, 0] = mod2 * (g22 - 4.0 * d * g23.imag + 4.0 * d * d * g33)
    phi[1, 1] = phi[2, 2] = g11
    phi[3, 3] = phi[4, 4] = (
        g11
        - 2.0 * d * g12.imag
        + d * d * g22
        - 2.0 * d * d * g13.real
        - 2.0 * d**3 * g23.imag
        + d**4 * g33
    )
    phi[0, 1] = (
        -re2 * g12.imag
        - im2 * g12.real
        - 2.0 * d * re2 * g13.real
        + 2.0 * d * im2 * g13.imag
    )
    phi[0, 2] = (
        re2 * g12.real
        - im2 * g12.imag
        - 2.0 * d * re2 * g13.imag
        - 2.0 * d * im2 * g13.real
    )
    phi[0, 3] = (
        -re2 * g12.imag
        - im2 * g12.real
        + d * re2 * g22
        - 2.0 * d * re2 * g13.real
        + 2.0 * d * im2 * g13.imag
        - d * d * im2 * g23.real
        - 3.0 * d * d * re2 * g23.imag
        + 2.0 * d**3 * re2 * g33
    )
    phi[0, 4] = (
        re2 * g12.real
        - im2 * g12.imag
        + d * im2 * g22
        - 2.0 * d * re2 * g13.imag
        - 2.0 * d * im2 * g13.real
        + d * d * re2 * g23.real
        - 3.0 * d * d * im2 * g23.imag
        + 2.0 * d**3 * im2 * g33
    )
    phi[1, 3] = phi[2, 4] = g11 - d * g12.imag - d * d * g13.real
    phi[1, 4] = -d * g12.real + d * d * g13.imag
    phi[2, 3] = -phi[1, 4]
    # phi[1, 2] and phi[3, 4] vanish identically
    phi *= weight
    low = np.tril_indices(5, k=-1)
    phi[low] = phi.T[low]
    return phi


def crb_analytic(lin: LinearizedModel, delta: float, alpha2: complex, weight: float) -> float:
    """Closed-form spacing bound 1/(phi_11 + Q) of the linearized model.

    Q eliminates the four amplitude nuisance parameters through the scalar
    structure of their block (identical diagonals, rotation coupling).  The
    concentration phi_11 + Q cancels to O(delta^2) out of O(1) terms, so it is
    carried out in extended precision; plain double arithmetic loses roughly
    phi_11/(phi_11 + Q) in relative accuracy at small spacings.
    """
    p = phi_prime(lin, delta, alpha2, weight).astype(np.longdouble)
    p11 = p[0, 0]
    p12, p13, p14, p15 = p[0, 1], p[0, 2], p[0, 3], p[0, 4]
    p22, p44 = p[1, 1], p[3, 3]
    p24, p25 = p[1, 3], p[1, 4]
    denom = p24 * p24 + p25 * p25 - p22 * p44
    if denom >= 0:
        raise NumericalError("amplitude block of the linearized information matrix is singular")
    q_corr = (
        p44 * (p12 * p12 + p13 * p13)
        + p22 * (p14 * p14 + p15 * p15)
        - 2.0 * p24 * (p12 * p14 + p13 * p15)
        - 2.0 * p25 * (p12 * p15 - p13 * p14)
    ) / denom
    info = p11 + q_corr
    if info <= 0:
        raise NumericalError("linearized spacing information is not positive")
    return float(1.0 / info)


def _quartic_coefficients(lin: LinearizedModel, alpha2: complex, weight: float):
    g = lin.gram
    g11 = g[0, 0].real
    g22 = g[1, 1].real
    g33 = g[2, 2].real
    g12, g13, g23 = g[0, 1], g[0, 2], g[1, 2]
    mod2 = abs(alpha2) ** 2
    det_expand = (
        g11 * g22 * g33
        + 2.0 * (g13 * np.conj(g12) * np.conj(g23)).real
        - g11 * abs(g23) ** 2
        - g22 * abs(g13) ** 2
        - g33 * abs(g12) ** 2
    )
    a_coef = weight * mod2 * det_expand
    b_coef = g11 * g33 - abs(g13) ** 2
    c_coef = g11 * g22 - abs(g12) ** 2
    return a_coef, b_coef, c_coef


def arl_closed_form(lin: LinearizedModel, alpha2: complex, weight: float) -> ArlClosedForm:
    """Positive root of A*delta^4 - B*delta^2 - C = 0."""
    a_coef, b_coef, c_coef = _quartic_coefficients(lin, alpha2, weight)
    if a_coef <= 0 or c_coef <= 0:
        raise NumericalError("resolution quartic is degenerate (nonpositive coefficients)")
    delta_sq = (b_coef + np.sqrt(b_coef * b_coef + 4.0 * a_coef * c_coef)) / (2.0 * a_coef)
    delta = float(np.sqrt(delta_sq))
    residual = abs(a_coef * delta**4 - b_coef * delta**2 - c_coef) / (a_coef * delta**4)
    return ArlClosedForm(
        a_coef=float(a_coef),
        b_coef=float(b_coef),
        c_coef=float(c_coef),
        delta=delta,
        residual=float(residual),
    )


def arl_from_mcrb(lin: LinearizedModel, alpha2: complex, inverse_mean: float) -> ArlClosedForm:
    """Closed-form limit with the modified-bound weight 2*E{1/tau}."""
    return arl_closed_form(lin, alpha2, 2.0 * inverse_mean)


def arl_asymptotic(lin: LinearizedModel, alpha2: complex, weight: float) -> float:
    """High-SCR limit (C/A)^(1/4) of the closed form."""
    a_coef, _, c_coef = _quartic_coefficients(lin, alpha2, weight)
    if a_coef <= 0 or c_coef <= 0:
        raise NumericalError("resolution quartic is degenerate (nonpositive coefficients)")
    return float((c_coef / a_coef) ** 0.25)


def arl_exact(
    scene: RadarScene,
    cov: SpeckleCovariance,
    family: TextureFamily,
    tol: float = 1e-6,
    max_iters: int = 200,
) -> ArlFixedPoint:
    """Fixed point of delta^2 = CRB(delta) on the full nonlinear model.

    Starts from the closed-form limit; a detected oscillation switches to
    half-step damping.  Convergence is |delta^2 - CRB(delta)| <= tol*delta^2.
    """
    weight = 2.0 * kappa(family, scene.n_rx) / scene.n_rx
    delta = arl_closed_form(linearize(scene, cov), scene.alpha2, weight).delta
    damped = False
    prev_step = 0.0
    for it in range(1, max_iters + 1):
        bound = crb_standard(dataclasses.replace(scene, delta=delta), cov, family)
        if bound <= 0:
            raise NumericalError("spacing bound became nonpositive in fixed-point iteration")
        if abs(delta * delta - bound) <= tol * delta * delta:
            return ArlFixedPoint(delta=float(delta), iterations=it)
        target = np.sqrt(bound)
        step = target - delta
        if step * prev_step < 0:
            damped = True
        delta = delta + 0.5 * step if damped else target
        prev_step = step
    raise NumericalError(f"resolution fixed point did not converge in {max_iters} iterations")

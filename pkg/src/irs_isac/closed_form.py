"""Closed-form echo SNR, tracking variance and achievable-rate expressions.

The wrapped-Gaussian series ``h(x, y)`` is the large-array limit of the
expected Fejér-kernel gain when the design angle is Gaussian around the true
bearing with variance ``y``; ``h_tilde`` keeps only its dominant terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel_geometry import ArrayConfig, path_gain
from .errors import DegenerateVarianceError, InvalidInputError

# h blows up as sin(x) -> 0; bearings this close to the array axis are rejected.
ANGLE_GUARD = 0.05
SERIES_TOL = 1e-14


@dataclass(frozen=True)
class RadioConstants:
    """Transmit power P_A (W), frame length W (symbols), noise powers (W), sigma_R^2."""

    P_A: float = 0.1
    W: float = 1e4
    sigma_s2: float = 1e-11
    sigma_c2: float = 1e-11
    sigmaR2: float = 0.1

    def __post_init__(self):
        if min(self.P_A, self.W, self.sigma_s2, self.sigma_c2, self.sigmaR2) <= 0:
            raise InvalidInputError("radio constants must be positive")


@dataclass(frozen=True)
class PerfModel:
    """Per-vehicle coefficients for one frame.

    Attributes:
        beta_G: RSU-IRS power gain from the predicted distance.
        beta_h: IRS-device power gain.
        A_phi: measurement variance when the whole frame is spent sensing.
        C_k: rate SNR coefficient 2*P_A*beta_G*beta_h*L/sigma_c2.
        h_val: h(phi_pred, var_proc).
        phi_pred: predicted bearing.
        var_proc: bearing process-noise variance.
        gamma_full: echo SNR at eta_{k-1} = 1.
        L, M_r: array sizes.
        comm_snr: if set, a fixed communication SNR replacing C_k * h_tilde
            (used for non-coherent phase designs).
    """

    beta_G: float
    beta_h: float
    A_phi: float
    C_k: float
    h_val: float
    phi_pred: float
    var_proc: float
    gamma_full: float
    L: int
    M_r: int
    comm_snr: float | None = None

    def with_sensing_snr(self, gamma_full: float, sigmaR2: float) -> "PerfModel":
        """Copy with a different full-frame echo SNR (A_phi recomputed)."""
        A = sigmaR2 / (gamma_full * math.sin(self.phi_pred) ** 2)
        return replace(self, gamma_full=gamma_full, A_phi=A)


def _check_h_args(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DegenerateVarianceError("variance y must be > 0")
    if np.any(x < ANGLE_GUARD) or np.any(x > np.pi - ANGLE_GUARD):
        raise InvalidInputError(f"x must lie in [{ANGLE_GUARD}, pi - {ANGLE_GUARD}]")
    return x, y


def h_series(x: float, y: float, tol: float = SERIES_TOL) -> float:
    """Wrapped-Gaussian series h(x, y), summed outward from i = 0.

    Stops after two consecutive index pairs (i, -i) whose contribution is
    below ``tol`` times the running sum.
    """
    _check_h_args(x, y)

    def term(i: int) -> float:
        return math.exp(-2.0 * (i * math.pi) ** 2 / y) + math.exp(
            -2.0 * ((i + 1) * math.pi - x) ** 2 / y
        )

    total = term(0)
    quiet = 0
    i = 1
    while quiet < 2:
        pair = term(i) + term(-i)
        total += pair
        quiet = quiet + 1 if pair < tol * total else 0
        i += 1
    return total / math.sqrt(2.0 * math.pi * y * math.sin(x) ** 2)


def h_tilde(x, y):
    """Two-term truncation (2*pi*y*sin^2 x)^(-1/2) * (1 + exp(-2(pi-x)^2/y)).

    Vectorised over ``x`` and ``y``.
    """
    x, y = _check_h_args(x, y)
    val = (1.0 + np.exp(-2.0 * (np.pi - x) ** 2 / y)) / np.sqrt(
        2.0 * np.pi * y * np.sin(x) ** 2
    )
    return float(val) if val.ndim == 0 else val


def full_frame_echo_snr(
    beta_G: float, h_val: float, rc: RadioConstants, arrays: ArrayConfig
) -> float:
    return rc.W * rc.P_A * beta_G**2 * arrays.L * arrays.M_r * h_val / rc.sigma_s2


def echo_snr_closed_form(
    eta_prev, pm: PerfModel, rc: RadioConstants, arrays: ArrayConfig
):
    """Expected echo SNR eta_{k-1} * W * P_A * beta_G^2 * L * M_r * h / sigma_s^2."""
    eta = np.asarray(eta_prev, dtype=float)
    if np.any(eta < 0) or np.any(eta > 1):
        raise InvalidInputError("eta_prev must lie in [0, 1]")
    val = eta * full_frame_echo_snr(pm.beta_G, pm.h_val, rc, arrays)
    return float(val) if val.ndim == 0 else val


def measurement_coefficient(
    pm_phi: float, gamma_full: float, sigmaR2: float
) -> float:
    """A_phi = sigma_R^2 / (gamma_full * sin^2 phi): measurement variance at eta = 1."""
    return sigmaR2 / (gamma_full * math.sin(pm_phi) ** 2)


def tracked_variance(eta_prev, A_phi: float, var_proc: float):
    """Tracking variance var_proc * A / (var_proc * eta + A); var_proc at eta = 0."""
    if not (A_phi > 0 and var_proc > 0):
        raise InvalidInputError("A_phi and var_proc must be positive")
    eta = np.asarray(eta_prev, dtype=float)
    val = var_proc * A_phi / (var_proc * eta + A_phi)
    return float(val) if val.ndim == 0 else val


def rate_closed_form(eta_k, eta_prev, pm: PerfModel, sensing_assisted: bool = True):
    """Approximate achievable rate eta_k * log2(1 + C_k * h_tilde(phi_pred, var)).

    With ``sensing_assisted`` the variance is the Kalman-tracked one driven by
    ``eta_prev``; otherwise the refracting phases use the prediction and the
    variance is the process noise. ``pm.comm_snr`` short-circuits both.
    Vectorised over the allocation arguments.
    """
    eta_k = np.asarray(eta_k, dtype=float)
    if pm.comm_snr is not None:
        val = eta_k * np.log2(1.0 + pm.comm_snr)
    else:
        if sensing_assisted:
            var = tracked_variance(eta_prev, pm.A_phi, pm.var_proc)
        else:
            var = pm.var_proc
        val = eta_k * np.log2(1.0 + pm.C_k * h_tilde(pm.phi_pred, var))
    val = np.asarray(val, dtype=float)
    return float(val) if val.ndim == 0 else val


def rate_coefficient(
    P_A: float, beta_G: float, beta_h: float, L: int, sigma_c2: float
) -> float:
    return 2.0 * P_A * beta_G * beta_h * L / sigma_c2


def build_perf_model(
    phi_pred: float,
    d_pred: float,
    rc: RadioConstants,
    arrays: ArrayConfig,
    beta0: float,
    d_u: float = 2.0,
    var_proc: float = 0.01,
) -> PerfModel:
    """Assemble a vehicle's PerfModel from its predicted bearing and distance."""
    beta_G = path_gain(beta0, d_pred)
    beta_h = path_gain(beta0, d_u)
    h_val = h_series(phi_pred, var_proc)
    gamma_full = full_frame_echo_snr(beta_G, h_val, rc, arrays)
    return PerfModel(
        beta_G=beta_G,
        beta_h=beta_h,
        A_phi=measurement_coefficient(phi_pred, gamma_full, rc.sigmaR2),
        C_k=rate_coefficient(rc.P_A, beta_G, beta_h, arrays.L, rc.sigma_c2),
        h_val=h_val,
        phi_pred=float(phi_pred),
        var_proc=float(var_proc),
        gamma_full=gamma_full,
        L=arrays.L,
        M_r=arrays.M_r,
    )

"""Vehicle state prediction, angle measurements and the scalar Kalman update.

Only the bearing is filtered. Distance and speed are propagated open-loop on
the belief side since no range measurement is modelled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFilterError,
    InfeasibleSensingError,
    InvalidInputError,
    StateOutOfDomainError,
)


@dataclass(frozen=True)
class VehicleState:
    """Bearing ``phi`` (rad), RSU-IRS distance ``d`` (m) and speed ``v`` (m/s).

    ``v`` follows the sign convention of the prediction model: positive speed
    increases the bearing, i.e. motion towards -x for bearings measured from +x.
    """

    phi: float
    d: float
    v: float

    def __post_init__(self):
        if not (np.isfinite(self.phi) and np.isfinite(self.d) and np.isfinite(self.v)):
            raise StateOutOfDomainError("non-finite vehicle state")
        if not (0.0 < self.phi < np.pi) or self.d <= 0.0:
            raise StateOutOfDomainError(
                f"state out of domain: phi={self.phi!r}, d={self.d!r}"
            )


@dataclass(frozen=True)
class ProcessNoise:
    var_phi: float = 0.01
    var_d: float = 0.0
    var_v: float = 0.0

    def __post_init__(self):
        if min(self.var_phi, self.var_d, self.var_v) < 0:
            raise InvalidInputError("process noise variances must be >= 0")


@dataclass(frozen=True)
class TrackBelief:
    phi_pred: float
    d_pred: float
    phi_tracked: float
    var_tracked: float
    var_meas: float


def predict_state(
    prev: VehicleState,
    dt: float,
    noise: ProcessNoise | None = None,
    rng: np.random.Generator | None = None,
) -> VehicleState:
    """One-frame state prediction.

    phi' = phi + v*dt*sin(phi)/d,  d' = d - v*dt*cos(phi),  v' = v,
    plus zero-mean Gaussian process noise when ``rng`` is given.
    """
    if not dt > 0:
        raise InvalidInputError("dt must be positive")
    phi = prev.phi + prev.v * dt * np.sin(prev.phi) / prev.d
    d = prev.d - prev.v * dt * np.cos(prev.phi)
    v = prev.v
    if rng is not None:
        noise = noise or ProcessNoise()
        w = rng.standard_normal(3)
        phi += np.sqrt(noise.var_phi) * w[0]
        d += np.sqrt(noise.var_d) * w[1]
        v += np.sqrt(noise.var_v) * w[2]
    return VehicleState(float(phi), float(d), float(v))


def measurement_variance(gamma_S: float, phi: float, sigmaR2: float) -> float:
    """Angle-estimate variance sigma_R^2 / (gamma_S * sin^2(phi))."""
    if not gamma_S > 0:
        raise InfeasibleSensingError(f"echo SNR must be positive, got {gamma_S!r}")
    s2 = np.sin(phi) ** 2
    if s2 == 0.0:
        raise InvalidInputError("sin(phi) must be nonzero")
    return float(sigmaR2 / (gamma_S * s2))


def kalman_update(
    phi_pred: float, phi_meas: float, var_proc: float, var_meas: float
) -> tuple[float, float]:
    """Fuse prediction and measurement; returns (phi_tracked, var_tracked)."""
    if var_proc < 0 or var_meas < 0:
        raise InvalidInputError("variances must be >= 0")
    total = var_proc + var_meas
    if total == 0.0:
        raise DegenerateFilterError("process and measurement variances are both zero")
    gain = var_proc / total
    phi_tracked = phi_pred + gain * (phi_meas - phi_pred)
    # harmonic form of var_proc - var_proc**2 / total; no cancellation
    var_tracked = var_proc * var_meas / total
    return float(phi_tracked), float(var_tracked)


def synthesize_measurement(
    phi_true: float, var_meas: float, rng: np.random.Generator
) -> float:
    """Noisy bearing measurement phi_true + N(0, var_meas)."""
    if var_meas < 0:
        raise InvalidInputError("var_meas must be >= 0")
    if var_meas == 0:
        return float(phi_true)
    return float(phi_true + np.sqrt(var_meas) * rng.standard_normal())

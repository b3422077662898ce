"""Array geometry, steering vectors, Fejér kernels and passive beamforming gains.

All arrays are half-wavelength ULAs. Bearings are measured from the +x axis
(the RSU receive array axis) and must lie in the open interval (0, pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

TWO_PI = 2.0 * np.pi

# |sin(pi x / 2)| below this is treated as the removable singularity of F_L.
_FEJER_SINGULAR_TOL = 1e-9


@dataclass(frozen=True)
class ArrayConfig:
    """Receive ULA size at the RSU and IRS element count per vehicle."""

    num_rx_antennas: int = 10
    num_irs_elements: int = 100

    def __post_init__(self):
        if int(self.num_rx_antennas) < 1 or int(self.num_irs_elements) < 1:
            raise InvalidInputError("array sizes must be >= 1")

    @property
    def M_r(self) -> int:
        return int(self.num_rx_antennas)

    @property
    def L(self) -> int:
        return int(self.num_irs_elements)


@dataclass(frozen=True)
class ChannelGains:
    beta0: float
    beta_G: float
    beta_h: float

    def __post_init__(self):
        if min(self.beta0, self.beta_G, self.beta_h) <= 0:
            raise InvalidInputError("channel gains must be positive")

    @classmethod
    def from_distances(cls, beta0: float, d: float, d_u: float) -> "ChannelGains":
        return cls(beta0, path_gain(beta0, d), path_gain(beta0, d_u))


def _check_count(n: int, name: str) -> int:
    n_int = int(n)
    if n_int != n or n_int < 1:
        raise InvalidInputError(f"{name} must be a positive integer, got {n!r}")
    return n_int


def check_angle(phi, name: str = "phi"):
    """Validate bearing(s) in (0, pi); returns the input as float or ndarray."""
    arr = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be finite")
    if np.any(arr <= 0.0) or np.any(arr >= np.pi):
        raise InvalidInputError(f"{name} must lie in (0, pi)")
    return float(arr) if arr.ndim == 0 else arr


def steering_irs(phi: float, L: int) -> np.ndarray:
    """IRS steering vector a_IRS(-phi): entry l is exp(+j*pi*l*cos(phi)), l = 0..L-1."""
    phi = check_angle(phi)
    L = _check_count(L, "L")
    return np.exp(1j * np.pi * np.arange(L) * np.cos(phi))


def steering_rsu(phi: float, M_r: int) -> np.ndarray:
    """RSU receive steering vector b_RSU(phi): opposite phase progression to the IRS."""
    phi = check_angle(phi)
    M_r = _check_count(M_r, "M_r")
    return np.exp(-1j * np.pi * np.arange(M_r) * np.cos(phi))


def fejer_kernel(x, L: int):
    """Fejér kernel F_L(x) = (1/L) * (sin(L*pi*x/2) / sin(pi*x/2))**2.

    Vectorised over ``x``. Period 2, bounded by [0, L], and equal to L at the
    removable singularities x = 0 (mod 2).
    """
    L = _check_count(L, "L")
    x = np.asarray(x, dtype=float)
    den = np.sin(0.5 * np.pi * x)
    singular = np.abs(den) < _FEJER_SINGULAR_TOL
    safe = np.where(singular, 1.0, den)
    val = np.sin(0.5 * L * np.pi * x) ** 2 / (safe * safe) / L
    val = np.where(singular, float(L), np.clip(val, 0.0, float(L)))
    return float(val) if val.ndim == 0 else val


def path_gain(beta0: float, d: float) -> float:
    """Free-space power gain beta0 / d**2 with beta0 referenced to 1 m."""
    if not (beta0 > 0 and d > 0):
        raise InvalidInputError("beta0 and d must be positive")
    return beta0 / d**2


def reflect_phase_shifts(phi_est: float, L: int, theta0: float = 0.0) -> np.ndarray:
    """Reflecting-mode phases that steer the echo back towards the RSU."""
    phi_est = check_angle(phi_est, "phi_est")
    L = _check_count(L, "L")
    theta = -TWO_PI * np.arange(L) * np.cos(phi_est) + theta0
    return np.mod(theta, TWO_PI)


def refract_phase_shifts(
    phi_user: float, phi_tracked: float, L: int, theta0: float = 0.0
) -> np.ndarray:
    """Refracting-mode phases aligning the RSU->IRS wave with the in-vehicle device."""
    phi_user = check_angle(phi_user, "phi_user")
    phi_tracked = check_angle(phi_tracked, "phi_tracked")
    L = _check_count(L, "L")
    theta = np.pi * np.arange(L) * (np.cos(phi_user) - np.cos(phi_tracked)) + theta0
    return np.mod(theta, TWO_PI)


def passive_gain_exact(phi_true, phi_design: float, L: int):
    """Reflect-mode passive gain |a^T(-phi) Theta^R a(-phi)|^2 by direct summation.

    ``phi_true`` may be an array; the sum is then evaluated per entry. Equals
    L * F_L(2 * (cos(phi_design) - cos(phi_true))).
    """
    phi_true = np.asarray(check_angle(phi_true, "phi_true"), dtype=float)
    L = _check_count(L, "L")
    theta = reflect_phase_shifts(phi_design, L)
    l = np.arange(L)
    # a_l^2 * exp(j*theta_l), summed over l
    phase = 2.0 * np.pi * np.multiply.outer(np.cos(phi_true), l) + theta
    val = np.abs(np.exp(1j * phase).sum(axis=-1)) ** 2
    return float(val) if val.ndim == 0 else val


def receive_gain_exact(phi_true, phi_design: float, M_r: int):
    """Receive combining gain |v^H b_RSU(phi)|^2 with v = b_RSU(phi_design)/sqrt(M_r).

    Equals F_{M_r}(cos(phi_design) - cos(phi_true)).
    """
    phi_true = np.asarray(check_angle(phi_true, "phi_true"), dtype=float)
    v = steering_rsu(phi_design, M_r) / np.sqrt(M_r)
    m = np.arange(M_r)
    b = np.exp(-1j * np.pi * np.multiply.outer(np.cos(phi_true), m))
    val = np.abs(b @ v.conj()) ** 2
    return float(val) if val.ndim == 0 else val


def refract_gain_exact(phi_true, phi_tracked, phi_user: float, L: int):
    """Refract-mode passive gain |h_u^T Theta^T a(-phi)|^2 with unit-power links.

    ``phi_tracked`` (the angle the phases are designed for) may be an array,
    as may ``phi_true``; they broadcast. Equals L * F_L(cos(phi_tracked) - cos(phi_true)).
    """
    phi_true = np.asarray(check_angle(phi_true, "phi_true"), dtype=float)
    phi_tracked = np.asarray(check_angle(phi_tracked, "phi_tracked"), dtype=float)
    phi_user = check_angle(phi_user, "phi_user")
    L = _check_count(L, "L")
    val = refract_gain_from_cos(np.cos(phi_true), np.cos(phi_tracked), np.cos(phi_user), L)
    return float(val) if val.ndim == 0 else val


def refract_gain_from_cos(cos_true, cos_tracked, cos_user: float, L: int) -> np.ndarray:
    """Unchecked core of :func:`refract_gain_exact` on direction cosines.

    Monte Carlo draws of the tracked angle can leave (0, pi); only their
    cosines matter, so the oracles call this directly.
    """
    pl = np.pi * np.arange(L)
    device = -pl * cos_user
    refract = np.multiply.outer(cos_user - np.asarray(cos_tracked, dtype=float), pl)
    downlink = np.multiply.outer(np.asarray(cos_true, dtype=float), pl)
    phase = device + refract + downlink
    return np.abs(np.exp(1j * phase).sum(axis=-1)) ** 2

"""Monte Carlo and quadrature oracles for the closed-form expressions.

Nothing in here calls ``h_series`` or ``h_tilde``: the estimates are built
only from array-geometry primitives so they can certify those formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel_geometry import fejer_kernel, refract_gain_from_cos
from .closed_form import PerfModel, tracked_variance
from .errors import InvalidInputError
from .quadrature import adaptive_simpson

RNG_ALGORITHM = "numpy.random.PCG64"
_CHUNK = 20_000


@dataclass(frozen=True)
class McConfig:
    num_samples: int = 100_000
    seed: int = 12345
    confidence_z: float = 3.0

    def __post_init__(self):
        if int(self.num_samples) < 1:
            raise InvalidInputError("num_samples must be >= 1")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    se: float
    n: int

    def window(self, z: float = 3.0) -> tuple[float, float]:
        return self.mean - z * self.se, self.mean + z * self.se


@dataclass(frozen=True)
class RateEstimate:
    """Sampled expected rate and its Jensen upper bound for one vehicle."""

    exact: float
    exact_se: float
    jensen: float
    mean_snr: float
    mean_snr_se: float


def _estimate(x: np.ndarray) -> McEstimate:
    n = x.size
    se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return McEstimate(float(np.mean(x)), se, n)


def mc_expected_echo_gain(
    phi: float, var_proc: float, L: int, M_r: int, mc: McConfig = McConfig()
) -> McEstimate:
    """Sample mean of F_L(2*dcos) * F_M(dcos) with phi_pred ~ N(phi, var_proc).

    dcos = cos(phi_pred) - cos(phi). The echo SNR is this times
    eta * W * P_A * beta_G^2 * L / sigma_s^2.
    """
    if var_proc < 0:
        raise InvalidInputError("var_proc must be >= 0")
    rng = mc.rng()
    w = math.sqrt(var_proc) * rng.standard_normal(mc.num_samples)
    dcos = np.cos(phi + w) - math.cos(phi)
    gain = fejer_kernel(2.0 * dcos, L) * fejer_kernel(dcos, M_r)
    return _estimate(np.atleast_1d(gain))


def mc_echo_snr(
    eta_prev: float,
    phi: float,
    beta_G: float,
    rc,
    arrays,
    var_proc: float,
    mc: McConfig = McConfig(),
) -> McEstimate:
    """Monte Carlo expected echo SNR with the exact (finite-L) beamforming gains."""
    g = mc_expected_echo_gain(phi, var_proc, arrays.L, arrays.M_r, mc)
    scale = eta_prev * rc.W * rc.P_A * beta_G**2 * arrays.L / rc.sigma_s2
    return McEstimate(scale * g.mean, scale * g.se, g.n)


def mc_expected_rate(
    pm: PerfModel,
    eta_k: float,
    eta_prev: float,
    mc: McConfig = McConfig(),
    phi_true: float | None = None,
    phi_user: float = math.pi / 3,
    sensing_assisted: bool = True,
) -> RateEstimate:
    """Expected rate E[log2(1+snr)] and Jensen bound log2(1+E[snr]), scaled by eta_k.

    The tracked angle is drawn as phi_true + N(0, var) with var the Kalman
    tracking variance at ``eta_prev`` (or the process noise without sensing
    assistance). The SNR is P_A*beta_G*beta_h*|h_u^T Theta^T a|^2 / sigma_c^2
    with the refracting phases built from each draw.
    """
    phi_true = pm.phi_pred if phi_true is None else phi_true
    if sensing_assisted:
        var = tracked_variance(eta_prev, pm.A_phi, pm.var_proc)
    else:
        var = pm.var_proc
    # C_k = 2 * P_A * beta_G * beta_h * L / sigma_c2
    snr_per_gain = pm.C_k / (2.0 * pm.L)
    rng = mc.rng()
    n = mc.num_samples
    snr = np.empty(n)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        draws = phi_true + math.sqrt(var) * rng.standard_normal(stop - start)
        g = refract_gain_from_cos(math.cos(phi_true), np.cos(draws), math.cos(phi_user), pm.L)
        snr[start:stop] = snr_per_gain * g
    log_rate = np.log2(1.0 + snr)
    lr = _estimate(log_rate)
    s = _estimate(snr)
    return RateEstimate(
        exact=eta_k * lr.mean,
        exact_se=eta_k * lr.se,
        jensen=eta_k * math.log2(1.0 + s.mean),
        mean_snr=s.mean,
        mean_snr_se=s.se,
    )


def pdf_y_support(phi: float) -> tuple[float, float]:
    """Support of y = 2cos(phi_pred) - 2cos(phi)."""
    c = math.cos(phi)
    return -2.0 - 2.0 * c, 2.0 - 2.0 * c


def pdf_y(y, phi: float, var_proc: float, tol: float = 1e-14):
    """Density of y = 2cos(phi + w) - 2cos(phi), w ~ N(0, var_proc).

    Every preimage +-arccos(y/2 + cos phi) + 2*pi*i of y contributes its
    Gaussian weight divided by |dy/dphi| = 2*sqrt(1 - (y/2 + cos phi)^2).
    The sum over i runs outward from 0 until two consecutive index pairs fall
    below ``tol`` relative to the running total.
    """
    if not var_proc > 0:
        raise InvalidInputError("var_proc must be > 0")
    y = np.asarray(y, dtype=float)
    c = 0.5 * y + math.cos(phi)
    if np.any(np.abs(c) > 1.0):
        raise InvalidInputError("y outside the support of the distribution")
    a = np.arccos(c)
    two_var = 2.0 * var_proc

    def term(i: int) -> np.ndarray:
        return np.exp(-((2 * i * math.pi + a - phi) ** 2) / two_var) + np.exp(
            -((2 * i * math.pi - a - phi) ** 2) / two_var
        )

    total = term(0)
    quiet = 0
    i = 1
    while quiet < 2:
        pair = term(i) + term(-i)
        total = total + pair
        quiet = quiet + 1 if np.all(pair <= tol * total) else 0
        i += 1
    jac = 2.0 * np.sqrt(np.maximum(1.0 - c * c, 1e-300))
    val = total / (math.sqrt(2.0 * math.pi * var_proc) * jac)
    return float(val) if val.ndim == 0 else val


def pdf_y_integral(phi: float, var_proc: float, lo=None, hi=None, tol: float = 1e-8) -> float:
    """Adaptive-Simpson integral of :func:`pdf_y` over [lo, hi] (default: full support).

    The support endpoints carry integrable 1/sqrt singularities; they are
    pulled in by 1e-12 so the integrand stays finite.
    """
    s_lo, s_hi = pdf_y_support(phi)
    lo = s_lo + 1e-12 if lo is None else max(lo, s_lo + 1e-12)
    hi = s_hi - 1e-12 if hi is None else min(hi, s_hi - 1e-12)
    return adaptive_simpson(lambda u: pdf_y(u, phi, var_proc), lo, hi, tol=tol, min_panels=400)


def sample_y(phi: float, var_proc: float, mc: McConfig) -> np.ndarray:
    w = math.sqrt(var_proc) * mc.rng().standard_normal(mc.num_samples)
    return 2.0 * np.cos(phi + w) - 2.0 * math.cos(phi)


@dataclass(frozen=True)
class HistogramCheck:
    edges: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    se: np.ndarray

    @property
    def z_scores(self) -> np.ndarray:
        return (self.counts - self.expected) / self.se

    def passed(self, z: float = 3.0) -> bool:
        return bool(np.all(np.abs(self.z_scores) <= z))


def pdf_histogram_check(
    phi: float, var_proc: float, mc: McConfig, bins: int = 50, width_sd: float = 4.0
) -> HistogramCheck:
    """Compare a histogram of sampled y against bin integrals of :func:`pdf_y`.

    Bins cover y over phi_pred in [phi - width_sd*sd, phi + width_sd*sd]
    (clipped to (0, pi)). Expected counts come from integrating the density
    over each bin; the standard error is the binomial one.
    """
    sd = math.sqrt(var_proc)
    p_hi = min(phi + width_sd * sd, math.pi - 1e-9)
    p_lo = max(phi - width_sd * sd, 1e-9)
    y_lo = 2.0 * math.cos(p_hi) - 2.0 * math.cos(phi)
    y_hi = 2.0 * math.cos(p_lo) - 2.0 * math.cos(phi)
    edges = np.linspace(y_lo, y_hi, bins + 1)
    counts, _ = np.histogram(sample_y(phi, var_proc, mc), bins=edges)
    probs = np.array(
        [pdf_y_integral(phi, var_proc, edges[j], edges[j + 1], tol=1e-10) for j in range(bins)]
    )
    n = mc.num_samples
    expected = n * probs
    se = np.sqrt(n * probs * (1.0 - probs))
    return HistogramCheck(edges, counts.astype(float), expected, se)


def fejer_mean(g: Callable[[np.ndarray], np.ndarray], L: int, tol: float = 1e-8) -> float:
    """(1/2) * integral_{-1}^{1} g(u) F_L(u) du, with at least 20*L Simpson panels."""
    return 0.5 * adaptive_simpson(
        lambda u: g(u) * fejer_kernel(u, L), -1.0, 1.0, tol=tol, min_panels=max(20 * L, 64)
    )


def fejer_limit_check(
    g: Callable[[np.ndarray], np.ndarray], L_list: Sequence[int], tol: float = 1e-8
) -> np.ndarray:
    """|(1/2) * integral g F_L - g(0)| for each L; tends to 0 for continuous 2-periodic g."""
    g0 = float(np.asarray(g(np.array([0.0])))[0])
    return np.array([abs(fejer_mean(g, L, tol) - g0) for L in L_list])

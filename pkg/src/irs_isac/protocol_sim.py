"""Frame-by-frame simulation of the mutually assisted protocol and its benchmarks.

Truth and belief are kept apart. The truth follows the noiseless motion
model from the known start positions. The RSU's belief is the previous
frame's tracked angle pushed through the same model, with the distance
carried open-loop.

Schemes:
    proposed: slot k carries vehicle k's data and vehicle k+1's sensing;
        refracting phases use the tracked angle.
    no_s_assist: same slots, refracting phases from the predicted angle.
    no_c_assist: every vehicle gets its own sensing and data slot.
    no_sc_assist: both of the above.
    random_phase: proposed slots with random IRS phases for both tasks.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel_geometry import ArrayConfig, fejer_kernel, path_gain
from .closed_form import PerfModel, RadioConstants, build_perf_model
from .errors import InfeasibleSensingError, InvalidInputError
from .kinematics import (
    ProcessNoise,
    VehicleState,
    kalman_update,
    measurement_variance,
    predict_state,
    synthesize_measurement,
)
from .optimizer import (
    ProblemP2,
    feasibility_max_snr,
    is_feasible,
    eta_lower_bounds,
    polyblock_solve,
    vehicle_rates,
)

log = logging.getLogger(__name__)

SCHEMES = ("proposed", "no_s_assist", "no_c_assist", "no_sc_assist", "random_phase")
SWEEP_PARAMS = ("gamma_th", "P_A")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one trajectory.

    Vehicle speeds are along +x in m/s. ``beta0`` is the linear path gain at
    1 m, ``phi_user`` the bearing of each in-vehicle device seen from its IRS.
    ``fixed_eta``, when set, replaces the optimiser with that allocation.
    """

    arrays: ArrayConfig = ArrayConfig()
    radio: RadioConstants = RadioConstants()
    noise: ProcessNoise = ProcessNoise()
    gamma_th: float = 1e3
    epsilon: float = 1e-3
    max_iters: int = 10_000
    dt: float = 0.1
    n_frames: int = 66
    rsu_position: tuple[float, float, float] = (0.0, 0.0, 10.0)
    vehicle_positions: tuple[tuple[float, float, float], ...] = (
        (-50.0, -20.0, 0.0),
        (-45.0, -20.0, 0.0),
        (-40.0, -20.0, 0.0),
    )
    speeds: tuple[float, ...] = (15.0, 15.0, 15.0)
    beta0: float = 1e-3
    d_u: float = 2.0
    phi_user: float = math.pi / 3
    seed: int = 2024
    random_phase_draws: int = 1000
    fixed_eta: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(self.vehicle_positions) != len(self.speeds):
            raise InvalidInputError("one speed per vehicle is required")
        if len(self.vehicle_positions) < 1:
            raise InvalidInputError("need at least one vehicle")
        if not (self.dt > 0 and int(self.n_frames) >= 1):
            raise InvalidInputError("dt must be positive and n_frames >= 1")
        if self.gamma_th < 0 or not self.epsilon > 0:
            raise InvalidInputError("gamma_th must be >= 0 and epsilon > 0")

    @property
    def K(self) -> int:
        return len(self.vehicle_positions)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_param(self, param: str, value: float) -> "ScenarioConfig":
        if param == "gamma_th":
            return self.replace(gamma_th=float(value))
        if param == "P_A":
            return self.replace(radio=dataclasses.replace(self.radio, P_A=float(value)))
        raise InvalidInputError(f"unknown sweep parameter {param!r}")


@dataclass
class VehicleFrame:
    phi_true: float
    phi_pred: float
    phi_tracked: float
    var_tracked: float
    gamma_s: float
    rate: float


@dataclass
class FrameResult:
    n: int
    vehicles: list[VehicleFrame]
    eta: np.ndarray
    min_rate: float
    feasible: bool


@dataclass
class SweepRow:
    scheme: str
    param: str
    value: float
    mean_min_rate: float
    mean_gamma_s: float
    frames: int
    seed: int
    runtime: float = field(default=0.0, compare=False)


def compute_true_bearing(rsu, vehicle) -> float:
    """Angle between +x and the RSU-to-vehicle line, in (0, pi)."""
    diff = np.asarray(vehicle, dtype=float) - np.asarray(rsu, dtype=float)
    norm = float(np.linalg.norm(diff))
    if norm == 0.0:
        raise InvalidInputError("RSU and vehicle positions coincide")
    return float(np.arccos(np.clip(diff[0] / norm, -1.0, 1.0)))


def initial_states(cfg: ScenarioConfig) -> list[VehicleState]:
    """Start states. Motion along +x lowers the bearing, hence v = -speed."""
    out = []
    for pos, speed in zip(cfg.vehicle_positions, cfg.speeds):
        d = float(np.linalg.norm(np.subtract(pos, cfg.rsu_position)))
        out.append(VehicleState(compute_true_bearing(cfg.rsu_position, pos), d, -float(speed)))
    return out


def _scheme_rngs(seed: int, scheme: str) -> tuple[np.random.Generator, np.random.Generator]:
    """Measurement-noise and phase-draw streams for one (seed, scheme).

    The swept value is deliberately left out: every point of a sweep sees the
    same noise sequence, so trends across the sweep are not masked by noise.
    """
    ss = np.random.SeedSequence([int(seed), SCHEMES.index(scheme)])
    a, b = ss.spawn(2)
    return np.random.Generator(np.random.PCG64(a)), np.random.Generator(np.random.PCG64(b))


def random_phase_gains(
    phi_pred: float, var_phi: float, cos_user: float, L: int, M_r: int,
    draws: int, rng: np.random.Generator,
) -> tuple[float, float]:
    """Mean echo and data-link array gains under uniformly random IRS phases.

    Each draw picks fresh phases and a bearing phi_pred + N(0, var_phi). The
    echo gain is |a^T Theta a|^2 * F_M(dcos) with the receive beam on the
    prediction; the data gain is |h_u^T Theta a|^2 with unit-modulus links.
    """
    l = np.arange(L)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(draws, L))
    phi = phi_pred + math.sqrt(var_phi) * rng.standard_normal(draws)
    c = np.cos(phi)[:, None]
    echo_arr = np.abs(np.exp(1j * (theta + 2.0 * np.pi * l * c)).sum(axis=1)) ** 2
    echo = echo_arr * fejer_kernel(np.cos(phi) - math.cos(phi_pred), M_r)
    data = np.abs(np.exp(1j * (theta + np.pi * l * (c - cos_user))).sum(axis=1)) ** 2
    return float(echo.mean()), float(data.mean())


def _random_phase_model(pm: PerfModel, cfg: ScenarioConfig, rng) -> PerfModel:
    rc, ar = cfg.radio, cfg.arrays
    echo, data = random_phase_gains(
        pm.phi_pred, cfg.noise.var_phi, math.cos(cfg.phi_user), ar.L, ar.M_r,
        cfg.random_phase_draws, rng,
    )
    gamma_full = rc.W * rc.P_A * pm.beta_G**2 * echo / rc.sigma_s2
    comm = rc.P_A * pm.beta_G * pm.beta_h * data / rc.sigma_c2
    return dataclasses.replace(pm.with_sensing_snr(gamma_full, rc.sigmaR2), comm_snr=comm)


def build_problem(models: Sequence[PerfModel], gamma_th: float, scheme: str) -> ProblemP2:
    if scheme in ("proposed", "random_phase"):
        return ProblemP2(models, gamma_th)
    if scheme == "no_s_assist":
        return ProblemP2(models, gamma_th, sensing_assisted=False)
    if scheme == "no_c_assist":
        return ProblemP2.time_division(models, gamma_th)
    if scheme == "no_sc_assist":
        return ProblemP2.time_division(models, gamma_th, sensing_assisted=False)
    raise InvalidInputError(f"unknown scheme {scheme!r}")


def equalizing_allocation(p: ProblemP2) -> np.ndarray:
    return feasibility_max_snr(p)[1]


def run_frame(
    n: int,
    truths: Sequence[VehicleState],
    predictions: Sequence[VehicleState],
    cfg: ScenarioConfig,
    scheme: str,
    noise_rng: np.random.Generator,
    phase_rng: np.random.Generator,
    warm_eta=None,
) -> tuple[FrameResult, list[VehicleState]]:
    """Allocate, sense, track and communicate for one frame.

    ``predictions`` are the belief states already pushed to this frame.
    Returns the frame record and the tracked beliefs for the next frame.
    """
    rc, ar = cfg.radio, cfg.arrays
    var_phi = cfg.noise.var_phi
    models = [
        build_perf_model(b.phi, b.d, rc, ar, cfg.beta0, cfg.d_u, var_phi) for b in predictions
    ]
    if scheme == "random_phase":
        models = [_random_phase_model(pm, cfg, phase_rng) for pm in models]
    p = build_problem(models, cfg.gamma_th, scheme)

    feasible = is_feasible(p)
    if feasible and cfg.fixed_eta is not None:
        eta = np.asarray(cfg.fixed_eta, dtype=float)
        if eta.shape != (p.n_slots,):
            raise InvalidInputError(f"fixed allocation must have {p.n_slots} entries")
        feasible = bool(np.all(eta >= eta_lower_bounds(p) - 1e-12))
    elif feasible:
        eta = polyblock_solve(p, cfg.epsilon, cfg.max_iters, initial=warm_eta).eta
    if not feasible:
        eta = equalizing_allocation(p)

    rates = vehicle_rates(p, eta) if feasible else np.zeros(p.K)
    vehicles, beliefs = [], []
    for k, (truth, pred, pm) in enumerate(zip(truths, predictions, models)):
        gamma_s = float(eta[p.sense_slot[k]] * pm.gamma_full)
        try:
            var_meas = measurement_variance(gamma_s, pred.phi, rc.sigmaR2)
            meas = synthesize_measurement(truth.phi, var_meas, noise_rng)
            phi_t, var_t = kalman_update(pred.phi, meas, var_phi, var_meas)
        except InfeasibleSensingError:
            # no echo energy this frame: keep the prediction
            phi_t, var_t = pred.phi, var_phi
        vehicles.append(VehicleFrame(truth.phi, pred.phi, phi_t, var_t, gamma_s, float(rates[k])))
        beliefs.append(VehicleState(phi_t, pred.d, pred.v))
    min_rate = float(rates.min()) if feasible else 0.0
    return FrameResult(n, vehicles, eta, min_rate, feasible), beliefs


def run_trajectory(cfg: ScenarioConfig, scheme: str = "proposed") -> list[FrameResult]:
    """Run ``cfg.n_frames`` frames of one scheme. Deterministic given ``cfg.seed``."""
    if scheme not in SCHEMES:
        raise InvalidInputError(f"unknown scheme {scheme!r}")
    noise_rng, phase_rng = _scheme_rngs(cfg.seed, scheme)
    truths = initial_states(cfg)
    # the start positions are known, so the first prediction is exact
    predictions = list(truths)
    frames: list[FrameResult] = []
    warm = None
    for n in range(1, int(cfg.n_frames) + 1):
        if n > 1:
            truths = [predict_state(t, cfg.dt) for t in truths]
            predictions = [predict_state(b, cfg.dt) for b in beliefs]
        fr, beliefs = run_frame(n, truths, predictions, cfg, scheme, noise_rng, phase_rng, warm)
        warm = fr.eta if fr.feasible else None
        frames.append(fr)
    return frames


def summarize(frames: Sequence[FrameResult]) -> tuple[float, float]:
    """Mean min-rate over frames and mean echo SNR over frames and vehicles."""
    mean_rate = float(np.mean([f.min_rate for f in frames]))
    mean_gamma = float(np.mean([v.gamma_s for f in frames for v in f.vehicles]))
    return mean_rate, mean_gamma


def sweep(
    cfg: ScenarioConfig, param: str, values: Sequence[float], schemes: Sequence[str]
) -> list[SweepRow]:
    """One trajectory per (scheme, value); rows ordered by scheme then value."""
    if param not in SWEEP_PARAMS:
        raise InvalidInputError(f"param must be one of {SWEEP_PARAMS}")
    values = [float(v) for v in values]
    if values != sorted(values):
        raise InvalidInputError("sweep values must be sorted ascending")
    rows = []
    for scheme in schemes:
        for value in values:
            t0 = time.perf_counter()
            frames = run_trajectory(cfg.with_param(param, value), scheme)
            rate, gamma = summarize(frames)
            rows.append(
                SweepRow(scheme, param, value, rate, gamma, len(frames), cfg.seed,
                         time.perf_counter() - t0)
            )
    for msg in sweep_violations(rows, slack=cfg.epsilon):
        log.warning("sweep trend check: %s", msg)
    return rows


def sweep_violations(rows: Sequence[SweepRow], slack: float = 1e-9) -> list[str]:
    """Trend breaks within each scheme: rate must fall with gamma_th and rise with P_A.

    ``slack`` is relative; the solver is only epsilon-optimal, so callers
    normally pass the solver tolerance.
    """
    out = []
    groups: dict[tuple[str, str], list[SweepRow]] = {}
    for r in rows:
        groups.setdefault((r.scheme, r.param), []).append(r)
    for (scheme, _), rs in groups.items():
        rs = sorted(rs, key=lambda r: r.value)
        for a, b in zip(rs, rs[1:]):
            tol = slack * max(abs(a.mean_min_rate), abs(b.mean_min_rate), 1e-300)
            if a.param == "gamma_th" and b.mean_min_rate > a.mean_min_rate + tol:
                out.append(f"{scheme}: rate rose from {a.value:g} to {b.value:g}")
            if a.param == "P_A" and b.mean_min_rate < a.mean_min_rate - tol:
                out.append(f"{scheme}: rate fell from {a.value:g} to {b.value:g}")
    return out


def channel_gains_at(cfg: ScenarioConfig, d: float) -> tuple[float, float]:
    return path_gain(cfg.beta0, d), path_gain(cfg.beta0, cfg.d_u)

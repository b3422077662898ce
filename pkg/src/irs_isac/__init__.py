"""IRS-assisted vehicular integrated sensing and communication.

Closed-form echo SNR and rate expressions under angle uncertainty, their
Monte Carlo oracles, Kalman angle tracking, a polyblock solver for the
per-frame max-min time allocation, and a trajectory simulator.
"""

from .channel_geometry import ArrayConfig, fejer_kernel
from .closed_form import PerfModel, RadioConstants, build_perf_model, h_series, h_tilde
from .kinematics import ProcessNoise, VehicleState, kalman_update, predict_state
from .optimizer import ProblemP2, grid_oracle, polyblock_solve
from .protocol_sim import SCHEMES, ScenarioConfig, run_trajectory, sweep

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig",
    "PerfModel",
    "ProblemP2",
    "ProcessNoise",
    "RadioConstants",
    "SCHEMES",
    "ScenarioConfig",
    "VehicleState",
    "build_perf_model",
    "fejer_kernel",
    "grid_oracle",
    "h_series",
    "h_tilde",
    "kalman_update",
    "polyblock_solve",
    "predict_state",
    "run_trajectory",
    "sweep",
]

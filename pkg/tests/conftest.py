import math

import pytest

from irs_isac.channel_geometry import ArrayConfig
from irs_isac.closed_form import RadioConstants, build_perf_model
from irs_isac.protocol_sim import ScenarioConfig, initial_states

# acceptance lines collected by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def road_models(xs, y=-20.0, h=10.0, var=0.01, rc=None, arrays=None):
    """Perf models for vehicles at road positions ``xs`` below an RSU at height ``h``."""
    rc = rc or RadioConstants()
    arrays = arrays or ArrayConfig()
    out = []
    for x in xs:
        d = math.sqrt(x * x + y * y + h * h)
        out.append(build_perf_model(math.acos(x / d), d, rc, arrays, 1e-3, 2.0, var))
    return out


@pytest.fixture(scope="session")
def default_cfg():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def frame1_models(default_cfg):
    cfg = default_cfg
    return [
        build_perf_model(s.phi, s.d, cfg.radio, cfg.arrays, cfg.beta0, cfg.d_u, cfg.noise.var_phi)
        for s in initial_states(cfg)
    ]

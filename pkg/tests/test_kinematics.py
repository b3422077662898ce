import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from irs_isac.errors import (
    DegenerateFilterError,
    InfeasibleSensingError,
    InvalidInputError,
    StateOutOfDomainError,
)
from irs_isac.kinematics import (
    ProcessNoise,
    VehicleState,
    kalman_update,
    measurement_variance,
    predict_state,
    synthesize_measurement,
)

pos_var = st.floats(1e-8, 1e3)


def test_prediction_formula():
    s = VehicleState(1.0, 30.0, 15.0)
    nxt = predict_state(s, 0.1)
    assert nxt.phi == pytest.approx(1.0 + 1.5 * math.sin(1.0) / 30.0)
    assert nxt.d == pytest.approx(30.0 - 1.5 * math.cos(1.0))
    assert nxt.v == 15.0


def test_prediction_tracks_straight_line_motion():
    # Euler steps of the prediction model follow a car moving along +x (v < 0)
    rsu, x0, y = np.array([0.0, 0.0, 10.0]), -50.0, -20.0
    pos = np.array([x0, y, 0.0]) - rsu
    d = np.linalg.norm(pos)
    s = VehicleState(math.acos(pos[0] / d), d, -15.0)
    for n in range(1, 201):
        s = predict_state(s, 0.001)
        p = np.array([x0 + 15.0 * 0.001 * n, y, 0.0]) - rsu
        dn = np.linalg.norm(p)
    assert s.phi == pytest.approx(math.acos(p[0] / dn), abs=1e-4)
    assert s.d == pytest.approx(dn, abs=1e-3)


def test_prediction_noise_is_seeded():
    s = VehicleState(1.0, 30.0, 15.0)
    a = predict_state(s, 0.1, ProcessNoise(0.01, 0.1, 0.1), np.random.default_rng(3))
    b = predict_state(s, 0.1, ProcessNoise(0.01, 0.1, 0.1), np.random.default_rng(3))
    assert a == b and a != predict_state(s, 0.1)


def test_state_domain():
    with pytest.raises(StateOutOfDomainError):
        VehicleState(0.0, 10.0, 1.0)
    with pytest.raises(StateOutOfDomainError):
        VehicleState(1.0, -1.0, 1.0)
    with pytest.raises(StateOutOfDomainError):
        VehicleState(float("nan"), 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        predict_state(VehicleState(1.0, 1.0, 1.0), 0.0)


def test_measurement_variance():
    assert measurement_variance(100.0, math.pi / 2, 0.1) == pytest.approx(1e-3)
    with pytest.raises(InfeasibleSensingError):
        measurement_variance(0.0, 1.0, 0.1)


@given(pos_var, pos_var, st.floats(0.1, 3.0), st.floats(-0.5, 0.5))
def test_kalman_fusion(vp, vm, phi, offset):
    phi_t, var_t = kalman_update(phi, phi + offset, vp, vm)
    assert var_t == pytest.approx(vp * vm / (vp + vm), rel=1e-12)
    assert var_t <= min(vp, vm) * (1 + 1e-15)
    # the fused estimate lies between prediction and measurement
    lo, hi = sorted((phi, phi + offset))
    assert lo - 1e-12 <= phi_t <= hi + 1e-12


def test_kalman_edge_cases():
    assert kalman_update(1.0, 2.0, 0.0, 1.0) == (1.0, 0.0)
    assert kalman_update(1.0, 2.0, 1.0, 0.0) == (2.0, 0.0)
    with pytest.raises(DegenerateFilterError):
        kalman_update(1.0, 2.0, 0.0, 0.0)


def test_measurement_sampling():
    rng = np.random.default_rng(0)
    x = np.array([synthesize_measurement(1.0, 0.04, rng) for _ in range(20000)])
    assert abs(x.mean() - 1.0) < 3 * 0.2 / math.sqrt(x.size)
    assert x.var() == pytest.approx(0.04, rel=0.05)
    assert synthesize_measurement(1.0, 0.0, rng) == 1.0

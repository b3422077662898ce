import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irs_isac.channel_geometry import (
    ArrayConfig,
    ChannelGains,
    check_angle,
    fejer_kernel,
    passive_gain_exact,
    path_gain,
    receive_gain_exact,
    reflect_phase_shifts,
    refract_gain_exact,
    refract_phase_shifts,
    steering_irs,
    steering_rsu,
)
from irs_isac.errors import InvalidInputError

angles = st.floats(0.05, math.pi - 0.05)


def fejer_by_sum(x, L):
    # (1/L)|sum_l exp(j pi l x)|^2, the definition behind the closed ratio
    l = np.arange(L)
    return np.abs(np.exp(1j * np.pi * np.multiply.outer(x, l)).sum(-1)) ** 2 / L


def test_fejer_matches_direct_sum():
    x = np.linspace(-3, 3, 1201)
    for L in (1, 2, 10, 100):
        np.testing.assert_allclose(fejer_kernel(x, L), fejer_by_sum(x, L), rtol=1e-9, atol=1e-9)


def test_fejer_peak_and_period():
    assert fejer_kernel(0.0, 100) == 100.0
    assert fejer_kernel(2.0, 100) == 100.0
    assert fejer_kernel(0.37, 16) == pytest.approx(fejer_kernel(2.37, 16), rel=1e-9)


@given(st.floats(-10, 10), st.integers(1, 300))
def test_fejer_bounded(x, L):
    v = fejer_kernel(x, L)
    assert 0.0 <= v <= L


def test_fejer_rejects_bad_size():
    with pytest.raises(InvalidInputError):
        fejer_kernel(0.1, 0)
    with pytest.raises(InvalidInputError):
        fejer_kernel(0.1, 2.5)


def test_steering_vectors_unit_modulus_and_conjugate_phases():
    a = steering_irs(1.0, 8)
    b = steering_rsu(1.0, 8)
    np.testing.assert_allclose(np.abs(a), 1.0)
    np.testing.assert_allclose(a, b.conj())
    assert a[0] == 1.0


def test_angle_domain():
    for bad in (0.0, math.pi, -0.1, float("nan")):
        with pytest.raises(InvalidInputError):
            check_angle(bad)
    assert check_angle(1.0) == 1.0


def test_path_gain():
    assert path_gain(1e-3, 10.0) == pytest.approx(1e-5)
    g = ChannelGains.from_distances(1e-3, 20.0, 2.0)
    assert g.beta_G == pytest.approx(2.5e-6) and g.beta_h == pytest.approx(2.5e-4)
    with pytest.raises(InvalidInputError):
        path_gain(1e-3, 0.0)


def test_phase_shifts_in_range():
    for th in (reflect_phase_shifts(0.7, 64), refract_phase_shifts(1.0, 2.0, 64)):
        assert th.min() >= 0.0 and th.max() < 2 * math.pi


@settings(max_examples=60)
@given(angles, angles, st.integers(1, 128))
def test_reflect_gain_is_scaled_fejer(phi, design, L):
    exact = passive_gain_exact(phi, design, L)
    closed = L * fejer_kernel(2 * (math.cos(design) - math.cos(phi)), L)
    assert exact == pytest.approx(closed, rel=1e-8, abs=1e-8 * L)


@settings(max_examples=60)
@given(angles, angles, st.integers(1, 32))
def test_receive_gain_is_fejer(phi, design, M):
    exact = receive_gain_exact(phi, design, M)
    assert exact == pytest.approx(fejer_kernel(math.cos(design) - math.cos(phi), M), rel=1e-8, abs=1e-10)


@settings(max_examples=60)
@given(angles, angles, angles, st.integers(1, 128))
def test_refract_gain_is_scaled_fejer(phi, tracked, user, L):
    exact = refract_gain_exact(phi, tracked, user, L)
    closed = L * fejer_kernel(math.cos(tracked) - math.cos(phi), L)
    assert exact == pytest.approx(closed, rel=1e-8, abs=1e-8 * L)


def test_perfect_alignment_gains():
    assert passive_gain_exact(1.1, 1.1, 50) == pytest.approx(2500.0)
    assert refract_gain_exact(1.1, 1.1, 0.4, 50) == pytest.approx(2500.0)
    assert receive_gain_exact(1.1, 1.1, 10) == pytest.approx(10.0)


def test_array_config():
    a = ArrayConfig(10, 100)
    assert (a.M_r, a.L) == (10, 100)
    with pytest.raises(InvalidInputError):
        ArrayConfig(0, 10)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irs_isac.channel_geometry import ArrayConfig, fejer_kernel
from irs_isac.closed_form import (
    RadioConstants,
    build_perf_model,
    echo_snr_closed_form,
    h_series,
    h_tilde,
    rate_closed_form,
    tracked_variance,
)
from irs_isac.errors import DegenerateVarianceError, InvalidInputError
from irs_isac.mc_oracle import pdf_y
from irs_isac.quadrature import adaptive_simpson


def h_wide_sum(x, y):
    # same series with a fixed wide index range instead of adaptive stopping
    s = sum(
        math.exp(-2 * (i * math.pi) ** 2 / y) + math.exp(-2 * ((i + 1) * math.pi - x) ** 2 / y)
        for i in range(-60, 61)
    )
    return s / math.sqrt(2 * math.pi * y * math.sin(x) ** 2)


def test_h_frozen_values():
    # frozen from the wide fixed-range sum; y -> 0 at x = pi/2 is 1/sqrt(2 pi y)
    assert h_series(math.pi / 2, 0.01) == pytest.approx(3.989422804014327, rel=1e-13)
    assert h_series(0.3 * math.pi, 0.01) == pytest.approx(4.931197776749529, rel=1e-13)
    assert h_series(0.7 * math.pi, 0.1) == pytest.approx(1.5593816867608157, rel=1e-13)
    assert h_series(1.0, 0.5) == pytest.approx(0.6827604191691764, rel=1e-13)


@settings(max_examples=80)
@given(st.floats(0.05, math.pi - 0.05), st.floats(1e-4, 5.0))
def test_h_series_matches_wide_sum(x, y):
    assert h_series(x, y) == pytest.approx(h_wide_sum(x, y), rel=1e-12)


@settings(max_examples=80)
@given(st.floats(0.3, math.pi - 0.3), st.floats(1e-6, 0.01))
def test_h_tilde_close_to_h_for_small_variance(x, y):
    assert abs(h_tilde(x, y) - h_series(x, y)) <= 1e-6 * h_series(x, y)


def test_h_tilde_drifts_for_large_variance():
    # the dropped term exp(-2 x^2 / y) is no longer negligible
    x, y = 0.3, 0.1
    assert abs(h_tilde(x, y) / h_series(x, y) - 1) > 0.1


@pytest.mark.parametrize("phi", [0.3 * math.pi, 0.5 * math.pi, 0.8 * math.pi])
def test_h_is_twice_pdf_at_zero(phi):
    assert 2 * pdf_y(0.0, phi, 0.01) == pytest.approx(h_series(phi, 0.01), rel=1e-12)


@pytest.mark.parametrize("phi,var", [(0.4 * math.pi, 0.01), (0.5 * math.pi, 0.003)])
def test_h_is_limit_of_expected_fejer_gain(phi, var):
    # E[F_L(2(cos(phi+w) - cos phi))] -> h as L grows since F_L has unit mean
    L = 4000
    sd = math.sqrt(var)

    def integrand(w):
        dens = np.exp(-w * w / (2 * var)) / math.sqrt(2 * math.pi * var)
        return dens * fejer_kernel(2 * (np.cos(phi + w) - math.cos(phi)), L)

    val = adaptive_simpson(integrand, -8 * sd, 8 * sd, tol=1e-6, min_panels=20000)
    assert val == pytest.approx(h_series(phi, var), rel=2e-3)


def test_h_domain_errors():
    with pytest.raises(DegenerateVarianceError):
        h_series(1.0, 0.0)
    with pytest.raises(InvalidInputError):
        h_tilde(0.01, 0.1)


def test_echo_snr_linear_in_eta_and_value():
    rc, ar = RadioConstants(), ArrayConfig()
    pm = build_perf_model(1.2, 25.0, rc, ar, 1e-3)
    beta_G = 1e-3 / 25.0**2
    full = rc.W * rc.P_A * beta_G**2 * ar.L * ar.M_r * h_series(1.2, 0.01) / rc.sigma_s2
    assert echo_snr_closed_form(1.0, pm, rc, ar) == pytest.approx(full, rel=1e-12)
    assert echo_snr_closed_form(0.25, pm, rc, ar) == pytest.approx(0.25 * full, rel=1e-12)
    assert pm.gamma_full == pytest.approx(full, rel=1e-12)
    with pytest.raises(InvalidInputError):
        echo_snr_closed_form(1.5, pm, rc, ar)


@given(st.floats(0.0, 1.0), st.floats(1e-9, 1.0), st.floats(1e-6, 1.0))
def test_tracked_variance_contracts(eta, A, vp):
    v = tracked_variance(eta, A, vp)
    assert v <= vp * (1 + 1e-15)
    assert v == pytest.approx(vp * A / (vp * eta + A), rel=1e-12)


def test_rate_monotone_in_both_fractions():
    pm = build_perf_model(1.2, 25.0, RadioConstants(), ArrayConfig(), 1e-3)
    r = [rate_closed_form(0.3, s, pm) for s in (0.0, 0.01, 0.1, 0.5)]
    assert all(b > a for a, b in zip(r, r[1:]))
    assert rate_closed_form(0.6, 0.1, pm) == pytest.approx(2 * rate_closed_form(0.3, 0.1, pm))
    # without sensing assistance the sensing fraction has no effect
    assert rate_closed_form(0.3, 0.0, pm, False) == rate_closed_form(0.3, 0.9, pm, False)
    assert rate_closed_form(0.3, 0.0, pm) == pytest.approx(rate_closed_form(0.3, 0.5, pm, False))

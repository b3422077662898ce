import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import road_models
from irs_isac.errors import DegenerateProjectionError, InfeasibleProblemError, InvalidInputError
from irs_isac.optimizer import (
    ProblemP2,
    _RateTable,
    budget_bound,
    eta_lower_bounds,
    feasibility_max_snr,
    grid_oracle,
    is_feasible,
    objective,
    polyblock_solve,
    project_to_simplex,
    reduce_vertices,
    sensing_snrs,
    time_division_oracle,
    vehicle_rates,
)
from irs_isac.protocol_sim import build_problem

# optimum of the first frame of the default trajectory at gamma_th = 1e3,
# frozen from a 30-start SLSQP run (slot forms) and the bisection oracle (time division)
FRAME1_OPTIMA = {
    "proposed": 4.88550354175617,
    "no_s_assist": 3.5656830371551735,
    "no_c_assist": 4.30015448420699,
    "no_sc_assist": 3.5206778674281405,
}

POSITIONS = [[-50, -45, -40], [0, 5, 10], [-5, 0, 5], [40, 45, 50]]


@pytest.mark.parametrize("scheme", sorted(FRAME1_OPTIMA))
def test_frame1_matches_frozen_optimum(frame1_models, scheme):
    p = build_problem(frame1_models, 1e3, scheme)
    res = polyblock_solve(p, epsilon=1e-3)
    ref = FRAME1_OPTIMA[scheme]
    assert ref * (1 - 1e-3) <= res.value <= ref * (1 + 1e-6)
    assert res.converged


@pytest.mark.parametrize("xs", POSITIONS)
def test_polyblock_beats_grid(xs):
    p = ProblemP2(road_models(xs), 1e3)
    res = polyblock_solve(p)
    _, gv = grid_oracle(p, 60)
    assert res.value >= gv * (1 - 1e-3)
    assert res.upper_bound >= gv


@pytest.mark.parametrize("xs", POSITIONS)
def test_solution_is_feasible_and_certified(xs):
    p = ProblemP2(road_models(xs), 1e3)
    res = polyblock_solve(p)
    assert res.eta.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(res.eta >= eta_lower_bounds(p) - 1e-12)
    assert np.all(sensing_snrs(p, res.eta) >= p.gamma_th * (1 - 1e-9))
    assert objective(p, res.eta) == pytest.approx(res.value, rel=1e-12)
    assert (res.upper_bound - res.value) / res.value <= 1e-3


def test_trace_is_monotone():
    p = ProblemP2(road_models([0, 5, 10]), 1e3)
    tr = np.array(polyblock_solve(p).trace)
    assert np.all(np.diff(tr[:, 0]) == 1)
    assert np.all(np.diff(tr[:, 1]) >= 0)
    assert np.all(np.diff(tr[:, 2]) <= 0)
    assert np.all(tr[:, 2] >= tr[:, 1])


def test_plain_method_gives_valid_bounds():
    p = ProblemP2(road_models([0, 5, 10]), 1e3)
    plain = polyblock_solve(p, reduce=False, max_iters=300)
    fast = polyblock_solve(p)
    assert plain.value <= fast.upper_bound
    assert plain.upper_bound >= fast.value
    assert not plain.converged


def test_time_division_against_oracle():
    for xs in POSITIONS:
        for assisted in (True, False):
            p = ProblemP2.time_division(road_models(xs), 1e3, sensing_assisted=assisted)
            res = polyblock_solve(p)
            _, ov = time_division_oracle(p, s_points=20001)
            assert res.value == pytest.approx(ov, rel=1e-3)
            assert res.eta.sum() == pytest.approx(1.0, abs=1e-9)


def test_infeasible_raises_with_threshold():
    p = ProblemP2(road_models([-50, -45, -40]), 1e3)
    max_gamma, eta = feasibility_max_snr(p)
    assert eta.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(sensing_snrs(p, eta), max_gamma)
    bad = ProblemP2(p.models, max_gamma * 1.01)
    assert not is_feasible(bad)
    with pytest.raises(InfeasibleProblemError) as exc:
        polyblock_solve(bad)
    assert exc.value.threshold == pytest.approx(max_gamma)


def test_threshold_at_boundary_is_solved():
    p = ProblemP2(road_models([0, 5, 10]), 1e3)
    max_gamma, _ = feasibility_max_snr(p)
    res = polyblock_solve(ProblemP2(p.models, max_gamma * (1 - 1e-13)))
    assert res.value >= 0.0


def test_warm_start_and_bad_initial():
    p = ProblemP2(road_models([0, 5, 10]), 1e3)
    ref = polyblock_solve(p)
    warm = polyblock_solve(p, initial=ref.eta)
    assert warm.value >= ref.value * (1 - 1e-3)
    junk = polyblock_solve(p, initial=np.ones(4))
    assert junk.value == ref.value


def test_bad_arguments():
    p = ProblemP2(road_models([0, 5, 10]), 1e3)
    with pytest.raises(InvalidInputError):
        polyblock_solve(p, epsilon=0.0)
    with pytest.raises(InvalidInputError):
        vehicle_rates(p, np.ones(3))
    with pytest.raises(InvalidInputError):
        ProblemP2([], 1.0)
    with pytest.raises(InvalidInputError):
        grid_oracle(ProblemP2.time_division(p.models, 1e3), 10)


def test_rate_table_equals_public_objective():
    rng = np.random.default_rng(0)
    for xs in POSITIONS:
        for td in (False, True):
            ms = road_models(xs)
            p = ProblemP2.time_division(ms, 1e3) if td else ProblemP2(ms, 1e3)
            x = rng.dirichlet(np.ones(p.n_slots), size=500)
            np.testing.assert_allclose(_RateTable(p).objective(x), objective(p, x), rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_budget_bound_is_an_upper_bound(seed):
    rng = np.random.default_rng(seed)
    p = ProblemP2(road_models([0, 5, 10]), 1e3)
    lower = eta_lower_bounds(p)
    Z = lower + rng.uniform(0, 1, size=4) * (1 - lower)
    t = budget_bound(p, Z, lower)[0]
    # random points in the box with sum <= 1
    x = lower + rng.uniform(0, 1, size=(2000, 4)) * (Z - lower)
    x = x[x.sum(axis=1) <= 1]
    if x.size:
        assert objective(p, x).max() <= t * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.5, 0.99))
def test_reduction_keeps_every_better_point(seed, frac):
    rng = np.random.default_rng(seed)
    p = ProblemP2(road_models([0, 5, 10]), 1e3)
    lower = eta_lower_bounds(p)
    cbv = frac * 4.0
    Z = np.atleast_2d(lower + rng.uniform(0.3, 1, size=4) * (1 - lower))
    R, corner, alive = reduce_vertices(p, Z, lower, cbv)
    x = lower + rng.uniform(0, 1, size=(5000, 4)) * (Z[0] - lower)
    x = x[x.sum(axis=1) <= 1]
    good = x[objective(p, x) > cbv] if x.size else x
    if good.size:
        assert alive[0]
        assert np.all(good <= R[0] + 1e-12)
        assert np.all(good >= corner[0] - 1e-12)


@settings(max_examples=100)
@given(arrays(float, 4, elements=st.floats(0.0, 1.0)), arrays(float, 4, elements=st.floats(0.0, 0.5)))
def test_objective_is_monotone(eta, bump):
    p = ProblemP2(road_models([0, 5, 10]), 1e3)
    assert objective(p, eta) <= objective(p, eta + bump) + 1e-12


@given(arrays(float, 4, elements=st.floats(0.0, 0.2)), arrays(float, 4, elements=st.floats(0.01, 2.0)))
def test_projection_lands_on_simplex(lower, step):
    lower = lower * 0.9 / max(lower.sum(), 1e-12) if lower.sum() > 0.9 else lower
    x = project_to_simplex(lower + step, lower)
    assert x.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(x >= lower - 1e-15)


def test_projection_needs_room_above_corner():
    with pytest.raises(DegenerateProjectionError):
        project_to_simplex(np.array([0.1, 0.2]), np.array([0.1, 0.2]))

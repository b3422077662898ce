"""Per-frame time allocation: feasibility, polyblock solver and grid oracle.

Each vehicle k has a sensing slot (whose fraction drives its echo SNR and
tracking variance) and a communication slot (whose fraction multiplies its
rate). In the mutually assisted frame these are slots k-1 and k of K+1; in a
time-division frame every vehicle owns two private slots. The objective is
the minimum rate over vehicles, which is increasing in every slot fraction,
so the problem is a monotonic program over the simplex.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .closed_form import PerfModel, rate_closed_form
from .errors import (
    DegenerateProjectionError,
    InfeasibleProblemError,
    InvalidInputError,
    ResourceLimitError,
)

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-3
DEFAULT_MAX_ITERS = 10_000
MAX_VERTICES = 1_000_000
SUM_TOL = 1e-9
# children closer than this to a lower bound are placed on it (cf. jamming)
SNAP_TOL = 1e-10


@dataclass
class ProblemP2:
    """Max-min rate problem for one frame.

    Attributes:
        models: per-vehicle coefficients, length K.
        gamma_th: echo SNR every vehicle must reach.
        sense_slot: slot index driving each vehicle's sensing (default k-1).
        comm_slot: slot index carrying each vehicle's data (default k).
        n_slots: allocation length (default K+1).
        sensing_assisted: rate uses the tracked variance (True) or the
            process-noise variance (False).
    """

    models: Sequence[PerfModel]
    gamma_th: float
    sense_slot: tuple[int, ...] | None = None
    comm_slot: tuple[int, ...] | None = None
    n_slots: int | None = None
    sensing_assisted: bool = True

    def __post_init__(self):
        K = len(self.models)
        if K < 1:
            raise InvalidInputError("need at least one vehicle")
        if self.gamma_th < 0:
            raise InvalidInputError("gamma_th must be >= 0")
        if self.sense_slot is None:
            self.sense_slot = tuple(range(K))
        if self.comm_slot is None:
            self.comm_slot = tuple(range(1, K + 1))
        if self.n_slots is None:
            self.n_slots = K + 1
        if len(self.sense_slot) != K or len(self.comm_slot) != K:
            raise InvalidInputError("slot maps must have one entry per vehicle")

    @classmethod
    def time_division(
        cls, models: Sequence[PerfModel], gamma_th: float, sensing_assisted: bool = True
    ) -> "ProblemP2":
        """Frame [s_1, c_1, ..., s_K, c_K] with a dedicated sensing slot per vehicle."""
        K = len(models)
        return cls(
            models,
            gamma_th,
            sense_slot=tuple(2 * k for k in range(K)),
            comm_slot=tuple(2 * k + 1 for k in range(K)),
            n_slots=2 * K,
            sensing_assisted=sensing_assisted,
        )

    @property
    def K(self) -> int:
        return len(self.models)


@dataclass
class PolyblockResult:
    eta: np.ndarray
    value: float
    upper_bound: float
    iterations: int
    converged: bool
    trace: list[tuple[int, float, float, int]] = field(default_factory=list)


def vehicle_rates(p: ProblemP2, eta) -> np.ndarray:
    """Per-vehicle rates, shape ``eta.shape[:-1] + (K,)``."""
    eta = np.asarray(eta, dtype=float)
    if eta.shape[-1] != p.n_slots:
        raise InvalidInputError(f"allocation must have {p.n_slots} entries")
    out = [
        rate_closed_form(eta[..., c], eta[..., s], pm, p.sensing_assisted)
        for pm, s, c in zip(p.models, p.sense_slot, p.comm_slot)
    ]
    return np.stack([np.asarray(r, dtype=float) for r in out], axis=-1)


def objective(p: ProblemP2, eta):
    """Minimum rate over vehicles; vectorised over leading axes of ``eta``."""
    val = vehicle_rates(p, eta).min(axis=-1)
    return float(val) if val.ndim == 0 else val


def sensing_snrs(p: ProblemP2, eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    gf = np.array([pm.gamma_full for pm in p.models])
    return eta[..., list(p.sense_slot)] * gf


def feasibility_max_snr(p: ProblemP2) -> tuple[float, np.ndarray]:
    """Largest common echo SNR reachable by all vehicles, and the allocation reaching it.

    Every vehicle's echo SNR is its own sensing fraction times its full-frame
    SNR, so the optimum equalises them with all remaining time at zero:
    max_gamma = 1 / sum_k (1 / gamma_full_k). The problem is feasible iff
    gamma_th <= max_gamma.
    """
    gf = np.array([pm.gamma_full for pm in p.models])
    max_gamma = 1.0 / np.sum(1.0 / gf)
    eta = np.zeros(p.n_slots)
    eta[list(p.sense_slot)] = max_gamma / gf
    return float(max_gamma), eta


def eta_lower_bounds(p: ProblemP2) -> np.ndarray:
    """Minimum slot fractions meeting the sensing threshold; zero for data-only slots."""
    lower = np.zeros(p.n_slots)
    for pm, s in zip(p.models, p.sense_slot):
        lower[s] = max(lower[s], p.gamma_th / pm.gamma_full)
    return lower


def eta_upper_bounds(lower: np.ndarray) -> np.ndarray:
    return 1.0 - (lower.sum() - lower)


def is_feasible(p: ProblemP2) -> bool:
    return bool(eta_lower_bounds(p).sum() <= 1.0)


def project_to_simplex(eta, lower) -> np.ndarray:
    """Scale ``eta`` towards the corner ``lower`` until its entries sum to one."""
    eta = np.asarray(eta, dtype=float)
    lower = np.asarray(lower, dtype=float)
    s_eta = eta.sum(axis=-1, keepdims=True)
    s_low = lower.sum()
    if np.any(s_eta <= s_low):
        raise DegenerateProjectionError("sum(eta) must exceed sum(lower)")
    return (eta - lower) * (1.0 - s_low) / (s_eta - s_low) + lower


def _lexmin_index(vertices: np.ndarray, candidates: np.ndarray) -> int:
    if candidates.size == 1:
        return int(candidates[0])
    sub = vertices[candidates]
    order = np.lexsort(sub.T[::-1])
    return int(candidates[order[0]])


REDUCE_PASSES = 3


class _RateTable:
    """Vectorised per-unit rates g_k(s) for all vehicles, without input checks.

    Mirrors :func:`rate_closed_form` (the tests hold the two together); the
    solver calls this in its inner loop where per-call validation dominates.
    """

    def __init__(self, p: ProblemP2):
        ms = p.models
        self.sense = np.array(p.sense_slot)
        self.comm = np.array(p.comm_slot)
        self.phi = np.array([m.phi_pred for m in ms])
        self.C = np.array([m.C_k for m in ms])
        self.A = np.array([m.A_phi for m in ms])
        self.vp = np.array([m.var_proc for m in ms])
        self.sin2 = np.sin(self.phi) ** 2
        self.gap2 = 2.0 * (np.pi - self.phi) ** 2
        self.dynamic = np.array(
            [p.sensing_assisted and m.comm_snr is None for m in ms], dtype=bool
        )
        fixed = np.empty(len(ms))
        for k, m in enumerate(ms):
            fixed[k] = rate_closed_form(1.0, 0.0, m, p.sensing_assisted)
        self.fixed = fixed
        # image term at the largest variance the tracker can have
        self.E = np.exp(-self.gap2 / self.vp)

    def unit(self, S: np.ndarray) -> np.ndarray:
        """g_k at sensing fractions S of shape (m, K)."""
        var = self.vp * self.A / (self.vp * S + self.A)
        h = (1.0 + np.exp(-self.gap2 / var)) / np.sqrt(2.0 * np.pi * var * self.sin2)
        g = np.log2(1.0 + self.C * h)
        return np.where(self.dynamic, g, self.fixed)

    def objective(self, Z: np.ndarray) -> np.ndarray:
        Z = np.atleast_2d(Z)
        return (Z[:, self.comm] * self.unit(Z[:, self.sense])).min(axis=1)

    def min_sensing(self, unit_rate: np.ndarray) -> np.ndarray:
        """Lower bound on the sensing fraction giving per-unit rate ``unit_rate``.

        Uses h_tilde(phi, v) <= (1 + E) / sqrt(2*pi*v*sin^2 phi), with E the
        image term at the process-noise variance (it only grows with v), so
        the result never exceeds the exact threshold.
        """
        T = (np.exp2(unit_rate) - 1.0) / self.C
        with np.errstate(divide="ignore"):
            v_req = (1.0 + self.E) ** 2 / (2.0 * np.pi * self.sin2 * T * T)
        s_req = self.A / v_req - self.A / self.vp
        return np.where(self.dynamic, np.maximum(s_req, 0.0), 0.0)


def reduce_vertices(p: ProblemP2, Z: np.ndarray, lower: np.ndarray, cbv: float, table=None):
    """Shrink each box [lower, z] to the part that can still beat ``cbv``.

    A point x <= z whose min-rate exceeds ``cbv`` needs, for every vehicle k,
    x_c * g_k(z_s) > cbv and g_k(x_s) > cbv / z_c, with g_k the rate per unit
    of communication time (increasing in the sensing fraction). These raise
    the box corner to a; feasibility sum(x) <= 1 then caps x at
    a + (1 - sum(a)). The two steps are repeated a few times since each
    tightens the other. Nothing with objective above ``cbv`` is cut, so the
    outer approximation stays valid.

    Returns the reduced vertices, their raised corners and a mask of boxes
    that are not empty.
    """
    t = table or _RateTable(p)
    Z = np.atleast_2d(np.asarray(Z, dtype=float)).copy()
    alive = np.ones(Z.shape[0], dtype=bool)
    a = np.broadcast_to(lower, Z.shape).copy()
    if cbv <= 0:
        return Z, a, alive
    target = cbv * (1.0 - 1e-12)
    for _ in range(REDUCE_PASSES):
        g_hi = t.unit(Z[:, t.sense])
        Zc = Z[:, t.comm]
        alive &= (Zc * g_hi > target).all(axis=1)
        a[:, t.comm] = np.maximum(a[:, t.comm], target / np.maximum(g_hi, 1e-300))
        a[:, t.sense] = np.maximum(a[:, t.sense], t.min_sensing(target / np.maximum(Zc, 1e-300)))
        slack = 1.0 - a.sum(axis=1)
        alive &= slack >= -SUM_TOL
        Z = np.minimum(Z, a + np.maximum(slack, 0.0)[:, None])
        alive &= (Z >= a - SNAP_TOL).all(axis=1)
    return Z, a, alive


class _BudgetTable:
    """Time-division frames seen as one time budget per vehicle.

    Vehicle k spends tau_k = s_k + c_k; for a given budget the best split
    maximises (tau - s) * g_k(s) over s in [lower_k, tau]. The product of a
    decreasing line and an increasing log-concave factor is unimodal, with
    its peak where tau = psi(s) = s + g(s) / g'(s). psi is tabulated once on
    a dense grid and inverted by interpolation; the rate is then evaluated
    exactly at that split. R_k(tau) is increasing, so max-min over budgets is
    again a monotonic program, now in K dimensions.
    """

    GRID = 4000

    def __init__(self, p: ProblemP2, lower_s: np.ndarray):
        self.rates = t = _RateTable(p)
        self.lower_s = np.asarray(lower_s, dtype=float)
        self.psi, self.s_grid = [], []
        for k in range(p.K):
            if not t.dynamic[k]:
                self.psi.append(None)
                self.s_grid.append(None)
                continue
            lo = self.lower_s[k]
            s = lo + (1.0 - lo) * np.concatenate([[0.0], np.geomspace(1e-10, 1.0, self.GRID)])
            g, dg = self._g_and_slope(k, s)
            psi = np.maximum.accumulate(s + g / dg)
            self.psi.append(psi)
            self.s_grid.append(s)

    def _g_and_slope(self, k: int, s: np.ndarray):
        t = self.rates
        A, vp, C, c, s2 = t.A[k], t.vp[k], t.C[k], t.gap2[k], t.sin2[k]
        v = vp * A / (vp * s + A)
        dv = -v * v / A
        e = np.exp(-c / v)
        norm = 1.0 / np.sqrt(2.0 * np.pi * s2)
        h = norm * (1.0 + e) / np.sqrt(v)
        dh = norm * ((c / v**2) * e / np.sqrt(v) - 0.5 * (1.0 + e) * v**-1.5)
        g = np.log2(1.0 + C * h)
        dg = C * dh * dv / ((1.0 + C * h) * np.log(2.0))
        return g, dg

    def split(self, T: np.ndarray) -> np.ndarray:
        """Best sensing fraction per vehicle for budgets T of shape (m, K)."""
        T = np.atleast_2d(T)
        S = np.broadcast_to(self.lower_s, T.shape).copy()
        for k, (psi, s) in enumerate(zip(self.psi, self.s_grid)):
            if psi is not None:
                S[:, k] = np.minimum(np.interp(T[:, k], psi, s), np.maximum(T[:, k], s[0]))
        return S

    def objective(self, T: np.ndarray) -> np.ndarray:
        T = np.atleast_2d(T)
        S = self.split(T)
        return np.maximum((T - S) * self.rates.unit(S), 0.0).min(axis=1)

    def to_allocation(self, p: ProblemP2, tau: np.ndarray) -> np.ndarray:
        s = self.split(tau[None, :])[0]
        eta = np.zeros(p.n_slots)
        eta[list(p.sense_slot)] = s
        eta[list(p.comm_slot)] = tau - s
        return eta


def _reduce_and_bound(p, Z, lower, cbv, table):
    Z, corner, alive = reduce_vertices(p, Z, lower, cbv, table)
    bound = np.minimum(table.objective(Z), budget_bound(p, Z, corner, table))
    return Z, corner, alive, bound


def _is_time_division(p: ProblemP2) -> bool:
    slots = list(p.sense_slot) + list(p.comm_slot)
    return len(set(slots)) == len(slots) == p.n_slots


def _polyblock_core(
    evaluate,
    lower: np.ndarray,
    upper: np.ndarray,
    epsilon: float,
    max_iters: int,
    max_vertices: int,
    prune: bool,
    reducer=None,
    initial: np.ndarray | None = None,
):
    """Polyblock outer approximation of max f(x) over {lower <= x, sum(x) <= 1}.

    ``evaluate`` maps an (m, n) array to m objective values and must be
    increasing. ``reducer(Z, cbv)`` may shrink vertices to the part of their
    box that can beat ``cbv``; it returns (Z, corner, alive, bound) where
    ``bound`` is an upper bound of the objective over the shrunk box.
    """
    n = lower.size
    verts = upper[None, :].copy()
    vals = evaluate(verts)
    corners = lower[None, :].copy()
    cbv, best = 0.0, project_to_simplex(upper, lower)
    if initial is not None:
        cbv, best = float(evaluate(initial[None, :])[0]), initial.copy()
    cbv_seen = 0.0
    ub = np.inf
    trace: list[tuple[int, float, float, int]] = []
    converged = False
    r = -1
    while r + 1 < max_iters:
        if reducer is not None and cbv > cbv_seen and verts.shape[0]:
            # a better CBV shrinks every stored box
            verts, corners, alive, bound = reducer(verts, cbv)
            keep = alive & (bound > cbv)
            verts, corners, vals = verts[keep], corners[keep], np.minimum(vals[keep], bound[keep])
            cbv_seen = cbv
        if verts.shape[0] == 0:
            r += 1
            ub = cbv
            converged = True
            trace.append((r, cbv, ub, 0))
            break
        top = np.flatnonzero(vals == vals.max())
        i = _lexmin_index(verts, top)
        r += 1
        z = verts[i]
        ub = min(ub, float(vals[i]))
        origin = np.minimum(corners[i], z)

        if z.sum() <= 1.0 + SUM_TOL:
            phi = z.copy()
        elif origin.sum() >= 1.0:
            phi = origin.copy()
        else:
            phi = project_to_simplex(z, origin)
        f_phi = float(evaluate(phi[None, :])[0])
        if f_phi > cbv:
            cbv, best = f_phi, phi
        trace.append((r, cbv, ub, verts.shape[0]))

        if z.sum() <= 1.0 + SUM_TOL:
            # the best vertex is itself feasible, so it is optimal
            converged = True
            break
        # the first two iterations always run (CBV may start at 0)
        if r >= 1 and cbv > 0 and (ub - cbv) / cbv <= epsilon:
            converged = True
            break
        if ub <= cbv:
            converged = True
            break

        children = np.repeat(z[None, :], n, axis=0)
        idx = np.arange(n)
        # a coordinate creeping geometrically onto its lower bound would spawn
        # near-duplicate children forever; land it on the bound instead
        children[idx, idx] = np.where(phi - lower <= SNAP_TOL, lower, phi)
        children = children[z > children[idx, idx]]

        verts, vals = np.delete(verts, i, axis=0), np.delete(vals, i)
        corners = np.delete(corners, i, axis=0)
        if children.shape[0]:
            if verts.shape[0]:
                dominated = (verts[None, :, :] >= children[:, None, :]).all(-1).any(-1)
                children = children[~dominated]
        if children.shape[0]:
            if reducer is not None and cbv > 0:
                children, child_corners, alive, child_vals = reducer(children, cbv)
                keep = alive
                children, child_corners, child_vals = (
                    children[keep], child_corners[keep], child_vals[keep]
                )
            else:
                child_vals = evaluate(children)
                child_corners = np.broadcast_to(lower, children.shape)
            verts = np.concatenate([verts, children])
            vals = np.concatenate([vals, child_vals])
            corners = np.concatenate([corners, child_corners])
        if prune and verts.shape[0]:
            ok = vals > cbv
            verts, vals, corners = verts[ok], vals[ok], corners[ok]
        if verts.shape[0] > max_vertices:
            raise ResourceLimitError(f"polyblock vertex set exceeded {max_vertices}")
    else:
        log.warning("polyblock stopped after %d iterations without converging", max_iters)
    return best, cbv, ub, r + 1, converged, trace, verts


def polyblock_solve(
    p: ProblemP2,
    epsilon: float = DEFAULT_EPSILON,
    max_iters: int = DEFAULT_MAX_ITERS,
    max_vertices: int = MAX_VERTICES,
    prune: bool = True,
    keep_vertices: bool = False,
    reduce: bool = True,
    initial=None,
) -> PolyblockResult:
    """Globally solve the max-min allocation by polyblock outer approximation.

    Starts from the single vertex at the slot upper bounds. Each iteration
    takes the vertex with the largest objective (an upper bound on the
    optimum), projects it onto the simplex along the ray from the lower-bound
    corner, updates the current best value (CBV) with the projection, and
    replaces the vertex by its children z - (z_i - Phi_i) e_i. Stops when
    (UB - CBV) / CBV <= epsilon.

    With ``prune`` vertices whose objective cannot beat the CBV are dropped.
    With ``reduce`` each vertex is first shrunk by :func:`reduce_vertices`
    and projected from the raised corner of its box. Neither step discards a
    point better than the CBV, so the epsilon guarantee is unchanged.
    ``initial`` is an optional feasible allocation (e.g. the previous frame's
    optimum) whose value seeds the CBV.

    Time-division frames are searched over one time budget per vehicle (see
    :class:`_BudgetTable`); the answer is mapped back to slot fractions.
    ``keep_vertices`` attaches the final vertex array as ``result.vertices``.
    """
    if not epsilon > 0:
        raise InvalidInputError("epsilon must be > 0")
    lower = eta_lower_bounds(p)
    if lower.sum() > 1.0:
        max_gamma, _ = feasibility_max_snr(p)
        raise InfeasibleProblemError(max_gamma, p.gamma_th)
    if initial is not None:
        initial = np.asarray(initial, dtype=float)
        if (
            initial.shape != (p.n_slots,)
            or abs(initial.sum() - 1.0) > SUM_TOL
            or np.any(initial < lower - SUM_TOL)
        ):
            initial = None

    if _is_time_division(p):
        table = _BudgetTable(p, lower[list(p.sense_slot)])
        lo = lower[list(p.sense_slot)]
        start = None if initial is None else initial[list(p.sense_slot)] + initial[list(p.comm_slot)]
        evaluate, reducer = table.objective, None
        to_eta = lambda x: table.to_allocation(p, x)  # noqa: E731
    else:
        rates = _RateTable(p)
        lo, start = lower, initial
        evaluate = rates.objective
        reducer = (lambda Z, c: _reduce_and_bound(p, Z, lower, c, rates)) if reduce else None
        to_eta = lambda x: x  # noqa: E731
    up = eta_upper_bounds(lo)

    if np.isclose(lo.sum(), 1.0, rtol=0, atol=1e-15):
        eta = to_eta(lo.copy())
        value = objective(p, eta)
        return PolyblockResult(eta, value, value, 0, True, [(0, value, value, 0)])

    best, cbv, ub, iters, converged, trace, verts = _polyblock_core(
        evaluate, lo, up, epsilon, max_iters, max_vertices, prune, reducer, start
    )
    result = PolyblockResult(to_eta(best), float(cbv), float(ub), iters, converged, trace)
    if keep_vertices:
        result.vertices = verts
    return result


def budget_bound(p: ProblemP2, Z: np.ndarray, corner: np.ndarray, table=None) -> np.ndarray:
    """Upper bound on the min-rate over {corner <= x <= z, sum(x) <= 1}.

    Inside the box vehicle k's rate is at most x_c * g_k(z_s), so a rate t
    for everybody needs x_c >= t / g_k(z_s) on top of x >= corner. The
    largest t with sum_i max(corner_i, t * w_i) <= 1 (w_i = 1 / g_k(z_s) on
    communication slots, 0 elsewhere) is found exactly from the breakpoints
    of that piecewise-linear sum.
    """
    t = table or _RateTable(p)
    Z = np.atleast_2d(Z)
    m, n = Z.shape
    corner = np.broadcast_to(np.asarray(corner, dtype=float), (m, n))
    w = np.zeros((m, n))
    w[:, t.comm] = 1.0 / np.maximum(t.unit(Z[:, t.sense]), 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        bp = np.where(w > 0, corner / np.where(w > 0, w, 1.0), np.inf)
    # sum at every breakpoint, shape (m, n)
    finite_bp = np.where(np.isfinite(bp), bp, 0.0)
    S = np.maximum(corner[:, None, :], finite_bp[:, :, None] * w[:, None, :]).sum(axis=2)
    S = np.where(np.isfinite(bp), S, np.inf)
    base = np.where(S <= 1.0, bp, -np.inf).max(axis=1)
    base = np.maximum(base, 0.0)
    active = w * base[:, None] >= corner
    active &= w > 0
    w_act = np.where(active, w, 0.0).sum(axis=1)
    fixed = np.where(active, 0.0, corner).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        tstar = np.where(w_act > 0, (1.0 - fixed) / w_act, np.inf)
    tstar = np.where(corner.sum(axis=1) > 1.0 + SUM_TOL, 0.0, tstar)
    return np.maximum(tstar, 0.0)


def _compositions_last2(prefix_total: int, resolution: int) -> np.ndarray:
    """All (a, b) with a + b <= resolution - prefix_total."""
    rem = resolution - prefix_total
    a, b = np.meshgrid(np.arange(rem + 1), np.arange(rem + 1), indexing="ij")
    mask = a + b <= rem
    return np.stack([a[mask], b[mask]], axis=-1)


def grid_oracle(p: ProblemP2, resolution: int) -> tuple[np.ndarray, float]:
    """Exhaustive search over the simplex grid with spacing 1/resolution.

    Enumerates every allocation whose entries are multiples of 1/resolution
    and sum to one, discards those violating a sensing threshold, and returns
    the first best point in enumeration order.
    """
    n = p.n_slots
    if n > 4:
        raise InvalidInputError("grid oracle is limited to at most 4 slots")
    resolution = int(resolution)
    if resolution < 1:
        raise InvalidInputError("resolution must be >= 1")
    lower = eta_lower_bounds(p)
    best_val, best_eta = -np.inf, None
    free = n - 1
    if free == 0:
        pts = np.array([[resolution]])
        batches = [pts]
    elif free == 1:
        batches = [np.arange(resolution + 1)[:, None]]
    else:
        batches = []
        for head in itertools.product(range(resolution + 1), repeat=free - 2):
            t = sum(head)
            if t > resolution:
                continue
            tail = _compositions_last2(t, resolution)
            batches.append(np.hstack([np.tile(head, (tail.shape[0], 1)), tail]))
    for free_pts in batches:
        last = resolution - free_pts.sum(axis=1, keepdims=True)
        eta = np.hstack([free_pts, last]).astype(float) / resolution
        ok = np.all(eta >= lower - 1e-12, axis=1)
        if not np.any(ok):
            continue
        eta = eta[ok]
        vals = np.atleast_1d(objective(p, eta))
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_eta = float(vals[j]), eta[j]
    if best_eta is None:
        max_gamma, _ = feasibility_max_snr(p)
        raise InfeasibleProblemError(max_gamma, p.gamma_th)
    return best_eta, best_val


def time_division_oracle(
    p: ProblemP2, s_points: int = 200_001, tol: float = 1e-12
) -> tuple[np.ndarray, float]:
    """Independent optimum of a time-division frame by bisection on the rate.

    A common rate t costs vehicle k at least min_s [s + t / g_k(s)] of the
    frame (s on a dense grid above its sensing lower bound). The optimum is
    the largest t whose total cost fits in one frame.
    """
    if not _is_time_division(p):
        raise InvalidInputError("time_division_oracle needs disjoint per-vehicle slots")
    lower = eta_lower_bounds(p)
    if lower.sum() > 1.0:
        max_gamma, _ = feasibility_max_snr(p)
        raise InfeasibleProblemError(max_gamma, p.gamma_th)
    grids, units = [], []
    for pm, s in zip(p.models, p.sense_slot):
        if p.sensing_assisted and pm.comm_snr is None:
            g = np.linspace(lower[s], 1.0, s_points)
        else:
            g = np.array([lower[s]])
        grids.append(g)
        u = np.asarray(rate_closed_form(1.0, g, pm, p.sensing_assisted), dtype=float)
        units.append(np.broadcast_to(u, g.shape))

    def cost(t):
        picks = [int(np.argmin(g + t / u)) for g, u in zip(grids, units)]
        total = sum(g[j] + t / u[j] for g, u, j in zip(grids, units, picks))
        return total, picks

    lo, hi = 0.0, min(float(u.max()) for u in units)
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if cost(mid)[0] <= 1.0:
            lo = mid
        else:
            hi = mid
    _, picks = cost(lo)
    eta = np.zeros(p.n_slots)
    for k, (s, c) in enumerate(zip(p.sense_slot, p.comm_slot)):
        eta[s] = grids[k][picks[k]]
        eta[c] = lo / units[k][picks[k]]
    # hand any rounding slack to the first data slot
    eta[p.comm_slot[0]] += 1.0 - eta.sum()
    return eta, float(objective(p, eta))

"""Vectorised adaptive Simpson quadrature."""

from __future__ import annotations

from typing import Callable

import numpy as np


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-8,
    min_panels: int = 64,
    max_depth: int = 40,
) -> float:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    ``f`` must accept and return 1-D arrays. The interval starts as
    ``min_panels`` equal panels; each panel is bisected until its Simpson and
    two-half Simpson estimates agree to its share of the tolerance. All panels
    at one refinement level are evaluated in a single call to ``f``.
    """
    if b == a:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = np.linspace(a, b, int(min_panels) + 1)
    lo, hi = edges[:-1], edges[1:]
    width_total = b - a

    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    mid = 0.5 * (lo + hi)
    vals = f(np.concatenate([lo, mid, hi]))
    n = lo.size
    flo, fmid, fhi = vals[:n], vals[n : 2 * n], vals[2 * n :]
    whole = simpson(lo, hi, flo, fmid, fhi)

    parts = []
    for depth in range(max_depth + 1):
        lq = 0.5 * (lo + mid)
        rq = 0.5 * (mid + hi)
        q = f(np.concatenate([lq, rq]))
        n = lo.size
        flq, frq = q[:n], q[n:]
        left = simpson(lo, mid, flo, flq, fmid)
        right = simpson(mid, hi, fmid, frq, fhi)
        err = left + right - whole
        local_tol = tol * (hi - lo) / width_total
        done = (np.abs(err) <= 15.0 * local_tol) | (depth == max_depth)
        parts.append(np.sum((left + right + err / 15.0)[done]))
        keep = ~done
        if not np.any(keep):
            break
        # split every unfinished panel into its two halves
        lo2 = np.concatenate([lo[keep], mid[keep]])
        hi2 = np.concatenate([mid[keep], hi[keep]])
        flo2 = np.concatenate([flo[keep], fmid[keep]])
        fhi2 = np.concatenate([fmid[keep], fhi[keep]])
        fmid2 = np.concatenate([flq[keep], frq[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        lo, hi, flo, fmid, fhi = lo2, hi2, flo2, fmid2, fhi2
        mid = 0.5 * (lo + hi)
    return sign * float(np.sum(parts))

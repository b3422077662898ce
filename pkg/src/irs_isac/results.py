"""CSV writers with a JSON mirror for frames, sweeps and solver traces."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

FRAME_HEADER = ("n", "vehicle", "phi_true", "phi_pred", "phi_tracked", "var_tracked",
                "gamma_s", "rate", "feasible")
SWEEP_HEADER = ("scheme", "param", "value", "mean_min_rate", "mean_gamma_s", "frames", "seed")
TRACE_HEADER = ("iter", "cbv", "upper_bound", "vertices")
ECHO_CHECK_HEADER = ("phi", "L", "M_r", "var_proc", "mc_mean", "mc_se", "closed_form", "rel_err")


def _fmt(x):
    # repr keeps full float precision and is stable across runs
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def frame_rows(frames) -> list[tuple]:
    rows = []
    for f in frames:
        for k, v in enumerate(f.vehicles, start=1):
            rows.append((f.n, k, v.phi_true, v.phi_pred, v.phi_tracked, v.var_tracked,
                         v.gamma_s, v.rate, f.feasible))
    return rows


def sweep_rows(rows) -> list[tuple]:
    return [(r.scheme, r.param, r.value, r.mean_min_rate, r.mean_gamma_s, r.frames, r.seed)
            for r in rows]


def trace_rows(trace) -> list[tuple]:
    return [tuple(t) for t in trace]


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def to_json(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    records = [dict(zip(header, row)) for row in rows]
    return json.dumps(records, indent=1) + "\n"


def write_table(path, header, rows, fmt: str = "csv") -> Path:
    """Write ``rows`` to ``path`` with the extension of ``fmt``; returns the path."""
    path = Path(path).with_suffix("." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = list(rows)
    text = to_csv(header, rows) if fmt == "csv" else to_json(header, rows)
    path.write_text(text)
    return path

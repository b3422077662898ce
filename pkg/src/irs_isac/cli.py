"""Command-line entry point.

Examples:
    irs-isac feasibility
    irs-isac optimize --config scenario.ini --out runs/
    irs-isac simulate --scheme proposed,no_c_assist --format json
    irs-isac sweep --param gamma_th --values 100,1000,10000
    irs-isac validate-echo-snr --samples 100000

Exit codes: 0 success, 1 infeasible scenario, 2 bad configuration or arguments.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import results
from .closed_form import build_perf_model, echo_snr_closed_form
from .config import load_config
from .errors import ConfigError, InfeasibleProblemError, InvalidInputError, IsacError
from .kinematics import predict_state
from .mc_oracle import McConfig, mc_echo_snr
from .optimizer import feasibility_max_snr, is_feasible, polyblock_solve
from .protocol_sim import (
    SCHEMES,
    SWEEP_PARAMS,
    ScenarioConfig,
    build_problem,
    initial_states,
    run_trajectory,
    summarize,
    sweep,
)

EXIT_OK, EXIT_INFEASIBLE, EXIT_CONFIG = 0, 1, 2
DEFAULT_VALUES = {"gamma_th": "100,1000,10000", "P_A": "0.02,0.05,0.1,0.2"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _schemes(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in SCHEMES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown scheme(s) {bad}; choose from {SCHEMES}")
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario file (INI)")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="json also writes a JSON mirror of each CSV")
    common.add_argument("--scheme", type=_schemes, default=["proposed"],
                        help="comma-separated schemes")
    common.add_argument("--fixed-eta", type=_floats, default=None,
                        help="use this allocation instead of optimising")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="irs-isac", description="IRS-assisted vehicular ISAC simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate-prop1", aliases=["validate-echo-snr"], parents=[common],
                       help="Monte Carlo check of the closed-form echo SNR")
    v.add_argument("--samples", type=int, default=100_000)

    for name, text in (("feasibility", "sensing-threshold feasibility of one frame"),
                       ("optimize", "solve one frame's allocation and write the trace")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--frame", type=int, default=1, help="frame index (1-based)")

    sub.add_parser("simulate", parents=[common], help="run the trajectory")
    sw = sub.add_parser("sweep", parents=[common], help="sweep gamma_th or P_A")
    sw.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    sw.add_argument("--values", type=_floats, default=None)
    return p


def _scenario(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config is not None else ScenarioConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.fixed_eta is not None:
        cfg = cfg.replace(fixed_eta=tuple(args.fixed_eta))
    return cfg


def _write(args, stem: str, header, rows) -> None:
    path = results.write_table(args.out / stem, header, rows, "csv")
    print(f"wrote {path}")
    if args.format == "json":
        path = results.write_table(args.out / stem, header, rows, "json")
        print(f"wrote {path}")


def _frame_problem(cfg: ScenarioConfig, frame: int, scheme: str):
    if frame < 1:
        raise InvalidInputError("frame index starts at 1")
    states = initial_states(cfg)
    for _ in range(frame - 1):
        states = [predict_state(s, cfg.dt) for s in states]
    models = [
        build_perf_model(s.phi, s.d, cfg.radio, cfg.arrays, cfg.beta0, cfg.d_u, cfg.noise.var_phi)
        for s in states
    ]
    return build_problem(models, cfg.gamma_th, scheme)


def cmd_feasibility(args, cfg) -> int:
    code = EXIT_OK
    for scheme in args.scheme:
        p = _frame_problem(cfg, args.frame, scheme)
        max_gamma, eta = feasibility_max_snr(p)
        ok = is_feasible(p)
        verdict = "feasible" if ok else "infeasible"
        print(f"{scheme}: frame {args.frame} threshold max_gamma = {max_gamma:.6g} "
              f"({10 * math.log10(max_gamma):.2f} dB); gamma_th = {cfg.gamma_th:.6g} -> {verdict}")
        if not ok:
            code = EXIT_INFEASIBLE
    return code


def cmd_optimize(args, cfg) -> int:
    code = EXIT_OK
    for scheme in args.scheme:
        p = _frame_problem(cfg, args.frame, scheme)
        try:
            res = polyblock_solve(p, cfg.epsilon, cfg.max_iters)
        except InfeasibleProblemError as exc:
            print(f"{scheme}: {exc}", file=sys.stderr)
            code = EXIT_INFEASIBLE
            continue
        eta = ", ".join(f"{x:.6f}" for x in res.eta)
        print(f"{scheme}: min-rate {res.value:.6f} bps/Hz (upper bound {res.upper_bound:.6f}, "
              f"{res.iterations} iterations) eta = [{eta}]")
        _write(args, f"trace_{scheme}", results.TRACE_HEADER, results.trace_rows(res.trace))
    return code


def cmd_simulate(args, cfg) -> int:
    for scheme in args.scheme:
        frames = run_trajectory(cfg, scheme)
        rate, gamma = summarize(frames)
        bad = sum(not f.feasible for f in frames)
        print(f"{scheme}: mean min-rate {rate:.6f} bps/Hz, mean echo SNR {gamma:.6g}, "
              f"{bad} infeasible of {len(frames)} frames")
        _write(args, f"frames_{scheme}", results.FRAME_HEADER, results.frame_rows(frames))
    return EXIT_OK


def cmd_sweep(args, cfg) -> int:
    values = args.values if args.values is not None else _floats(DEFAULT_VALUES[args.param])
    rows = sweep(cfg, args.param, sorted(values), args.scheme)
    for r in rows:
        print(f"{r.scheme:>13s} {r.param}={r.value:<8g} mean min-rate {r.mean_min_rate:.6f}")
    _write(args, f"sweep_{args.param}", results.SWEEP_HEADER, results.sweep_rows(rows))
    return EXIT_OK


def cmd_validate_echo_snr(args, cfg) -> int:
    rc, mc = cfg.radio, McConfig(num_samples=args.samples, seed=cfg.seed)
    rows = []
    for L in (50, 100):
        arrays = cfg.arrays.__class__(cfg.arrays.M_r, L)
        for frac in (0.3, 0.5, 0.7):
            phi = frac * np.pi
            pm = build_perf_model(phi, 10.0, rc, arrays, cfg.beta0, cfg.d_u, cfg.noise.var_phi)
            cf = echo_snr_closed_form(1.0, pm, rc, arrays)
            est = mc_echo_snr(1.0, phi, pm.beta_G, rc, arrays, cfg.noise.var_phi, mc)
            rows.append((phi, L, arrays.M_r, cfg.noise.var_phi, est.mean, est.se, cf,
                         (est.mean - cf) / cf))
            print(f"L={L:4d} phi={frac:.1f}pi  MC {est.mean:.6g} +- {est.se:.3g}  "
                  f"closed form {cf:.6g}  rel err {(est.mean - cf) / cf:+.4f}")
    _write(args, "echo_snr_check", results.ECHO_CHECK_HEADER, rows)
    return EXIT_OK


COMMANDS = {
    "validate-prop1": cmd_validate_echo_snr,
    "validate-echo-snr": cmd_validate_echo_snr,
    "feasibility": cmd_feasibility,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _scenario(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleProblemError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except IsacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

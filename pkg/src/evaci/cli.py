"""Command-line front end.

Exit codes: 0 success, 1 configuration/usage/verification failure,
2 divergence abort, 3 Riccati oracle non-convergence.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import sim
from .config import ConfigError, load_config
from .core import (GainConstants, InvariantError, validate_gains_theorem1,
                   validate_gains_theorem2)
from .critic import basis_jacobian
from .cycles import DriveCycle, gen_cycle, load_cycle_csv, write_cycle_csv
from .hjb import residual
from .cost import CostWeights
from .riccati import RiccatiError, lqr_gain, quadratic_weights, solve_riccati
from .sim import DivergenceError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_ORACLE = 3


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems on the config exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    def __init__(self, message):
        self.message = message
        super().__init__(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="evaci", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[], help="simulate one controller on one cycle")
    run.add_argument("--config", help="configuration file (defaults apply when omitted)")
    run.add_argument("--cycle", required=True, help="drive-cycle CSV (t_s,v_d_mps)")
    run.add_argument("--plant", choices=["ev", "lqr", "nltest"], default="ev")
    run.add_argument("--controller", choices=["aci", "pid"], default="aci")
    run.add_argument("--out-dir", required=True)
    run.add_argument("--seed", type=int, help="overrides the config seed")

    comp = sub.add_parser("compare", help="ACI vs baseline on the same cycle/plant/seed")
    comp.add_argument("--config")
    comp.add_argument("--cycle", required=True)
    comp.add_argument("--plant", choices=["ev", "lqr", "nltest"], default="ev")
    comp.add_argument("--out-dir", required=True)
    comp.add_argument("--seed", type=int)
    comp.add_argument("--baseline", choices=["pid", "aci"], default="pid")

    val = sub.add_parser("validate-gains", help="check the stability gain inequalities")
    val.add_argument("--config")

    lqr = sub.add_parser("lqr-verify",
                         help="learn on the linear plant and compare to the Riccati oracle")
    lqr.add_argument("--config")
    lqr.add_argument("--duration", type=float, required=True, help="simulated seconds")
    lqr.add_argument("--seed", type=int)

    gen = sub.add_parser("gen-cycle", help="write a synthetic drive cycle CSV")
    gen.add_argument("--kind", choices=["trapezoid", "multitrapezoid"],
                     default="trapezoid")
    gen.add_argument("--out", required=True)
    gen.add_argument("--v0", type=float, default=0.0)
    gen.add_argument("--v-cruise", type=float, default=15.0)
    gen.add_argument("--accel", type=float, default=1.5)
    gen.add_argument("--decel", type=float)
    gen.add_argument("--t-cruise", type=float, default=28.0)
    gen.add_argument("--t-pre", type=float, default=2.0)
    gen.add_argument("--t-post", type=float, default=10.0)
    return parser


def _load(args):
    return load_config(getattr(args, "config", None))


def cmd_run(args) -> int:
    gains, _, scenario = _load(args)
    cycle = load_cycle_csv(args.cycle)
    seed = args.seed if args.seed is not None else scenario.seed
    t0 = time.perf_counter()
    if args.controller == "aci":
        log, report = sim.run_aci(cycle, gains, scenario, args.plant, seed)
    else:
        log, report = sim.run_pid(cycle, gains, scenario, args.plant)
    runtime = time.perf_counter() - t0
    os.makedirs(args.out_dir, exist_ok=True)
    sim.write_trajectory_csv(log, os.path.join(args.out_dir, "trajectory.csv"))
    sim.write_metrics_json(report, seed, runtime,
                           os.path.join(args.out_dir, "metrics.json"))
    print(f"{args.controller} on {args.plant}: net {report.net_energy:.1f} J, "
          f"rms error {report.rms_tracking_error:.4f} m/s, "
          f"{log.n_steps} steps in {runtime:.2f} s")
    return EXIT_OK


def cmd_compare(args) -> int:
    gains, _, scenario = _load(args)
    cycle = load_cycle_csv(args.cycle)
    seed = args.seed if args.seed is not None else scenario.seed
    report, aci_log, base_log = sim.compare(cycle, gains, scenario, args.plant,
                                            seed, args.baseline)
    os.makedirs(args.out_dir, exist_ok=True)
    sim.write_trajectory_csv(aci_log, os.path.join(args.out_dir, "trajectory_aci.csv"))
    sim.write_trajectory_csv(base_log,
                             os.path.join(args.out_dir,
                                          f"trajectory_{report.baseline_kind}.csv"))
    sim.write_comparison_json(report, seed,
                              os.path.join(args.out_dir, "comparison.json"))
    print(f"aci net {report.aci.net_energy:.1f} J vs {report.baseline_kind} net "
          f"{report.baseline.net_energy:.1f} J: reduction {report.net_reduction_pct:.2f}%, "
          f"recovery improvement {report.recovery_improvement_pct:.2f}%")
    return EXIT_OK


def cmd_validate_gains(args) -> int:
    gains, constants, _ = _load(args)
    ok = True
    for report in (validate_gains_theorem1(gains, constants),
                   validate_gains_theorem2(gains, constants)):
        for line in report.lines():
            print(line)
        ok = ok and report.all_passed
    return EXIT_OK if ok else EXIT_CONFIG


def cmd_lqr_verify(args) -> int:
    if args.duration <= 0:
        raise SystemExit2("--duration must be > 0")
    gains, _, scenario = _load(args)
    seed = args.seed if args.seed is not None else scenario.seed
    A, B = scenario.lqr_a, scenario.lqr_b
    Q = np.diag([scenario.test_q1, scenario.test_q2])
    S = solve_riccati(A, B, Q, gains.beta)
    w_star = quadratic_weights(S)

    from .cycles import flat_cycle
    cycle = flat_cycle(args.duration)
    _, _, final = sim.run_aci(cycle, gains, scenario, "lqr", seed,
                              return_final=True)
    w_final = final["w_c"]
    rel_err = float(np.linalg.norm(w_final - w_star) / np.linalg.norm(w_star))

    cw = CostWeights(q1=scenario.test_q1, q2=scenario.test_q2, beta=gains.beta,
                     penalize_accel_only=False)
    grid = np.linspace(-1.0, 1.0, 10)
    gain_row = lqr_gain(S, B, gains.beta)
    residuals = []
    for x1 in grid:
        for x2 in grid:
            x = np.array([x1, x2])
            u_star = float(gain_row @ x)
            f_true = A @ x + B * u_star
            phi = basis_jacobian(x) @ f_true
            residuals.append(abs(residual(w_star, phi, x, u_star, cw).delta_hjb))
    print(f"oracle weights {np.array2string(w_star, precision=6)}")
    print(f"learned weights {np.array2string(w_final, precision=6)}")
    print(f"relative weight error {rel_err:.4f} "
          f"(residual at oracle: mean {np.mean(residuals):.2e}, "
          f"max {np.max(residuals):.2e})")
    return EXIT_OK if rel_err < 0.10 else EXIT_CONFIG


def cmd_gen_cycle(args) -> int:
    kwargs = dict(v0=args.v0, v_cruise=args.v_cruise, accel=args.accel,
                  t_cruise=args.t_cruise, t_pre=args.t_pre, t_post=args.t_post)
    if args.decel is not None:
        kwargs["decel"] = args.decel
    if args.kind == "multitrapezoid":
        kwargs = {"v0": args.v0, "accel": args.accel, "t_cruise": args.t_cruise,
                  "t_pre": args.t_pre, "t_post": args.t_post}
        if args.decel is not None:
            kwargs["decel"] = args.decel
    cycle = gen_cycle(args.kind, **kwargs)
    write_cycle_csv(cycle, args.out)
    print(f"wrote {args.out}: {cycle.t.size} breakpoints, "
          f"{cycle.duration:.1f} s, peak {cycle.v_d.max():.1f} m/s")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "run": cmd_run,
            "compare": cmd_compare,
            "validate-gains": cmd_validate_gains,
            "lqr-verify": cmd_lqr_verify,
            "gen-cycle": cmd_gen_cycle,
        }[args.command]
        return handler(args)
    except SystemExit2 as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, InvariantError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except RiccatiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Benchmark the compiled simulation kernels against the pure-python fallback.

Usage: python benchmarks/bench_backends.py [--duration SECONDS] [--repeat N]
"""
import argparse
import time

import numpy as np

import evaci.sim as sim
from evaci.config import load_config
from evaci.cycles import flat_cycle, gen_cycle
from evaci.kernels import get_backend


def setup_run(gains, scenario, plant, duration):
    cyc = gen_cycle("trapezoid") if plant == "ev" else flat_cycle(duration)
    n = int(round(cyc.duration / gains.dt))
    vd = cyc.sample(np.arange(n) * gains.dt)
    rng = np.random.default_rng(0)
    v_g = rng.uniform(-0.5, 0.5, (2, gains.Lg))
    noise = sim.exploration_noise(n, gains.dt, cyc.duration,
                                  scenario.explore_amp,
                                  scenario.explore_decay_frac,
                                  scenario.explore_dwell_s, rng)
    pscale, uscale = sim._scales_for(plant, scenario)
    q1, q2, rect = sim._cost_for(plant, gains, scenario)
    kind = {"ev": 0, "lqr": 1, "nltest": 2}[plant]
    adapt = sim.adaptation_gate(vd, gains.dt, scenario.gate_setpoint_rate)
    return dict(kind=kind, par=sim._plant_par(plant, scenario), vd=vd,
                noise=noise / uscale, adapt=adapt, q1=q1, q2=q2, rect=rect,
                pscale=pscale, uscale=uscale, v_g=v_g,
                ps0=sim._initial_plant_state(plant, scenario, vd[0]),
                w0=scenario.ev_w_init if plant == "ev"
                else np.full(3, scenario.critic_w0), n=n)


def run_once(backend, gains, r):
    w_c = r["w0"].copy()
    w_a = r["w0"].copy()
    P = gains.P1 * np.eye(3)
    w_g = np.zeros((gains.Lg + 1, 2))
    ps = r["ps0"].copy()
    x0m = np.zeros(2) if r["kind"] == 0 else ps.copy()
    out = np.zeros((r["n"], 13))
    t0 = time.perf_counter()
    code, _ = backend.run_aci_loop(
        r["kind"], r["par"], r["vd"], r["noise"], r["adapt"], gains,
        r["q1"], r["q2"], gains.beta, r["rect"], r["pscale"], r["uscale"],
        w_c, w_a, P, w_g, r["v_g"].copy(), x0m.copy(), np.zeros(2),
        np.zeros(2), ps, out)
    elapsed = time.perf_counter() - t0
    assert code == 0
    return elapsed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--duration", type=float, default=60.0,
                    help="simulated seconds for the lqr benchmark")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    gains, _, scenario = load_config(None)
    backends = {}
    backends["pure"] = get_backend("pure")
    try:
        backends["compiled"] = get_backend("compiled")
    except ImportError:
        print("compiled extension not available; benchmarking pure only")

    for plant in ("ev", "lqr"):
        r = setup_run(gains, scenario, plant, args.duration)
        print(f"\n{plant} closed loop, {r['n']} steps:")
        times = {}
        for name, be in backends.items():
            best = min(run_once(be, gains, r) for _ in range(args.repeat))
            times[name] = best
            print(f"  {name:9s} {best * 1e3:9.1f} ms   "
                  f"{r['n'] / best / 1e6:7.2f} Msteps/s")
        if len(times) == 2:
            print(f"  speedup   {times['pure'] / times['compiled']:9.1f}x")


if __name__ == "__main__":
    main()

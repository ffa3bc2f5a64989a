"""Closed-loop simulation engine, energy accounting and run comparison.

Each ACI step follows one fixed sequence: sample the desired speed, read
the plant, form the estimation error, evaluate the RISE feedback, form
the policy torque plus exploration dither, evaluate the identifier,
build the regressor, evaluate the optimality residual, update the three
approximators (all from the pre-step estimates, committed together),
then advance the state estimate by Euler and the plant by RK4.  Runs
are single threaded and fully determined by (config, seed).
"""
from __future__ import annotations

import json
import math
import os
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .config import PidGains, Scenario
from .core import GainSet, InvariantError
from .cycles import DriveCycle
from .plants import EvParams

TRAJECTORY_COLUMNS = (
    "t", "v_d", "v_v", "x1", "x2", "u", "delta_hjb", "p_batt",
    "wc_norm", "wa_norm", "xtilde_norm", "lambda_min_P", "reset_count",
)

PLANT_KINDS = {"ev": kernels.PLANT_EV, "lqr": kernels.PLANT_LQR,
               "nltest": kernels.PLANT_NLTEST}


class DivergenceError(RuntimeError):
    """A run left the trust region; carries the first offender and step."""

    def __init__(self, quantity: str, step: int, dt: float):
        self.quantity = quantity
        self.step = step
        super().__init__(
            f"divergence at step {step} (t={step * dt:.3f} s): "
            f"{quantity} exceeded {kernels.DIVERGENCE_LIMIT:g}")


@dataclass(frozen=True)
class TrajectoryLog:
    """Per-step record of one run; column layout is the CSV contract."""

    data: np.ndarray

    def col(self, name: str) -> np.ndarray:
        return self.data[:, TRAJECTORY_COLUMNS.index(name)]

    @property
    def n_steps(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class EnergyReport:
    energy_consumed: float
    energy_recovered: float
    net_energy: float
    rms_tracking_error: float
    recovery_improvement_pct: Optional[float] = None


@dataclass(frozen=True)
class ComparisonReport:
    aci: EnergyReport
    baseline: EnergyReport
    baseline_kind: str
    net_reduction_pct: float
    recovery_improvement_pct: float
    rms_aci: float
    rms_baseline: float


def integrate_energy(p_batt: np.ndarray, dt: float) -> tuple:
    """Trapezoidal split integrals of the positive and negative power parts."""
    p = np.asarray(p_batt, dtype=float)
    if p.size == 0:
        raise InvariantError("p_batt: empty power trace")
    consumed = float(np.trapezoid(np.clip(p, 0.0, None), dx=dt))
    recovered = float(np.trapezoid(np.clip(-p, 0.0, None), dx=dt))
    return consumed, recovered, consumed - recovered


def energy_report(log: TrajectoryLog, dt: float) -> EnergyReport:
    consumed, recovered, net = integrate_energy(log.col("p_batt"), dt)
    rms = float(np.sqrt(np.mean(log.col("x1") ** 2)))
    return EnergyReport(consumed, recovered, net, rms)


def exploration_noise(n: int, dt: float, duration: float, amp: float,
                      decay_frac: float, dwell_s: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Zero-mean uniform torque dither, held over a dwell, amplitude
    decaying linearly to zero at decay_frac of the run (<= 0 keeps it
    constant for persistent excitation)."""
    if amp <= 0 or n == 0:
        return np.zeros(n)
    dwell = max(1, int(round(dwell_s / dt)))
    draws = rng.uniform(-1.0, 1.0, size=(n + dwell - 1) // dwell)
    held = np.repeat(draws, dwell)[:n]
    t = np.arange(n) * dt
    if decay_frac > 0:
        envelope = np.clip(1.0 - t / (decay_frac * duration), 0.0, 1.0)
    else:
        envelope = np.ones(n)
    return held * amp * envelope


def adaptation_gate(vd: np.ndarray, dt: float, max_rate: float) -> np.ndarray:
    """1.0 where the setpoint is quasi-constant, 0.0 during commanded ramps."""
    n = vd.shape[0]
    if max_rate <= 0 or n < 2:
        return np.ones(n)
    rate = np.abs(np.diff(vd)) / dt
    gate = np.ones(n)
    gate[:-1] = (rate <= max_rate).astype(float)
    gate[-1] = gate[-2]
    return gate


def _plant_par(plant: str, sc: Scenario) -> np.ndarray:
    if plant == "ev":
        p = sc.ev
        return np.array([p.mass, p.wheel_radius, p.gear_ratio, p.drag_area,
                         p.air_density, p.rolling_coeff, p.eta_drive,
                         p.eta_regen, p.torque_max, p.motor_tau])
    if plant == "lqr":
        return np.concatenate([sc.lqr_a.ravel(), sc.lqr_b])
    return np.zeros(6)


def _initial_plant_state(plant: str, sc: Scenario, vd0: float) -> np.ndarray:
    if plant == "ev":
        # start at the cycle speed with no torque delivered
        return np.array([vd0, 0.0])
    return np.asarray(sc.x0, dtype=float).copy()


def _cost_for(plant: str, gains: GainSet, sc: Scenario) -> tuple:
    if plant == "ev":
        # q2 is per W^2; the loop's power state is scaled, so fold the
        # scale into the effective weight: q2*(x2/scale)^2 = q2_eff*x2^2
        return gains.q1, gains.q2 / sc.power_scale ** 2, True
    return sc.test_q1, sc.test_q2, False


def _scales_for(plant: str, sc: Scenario) -> tuple:
    if plant == "ev":
        return sc.power_scale, sc.torque_scale
    return 1.0, 1.0


def run_aci(cycle: DriveCycle, gains: GainSet, scenario: Scenario,
            plant: str = "ev", seed: Optional[int] = None,
            return_final: bool = False) -> tuple:
    """Run the learning controller over the cycle; (TrajectoryLog, EnergyReport).

    With return_final a third element carries the end-of-run estimator
    states (critic/actor/identifier weights, P, x_hat).  Raises
    DivergenceError when any state or weight norm passes 1e9.
    """
    if plant not in PLANT_KINDS:
        raise InvariantError(f"plant: unknown selector {plant!r}")
    kind = PLANT_KINDS[plant]
    dt = gains.dt
    n = int(round(cycle.duration / dt))
    if n < 1:
        raise InvariantError("cycle: shorter than one step")
    times = cycle.t[0] + np.arange(n) * dt
    vd = cycle.sample(times)

    rng = np.random.default_rng(scenario.seed if seed is None else seed)
    # draw order is part of the determinism contract: identifier input
    # weights first, then the dither sequence
    v_g = rng.uniform(-scenario.ident_v_scale, scenario.ident_v_scale,
                      size=(2, gains.Lg))
    noise = exploration_noise(n, dt, cycle.duration, scenario.explore_amp,
                              scenario.explore_decay_frac,
                              scenario.explore_dwell_s, rng)

    q1, q2, rectify = _cost_for(plant, gains, scenario)
    plant_state = _initial_plant_state(plant, scenario, vd[0])
    x0_meas = np.array([0.0, 0.0]) if plant == "ev" else plant_state.copy()

    if plant == "ev":
        w_c = np.asarray(scenario.ev_w_init, dtype=float).copy()
    else:
        w_c = np.full(3, scenario.critic_w0)
    w_a = w_c.copy()
    P = gains.P1 * np.eye(3)
    w_g = np.zeros((gains.Lg + 1, 2))
    x_hat = x0_meas.copy()
    nu = np.zeros(2)
    x_tilde0 = np.zeros(2)
    out = np.zeros((n, len(TRAJECTORY_COLUMNS)))

    pscale, uscale = _scales_for(plant, scenario)
    noise = noise / uscale if uscale != 1.0 else noise
    adapt = adaptation_gate(vd, dt, scenario.gate_setpoint_rate)
    code, step = kernels.run_aci_loop(
        kind, _plant_par(plant, scenario), vd, noise, adapt, gains,
        q1, q2, gains.beta, rectify, pscale, uscale,
        w_c, w_a, P, w_g, v_g, x_hat, nu, x_tilde0, plant_state, out)
    if code:
        raise DivergenceError(kernels.DIV_NAMES[code], step, dt)
    if pscale != 1.0:
        # the x2 log column carries watts, not controller units
        out[:, TRAJECTORY_COLUMNS.index("x2")] /= pscale
    log = TrajectoryLog(out)
    if return_final:
        final = {"w_c": w_c, "w_a": w_a, "P": P, "w_g": w_g, "v_g": v_g,
                 "x_hat": x_hat, "nu": nu}
        return log, energy_report(log, dt), final
    return log, energy_report(log, dt)


def run_pid(cycle: DriveCycle, gains: GainSet, scenario: Scenario,
            plant: str = "ev") -> tuple:
    """Run the PID baseline over the cycle with the shared logging pipeline."""
    if plant not in PLANT_KINDS:
        raise InvariantError(f"plant: unknown selector {plant!r}")
    kind = PLANT_KINDS[plant]
    dt = gains.dt
    n = int(round(cycle.duration / dt))
    if n < 1:
        raise InvariantError("cycle: shorter than one step")
    times = cycle.t[0] + np.arange(n) * dt
    vd = cycle.sample(times)
    pid = scenario.pid
    plant_state = _initial_plant_state(plant, scenario, vd[0])
    out = np.zeros((n, len(TRAJECTORY_COLUMNS)))
    code, step = kernels.run_pid_loop(
        kind, _plant_par(plant, scenario), vd, pid.kp, pid.ki, pid.kd,
        pid.integral_clamp, dt, plant_state, out)
    if code:
        raise DivergenceError(kernels.DIV_NAMES[code], step, dt)
    log = TrajectoryLog(out)
    return log, energy_report(log, dt)


def _pct_change(new: float, base: float) -> float:
    if new == base:
        return 0.0
    if base == 0.0:
        return math.inf if new > 0 else -math.inf
    return (new - base) / abs(base) * 100.0


def compare(cycle: DriveCycle, gains: GainSet, scenario: Scenario,
            plant: str = "ev", seed: Optional[int] = None,
            baseline: str = "pid") -> tuple:
    """Run the ACI and the baseline on identical cycle/plant/seed.

    Returns (ComparisonReport, aci_log, baseline_log).
    """
    if baseline not in ("pid", "aci"):
        raise InvariantError(f"baseline: must be pid or aci, got {baseline!r}")
    aci_log, aci_rep = run_aci(cycle, gains, scenario, plant, seed)
    if baseline == "pid":
        base_log, base_rep = run_pid(cycle, gains, scenario, plant)
    else:
        base_log, base_rep = run_aci(cycle, gains, scenario, plant, seed)

    # positive when the learning controller uses less net energy
    net_reduction = -_pct_change(aci_rep.net_energy, base_rep.net_energy)
    # positive when the learning controller recovers more than the baseline
    recovery_improvement = _pct_change(aci_rep.energy_recovered,
                                       base_rep.energy_recovered)
    aci_rep = EnergyReport(aci_rep.energy_consumed, aci_rep.energy_recovered,
                           aci_rep.net_energy, aci_rep.rms_tracking_error,
                           recovery_improvement)
    report = ComparisonReport(
        aci=aci_rep, baseline=base_rep, baseline_kind=baseline,
        net_reduction_pct=net_reduction,
        recovery_improvement_pct=recovery_improvement,
        rms_aci=aci_rep.rms_tracking_error,
        rms_baseline=base_rep.rms_tracking_error,
    )
    return report, aci_log, base_log


def _atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)),
                               suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trajectory_csv(log: TrajectoryLog, path) -> None:
    lines = [",".join(TRAJECTORY_COLUMNS)]
    ints = TRAJECTORY_COLUMNS.index("reset_count")
    for row in log.data:
        parts = [repr(float(v)) if i != ints else str(int(v))
                 for i, v in enumerate(row)]
        lines.append(",".join(parts))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_trajectory_csv(path) -> TrajectoryLog:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != TRAJECTORY_COLUMNS:
            missing = [c for c in TRAJECTORY_COLUMNS if c not in header]
            raise InvariantError(f"trajectory CSV missing columns: {missing}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return TrajectoryLog(data)


def metrics_dict(report: EnergyReport, seed: int, runtime_s: float) -> dict:
    return {
        "energy_consumed_J": report.energy_consumed,
        "energy_recovered_J": report.energy_recovered,
        "net_energy_J": report.net_energy,
        "rms_tracking_error_mps": report.rms_tracking_error,
        "recovery_improvement_pct": report.recovery_improvement_pct,
        "runtime_s": runtime_s,
        "seed": seed,
    }


def write_metrics_json(report: EnergyReport, seed: int, runtime_s: float,
                       path) -> None:
    _atomic_write(path, json.dumps(metrics_dict(report, seed, runtime_s),
                                   indent=2) + "\n")


def write_comparison_json(report: ComparisonReport, seed: int, path) -> None:
    payload = {
        "aci": metrics_dict(report.aci, seed, 0.0),
        "baseline": metrics_dict(report.baseline, seed, 0.0),
        "baseline_kind": report.baseline_kind,
        "net_reduction_pct": report.net_reduction_pct,
        "recovery_improvement_pct": report.recovery_improvement_pct,
        "rms_tracking_error_aci_mps": report.rms_aci,
        "rms_tracking_error_baseline_mps": report.rms_baseline,
    }
    for keyed in (payload["aci"], payload["baseline"]):
        keyed.pop("runtime_s", None)
    _atomic_write(path, json.dumps(payload, indent=2) + "\n")

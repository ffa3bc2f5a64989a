"""Control-affine plants: the EV longitudinal model and two test plants.

All three share the input channel h(x) = [0, 1]^T and are advanced with
fixed-step RK4 under a zero-order-hold input.  Steppers are pure
functions of (state, input, dt); nothing is cached between calls.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InvariantError, _require

GRAVITY = 9.81

H_VEC = np.array([0.0, 1.0])


@dataclass(frozen=True)
class EvParams:
    """Point-mass longitudinal EV with efficiency-gated regeneration.

    Stands in for an integrated powertrain model; magnitudes are typical
    for a compact EV and are config-overridable, not measured claims.
    """

    mass: float = 1600.0
    wheel_radius: float = 0.3
    gear_ratio: float = 9.0
    drag_area: float = 0.6          # C_d * A, m^2
    air_density: float = 1.2
    rolling_coeff: float = 0.01
    eta_drive: float = 0.9
    eta_regen: float = 0.6
    torque_max: float = 250.0
    # first-order lag between commanded and delivered torque; gives the
    # power state a proper (non-feedthrough) response to the command.
    # 0 selects an ideal motor that delivers the command instantly.
    motor_tau: float = 0.25

    def __post_init__(self):
        for name in ("mass", "wheel_radius", "gear_ratio", "drag_area",
                     "air_density", "rolling_coeff", "torque_max"):
            _require(getattr(self, name) > 0, name, "must be > 0")
        for name in ("eta_drive", "eta_regen"):
            v = getattr(self, name)
            _require(0 < v <= 1, name, "must be in (0, 1]")
        _require(self.motor_tau >= 0, "motor_tau", "must be >= 0")


@dataclass(frozen=True)
class PlantOutput:
    """One plant step: new raw state, battery-side power, next measurement."""

    state: np.ndarray
    power: float
    x: np.ndarray
    torque_clamped: bool = False


def _check_step_inputs(values, dt):
    if not np.all(np.isfinite(values)):
        raise InvariantError("plant step: non-finite input")
    if dt <= 0:
        raise InvariantError(f"dt: must be > 0 (got {dt})")


def rk4_step(f, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def ev_accel(v: float, torque: float, p: EvParams) -> float:
    """dv/dt of the point-mass model; resistances gated off at standstill."""
    f_trac = torque * p.gear_ratio / p.wheel_radius
    f_drag = 0.5 * p.air_density * p.drag_area * v * v
    f_roll = p.mass * GRAVITY * p.rolling_coeff
    gate = 1.0 if v > 0.0 else 0.0
    return (f_trac - gate * (f_drag + f_roll)) / p.mass


def ev_power(v: float, torque: float, p: EvParams) -> float:
    """Battery-side net traction power for a wheel power T*G/r_w*v.

    Positive wheel power is divided by the drive efficiency (battery
    supplies the losses), negative wheel power is multiplied by the
    regeneration efficiency (battery only receives the recovered part).
    """
    p_wheel = torque * p.gear_ratio / p.wheel_radius * v
    return p_wheel / p.eta_drive if p_wheel > 0.0 else p_wheel * p.eta_regen


def ev_step(state, torque: float, v_d_next: float, dt: float,
            p: EvParams) -> PlantOutput:
    """Advance the EV one step under a held torque command.

    state is (v_v, delivered torque).  Commands beyond the motor limit
    are clamped and flagged.  The reported power is the battery-side net
    traction power at the step-start instant, which is also the x2 the
    controller measures at that time.
    """
    state = np.asarray(state, dtype=float)
    v_v, t_act = float(state[0]), float(state[1])
    _check_step_inputs((v_v, t_act, torque, v_d_next), dt)
    if v_v < 0:
        raise InvariantError(f"v_v: must be >= 0 (got {v_v})")
    clamped = abs(torque) > p.torque_max
    t_cmd = float(np.clip(torque, -p.torque_max, p.torque_max))
    if p.motor_tau == 0.0:
        t_act = t_cmd
    power = ev_power(v_v, t_act, p)

    if p.motor_tau == 0.0:
        v_new = rk4_step(lambda s: np.array([ev_accel(s[0], t_cmd, p)]),
                         np.array([v_v]), dt)[0]
        t_new = t_cmd
    else:
        def deriv(s):
            return np.array([ev_accel(s[0], s[1], p),
                             (t_cmd - s[1]) / p.motor_tau])
        v_new, t_new = rk4_step(deriv, np.array([v_v, t_act]), dt)
    v_new = max(v_new, 0.0)   # braking cannot push the vehicle backwards
    new_state = np.array([v_new, t_new])
    return PlantOutput(new_state, power,
                       np.array([v_new - v_d_next, ev_power(v_new, t_new, p)]),
                       clamped)


LQR_A_DEFAULT = np.array([[0.0, 1.0], [-1.0, -2.0]])
LQR_B_DEFAULT = np.array([0.0, 1.0])


def lqr_plant_step(x: np.ndarray, u: float, dt: float,
                   A: np.ndarray = LQR_A_DEFAULT,
                   B: np.ndarray = LQR_B_DEFAULT) -> np.ndarray:
    """RK4 advance of the linear verification plant xdot = A x + B u."""
    x = np.asarray(x, dtype=float)
    _check_step_inputs(np.concatenate([x, [u]]), dt)
    return rk4_step(lambda s: A @ s + B * u, x, dt)


def nltest_drift(x: np.ndarray) -> np.ndarray:
    """Known smooth drift of the identifier test plant."""
    return np.array([-x[0] + x[1],
                     -x[0] * x[1] - x[1] + np.sin(x[0])])


def nonlinear_test_plant_step(x: np.ndarray, u: float, dt: float) -> np.ndarray:
    """RK4 advance of xdot = g(x) + [0, 1]^T u with the documented g."""
    x = np.asarray(x, dtype=float)
    _check_step_inputs(np.concatenate([x, [u]]), dt)
    return rk4_step(lambda s: nltest_drift(s) + H_VEC * u, x, dt)

"""Pure-python closed-loop kernels; the fallback when the extension is absent.

Composes the reference module operations step by step.  The compiled
backend reimplements exactly these loops; cross-backend tests hold the
two to numerical agreement.
"""
from __future__ import annotations

import math

import numpy as np

from .. import actor as actor_mod
from .. import critic as critic_mod
from .. import identifier as ident_mod
from ..actor import ActorState
from ..core import GainSet
from ..cost import CostWeights, state_cost
from ..critic import CriticState, eig_bounds_sym3
from ..identifier import IdentifierState
from ..plants import H_VEC, EvParams, ev_accel, ev_power, nltest_drift

PLANT_EV = 0
PLANT_LQR = 1
PLANT_NLTEST = 2

DIVERGENCE_LIMIT = 1e9

# divergence codes -> offending quantity
DIV_NAMES = {
    1: "state x",
    2: "critic weights w_hat_c",
    3: "actor weights w_hat_a",
    4: "identifier output weights w_hat_g",
    5: "identifier input weights v_hat_g",
    6: "state estimate x_hat",
}


def _bad(v) -> bool:
    # catches NaN as well: not (|v| <= limit)
    return not (abs(v) <= DIVERGENCE_LIMIT)


def _ev_unpack(par):
    return EvParams(mass=par[0], wheel_radius=par[1], gear_ratio=par[2],
                    drag_area=par[3], air_density=par[4], rolling_coeff=par[5],
                    eta_drive=par[6], eta_regen=par[7], torque_max=par[8],
                    motor_tau=par[9])


def _ev_advance(v: float, t_act: float, t_cmd: float, dt: float,
                p: EvParams) -> tuple:
    """(v, delivered torque) after one RK4 step under a held command."""
    if p.motor_tau == 0.0:
        k1 = ev_accel(v, t_cmd, p)
        k2 = ev_accel(v + 0.5 * dt * k1, t_cmd, p)
        k3 = ev_accel(v + 0.5 * dt * k2, t_cmd, p)
        k4 = ev_accel(v + dt * k3, t_cmd, p)
        v_new = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return max(v_new, 0.0), t_cmd

    def deriv(vv, tt):
        return ev_accel(vv, tt, p), (t_cmd - tt) / p.motor_tau

    k1v, k1t = deriv(v, t_act)
    k2v, k2t = deriv(v + 0.5 * dt * k1v, t_act + 0.5 * dt * k1t)
    k3v, k3t = deriv(v + 0.5 * dt * k2v, t_act + 0.5 * dt * k2t)
    k4v, k4t = deriv(v + dt * k3v, t_act + dt * k3t)
    v_new = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    t_new = t_act + (dt / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
    return max(v_new, 0.0), t_new


def _rk4_vec(f, x, u, dt):
    k1 = f(x, u)
    k2 = f(x + 0.5 * dt * k1, u)
    k3 = f(x + 0.5 * dt * k2, u)
    k4 = f(x + dt * k3, u)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def run_aci_loop(plant_kind, plant_par, vd, noise, adapt, gains: GainSet,
                 q1, q2, beta, rectify, pscale, uscale,
                 w_c, w_a, P, w_g, v_g, x_hat, nu, x_tilde0, plant_state,
                 out):
    """Fixed-step ACI loop; mutates the state arrays and the out matrix.

    pscale converts the plant's power output into the controller's x2
    units and uscale converts the controller's action into plant torque;
    both are 1 for the test plants.  The noise sequence is already in
    controller units.  adapt masks the critic/actor updates per step
    (the identifier always adapts).  Returns (0, -1) on success or
    (divergence_code, step).
    """
    n = vd.shape[0]
    dt = gains.dt
    cw = CostWeights(q1=q1, q2=q2, beta=beta, penalize_accel_only=bool(rectify))
    evp = _ev_unpack(plant_par) if plant_kind == PLANT_EV else None
    lqr_a = plant_par[:4].reshape(2, 2) if plant_kind == PLANT_LQR else None
    lqr_b = plant_par[4:6] if plant_kind == PLANT_LQR else None

    cs = CriticState(w_c.copy(), P.copy(), 0)
    asn = ActorState(w_a.copy())
    ids = IdentifierState(w_g.copy(), v_g.copy(), x_hat.copy(), nu.copy(),
                          x_tilde0.copy())

    for k in range(n):
        t = k * dt
        if plant_kind == PLANT_EV:
            v_v = plant_state[0]
            p_batt = ev_power(v_v, plant_state[1], evp)
            x = np.array([v_v - vd[k], p_batt * pscale])
            vd_log = vd[k]
        else:
            x = plant_state.copy()
            v_v = x[0]
            p_batt = x[1]
            vd_log = 0.0

        x_tilde = x - ids.x_hat
        r_t, nu_next = ident_mod.rise_feedback(ids, x_tilde, gains, dt)

        u_pol = actor_mod.control(asn, x, beta)
        if plant_kind == PLANT_EV:
            # the learning laws see the policy saturated at the actuator
            # limit (the residual of the realizable system stays bounded);
            # exploration noise rides on top for the plant only
            lim = evp.torque_max / uscale
            u_lrn = min(max(u_pol, -lim), lim)
            u_cmd = min(max(u_pol + noise[k], -lim), lim)
        else:
            u_lrn = u_pol
            u_cmd = u_pol + noise[k]

        # the state estimate advances under the applied torque; the
        # learning signals evaluate the policy flow, keeping the dither
        # out of the regressor (it would bias the fit toward zero)
        fh = ident_mod.f_hat(ids, x, u_cmd, r_t)
        fh_pol = fh + H_VEC * (u_lrn - u_cmd)
        phi = critic_mod.regressor(x, fh_pol)
        delta = float(cs.w_hat_c @ phi) + state_cost(x, cw) + beta * u_lrn * u_lrn

        # snapshot semantics: all three updates read the pre-step estimates
        if adapt[k] != 0.0:
            cs_new = critic_mod.update(cs, asn.w_hat_a, phi, delta, gains, dt)
            as_new = actor_mod.update(asn, cs.w_hat_c, phi, x, delta, gains,
                                      dt, u_hat=u_lrn)
        else:
            cs_new, as_new = cs, asn
        ids_new = ident_mod.update_weights(ids, x_tilde, fh, gains, dt)

        cs, asn = cs_new, as_new
        ids = IdentifierState(ids_new.w_hat_g, ids_new.v_hat_g,
                              ids.x_hat + dt * fh, nu_next, ids.x_tilde_0)

        if plant_kind == PLANT_EV:
            plant_state[0], plant_state[1] = _ev_advance(
                v_v, plant_state[1], u_cmd * uscale, dt, evp)
        elif plant_kind == PLANT_LQR:
            plant_state[:] = _rk4_vec(lambda s, u: lqr_a @ s + lqr_b * u,
                                      plant_state, u_cmd, dt)
        else:
            plant_state[:] = _rk4_vec(
                lambda s, u: nltest_drift(s) + np.array([0.0, u]),
                plant_state, u_cmd, dt)

        wc_n = float(np.linalg.norm(cs.w_hat_c))
        wa_n = float(np.linalg.norm(asn.w_hat_a))
        xt_n = float(np.linalg.norm(x_tilde))
        lam_min = critic_mod.lambda_min_sym3(cs.P)

        out[k, 0] = t
        out[k, 1] = vd_log
        out[k, 2] = v_v
        out[k, 3] = x[0]
        out[k, 4] = x[1]
        out[k, 5] = u_cmd * uscale
        out[k, 6] = delta
        out[k, 7] = p_batt
        out[k, 8] = wc_n
        out[k, 9] = wa_n
        out[k, 10] = xt_n
        out[k, 11] = lam_min
        out[k, 12] = cs.reset_count

        if _bad(x[0]) or _bad(x[1]):
            code = 1
        elif _bad(wc_n):
            code = 2
        elif _bad(wa_n):
            code = 3
        elif _bad(np.linalg.norm(ids.w_hat_g)):
            code = 4
        elif _bad(np.linalg.norm(ids.v_hat_g)):
            code = 5
        elif _bad(ids.x_hat[0]) or _bad(ids.x_hat[1]):
            code = 6
        else:
            code = 0
        if code:
            _writeback(w_c, w_a, P, w_g, v_g, x_hat, nu, cs, asn, ids)
            return code, k

    _writeback(w_c, w_a, P, w_g, v_g, x_hat, nu, cs, asn, ids)
    return 0, -1


def _writeback(w_c, w_a, P, w_g, v_g, x_hat, nu, cs, asn, ids):
    w_c[:] = cs.w_hat_c
    P[:, :] = cs.P
    w_a[:] = asn.w_hat_a
    w_g[:, :] = ids.w_hat_g
    v_g[:, :] = ids.v_hat_g
    x_hat[:] = ids.x_hat
    nu[:] = ids.nu


def run_pid_loop(plant_kind, plant_par, vd, kp, ki, kd, integral_clamp,
                 dt, plant_state, out):
    """Fixed-step PID baseline loop over the same plants and log format."""
    n = vd.shape[0]
    evp = _ev_unpack(plant_par) if plant_kind == PLANT_EV else None
    lqr_a = plant_par[:4].reshape(2, 2) if plant_kind == PLANT_LQR else None
    lqr_b = plant_par[4:6] if plant_kind == PLANT_LQR else None
    integ = 0.0
    e_prev = 0.0

    for k in range(n):
        t = k * dt
        if plant_kind == PLANT_EV:
            v_v = plant_state[0]
            x1 = v_v - vd[k]
            x2 = ev_power(v_v, plant_state[1], evp)
            vd_log = vd[k]
        else:
            v_v, x2 = plant_state[0], plant_state[1]
            x1 = v_v
            vd_log = 0.0
        p_batt = x2
        e = vd_log - v_v

        integ += e * dt
        if ki > 0:
            lim = integral_clamp / ki
            integ = min(max(integ, -lim), lim)
        deriv = (e - e_prev) / dt if k > 0 else 0.0
        u = kp * e + ki * integ + kd * deriv
        e_prev = e
        if plant_kind == PLANT_EV:
            u = min(max(u, -evp.torque_max), evp.torque_max)

        if plant_kind == PLANT_EV:
            plant_state[0], plant_state[1] = _ev_advance(
                v_v, plant_state[1], u, dt, evp)
        elif plant_kind == PLANT_LQR:
            plant_state[:] = _rk4_vec(lambda s, uu: lqr_a @ s + lqr_b * uu,
                                      plant_state, u, dt)
        else:
            plant_state[:] = _rk4_vec(
                lambda s, uu: nltest_drift(s) + np.array([0.0, uu]),
                plant_state, u, dt)

        out[k, 0] = t
        out[k, 1] = vd_log
        out[k, 2] = v_v
        out[k, 3] = x1
        out[k, 4] = x2
        out[k, 5] = u
        out[k, 6] = 0.0
        out[k, 7] = p_batt
        out[k, 8] = 0.0
        out[k, 9] = 0.0
        out[k, 10] = 0.0
        out[k, 11] = 0.0
        out[k, 12] = 0.0

        if _bad(x1) or _bad(x2):
            return 1, k
    return 0, -1


def critic_stream(w_c, P, w_as, phis, deltas, gains: GainSet, dt,
                  lam_min_out, lam_max_out, reset_out):
    """Feed an arbitrary input sequence through the critic update law."""
    cs = CriticState(w_c.copy(), P.copy(), 0)
    for k in range(deltas.shape[0]):
        prev = cs.reset_count
        cs = critic_mod.update(cs, w_as[k], phis[k], float(deltas[k]), gains, dt)
        lam_min_out[k], lam_max_out[k] = eig_bounds_sym3(cs.P)
        reset_out[k] = 1.0 if cs.reset_count > prev else 0.0
    w_c[:] = cs.w_hat_c
    P[:, :] = cs.P
    return cs.reset_count


def actor_stream(w_a, c_ws, phis, xs, deltas, gains: GainSet, dt, norm_out):
    asn = ActorState(w_a.copy())
    for k in range(deltas.shape[0]):
        asn = actor_mod.update(asn, c_ws[k], phis[k], xs[k], float(deltas[k]),
                               gains, dt)
        norm_out[k] = float(np.linalg.norm(asn.w_hat_a))
    w_a[:] = asn.w_hat_a


def identifier_stream(w_g, v_g, x_hats, x_tildes, xdots, gains: GainSet, dt,
                      wnorm_out, vnorm_out):
    ids = IdentifierState(w_g.copy(), v_g.copy(), x_hats[0].copy(),
                          np.zeros(2), np.zeros(2))
    for k in range(x_tildes.shape[0]):
        ids = IdentifierState(ids.w_hat_g, ids.v_hat_g, x_hats[k],
                              ids.nu, ids.x_tilde_0)
        ids = ident_mod.update_weights(ids, x_tildes[k], xdots[k], gains, dt)
        wnorm_out[k] = float(np.linalg.norm(ids.w_hat_g))
        vnorm_out[k] = float(np.linalg.norm(ids.v_hat_g))
    w_g[:, :] = ids.w_hat_g
    v_g[:, :] = ids.v_hat_g

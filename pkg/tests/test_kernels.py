import numpy as np
import pytest

import evaci.sim as sim
from evaci.cycles import flat_cycle, gen_cycle
from evaci.kernels import get_backend

try:
    get_backend("compiled")
    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED,
                                    reason="compiled extension not built")


def run_loop(backend, plant, gains, scenario, n):
    kindmap = {"ev": 0, "lqr": 1, "nltest": 2}
    cyc = gen_cycle("trapezoid") if plant == "ev" else flat_cycle(30.0)
    dt = gains.dt
    vd = cyc.sample(np.arange(n) * dt)
    rng = np.random.default_rng(7)
    v_g = rng.uniform(-0.5, 0.5, (2, gains.Lg))
    noise = sim.exploration_noise(n, dt, cyc.duration, scenario.explore_amp,
                                  scenario.explore_decay_frac,
                                  scenario.explore_dwell_s, rng)
    q1, q2, rect = sim._cost_for(plant, gains, scenario)
    pscale, uscale = sim._scales_for(plant, scenario)
    noise = noise / uscale
    adapt = sim.adaptation_gate(vd, dt, scenario.gate_setpoint_rate)
    plant_state = sim._initial_plant_state(plant, scenario, vd[0])
    w_c = scenario.ev_w_init.copy() if plant == "ev" \
        else np.full(3, scenario.critic_w0)
    w_a = w_c.copy()
    P = gains.P1 * np.eye(3)
    w_g = np.zeros((gains.Lg + 1, 2))
    x0m = np.zeros(2) if plant == "ev" else plant_state.copy()
    x_hat = x0m.copy()
    nu = np.zeros(2)
    out = np.zeros((n, 13))
    code, step = backend.run_aci_loop(
        kindmap[plant], sim._plant_par(plant, scenario), vd, noise, adapt,
        gains, q1, q2, gains.beta, rect, pscale, uscale,
        w_c, w_a, P, w_g, v_g, x_hat, nu, np.zeros(2), plant_state, out)
    assert code == 0, (code, step)
    return out, (w_c, w_a, P, w_g, v_g, x_hat, nu)


@needs_compiled
@pytest.mark.parametrize("plant", ["ev", "lqr", "nltest"])
def test_backends_agree_on_aci_loop(plant, gains, scenario):
    out_p, st_p = run_loop(get_backend("pure"), plant, gains, scenario, 2500)
    out_c, st_c = run_loop(get_backend("compiled"), plant, gains, scenario, 2500)
    assert np.allclose(out_p, out_c, rtol=1e-8, atol=1e-9)
    for a, b in zip(st_p, st_c):
        assert np.allclose(a, b, rtol=1e-8, atol=1e-10)


@needs_compiled
def test_backends_agree_on_pid_loop(gains, scenario):
    cyc = gen_cycle("trapezoid")
    n = 5000
    vd = cyc.sample(np.arange(n) * gains.dt)
    results = []
    for name in ("pure", "compiled"):
        ps = sim._initial_plant_state("ev", scenario, vd[0])
        out = np.zeros((n, 13))
        code, _ = get_backend(name).run_pid_loop(
            0, sim._plant_par("ev", scenario), vd, scenario.pid.kp,
            scenario.pid.ki, scenario.pid.kd, scenario.pid.integral_clamp,
            gains.dt, ps, out)
        assert code == 0
        results.append(out)
    assert np.allclose(results[0], results[1], rtol=1e-9, atol=1e-10)


@needs_compiled
def test_backends_agree_on_streams(gains, rng):
    m = 2000
    phis = rng.normal(size=(m, 3)) * 10 ** rng.uniform(-1, 2, size=(m, 1))
    deltas = rng.normal(size=m) * 10
    w_as = rng.normal(size=(m, 3))
    xs = rng.normal(size=(m, 2)) * 3
    xts = rng.normal(size=(m, 2))
    xds = rng.normal(size=(m, 2)) * 5
    xhs = rng.normal(size=(m, 2))

    res = {}
    for name in ("pure", "compiled"):
        be = get_backend(name)
        w_c = np.full(3, 0.1)
        P = gains.P1 * np.eye(3)
        lam_min = np.zeros(m)
        lam_max = np.zeros(m)
        resets = np.zeros(m)
        be.critic_stream(w_c, P, w_as, phis, deltas, gains, gains.dt,
                         lam_min, lam_max, resets)
        w_a = np.full(3, 0.1)
        norms = np.zeros(m)
        be.actor_stream(w_a, w_as, phis, xs, deltas, gains, gains.dt, norms)
        w_g = np.zeros((gains.Lg + 1, 2))
        v_g = rng_copy = np.linspace(-0.4, 0.4, 2 * gains.Lg).reshape(2, gains.Lg).copy()
        wn = np.zeros(m)
        vn = np.zeros(m)
        be.identifier_stream(w_g, v_g, xhs, xts, xds, gains, gains.dt, wn, vn)
        res[name] = (w_c, P, lam_min, lam_max, resets, w_a, norms, w_g, v_g,
                     wn, vn)
    for a, b in zip(res["pure"], res["compiled"]):
        assert np.allclose(a, b, rtol=1e-8, atol=1e-10)


def test_backend_selection_env(tmp_path):
    import subprocess
    import sys
    code = ("import evaci; print(evaci.BACKEND)")
    out = subprocess.run([sys.executable, "-c", code],
                         env={"EVACI_BACKEND": "pure", "PATH": "/usr/bin:/bin"},
                         capture_output=True, text=True)
    assert out.stdout.strip() == "pure"

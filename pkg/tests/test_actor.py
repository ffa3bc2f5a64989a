import numpy as np
import pytest

from evaci.actor import ActorState, control, control_gradient, init_actor, update
from evaci.core import GainSet, InvariantError
from evaci.critic import basis_jacobian


class TestControl:
    def test_zero_at_origin(self, rng):
        a = ActorState(rng.normal(size=3))
        assert control(a, (0.0, 0.0), 1.0) == 0.0

    def test_hand_value(self):
        # x=(1,2), w=(1,1,1), beta=1: h' phi'' w = 5, u = -2.5
        a = ActorState(np.ones(3))
        assert control(a, (1.0, 2.0), 1.0) == pytest.approx(-2.5)

    def test_linearity_in_weights(self, rng):
        w = rng.normal(size=3)
        x = rng.normal(size=2)
        assert control(ActorState(2 * w), x, 1.0) == \
            pytest.approx(2 * control(ActorState(w), x, 1.0))


class TestControlGradient:
    def test_zero_at_origin(self):
        assert np.array_equal(control_gradient((0.0, 0.0), 1.0), np.zeros(3))

    def test_hand_value(self):
        g = control_gradient((1.0, 2.0), 1.0)
        assert np.allclose(g, [0.0, -0.5, -2.0])

    def test_exact_gradient_of_control(self, rng):
        # control is linear in the weights, so the finite difference is exact
        x = rng.normal(size=2)
        w = rng.normal(size=3)
        g = control_gradient(x, 2.0)
        h = 1e-6
        for i in range(3):
            wp, wm = w.copy(), w.copy()
            wp[i] += h
            wm[i] -= h
            fd = (control(ActorState(wp), x, 2.0)
                  - control(ActorState(wm), x, 2.0)) / (2 * h)
            assert g[i] == pytest.approx(fd, abs=1e-8)


class TestUpdate:
    def test_stationary_point(self, gains):
        a = ActorState(np.array([0.1, 0.2, 0.3]))
        a2 = update(a, a.w_hat_a, np.zeros(3), (1.0, 1.0), 0.0, gains, 1e-3)
        assert np.array_equal(a2.w_hat_a, a.w_hat_a)

    def test_pure_consensus_at_zero_delta(self, gains):
        # k_a2 = 50 pulls the actor toward the critic
        a = ActorState(np.zeros(3))
        w_c = np.array([1.0, 2.0, 3.0])
        a2 = update(a, w_c, np.ones(3), (1.0, 1.0), 0.0, gains, 1e-3)
        assert np.allclose(a2.w_hat_a, gains.k_a2 * 1e-3 * w_c)

    def test_origin_degeneracy(self, gains):
        # gradients vanish at x=0, only the consensus acts even with delta
        a = ActorState(np.array([0.5, 0.5, 0.5]))
        w_c = np.array([1.0, 1.0, 1.0])
        a2 = update(a, w_c, np.zeros(3), (0.0, 0.0), 123.0, gains, 1e-3)
        expected = a.w_hat_a + 1e-3 * gains.k_a2 * (w_c - a.w_hat_a)
        assert np.allclose(a2.w_hat_a, expected)

    def test_projection_safety(self, rng):
        g = GainSet(w_bar_a=2.0)
        a = ActorState(np.array([1.0, 1.0, 1.0]))
        for _ in range(500):
            a = update(a, rng.normal(size=3) * 100, rng.normal(size=3) * 10,
                       rng.normal(size=2) * 5, rng.normal() * 1e4, g, 1e-3)
            assert np.linalg.norm(a.w_hat_a) <= 2.0 + 1e-12

    def test_rejects_non_finite_delta(self, gains):
        with pytest.raises(InvariantError, match="delta"):
            update(init_actor(), np.ones(3), np.ones(3), (1.0, 1.0),
                   float("inf"), gains, 1e-3)

    def test_time_invariance(self, gains, rng):
        # no explicit time dependence: identical inputs at any step agree
        a = ActorState(rng.normal(size=3))
        args = (rng.normal(size=3), rng.normal(size=3), rng.normal(size=2),
                0.7, gains, 1e-3)
        assert np.array_equal(update(a, *args).w_hat_a, update(a, *args).w_hat_a)


def test_consistency_with_critic_gradient(rng):
    # with w_a == w_c the policy equals -1/2 beta^-1 h' (dJ/dx)'
    beta = 0.5
    for _ in range(20):
        w = rng.normal(size=3)
        x = rng.normal(size=2)
        u = control(ActorState(w), x, beta)
        grad_j = basis_jacobian(x).T @ w          # dJ/dx as a 2-vector
        expected = -0.5 / beta * grad_j[1]        # h = [0, 1]
        assert u == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_init_actor():
    a = init_actor(0.1)
    assert np.array_equal(a.w_hat_a, [0.1, 0.1, 0.1])

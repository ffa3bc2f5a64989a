import numpy as np
import pytest

from evaci.riccati import (RiccatiError, lqr_gain, quadratic_weights,
                           solve_riccati)


def test_matches_scipy_oracle():
    from scipy.linalg import solve_continuous_are
    a = np.array([[0.0, 1.0], [-1.0, -2.0]])
    b = np.array([[0.0], [1.0]])
    q = np.eye(2)
    s_ref = solve_continuous_are(a, b, q, np.array([[1.0]]))
    s = solve_riccati(a, b.ravel(), q, 1.0)
    assert np.allclose(s, s_ref, rtol=1e-8, atol=1e-10)


def test_closed_form_default_plant():
    # the default plant has S = [[sqrt2, sqrt2-1], [sqrt2-1, sqrt2-1]]
    s = solve_riccati(np.array([[0.0, 1.0], [-1.0, -2.0]]),
                      np.array([0.0, 1.0]), np.eye(2), 1.0)
    r2 = np.sqrt(2.0)
    assert np.allclose(s, [[r2, r2 - 1.0], [r2 - 1.0, r2 - 1.0]], atol=1e-10)


def test_matches_scipy_random_stable(rng):
    from scipy.linalg import solve_continuous_are
    for _ in range(10):
        a = rng.normal(size=(2, 2))
        a = a - (np.max(np.real(np.linalg.eigvals(a))) + 0.5) * np.eye(2)
        b = rng.normal(size=2)
        q = np.eye(2) * rng.uniform(0.5, 2.0)
        beta = rng.uniform(0.5, 2.0)
        s = solve_riccati(a, b, q, beta)
        s_ref = solve_continuous_are(a, b.reshape(2, 1), q,
                                     np.array([[beta]]))
        assert np.allclose(s, s_ref, rtol=1e-7, atol=1e-8)


def test_quadratic_weights_layout():
    s = np.array([[1.0, 2.0], [2.0, 5.0]])
    assert np.array_equal(quadratic_weights(s), [1.0, 4.0, 5.0])


def test_lqr_gain():
    s = np.array([[2.0, 1.0], [1.0, 3.0]])
    g = lqr_gain(s, np.array([0.0, 1.0]), 2.0)
    assert np.allclose(g, [-0.5, -1.5])


def test_non_convergence_raises():
    # uncontrollable unstable system: the iteration cannot settle
    a = np.eye(2)
    b = np.zeros(2)
    with pytest.raises(RiccatiError):
        solve_riccati(a, b, np.eye(2), 1.0, max_steps=20000)

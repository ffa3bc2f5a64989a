"""Policy approximation and projection-bounded actor adaptation."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import GainSet, InvariantError
from .critic import basis_jacobian, project_value_weights


@dataclass(frozen=True)
class ActorState:
    w_hat_a: np.ndarray


def init_actor(w0: float = 0.1) -> ActorState:
    """Actor starts equal to the critic so the consensus terms begin at zero."""
    return ActorState(np.full(3, w0))


def control_gradient(x, beta: float) -> np.ndarray:
    """d u_hat / d w_hat_a = -1/(2*beta) * h^T phi'(x)^T, as a 3-vector.

    With h = [0, 1]^T this picks the second column of the basis Jacobian.
    """
    return -0.5 / beta * basis_jacobian(x)[:, 1]


def control(a: ActorState, x, beta: float) -> float:
    """u_hat(x) = -1/(2*beta) * h^T phi'(x)^T w_hat_a."""
    return float(control_gradient(x, beta) @ a.w_hat_a)


def update(a: ActorState, c_weights: np.ndarray, phi: np.ndarray, x,
           delta_hjb: float, g: GainSet, dt: float,
           u_hat: float = None) -> ActorState:
    """One Euler step of the projected actor law.

    Inside the projection:
      w_dot = -2*k_a1/sqrt(1 + phi'phi)
              * [(w_c^T phi' h) + beta*u_hat] * (d u_hat/d w_a) * delta
              - k_a2*(w_a - w_c)
    followed by a norm clamp onto the w_bar_a ball.  u_hat defaults to
    the policy output; callers may pass the actuator-saturated value.
    """
    if not np.isfinite(delta_hjb):
        raise InvariantError("delta_hjb: must be finite")
    phi = np.asarray(phi, dtype=float)
    grad = control_gradient(x, g.beta)
    if u_hat is None:
        u_hat = float(grad @ a.w_hat_a)
    s = float(c_weights @ basis_jacobian(x)[:, 1])   # w_c^T phi' h
    scale = 2.0 * g.k_a1 / math.sqrt(1.0 + float(phi @ phi))
    w_dot = -scale * (s + g.beta * u_hat) * grad * delta_hjb \
        - g.k_a2 * (a.w_hat_a - c_weights)
    w_new = project_value_weights(a.w_hat_a + dt * w_dot, g.w_bar_a)
    return replace(a, w_hat_a=w_new)

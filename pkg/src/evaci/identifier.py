"""Online neural identifier of the unknown drift with RISE feedback.

A single-hidden-layer network with a bias-augmented sigmoid layer
estimates g(x); the robust integral-of-the-sign term r_t absorbs the
reconstruction error so the state estimate x_hat tracks the measurement.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import GainSet, InvariantError
from .plants import H_VEC


class IdentifierUpdateError(ArithmeticError):
    """A weight-update product went non-finite; names the offending term."""


@dataclass(frozen=True)
class IdentifierState:
    """Weights, state estimate and RISE internals of the identifier.

    w_hat_g is (Lg+1) x 2 (bias row first), v_hat_g is 2 x Lg.  nu
    starts at exactly zero and x_tilde_0 keeps the initial estimation
    error so the feedback term vanishes at t = 0.
    """

    w_hat_g: np.ndarray
    v_hat_g: np.ndarray
    x_hat: np.ndarray
    nu: np.ndarray
    x_tilde_0: np.ndarray


@dataclass(frozen=True)
class ActivationOutput:
    """Bias-augmented layer output sigma and its (Lg+1) x Lg derivative.

    The bias element is fixed at 1 with an all-zero derivative row; each
    non-bias derivative row is diagonal with (1 - sigma^2)/2.
    """

    sigma: np.ndarray
    sigma_prime: np.ndarray


def init_identifier(x0: np.ndarray, Lg: int, rng: np.random.Generator,
                    input_scale: float = 0.5) -> IdentifierState:
    """Zero output weights, uniform random input weights, x_hat at the measurement."""
    x0 = np.asarray(x0, dtype=float)
    v = rng.uniform(-input_scale, input_scale, size=(2, Lg))
    return IdentifierState(
        w_hat_g=np.zeros((Lg + 1, 2)),
        v_hat_g=v,
        x_hat=x0.copy(),
        nu=np.zeros(2),
        x_tilde_0=np.zeros(2),
    )


def activate(v_hat_g: np.ndarray, x_hat: np.ndarray) -> ActivationOutput:
    """sigma(z) = 2/(1 + exp(-z)) - 1 on z = v_hat_g^T x_hat, bias prepended.

    The sigmoid equals tanh(z/2), which saturates cleanly for large |z|.
    """
    z = v_hat_g.T @ x_hat
    s = np.tanh(0.5 * z)
    Lg = z.shape[0]
    sigma = np.empty(Lg + 1)
    sigma[0] = 1.0
    sigma[1:] = s
    sigma_prime = np.zeros((Lg + 1, Lg))
    d = 0.5 * (1.0 - s * s)
    sigma_prime[1:, :] = np.diag(d)
    return ActivationOutput(sigma, sigma_prime)


def f_hat(ident: IdentifierState, x, u: float, r_t: np.ndarray) -> np.ndarray:
    """Estimated state derivative: w_hat_g^T sigma_hat + h*u + r_t."""
    act = activate(ident.v_hat_g, ident.x_hat)
    return ident.w_hat_g.T @ act.sigma + H_VEC * u + r_t


def sgn_smoothed(x: np.ndarray, eps: float) -> np.ndarray:
    """Boundary-layer sgn: tanh(x/eps), or exact sgn when eps == 0."""
    if eps > 0:
        return np.tanh(x / eps)
    return np.sign(x)


def rise_feedback(ident: IdentifierState, x_tilde: np.ndarray, g: GainSet,
                  dt: float) -> tuple:
    """Current feedback r_t and the forward-Euler advanced integral state.

    r_t = p1*(x_tilde - x_tilde(0)) + nu, with
    nu_dot = (p1*alpha + gamma)*x_tilde + p2*sgn(x_tilde).
    """
    if dt <= 0:
        raise InvariantError(f"dt: must be > 0 (got {dt})")
    r_t = g.p1 * (x_tilde - ident.x_tilde_0) + ident.nu
    nu_dot = (g.p1 * g.alpha + g.gamma) * x_tilde \
        + g.p2 * sgn_smoothed(x_tilde, g.sgn_boundary_layer)
    return r_t, ident.nu + dt * nu_dot


def clamp_frobenius(m: np.ndarray, radius: float) -> np.ndarray:
    """Scale the matrix back onto the ball boundary if its norm exceeds radius."""
    n = np.linalg.norm(m)
    if n > radius:
        return m * (radius / n)
    return m


def update_weights(ident: IdentifierState, x_tilde: np.ndarray,
                   x_hat_dot: np.ndarray, g: GainSet, dt: float) -> IdentifierState:
    """One Euler step of both projected weight laws.

    w_hat_g follows Ups_w * sigma' * v_hat_g^T * x_hat_dot * x_tilde^T and
    v_hat_g follows Ups_v * x_hat_dot * (x_tilde^T w_hat_g^T sigma'); both
    use the pre-step weights and are then clamped to their norm balls.
    """
    act = activate(ident.v_hat_g, ident.x_hat)
    xd = np.asarray(x_hat_dot, dtype=float).reshape(2, 1)
    xt = np.asarray(x_tilde, dtype=float).reshape(1, 2)

    with np.errstate(over="ignore", invalid="ignore"):
        w_dot = g.upsilon_w @ act.sigma_prime @ ident.v_hat_g.T @ xd @ xt
        if not np.all(np.isfinite(w_dot)):
            raise IdentifierUpdateError("non-finite w_hat_g update product")
        v_dot = g.upsilon_v @ xd @ (xt @ ident.w_hat_g.T @ act.sigma_prime)
        if not np.all(np.isfinite(v_dot)):
            raise IdentifierUpdateError("non-finite v_hat_g update product")

    w_new = clamp_frobenius(ident.w_hat_g + dt * w_dot, g.w_bar_g)
    v_new = clamp_frobenius(ident.v_hat_g + dt * v_dot, g.v_bar_g)
    return replace(ident, w_hat_g=w_new, v_hat_g=v_new)

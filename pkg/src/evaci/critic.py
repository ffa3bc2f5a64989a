"""Value-function approximation with normalized adaptation and covariance resetting."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import GainSet, InvariantError

N_BASIS = 3


@dataclass(frozen=True)
class CriticState:
    """Critic weights, adaptation matrix and the running reset counter."""

    w_hat_c: np.ndarray
    P: np.ndarray
    reset_count: int = 0


def init_critic(g: GainSet, w0: float = 0.1) -> CriticState:
    """P starts at P1*I; weights start small and positive."""
    return CriticState(np.full(N_BASIS, w0), g.P1 * np.eye(N_BASIS), 0)


def basis(x) -> np.ndarray:
    """phi(x) = [x1^2, x1*x2, x2^2]."""
    x1, x2 = float(x[0]), float(x[1])
    return np.array([x1 * x1, x1 * x2, x2 * x2])


def basis_jacobian(x) -> np.ndarray:
    """d phi / dx, rows [2*x1, 0], [x2, x1], [0, 2*x2]."""
    x1, x2 = float(x[0]), float(x[1])
    return np.array([[2.0 * x1, 0.0], [x2, x1], [0.0, 2.0 * x2]])


def value(c: CriticState, x) -> float:
    return float(c.w_hat_c @ basis(x))


def regressor(x, f_hat_value: np.ndarray) -> np.ndarray:
    """phi'(x) applied to the identified state derivative."""
    return basis_jacobian(x) @ np.asarray(f_hat_value, dtype=float)


def project_value_weights(w: np.ndarray, radius: float) -> np.ndarray:
    """Projection set shared by the critic and actor weight laws.

    The approximated object is a cost-to-go, non-negative by definition,
    so the pure-axis coefficients w1 (x1^2) and w3 (x2^2) are kept >= 0;
    through the policy this also rules out positive power feedback.  The
    result is then clamped onto the radius ball.
    """
    w = np.array([max(float(w[0]), 0.0), float(w[1]), max(float(w[2]), 0.0)])
    norm = np.linalg.norm(w)
    if norm > radius:
        w = w * (radius / norm)
    return w


def eig_bounds_sym3(m: np.ndarray) -> tuple:
    """(lambda_min, lambda_max) of a symmetric 3x3 by the trigonometric method.

    Closed form, no LAPACK: both simulation backends use this same
    arithmetic so covariance resets trigger identically.
    """
    a00, a01, a02 = m[0, 0], m[0, 1], m[0, 2]
    a11, a12, a22 = m[1, 1], m[1, 2], m[2, 2]
    off = a01 * a01 + a02 * a02 + a12 * a12
    if off == 0.0:
        return min(a00, a11, a22), max(a00, a11, a22)
    q = (a00 + a11 + a22) / 3.0
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * off
    p = math.sqrt(p2 / 6.0)
    b00, b11, b22 = (a00 - q) / p, (a11 - q) / p, (a22 - q) / p
    b01, b02, b12 = a01 / p, a02 / p, a12 / p
    detb = (b00 * (b11 * b22 - b12 * b12)
            - b01 * (b01 * b22 - b12 * b02)
            + b02 * (b01 * b12 - b11 * b02))
    r = min(1.0, max(-1.0, detb / 2.0))
    phi = math.acos(r) / 3.0
    lam_max = q + 2.0 * p * math.cos(phi)
    lam_min = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return lam_min, lam_max


def lambda_min_sym3(m: np.ndarray) -> float:
    return eig_bounds_sym3(m)[0]


def update(c: CriticState, a_weights: np.ndarray, phi: np.ndarray,
           delta_hjb: float, g: GainSet, dt: float) -> CriticState:
    """One Euler step of the critic weight and covariance laws.

    w_dot = -k_c1 * P*phi/(1 + kappa*phi'P phi) * delta + k_c2*(w_a - w_c),
    P_dot = -k_c1 * P (phi phi'/(1 + kappa*phi'P phi)) P.  P is
    re-symmetrized after the step and reset to P1*I whenever its smallest
    eigenvalue falls below P0.
    """
    if not np.isfinite(delta_hjb):
        raise InvariantError("delta_hjb: must be finite")
    phi = np.asarray(phi, dtype=float)
    p_phi = c.P @ phi
    denom = 1.0 + g.kappa * float(phi @ p_phi)
    w_dot = -g.k_c1 * p_phi / denom * delta_hjb + g.k_c2 * (a_weights - c.w_hat_c)
    w_new = project_value_weights(c.w_hat_c + dt * w_dot, g.w_bar_c)

    p_new = c.P - (dt * g.k_c1 / denom) * np.outer(p_phi, p_phi)
    p_new = 0.5 * (p_new + p_new.T)
    resets = c.reset_count
    if lambda_min_sym3(p_new) < g.P0:
        p_new = g.P1 * np.eye(N_BASIS)
        resets += 1
    return replace(c, w_hat_c=w_new, P=p_new, reset_count=resets)

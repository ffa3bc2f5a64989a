"""Independent Riccati oracle used to verify the learned value function.

Solves A'S + SA - S B beta^-1 B' S + Q = 0 by integrating the matrix
differential equation forward from S = 0 until stationarity.  Kept free
of the critic/actor code paths on purpose: it is the reference the
learned weights are judged against.
"""
from __future__ import annotations

import numpy as np


class RiccatiError(RuntimeError):
    """The fixed-point iteration failed to reach stationarity."""


def riccati_rhs(S: np.ndarray, A: np.ndarray, B: np.ndarray, Q: np.ndarray,
                beta: float) -> np.ndarray:
    SB = S @ B
    return A.T @ S + S @ A - np.outer(SB, SB) / beta + Q


def solve_riccati(A, B, Q, beta: float = 1.0, h: float = 0.01,
                  tol: float = 1e-13, max_steps: int = 2_000_000) -> np.ndarray:
    """Stabilizing solution of the continuous algebraic Riccati equation.

    RK4 on S_dot = A'S + SA - S B beta^-1 B'S + Q from S = 0; converges
    whenever (A, B) is stabilizable and the closed loop settles.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float).reshape(-1)
    Q = np.asarray(Q, dtype=float)
    S = np.zeros_like(Q)
    for _ in range(max_steps):
        k1 = riccati_rhs(S, A, B, Q, beta)
        k2 = riccati_rhs(S + 0.5 * h * k1, A, B, Q, beta)
        k3 = riccati_rhs(S + 0.5 * h * k2, A, B, Q, beta)
        k4 = riccati_rhs(S + h * k3, A, B, Q, beta)
        S = S + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        S = 0.5 * (S + S.T)
        if not np.all(np.isfinite(S)):
            raise RiccatiError("iteration diverged to non-finite values")
        if np.linalg.norm(k1) < tol * (1.0 + np.linalg.norm(S)):
            return S
    raise RiccatiError(f"no stationary point after {max_steps} steps")


def quadratic_weights(S: np.ndarray) -> np.ndarray:
    """Critic weights representing x'Sx in the [x1^2, x1*x2, x2^2] basis."""
    return np.array([S[0, 0], 2.0 * S[0, 1], S[1, 1]])


def lqr_gain(S: np.ndarray, B, beta: float = 1.0) -> np.ndarray:
    """State-feedback row vector of u* = -beta^-1 B'S x."""
    B = np.asarray(B, dtype=float).reshape(-1)
    return -(B @ S) / beta

"""Instantaneous running cost: tracking error, acceleration power, control effort."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import _require


@dataclass(frozen=True)
class CostWeights:
    """Weights of the running cost.

    With penalize_accel_only set (the EV configuration) only power drawn
    from the battery is penalized, i.e. the x2 term uses max(x2, 0).
    The linear-oracle and nonlinear test plants disable it so the state
    cost is a plain quadratic.
    """

    q1: float = 1.0
    q2: float = 1e-8
    beta: float = 1.0
    penalize_accel_only: bool = True

    def __post_init__(self):
        _require(self.q1 >= 0, "q1", "must be >= 0")
        _require(self.q2 >= 0, "q2", "must be >= 0")
        _require(self.beta > 0, "beta", "must be > 0")


def p_accel(x2: float) -> float:
    """Acceleration power: the battery-draw part of the net traction power."""
    return max(x2, 0.0)


def state_cost(x, w: CostWeights) -> float:
    """C(x) = q1*x1^2 + q2*P_accel(x2)^2 (or q2*x2^2 without rectification)."""
    x1, x2 = float(x[0]), float(x[1])
    p = p_accel(x2) if w.penalize_accel_only else x2
    return w.q1 * x1 * x1 + w.q2 * p * p


def running_cost(x, u: float, w: CostWeights) -> float:
    """C(x) + beta*u^2."""
    return state_cost(x, w) + w.beta * float(u) ** 2

"""The optimality residual coupling the actor, critic and identifier."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import CostWeights, state_cost


@dataclass(frozen=True)
class ResidualRecord:
    """The residual and its three additive components.

    delta_hjb is constructed as the exact sum of the components, so the
    decomposition always reconciles.
    """

    delta_hjb: float
    value_gradient_term: float
    state_cost_term: float
    control_cost_term: float


def residual(c_weights: np.ndarray, phi: np.ndarray, x, u_hat: float,
             w: CostWeights) -> ResidualRecord:
    """delta = w_c^T (phi'(x) F_hat) + C(x) + beta*u_hat^2.

    phi must already be the regressor phi'(x) @ F_hat(x, u_hat).
    """
    vg = float(np.asarray(c_weights, dtype=float) @ np.asarray(phi, dtype=float))
    sc = state_cost(x, w)
    cc = w.beta * float(u_hat) ** 2
    return ResidualRecord(vg + sc + cc, vg, sc, cc)

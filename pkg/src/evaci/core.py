"""Shared domain types and the stability gain-condition validators.

All types are immutable value objects: construction validates the
invariants once and instances can then be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np


class InvariantError(ValueError):
    """A typed value violates one of its declared invariants."""


def _require(cond: bool, name: str, msg: str) -> None:
    if not cond:
        raise InvariantError(f"{name}: {msg}")


@dataclass(frozen=True)
class SystemState:
    """Controller-visible state: speed error and net traction power.

    x1 is always recomputed from (v_v, v_d); it is never stored on its
    own.  x2 > 0 means power drawn from the battery, x2 < 0 means power
    recovered through regenerative braking.
    """

    v_v: float
    v_d: float
    x2: float
    t: float = 0.0

    def __post_init__(self):
        for name in ("v_v", "v_d", "x2", "t"):
            _require(np.isfinite(getattr(self, name)), name, "must be finite")

    @property
    def x1(self) -> float:
        return self.v_v - self.v_d

    def vec(self) -> np.ndarray:
        return np.array([self.x1, self.x2], dtype=float)


@dataclass(frozen=True)
class GainSet:
    """Every tunable constant of the controller stack.

    Cost weights, actor/critic adaptation gains, identifier/RISE gains,
    covariance reset bounds, projection radii and the integration step.
    The adaptation matrices upsilon_w ((Lg+1)x(Lg+1)) and upsilon_v (2x2)
    are stored in full but are normally built as scale * I.
    """

    q1: float = 1.0
    q2: float = 1e-8
    beta: float = 1.0
    k_a1: float = 10.0
    k_a2: float = 50.0
    k_c1: float = 11.0
    k_c2: float = 30.0
    kappa: float = 0.005
    P0: float = 0.05
    P1: float = 1.0
    p1: float = 80.0
    p2: float = 0.2
    alpha: float = 300.0
    gamma: float = 5.0
    Lg: int = 5
    upsilon_w: np.ndarray = None
    upsilon_v: np.ndarray = None
    w_bar_a: float = 100.0
    w_bar_c: float = 100.0
    w_bar_g: float = 100.0
    v_bar_g: float = 100.0
    sgn_boundary_layer: float = 1e-3
    dt: float = 1e-3

    def __post_init__(self):
        positives = (
            "q1", "q2", "beta", "k_a1", "k_a2", "k_c1", "k_c2", "kappa",
            "P0", "P1", "p1", "p2", "alpha", "gamma", "w_bar_a", "w_bar_c",
            "w_bar_g", "v_bar_g", "dt",
        )
        for name in positives:
            v = getattr(self, name)
            _require(np.isfinite(v) and v > 0, name, "must be strictly positive")
        _require(self.P0 < self.P1, "P0", f"must satisfy P0 < P1 (got {self.P0} >= {self.P1})")
        _require(self.Lg >= 1, "Lg", "must be a positive integer")
        _require(self.sgn_boundary_layer >= 0, "sgn_boundary_layer",
                 "must be >= 0 (0 selects the pure sgn law)")
        n = self.Lg + 1
        if self.upsilon_w is None:
            object.__setattr__(self, "upsilon_w", 0.1 * np.eye(n))
        if self.upsilon_v is None:
            object.__setattr__(self, "upsilon_v", 0.1 * np.eye(2))
        object.__setattr__(self, "upsilon_w", np.asarray(self.upsilon_w, dtype=float))
        object.__setattr__(self, "upsilon_v", np.asarray(self.upsilon_v, dtype=float))
        for name, mat, dim in (("upsilon_w", self.upsilon_w, n), ("upsilon_v", self.upsilon_v, 2)):
            _require(mat.shape == (dim, dim), name, f"must be {dim}x{dim}")
            _require(np.allclose(mat, mat.T, atol=1e-12), name, "must be symmetric")
            _require(np.linalg.eigvalsh(mat).min() > 0, name, "must be positive definite")
        self.upsilon_w.setflags(write=False)
        self.upsilon_v.setflags(write=False)


@dataclass(frozen=True)
class GainConstants:
    """User-supplied analysis bounding constants for the gain validators.

    The stability theorems only assert these constants exist; no value is
    derivable from the controller itself, so they default to 1.0 and are
    meant to be overridden with whatever bounds the user can justify for
    their plant.
    """

    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    c4: float = 1.0
    c5: float = 1.0
    c6: float = 1.0
    c7: float = 1.0
    c8: float = 1.0
    c9: float = 1.0
    c10: float = 1.0
    c11: float = 1.0
    c12: float = 1.0
    eps1: float = 1.0
    eps2: float = 1.0
    eps3: float = 1.0
    p3: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            _require(np.isfinite(v) and v > 0, f.name, "must be strictly positive")


@dataclass(frozen=True)
class InequalityCheck:
    """One gain inequality: its rendered form, both sides, and the slack."""

    name: str
    expression: str
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs > self.rhs

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class ValidationReport:
    """Per-inequality results; deliberately never a single boolean."""

    theorem: str
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> InequalityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list:
        out = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            out.append(f"[{tag}] {self.theorem}/{c.name}: {c.expression}  "
                       f"lhs={c.lhs:.6g} rhs={c.rhs:.6g} slack={c.slack:.6g}")
        return out


def validate_gains_theorem1(g: GainSet, c: GainConstants) -> ValidationReport:
    """Asymptotic-tracking gain conditions for the identifier.

    Pure function of its inputs: p1 > 2*c3, p2 > max(c1+c4, c1+c5/alpha),
    p3 > c6 and gamma > 2*c2/alpha, each reported with its slack.
    """
    p2_bound = max(c.c1 + c.c4, c.c1 + c.c5 / g.alpha)
    checks = (
        InequalityCheck("p1", "p1 > 2*c3", g.p1, 2.0 * c.c3),
        InequalityCheck("p2", "p2 > max(c1+c4, c1+c5/alpha)", g.p2, p2_bound),
        InequalityCheck("p3", "p3 > c6", c.p3, c.c6),
        InequalityCheck("gamma", "gamma > 2*c2/alpha", g.gamma, 2.0 * c.c2 / g.alpha),
    )
    return ValidationReport("theorem1", checks)


def validate_gains_theorem2(g: GainSet, c: GainConstants) -> ValidationReport:
    """Uniform-ultimate-boundedness gain conditions for the actor-critic.

    Two inequalities; the second carries the covariance-ratio term
    k_c1*P1/(kappa*P0), which dominates for small kappa*P0.
    """
    rhs1 = (g.k_a1 / 4.0) * c.c8 * c.c9 + g.k_a2 * c.eps1 / 2.0 + g.k_c2 / (2.0 * c.eps2)
    lhs2 = g.k_c2 + g.k_c2 * c.eps2 / 2.0 + g.k_a2 / (2.0 * c.eps1)
    rhs2 = c.eps3 / 2.0 + g.k_a1 * c.c7 * c.c8 + g.k_c1 * g.P1 / (g.kappa * g.P0)
    checks = (
        InequalityCheck("actor", "k_a2 > (k_a1/4)*c8*c9 + k_a2*eps1/2 + k_c2/(2*eps2)",
                        g.k_a2, rhs1),
        InequalityCheck("critic", "k_c2 + k_c2*eps2/2 + k_a2/(2*eps1) > "
                                  "eps3/2 + k_a1*c7*c8 + k_c1*P1/(kappa*P0)",
                        lhs2, rhs2),
    )
    return ValidationReport("theorem2", checks)

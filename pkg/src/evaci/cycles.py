"""Drive cycles: the timestamped desired-speed profiles the controller tracks."""
from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .core import InvariantError, _require

CSV_HEADER = ("t_s", "v_d_mps")


@dataclass(frozen=True)
class DriveCycle:
    """Ordered (t, v_d) samples, linearly interpolated in between.

    First and last speeds must be equal so energy comparisons between
    controllers are not skewed by a net kinetic-energy change.
    """

    t: np.ndarray
    v_d: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.v_d, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v_d", v)
        _require(t.ndim == 1 and t.size >= 2, "t", "needs at least two samples")
        _require(v.shape == t.shape, "v_d", "must match t in length")
        _require(bool(np.all(np.isfinite(t)) and np.all(np.isfinite(v))), "samples",
                 "must be finite")
        _require(bool(np.all(np.diff(t) > 0)), "t", "must be strictly increasing")
        _require(bool(np.all(v >= 0)), "v_d", "speeds must be non-negative")
        _require(v[0] == v[-1], "v_d",
                 f"first and last speeds must be equal (got {v[0]} and {v[-1]})")
        t.setflags(write=False)
        v.setflags(write=False)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    def sample(self, times) -> np.ndarray:
        """Desired speed at the given times (linear interpolation, clamped ends)."""
        return np.interp(times, self.t, self.v_d)


def gen_cycle(kind: str, **params) -> DriveCycle:
    """Build a named synthetic cycle or load one from CSV.

    Kinds: "trapezoid" (idle, ramp to cruise, hold, ramp back, idle),
    "multitrapezoid" (several trapezoids back to back) and "csv"
    (passthrough of a file in the cycle CSV format).
    """
    if kind == "trapezoid":
        return _trapezoid(**params)
    if kind == "multitrapezoid":
        return _multitrapezoid(**params)
    if kind == "csv":
        return load_cycle_csv(params["path"])
    raise InvariantError(f"kind: unknown cycle kind {kind!r}")


def _trapezoid_points(t0, v0, v_cruise, accel, decel, t_cruise):
    """Breakpoints of one trapezoid starting at time t0, speed v0."""
    if v_cruise < v0:
        raise InvariantError("v_cruise: must be >= v0")
    _require(accel > 0 and decel > 0, "accel/decel", "must be > 0")
    _require(t_cruise >= 0, "t_cruise", "must be >= 0")
    rise = (v_cruise - v0) / accel
    fall = (v_cruise - v0) / decel
    pts = [(t0, v0), (t0 + rise, v_cruise)]
    if t_cruise > 0:
        pts.append((t0 + rise + t_cruise, v_cruise))
    pts.append((t0 + rise + t_cruise + fall, v0))
    return pts


def _trapezoid(v0=0.0, v_cruise=15.0, accel=1.5, decel=None, t_cruise=28.0,
               t_pre=2.0, t_post=10.0) -> DriveCycle:
    if v0 < 0 or v_cruise < 0:
        raise InvariantError("v0/v_cruise: speeds must be non-negative")
    decel = accel if decel is None else decel
    t, v = [], []
    if t_pre > 0:
        t.append(0.0)
        v.append(v0)
    pts = _trapezoid_points(t_pre, v0, v_cruise, accel, decel, t_cruise)
    for ti, vi in pts:
        t.append(ti)
        v.append(vi)
    if t_post > 0:
        t.append(t[-1] + t_post)
        v.append(v0)
    return DriveCycle(np.array(t), np.array(v))


def _multitrapezoid(v0=0.0, v_cruises=(10.0, 15.0, 8.0), accel=1.5, decel=None,
                    t_cruise=15.0, t_gap=5.0, t_pre=2.0, t_post=5.0) -> DriveCycle:
    decel = accel if decel is None else decel
    t, v = [0.0], [v0]
    now = t_pre
    for vc in v_cruises:
        for ti, vi in _trapezoid_points(now, v0, vc, accel, decel, t_cruise):
            if ti > t[-1]:
                t.append(ti)
                v.append(vi)
        now = t[-1] + t_gap
        t.append(now)
        v.append(v0)
    t.append(now + t_post)
    v.append(v0)
    return DriveCycle(np.array(t), np.array(v))


def flat_cycle(duration: float, speed: float = 0.0) -> DriveCycle:
    """Constant-speed cycle; used for regulation runs on the test plants."""
    _require(duration > 0, "duration", "must be > 0")
    return DriveCycle(np.array([0.0, duration]), np.array([speed, speed]))


def load_cycle_csv(path) -> DriveCycle:
    if not os.path.exists(path):
        raise FileNotFoundError(f"cycle file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise InvariantError(
                f"cycle CSV header must be {','.join(CSV_HEADER)} (got {header})")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    if not rows:
        raise InvariantError("cycle CSV has no samples")
    arr = np.array(rows)
    return DriveCycle(arr[:, 0], arr[:, 1])


def write_cycle_csv(cycle: DriveCycle, path) -> None:
    """Atomic write: the file appears complete or not at all."""
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for ti, vi in zip(cycle.t, cycle.v_d):
                writer.writerow([repr(float(ti)), repr(float(vi))])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

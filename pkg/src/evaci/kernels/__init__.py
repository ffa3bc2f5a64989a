"""Backend selection for the hot simulation loops.

The compiled extension is preferred when importable; the pure-python
fallback implements identical semantics.  Set EVACI_BACKEND=pure or
EVACI_BACKEND=compiled to force one (the latter raises if the extension
is missing).
"""
from __future__ import annotations

import os

from . import pure

PLANT_EV = pure.PLANT_EV
PLANT_LQR = pure.PLANT_LQR
PLANT_NLTEST = pure.PLANT_NLTEST
DIV_NAMES = pure.DIV_NAMES
DIVERGENCE_LIMIT = pure.DIVERGENCE_LIMIT

_choice = os.environ.get("EVACI_BACKEND", "auto").lower()
if _choice not in ("auto", "pure", "compiled"):
    raise ValueError(f"EVACI_BACKEND must be auto, pure or compiled, got {_choice!r}")

if _choice == "pure":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _fast as _impl
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = pure
        BACKEND = "pure"

run_aci_loop = _impl.run_aci_loop
run_pid_loop = _impl.run_pid_loop
critic_stream = _impl.critic_stream
actor_stream = _impl.actor_stream
identifier_stream = _impl.identifier_stream


def get_backend(name: str):
    """Explicit backend module by name; used by the benchmark and tests."""
    if name == "pure":
        return pure
    if name == "compiled":
        from . import _fast
        return _fast
    raise ValueError(f"unknown backend {name!r}")

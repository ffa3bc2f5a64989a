"""Actor-critic-identifier RL controller for energy-efficient EV speed tracking."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

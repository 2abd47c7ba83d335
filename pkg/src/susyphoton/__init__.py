"""Multiphoton coherent states, supercoherent spinors and their phase-space numerics."""

__version__ = "0.1.0"

from .fock_core import FockVector, TruncationPolicy, TruncationError  # noqa: E402
from .scalar_mcs import McsSpec, McsState, ScsComponent  # noqa: E402
from .susy_states import SaoParams, SpinorState, SusySpec, TildeAmps  # noqa: E402
from .phase_space import GaussianPairKernel, GridSpec, WignerGrid  # noqa: E402
from .dynamics import LoopReport  # noqa: E402

__all__ = [
    "FockVector",
    "TruncationPolicy",
    "TruncationError",
    "McsSpec",
    "McsState",
    "ScsComponent",
    "SaoParams",
    "SpinorState",
    "SusySpec",
    "TildeAmps",
    "GaussianPairKernel",
    "GridSpec",
    "WignerGrid",
    "LoopReport",
]

"""Memory kernels of the spin-boson path integral by tree traversal.

The public surface is re-exported here; see the submodules for details.
"""
from .bath import BathConfig, BathMode, EtaTable, compute_eta, discretize_bath
from .dynamics import DensitySeries, evolve_density, initial_density, propagate_reduced
from .influence import PAIR_STATES, PairState, SystemParams, system_propagator
from .kernels import Family, KernelSet, compute_kernels

__version__ = "0.1.0"

__all__ = [
    "BathConfig",
    "BathMode",
    "EtaTable",
    "compute_eta",
    "discretize_bath",
    "DensitySeries",
    "evolve_density",
    "initial_density",
    "propagate_reduced",
    "PAIR_STATES",
    "PairState",
    "SystemParams",
    "system_propagator",
    "Family",
    "KernelSet",
    "compute_kernels",
]

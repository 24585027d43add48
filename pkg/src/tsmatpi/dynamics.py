"""Reduced propagators and density-matrix time series from memory kernels."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .influence import PAIR_STATES
from .kernels import KernelSet

__all__ = [
    "DensitySeries",
    "vectorize_density",
    "unvectorize_density",
    "propagate_reduced",
    "evolve_density",
    "sigma_z_expectation",
    "initial_density",
]

log = logging.getLogger(__name__)

# spin +1 -> matrix row 0, spin -1 -> row 1
_ROW = {1: 0, -1: 1}


def vectorize_density(rho: np.ndarray) -> np.ndarray:
    """2x2 density matrix -> length-4 vector in pair-state order."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([rho[_ROW[s.plus], _ROW[s.minus]] for s in PAIR_STATES])


def unvectorize_density(vec: np.ndarray) -> np.ndarray:
    rho = np.empty((2, 2), dtype=complex)
    for s, v in zip(PAIR_STATES, vec):
        rho[_ROW[s.plus], _ROW[s.minus]] = v
    return rho


def initial_density(name: str) -> np.ndarray:
    """Named initial states: ``up`` = |+1><+1|, ``down`` = |-1><-1|, ``mixed`` = I/2."""
    if name == "up":
        return np.array([[1, 0], [0, 0]], dtype=complex)
    if name == "down":
        return np.array([[0, 0], [0, 1]], dtype=complex)
    if name == "mixed":
        return 0.5 * np.eye(2, dtype=complex)
    raise ValueError(f"unknown initial state {name!r}")


def sigma_z_expectation(rho: np.ndarray, warn_tol: float = 1e-10) -> float:
    value = rho[0, 0] - rho[1, 1]
    if abs(value.imag) > warn_tol:
        log.warning("<sigma_z> has imaginary residual %.3e", value.imag)
    return float(value.real)


@dataclass
class DensitySeries:
    """Reduced density matrices at ``t = 0, dt, ..., N dt``."""

    dt: float
    rho: np.ndarray  # (N + 1, 2, 2)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.rho))

    @property
    def sigma_z(self) -> np.ndarray:
        return np.array([sigma_z_expectation(r) for r in self.rho])

    def trace_drift(self) -> float:
        return float(np.max(np.abs(np.trace(self.rho, axis1=1, axis2=2) - 1.0)))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.rho - np.conj(np.swapaxes(self.rho, 1, 2)))))


def propagate_reduced(kernels: KernelSet, n_steps: int) -> np.ndarray:
    """``U^(r,0)`` for ``r = 1..n_steps`` (array index ``r - 1``).

    Up to ``r = dk`` the full convolution including the ``M^(r,0)`` tail is
    used; beyond that only the last ``dk`` propagators enter.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    dk = kernels.dk
    u = np.zeros((n_steps, 4, 4), dtype=complex)
    for r in range(1, n_steps + 1):
        if r <= dk:
            acc = kernels.col0(r).copy()
            for m in range(1, r):
                acc += kernels.col1(r - m) @ u[m - 1]
        else:
            acc = np.zeros((4, 4), dtype=complex)
            for m in range(1, dk + 1):
                acc += kernels.col1(m) @ u[r - m - 1]
        u[r - 1] = acc
    return u


def evolve_density(u_seq: Sequence[np.ndarray], rho0: np.ndarray, dt: float,
                   atol: float = 1e-12) -> DensitySeries:
    """Apply each ``U^(r,0)`` to the vectorized initial state."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (2, 2):
        raise ValueError("rho0 must be 2x2")
    if abs(np.trace(rho0) - 1.0) > atol:
        raise ValueError(f"rho0 must have unit trace, got {np.trace(rho0)}")
    if np.max(np.abs(rho0 - rho0.conj().T)) > atol:
        raise ValueError("rho0 must be Hermitian")
    v0 = vectorize_density(rho0)
    out = [rho0]
    for u in u_seq:
        out.append(unvectorize_density(u @ v0))
    return DensitySeries(dt, np.array(out))

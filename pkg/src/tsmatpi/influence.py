"""Elementary factors of the discretized path integrand.

Conventions used across the package:

* single-spin basis ordering is ``|+1>`` then ``|-1>``;
* a forward/backward pair ``(s+, s-)`` has dense index
  ``2 * (s+ + 1)//2 + (s- + 1)//2``, so ``(-1,-1) -> 0`` ... ``(+1,+1) -> 3``;
* 4x4 matrices are indexed ``[later pair, earlier pair]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .bath import EtaTable

__all__ = [
    "PairState",
    "PAIR_STATES",
    "SystemParams",
    "system_propagator",
    "liouville_propagator",
    "f_factor",
    "f_minus_one",
    "g_factor",
    "a_initial",
    "a_interior",
    "f_table",
    "fm1_table",
    "g_matrix",
    "a_initial_matrix",
    "a_interior_matrix",
]

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _spin_index(s: int) -> int:
    return 0 if s == 1 else 1


@dataclass(frozen=True)
class PairState:
    plus: int
    minus: int

    def __post_init__(self) -> None:
        if self.plus not in (-1, 1) or self.minus not in (-1, 1):
            raise ValueError(f"spins must be +-1, got ({self.plus}, {self.minus})")

    @property
    def index(self) -> int:
        return ((self.plus + 1) // 2) * 2 + (self.minus + 1) // 2

    @property
    def diagonal(self) -> bool:
        return self.plus == self.minus

    @classmethod
    def from_index(cls, idx: int) -> "PairState":
        if not 0 <= idx < 4:
            raise ValueError(f"pair index must be in 0..3, got {idx}")
        return cls(2 * (idx // 2) - 1, 2 * (idx % 2) - 1)


PAIR_STATES: Tuple[PairState, ...] = tuple(PairState.from_index(i) for i in range(4))


@dataclass(frozen=True)
class SystemParams:
    """Bare two-level Hamiltonian ``epsilon sigma_z + delta sigma_x``."""

    epsilon: float = 1.0
    delta: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.epsilon) and np.isfinite(self.delta)):
            raise ValueError("epsilon and delta must be finite")

    @property
    def hamiltonian(self) -> np.ndarray:
        return self.epsilon * SIGMA_Z + self.delta * SIGMA_X


def system_propagator(sys: SystemParams, dt: float) -> np.ndarray:
    """``K = exp(-i H0 dt)`` in closed form (H0 squares to ``lambda^2`` I)."""
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    lam = np.hypot(sys.epsilon, sys.delta)
    if lam == 0.0:
        return np.eye(2, dtype=complex)
    return np.cos(lam * dt) * np.eye(2) - 1j * np.sin(lam * dt) * sys.hamiltonian / lam


def liouville_propagator(k_mat: np.ndarray) -> np.ndarray:
    """4x4 matrix of ``rho -> K rho K^dagger`` in the pair-state index."""
    out = np.empty((4, 4), dtype=complex)
    for a in PAIR_STATES:
        for b in PAIR_STATES:
            out[a.index, b.index] = (
                k_mat[_spin_index(a.plus), _spin_index(b.plus)]
                * np.conj(k_mat[_spin_index(a.minus), _spin_index(b.minus)])
            )
    return out


def _f_exponent(s1: PairState, s2: PairState, eta: complex) -> complex:
    return -(s1.plus - s1.minus) * (eta * s2.plus - np.conj(eta) * s2.minus)


def f_factor(s1: PairState, s2: PairState, eta: complex) -> complex:
    """Influence factor ``exp(-(s1+ - s1-)(eta s2+ - conj(eta) s2-))``."""
    return complex(np.exp(_f_exponent(s1, s2, eta)))


def f_minus_one(s1: PairState, s2: PairState, eta: complex) -> complex:
    """``f_factor - 1`` without cancellation for small ``eta``."""
    return complex(np.expm1(_f_exponent(s1, s2, eta)))


def g_factor(s_next: PairState, s_prev: PairState, k_mat: np.ndarray) -> complex:
    """Bare propagation weight ``<n+|K|p+> <p-|K^dagger|n->``."""
    forward = k_mat[_spin_index(s_next.plus), _spin_index(s_prev.plus)]
    backward = np.conj(k_mat[_spin_index(s_next.minus), _spin_index(s_prev.minus)])
    return complex(forward * backward)


def a_initial(s1: PairState, s0: PairState, eta: EtaTable, k_mat: np.ndarray) -> complex:
    """First-step weight ``G(1,0) F(1,1) F(1,0) F(0,0)``."""
    return (
        g_factor(s1, s0, k_mat)
        * f_factor(s1, s1, eta.eta_interior[0])
        * f_factor(s1, s0, eta.eta_initial[1])
        * f_factor(s0, s0, eta.eta_initial[0])
    )


def a_interior(s_next: PairState, s_prev: PairState, eta: EtaTable, k_mat: np.ndarray) -> complex:
    """Later-step weight ``F(k+1,k) F(k+1,k+1) G(k+1,k)``; depends on lags only."""
    return (
        f_factor(s_next, s_prev, eta.eta_interior[1])
        * f_factor(s_next, s_next, eta.eta_interior[0])
        * g_factor(s_next, s_prev, k_mat)
    )


# Dense 4x4 tables -----------------------------------------------------------

def f_table(eta: complex) -> np.ndarray:
    """``F[i1, i2]`` for all pair-state indices at a single coefficient."""
    return np.array([[f_factor(a, b, eta) for b in PAIR_STATES] for a in PAIR_STATES])


def fm1_table(eta: complex) -> np.ndarray:
    return np.array([[f_minus_one(a, b, eta) for b in PAIR_STATES] for a in PAIR_STATES])


def g_matrix(k_mat: np.ndarray) -> np.ndarray:
    return np.array([[g_factor(a, b, k_mat) for b in PAIR_STATES] for a in PAIR_STATES])


def a_initial_matrix(eta: EtaTable, k_mat: np.ndarray) -> np.ndarray:
    return np.array([[a_initial(a, b, eta, k_mat) for b in PAIR_STATES] for a in PAIR_STATES])


def a_interior_matrix(eta: EtaTable, k_mat: np.ndarray) -> np.ndarray:
    return np.array([[a_interior(a, b, eta, k_mat) for b in PAIR_STATES] for a in PAIR_STATES])

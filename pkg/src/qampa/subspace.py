"""Exact statevector simulation inside the fixed-Hamming-weight subspace.

Amplitudes are indexed by the lexicographic order of a :class:`FeasibleBasis`;
the gates below never leave that subspace, so states of size C(n, kappa)
replace the full 2**n vector.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import _kernels
from .problem import EnergyTable, FeasibleBasis, pair_index


class SubspaceState:
    """Complex amplitude vector over a feasible basis. Gates mutate in place."""

    def __init__(self, basis: FeasibleBasis, amplitudes: np.ndarray):
        amps = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amps.shape != (len(basis),):
            raise ValueError(f"amplitudes must have shape ({len(basis)},), got {amps.shape}")
        self.basis = basis
        self.amplitudes = amps

    def copy(self) -> SubspaceState:
        return SubspaceState(self.basis, self.amplitudes.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self) -> str:
        return f"SubspaceState(n={self.basis.n}, kappa={self.basis.kappa}, norm={self.norm:.12f})"

    def to_dict(self) -> dict:
        return {
            "n": self.basis.n,
            "kappa": self.basis.kappa,
            "states": self.basis.bitstrings(),
            "re": self.amplitudes.real.tolist(),
            "im": self.amplitudes.imag.tolist(),
        }

    def dump(self, path) -> Path:
        """Debug dump of the amplitudes as JSON."""
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=1) + "\n")
        return path


def dicke_state(basis: FeasibleBasis) -> SubspaceState:
    """Uniform superposition over the feasible set."""
    if len(basis) == 0:
        raise ValueError("empty basis")
    dim = len(basis)
    return SubspaceState(basis, np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128))


def random_state(basis: FeasibleBasis, rng: np.random.Generator) -> SubspaceState:
    v = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    return SubspaceState(basis, v / np.linalg.norm(v))


def _partner_row(state: SubspaceState, n: int, m: int) -> np.ndarray:
    nq = state.basis.n
    if n == m:
        raise ValueError(f"two-qubit gate needs distinct qubits, got ({n}, {m})")
    if not (0 <= n < nq and 0 <= m < nq):
        raise ValueError(f"qubit indices ({n}, {m}) out of range for n={nq}")
    return state.basis.partner_table[pair_index(n, m, nq)]


def apply_zz(state: SubspaceState, n: int, m: int, gamma: float, J_nm: float = 1.0) -> SubspaceState:
    """exp(i * gamma * J_nm * Z_n Z_m)."""
    _kernels.zz(state.amplitudes, _partner_row(state, n, m), float(gamma * J_nm))
    return state


def apply_xy(state: SubspaceState, n: int, m: int, beta: float) -> SubspaceState:
    """exp(i * beta * (X_n X_m + Y_n Y_m))."""
    _kernels.xy(state.amplitudes, _partner_row(state, n, m), float(beta))
    return state


def apply_mp(state: SubspaceState, n: int, m: int, gamma: float, beta: float,
             J_nm: float = 1.0) -> SubspaceState:
    """Mixer-phaser gate: the ZZ phase first, then the XY mixer."""
    _kernels.mp(state.amplitudes, _partner_row(state, n, m), float(gamma * J_nm), float(beta))
    return state


def field_diagonal(basis: FeasibleBasis, h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != (basis.n,):
        raise ValueError(f"h must have shape ({basis.n},), got {h.shape}")
    return basis.spins @ h


def apply_field_phases(state: SubspaceState, gamma: float, h) -> SubspaceState:
    """exp(i * gamma * sum_n h_n Z_n)."""
    _kernels.diag(state.amplitudes, field_diagonal(state.basis, h), float(gamma))
    return state


def probabilities(state: SubspaceState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def expectation_epsilon(state: SubspaceState, table: EnergyTable) -> float:
    if len(table) != len(state.basis):
        raise ValueError("energy table does not match the state's basis")
    return float(np.dot(probabilities(state), table.eps))

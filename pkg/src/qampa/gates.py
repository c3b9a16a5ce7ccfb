"""Dense 2x2 / 4x4 gate matrices in closed form.

Two-qubit matrices use the basis |00>, |01>, |10>, |11> with the first qubit as
the most significant bit. Single-qubit rotations follow the usual
``R_a(t) = exp(-i t A / 2)`` convention.
"""
from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0 + 0j, -1.0])

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CX_REV = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def rx(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def zz(theta: float) -> np.ndarray:
    """exp(i theta Z Z)."""
    a, b = np.exp(1j * theta), np.exp(-1j * theta)
    return np.diag([a, b, b, a])


def xy(phi: float) -> np.ndarray:
    """exp(i phi (X X + Y Y))."""
    c, s = np.cos(2 * phi), 1j * np.sin(2 * phi)
    return np.array([[1, 0, 0, 0], [0, c, s, 0], [0, s, c, 0], [0, 0, 0, 1]], dtype=complex)


def mp(theta: float, phi: float) -> np.ndarray:
    """Mixer-phaser: xy(phi) @ zz(theta)."""
    return xy(phi) @ zz(theta)


def z_phase(theta: float) -> np.ndarray:
    """exp(i theta Z)."""
    return np.diag([np.exp(1j * theta), np.exp(-1j * theta)])


def fused_swap(theta: float, phi: float) -> np.ndarray:
    """SWAP @ exp(i (theta ZZ + phi (XX + YY)))."""
    return SWAP @ mp(theta, phi)


SINGLE = {"rx": rx, "ry": ry, "rz": rz}
TWO = {"zz": zz, "xy": xy}


def op_matrix(name: str, params=()) -> np.ndarray:
    if name == "cx":
        return CX
    if name == "swap":
        return SWAP
    if name == "h":
        return H
    if name in SINGLE:
        return SINGLE[name](*params)
    if name in TWO:
        return TWO[name](*params)
    raise KeyError(f"no matrix for gate {name!r}")


def phase_distance(A: np.ndarray, B: np.ndarray) -> float:
    """min over global phases of the max-abs entry difference between A and B."""
    ov = np.vdot(B, A)
    ph = ov / abs(ov) if abs(ov) > 1e-300 else 1.0
    return float(np.max(np.abs(A - ph * B)))

"""Hot loops of the subspace simulator and the BEST_R objective.

Two interchangeable implementations live here: numba ``@njit`` kernels and a
pure-numpy fallback. ``QAMPA_BACKEND=numpy`` (or a missing numba) selects the
fallback at import time; ``use_backend`` switches at runtime for benchmarks.

Program encoding used by ``run_program``: one row ``(opcode, pair, round)``
per gate plus a float coefficient. Opcodes:

    0  ZZ     phase exp(i * gamma * coef * Z Z)
    1  XY     mixer exp(i * beta * coef * (XX + YY))
    2  MP     XY(beta) @ ZZ(gamma * coef) on the same pair
    3  FIELD  diagonal exp(i * gamma * sum_n h_n Z_n); pair ignored
"""
from __future__ import annotations

import os

import numpy as np

OP_ZZ, OP_XY, OP_MP, OP_FIELD = 0, 1, 2, 3

try:
    import numba
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# --------------------------------------------------------------------------- #
# numba kernels
# --------------------------------------------------------------------------- #
@njit(cache=True, nogil=True)
def _nb_zz(amps, partner, theta):
    same = np.exp(1j * theta)
    diff = np.exp(-1j * theta)
    for k in range(amps.size):
        if partner[k] < 0:
            amps[k] *= same
        else:
            amps[k] *= diff


@njit(cache=True, nogil=True)
def _nb_xy(amps, partner, phi):
    c = np.cos(2.0 * phi)
    s = 1j * np.sin(2.0 * phi)
    for k in range(amps.size):
        j = partner[k]
        if j > k:
            a = amps[k]
            b = amps[j]
            amps[k] = c * a + s * b
            amps[j] = c * b + s * a


@njit(cache=True, nogil=True)
def _nb_mp(amps, partner, theta, phi):
    same = np.exp(1j * theta)
    diff = np.exp(-1j * theta)
    c = np.cos(2.0 * phi) * diff
    s = 1j * np.sin(2.0 * phi) * diff
    for k in range(amps.size):
        j = partner[k]
        if j < 0:
            amps[k] *= same
        elif j > k:
            a = amps[k]
            b = amps[j]
            amps[k] = c * a + s * b
            amps[j] = c * b + s * a


@njit(cache=True, nogil=True)
def _nb_diag(amps, diag, gamma):
    for k in range(amps.size):
        amps[k] *= np.exp(1j * gamma * diag[k])


@njit(cache=True, nogil=True)
def _nb_run_program(amps, partner, field_diag, ops, coefs, gammas, betas):
    for i in range(ops.shape[0]):
        op = ops[i, 0]
        pair = ops[i, 1]
        r = ops[i, 2]
        if op == 0:
            _nb_zz(amps, partner[pair], gammas[r] * coefs[i])
        elif op == 1:
            _nb_xy(amps, partner[pair], betas[r] * coefs[i])
        elif op == 2:
            _nb_mp(amps, partner[pair], gammas[r] * coefs[i], betas[r])
        else:
            _nb_diag(amps, field_diag, gammas[r])


@njit(cache=True, nogil=True)
def _nb_best_r(amps, order, starts, group_eps, R):
    ng = starts.size
    total = 0.0
    for k in range(amps.size):
        total += amps[k].real ** 2 + amps[k].imag ** 2
    # tail mass per group, accumulated from the top so 1 - F stays accurate
    value = 0.0
    tail_next = 0.0
    end = order.size
    for g in range(ng - 1, -1, -1):
        mass = 0.0
        for t in range(starts[g], end):
            a = amps[order[t]]
            mass += a.real ** 2 + a.imag ** 2
        end = starts[g]
        tail = tail_next + mass / total
        value += group_eps[g] * (tail ** R - tail_next ** R)
        tail_next = tail
    return value


# --------------------------------------------------------------------------- #
# numpy fallback
# --------------------------------------------------------------------------- #
def _np_zz(amps, partner, theta):
    amps *= np.where(partner < 0, np.exp(1j * theta), np.exp(-1j * theta))


def _np_lo_hi(partner):
    lo = np.flatnonzero(partner > np.arange(partner.size))
    return lo, partner[lo]


def _np_xy(amps, partner, phi):
    lo, hi = _np_lo_hi(partner)
    c = np.cos(2.0 * phi)
    s = 1j * np.sin(2.0 * phi)
    a, b = amps[lo], amps[hi]
    amps[lo] = c * a + s * b
    amps[hi] = c * b + s * a


def _np_mp(amps, partner, theta, phi):
    _np_zz(amps, partner, theta)
    _np_xy(amps, partner, phi)


def _np_diag(amps, diag, gamma):
    amps *= np.exp(1j * gamma * diag)


def _np_run_program(amps, partner, field_diag, ops, coefs, gammas, betas):
    for (op, pair, r), coef in zip(ops.tolist(), coefs.tolist()):
        if op == OP_ZZ:
            _np_zz(amps, partner[pair], gammas[r] * coef)
        elif op == OP_XY:
            _np_xy(amps, partner[pair], betas[r] * coef)
        elif op == OP_MP:
            _np_mp(amps, partner[pair], gammas[r] * coef, betas[r])
        else:
            _np_diag(amps, field_diag, gammas[r])


def _np_best_r(amps, order, starts, group_eps, R):
    probs = np.abs(amps[order]) ** 2
    probs /= probs.sum()
    mass = np.add.reduceat(probs, starts)
    tail = np.cumsum(mass[::-1])[::-1]
    tail_next = np.append(tail[1:], 0.0)
    return float(np.dot(group_eps, tail ** R - tail_next ** R))


_BACKENDS = {
    "numba": dict(zz=_nb_zz, xy=_nb_xy, mp=_nb_mp, diag=_nb_diag,
                  run_program=_nb_run_program, best_r=_nb_best_r),
    "numpy": dict(zz=_np_zz, xy=_np_xy, mp=_np_mp, diag=_np_diag,
                  run_program=_np_run_program, best_r=_np_best_r),
}

zz = xy = mp = diag = run_program = best_r = None
BACKEND = ""


def use_backend(name: str) -> None:
    """Rebind the module-level kernel names to ``name`` ("numba" or "numpy")."""
    global zz, xy, mp, diag, run_program, best_r, BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    k = _BACKENDS[name]
    zz, xy, mp, diag = k["zz"], k["xy"], k["mp"], k["diag"]
    run_program, best_r = k["run_program"], k["best_r"]
    BACKEND = name


def _default_backend() -> str:
    name = os.environ.get("QAMPA_BACKEND", "").strip().lower()
    if name:
        return name
    return "numba" if HAS_NUMBA else "numpy"


use_backend(_default_backend())

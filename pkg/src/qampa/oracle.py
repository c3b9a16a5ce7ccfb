"""Brute-force references: full 2**n simulation, exhaustive and Monte-Carlo
<BEST_R>, and a p = 1 grid search.

``dense_execute`` builds every gate as an explicit matrix and applies it to the
whole register; it shares no code with the subspace kernels.
"""
from __future__ import annotations

import itertools

import numpy as np

from . import gates
from .problem import FeasibleBasis, ProblemInstance, energy_table

MAX_DENSE_QUBITS = 8


class DenseState:
    def __init__(self, vector: np.ndarray):
        v = np.asarray(vector, dtype=complex).reshape(-1)
        n = int(round(np.log2(v.size)))
        if 1 << n != v.size:
            raise ValueError("dense state length must be a power of two")
        if n > MAX_DENSE_QUBITS:
            raise ValueError(f"dense oracle refuses n={n} > {MAX_DENSE_QUBITS}")
        self.n = n
        self.vector = v

    @classmethod
    def embed(cls, basis: FeasibleBasis, amplitudes: np.ndarray) -> DenseState:
        v = np.zeros(1 << basis.n, dtype=complex)
        v[basis.states] = amplitudes
        return cls(v)

    @classmethod
    def dicke(cls, n: int, kappa: int) -> DenseState:
        b = FeasibleBasis(n, kappa)
        return cls.embed(b, np.full(len(b), 1 / np.sqrt(len(b))))

    def copy(self) -> DenseState:
        return DenseState(self.vector.copy())

    def restrict(self, basis: FeasibleBasis) -> np.ndarray:
        return self.vector[basis.states]

    def leakage(self, basis: FeasibleBasis) -> float:
        """Largest amplitude outside the given weight sector."""
        mask = np.ones(self.vector.size, dtype=bool)
        mask[basis.states] = False
        return float(np.max(np.abs(self.vector[mask]), initial=0.0))


def apply_1q(vec: np.ndarray, n: int, U: np.ndarray, q: int) -> np.ndarray:
    psi = vec.reshape((2,) * n)
    psi = np.moveaxis(np.tensordot(U, psi, axes=([1], [q])), 0, q)
    return psi.reshape(-1)


def apply_2q(vec: np.ndarray, n: int, U: np.ndarray, q0: int, q1: int) -> np.ndarray:
    """Apply a 4x4 ``U`` with ``q0`` as its most significant qubit."""
    psi = vec.reshape((2,) * n)
    U4 = U.reshape(2, 2, 2, 2)
    psi = np.tensordot(U4, psi, axes=([2, 3], [q0, q1]))
    psi = np.moveaxis(psi, [0, 1], [q0, q1])
    return psi.reshape(-1)


def dense_execute(plan, schedule, initial: DenseState | None = None) -> DenseState:
    """Run a circuit plan on the full register, one explicit matrix per gate."""
    n = plan.n
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense oracle refuses n={n} > {MAX_DENSE_QUBITS}")
    if schedule.p != plan.p:
        raise ValueError("schedule / plan round mismatch")
    vec = (DenseState.dicke(n, plan.instance.kappa) if initial is None else initial).vector.copy()
    h = plan.instance.fields
    for ps in plan.passes:
        g, b = schedule.gammas[ps.round], schedule.betas[ps.round]
        for gate in ps.gates:
            if gate.family == "field":
                for q in range(n):
                    if h[q] != 0.0:
                        vec = apply_1q(vec, n, gates.z_phase(g * h[q]), q)
                continue
            a, c = gate.pair
            if gate.family == "zz":
                U = gates.zz(g * gate.coef)
            elif gate.family == "xy":
                U = gates.xy(b * gate.coef)
            elif gate.family == "mp":
                U = gates.mp(g * gate.coef, b)
            else:
                raise ValueError(f"unknown gate family {gate.family!r}")
            vec = apply_2q(vec, n, U, a, c)
    return DenseState(vec)


def brute_force_spectrum(instance: ProblemInstance) -> tuple[np.ndarray, np.ndarray]:
    """(weight-kappa bitstrings as ints, raw energies) by scalar loops over all 2**n strings."""
    n = instance.n
    J = instance.coupling_matrix
    labels, energies = [], []
    for x in range(1 << n):
        bits = [(x >> (n - 1 - q)) & 1 for q in range(n)]
        if sum(bits) != instance.kappa:
            continue
        s = [1 - 2 * t for t in bits]
        e = sum(J[i, j] * s[i] * s[j] for i in range(n) for j in range(i + 1, n))
        e += sum(instance.fields[i] * s[i] for i in range(n))
        labels.append(x)
        energies.append(e)
    return np.array(labels), np.array(energies)


def exhaustive_best_r(probs, eps, R: int) -> float:
    """E[min eps over R i.i.d. draws] by enumerating all |support|**R outcomes."""
    probs = np.asarray(probs, float)
    eps = np.asarray(eps, float)
    total = 0.0
    for combo in itertools.product(range(probs.size), repeat=R):
        w = 1.0
        for k in combo:
            w *= probs[k]
        if w:
            total += w * min(eps[k] for k in combo)
    return total


def mc_best_r(probs, eps, R: int, samples: int, seed: int = 0,
              chunk: int = 200_000) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of the best-of-R sample."""
    probs = np.asarray(probs, float)
    probs = probs / probs.sum()
    eps = np.asarray(eps, float)
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    s1 = s2 = 0.0
    shift = None
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        draws = np.searchsorted(cdf, rng.random((m, R)), side="right")
        mins = eps[np.minimum(draws, eps.size - 1)].min(axis=1)
        if shift is None:
            shift = mins[0]  # shifted sums keep the variance exact for constant samples
        d = mins - shift
        s1 += d.sum()
        s2 += np.dot(d, d)
        done += m
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return float(shift + mean), float(np.sqrt(var / samples))


def grid_search_p1(instance: ProblemInstance, kind, resolution: int, R: int = 5,
                   ordering_seed: int = 0) -> tuple[float, float, float]:
    """Best (gamma, beta, <BEST_R>) on a ``resolution x resolution`` grid over the angle domains.

    Grid points are ``k * max / resolution`` for ``k = 0..resolution-1``, so a
    resolution that divides another gives a subset of its points.
    """
    from .ansatz import AngleSchedule, angle_domains, build, execute
    from .metrics import expected_best_r, score
    from .subspace import probabilities

    table = energy_table(instance, FeasibleBasis(instance.n, instance.kappa))
    plan = build(kind, instance, 1, ordering_seed)
    gmax, bmax = angle_domains(instance)
    best = (0.0, 0.0, np.inf)
    for i in range(resolution):
        g = gmax * i / resolution
        for j in range(resolution):
            b = bmax * j / resolution
            st = execute(plan, AngleSchedule((g,), (b,)))
            val = expected_best_r(score(probabilities(st), table), R)
            if val < best[2]:
                best = (g, b, val)
    return best

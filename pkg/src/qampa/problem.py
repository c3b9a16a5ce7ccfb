"""Cardinality-constrained weighted MaxCut instances (WeightedMaxCutGSP).

Spin convention used throughout the package: ``s = 1 - 2*bit`` so that bit 0
maps to the +1 eigenvalue of Z. Qubit 0 is the leftmost character of a
bitstring and the most significant bit of an integer basis label.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1
DEFAULT_COEFFS = (-1.0, -0.5, 0.5, 1.0)


class InstanceParseError(ValueError):
    """Raised when an instance file cannot be decoded."""


class DegenerateSpectrumError(ValueError):
    """Raised when every feasible state has the same energy."""


def pair_list(n: int) -> list[tuple[int, int]]:
    """Unordered pairs ``(a, b)``, ``a < b``, in row-major upper-triangle order."""
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def pair_index(a: int, b: int, n: int) -> int:
    if a > b:
        a, b = b, a
    return a * n - a * (a + 1) // 2 + (b - a - 1)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    n: int
    kappa: int
    couplings: np.ndarray
    fields: np.ndarray
    id: str = ""
    seed: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0 <= self.kappa <= self.n:
            raise ValueError(f"kappa={self.kappa} outside [0, {self.n}]")
        J = np.asarray(self.couplings, dtype=float).reshape(-1)
        h = np.asarray(self.fields, dtype=float).reshape(-1)
        if J.size != self.n * (self.n - 1) // 2:
            raise ValueError(f"expected {self.n * (self.n - 1) // 2} couplings, got {J.size}")
        if h.size != self.n:
            raise ValueError(f"expected {self.n} fields, got {h.size}")
        J.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "fields", h)

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (
            self.n == other.n
            and self.kappa == other.kappa
            and self.id == other.id
            and self.seed == other.seed
            and np.array_equal(self.couplings, other.couplings)
            and np.array_equal(self.fields, other.fields)
        )

    __hash__ = None

    def coupling(self, a: int, b: int) -> float:
        if a == b:
            raise ValueError("coupling needs two distinct qubits")
        return float(self.couplings[pair_index(a, b, self.n)])

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        """Symmetric ``n x n`` matrix with zero diagonal."""
        M = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, k=1)
        M[iu] = self.couplings
        return M + M.T

    @property
    def has_fields(self) -> bool:
        return bool(np.any(self.fields != 0.0))

    def with_unit_couplings(self) -> ProblemInstance:
        """Copy with every J_nm replaced by 1 (used by the *_NOJ circuits)."""
        return ProblemInstance(self.n, self.kappa, np.ones_like(self.couplings), self.fields,
                               id=self.id, seed=self.seed)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "n": self.n,
            "kappa": self.kappa,
            "seed": self.seed,
            "couplings": [[a, b, float(J)] for (a, b), J in zip(pair_list(self.n), self.couplings)],
            "fields": [float(x) for x in self.fields],
        }

    @classmethod
    def from_dict(cls, data: dict, source: str = "<dict>") -> ProblemInstance:
        try:
            n = int(data["n"])
            kappa = int(data["kappa"])
            raw = data["couplings"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceParseError(f"{source}: missing or invalid field ({exc})") from exc
        npairs = n * (n - 1) // 2
        if len(raw) != npairs:
            raise InstanceParseError(
                f"{source}: 'couplings' has {len(raw)} entries, expected n(n-1)/2 = {npairs}")
        J = np.full(npairs, np.nan)
        for k, entry in enumerate(raw):
            try:
                a, b, val = int(entry[0]), int(entry[1]), float(entry[2])
            except (TypeError, ValueError, IndexError) as exc:
                raise InstanceParseError(f"{source}: couplings[{k}] malformed: {entry!r}") from exc
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise InstanceParseError(f"{source}: couplings[{k}] bad pair ({a}, {b})")
            idx = pair_index(a, b, n)
            if not np.isnan(J[idx]):
                raise InstanceParseError(f"{source}: couplings[{k}] duplicates pair ({a}, {b})")
            J[idx] = val
        fields = data.get("fields")
        if fields is None:
            fields = [0.0] * n
        if len(fields) != n:
            raise InstanceParseError(f"{source}: 'fields' has {len(fields)} entries, expected {n}")
        seed = data.get("seed")
        try:
            return cls(n, kappa, J, np.asarray(fields, dtype=float),
                       id=str(data.get("id", "")), seed=None if seed is None else int(seed))
        except ValueError as exc:
            raise InstanceParseError(f"{source}: {exc}") from exc


def generate_instance(n: int, kappa: int, coeff_set: Sequence[float] = DEFAULT_COEFFS,
                      seed: int = 0, fields: Sequence[float] | None = None) -> ProblemInstance:
    """Draw a fully connected instance with couplings i.i.d. uniform over ``coeff_set``."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be a positive even integer >= 2, got {n}")
    values = np.asarray(list(coeff_set), dtype=float)
    if values.size == 0:
        raise ValueError("coeff_set must be non-empty")
    rng = np.random.default_rng(seed)
    J = values[rng.integers(0, values.size, size=n * (n - 1) // 2)]
    h = np.zeros(n) if fields is None else np.asarray(fields, dtype=float)
    return ProblemInstance(n, kappa, J, h, id=f"wmc-n{n}-k{kappa}-s{seed}", seed=seed)


def spins(bits: np.ndarray) -> np.ndarray:
    return 1 - 2 * np.asarray(bits, dtype=np.int64)


def _as_bits(bitstring, n: int) -> np.ndarray:
    if isinstance(bitstring, str):
        if len(bitstring) != n or set(bitstring) - {"0", "1"}:
            raise ValueError(f"bitstring {bitstring!r} is not an {n}-bit string")
        return np.fromiter((c == "1" for c in bitstring), dtype=np.int64, count=n)
    bits = np.asarray(bitstring, dtype=np.int64).reshape(-1)
    if bits.size != n:
        raise ValueError(f"bitstring has length {bits.size}, expected {n}")
    return bits


def evaluate_cost(instance: ProblemInstance, bitstring) -> float:
    s = spins(_as_bits(bitstring, instance.n))
    iu = np.triu_indices(instance.n, k=1)
    return float(np.dot(instance.couplings, s[iu[0]] * s[iu[1]]) + np.dot(instance.fields, s))


class FeasibleBasis:
    """All n-bit strings of Hamming weight kappa, in lexicographic order.

    ``states`` holds integer labels (qubit 0 = MSB), so lexicographic order of
    the strings coincides with ascending integer order.
    """

    def __init__(self, n: int, kappa: int):
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if not 0 <= kappa <= n:
            raise ValueError(f"kappa={kappa} outside [0, {n}]")
        self.n = n
        self.kappa = kappa
        self.states = _weight_k_states(n, kappa)
        self.states.flags.writeable = False
        self.index = {int(s): k for k, s in enumerate(self.states)}

    def __len__(self) -> int:
        return self.states.size

    def __repr__(self) -> str:
        return f"FeasibleBasis(n={self.n}, kappa={self.kappa}, size={len(self)})"

    def bitstring(self, k: int) -> str:
        return format(int(self.states[k]), f"0{self.n}b")

    def bitstrings(self) -> list[str]:
        return [self.bitstring(k) for k in range(len(self))]

    def index_of(self, bitstring: str) -> int:
        return self.index[int(bitstring, 2)]

    @cached_property
    def bits(self) -> np.ndarray:
        """``(|F|, n)`` int8 array; column q is the bit of qubit q."""
        shifts = np.arange(self.n - 1, -1, -1, dtype=np.int64)
        return ((self.states[:, None] >> shifts) & 1).astype(np.int8)

    @cached_property
    def spins(self) -> np.ndarray:
        return (1 - 2 * self.bits.astype(np.int64)).astype(np.float64)

    @cached_property
    def partner_table(self) -> np.ndarray:
        """``(n(n-1)/2, |F|)`` int32 table for XY mixing.

        Entry ``[pair, k]`` is the index of the state with the bits of the pair
        exchanged, or -1 when those bits are equal (state untouched by XY).
        """
        n = self.n
        pairs = pair_list(n)
        table = np.full((len(pairs), len(self)), -1, dtype=np.int32)
        states = self.states
        for p, (a, b) in enumerate(pairs):
            ma = 1 << (n - 1 - a)
            mb = 1 << (n - 1 - b)
            differ = ((states & ma) != 0) != ((states & mb) != 0)
            swapped = states[differ] ^ (ma | mb)
            table[p, differ] = np.searchsorted(states, swapped)
        table.flags.writeable = False
        return table


def _weight_k_states(n: int, kappa: int) -> np.ndarray:
    out = np.empty(comb(n, kappa), dtype=np.int64)
    # Gosper's hack walks weight-k integers in ascending order.
    if kappa == 0:
        out[0] = 0
        return out
    x = (1 << kappa) - 1
    limit = 1 << n
    k = 0
    while x < limit:
        out[k] = x
        k += 1
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r
    return out


def feasible_basis(n: int, kappa: int) -> FeasibleBasis:
    return FeasibleBasis(n, kappa)


def raw_energies(instance: ProblemInstance, basis: FeasibleBasis) -> np.ndarray:
    S = basis.spins
    return 0.5 * np.einsum("ki,ij,kj->k", S, instance.coupling_matrix, S) + S @ instance.fields


@dataclass(frozen=True)
class EnergyTable:
    raw: np.ndarray
    eps: np.ndarray
    e_min: float
    e_max: float
    argmin: int = field(default=0)
    argmax: int = field(default=0)

    def __len__(self) -> int:
        return self.raw.size


def energy_table(instance: ProblemInstance, basis: FeasibleBasis) -> EnergyTable:
    """Raw energies and min-max normalized energies over the feasible set."""
    if basis.n != instance.n or basis.kappa != instance.kappa:
        raise ValueError(f"{basis!r} does not match instance (n={instance.n}, kappa={instance.kappa})")
    E = raw_energies(instance, basis)
    lo, hi = float(E.min()), float(E.max())
    if hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        raise DegenerateSpectrumError(f"feasible spectrum is constant ({lo})")
    eps = (E - lo) / (hi - lo)
    raw = E.copy()
    raw.flags.writeable = False
    eps.flags.writeable = False
    return EnergyTable(raw, eps, lo, hi, int(E.argmin()), int(E.argmax()))


def save_instance(instance: ProblemInstance, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(instance.to_dict(), indent=1) + "\n")
    return path


def load_instance(path) -> ProblemInstance:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InstanceParseError(f"{path}: top-level value must be an object")
    return ProblemInstance.from_dict(data, source=str(path))


def complement(bitstring: str) -> str:
    return bitstring.translate(str.maketrans("01", "10"))


def iter_bitstrings(n: int) -> Iterable[str]:
    for x in range(1 << n):
        yield format(x, f"0{n}b")

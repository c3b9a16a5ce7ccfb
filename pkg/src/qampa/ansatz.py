"""Logical circuits for QAOA, QAMPA and their J-free / XY-only variants.

Every round is laid out along one or more passes of the odd-even swap network.
Pass ``k`` of a circuit starts from the random initial layout when ``k`` is even
and from its reversal when ``k`` is odd, which is exactly where the previous
pass left the qubits. The gate order of a plan is therefore the order in which
a line-connected device meets the pairs, and the compiler reproduces it.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .network import build_swap_network
from .problem import FeasibleBasis, ProblemInstance, pair_index
from .subspace import SubspaceState, dicke_state, field_diagonal


class AnsatzKind(str, enum.Enum):
    QAOA = "QAOA"
    QAMPA = "QAMPA"
    QAOA_NOJ = "QAOA_NOJ"
    QAMPA_NOJ = "QAMPA_NOJ"
    XY_WEIGHTED = "XY_WEIGHTED"
    XY_NOJ = "XY_NOJ"

    @classmethod
    def parse(cls, value) -> AnsatzKind:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper().replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown ansatz kind {value!r}; expected one of "
                             f"{[k.value for k in cls]}") from None

    @property
    def uses_gamma(self) -> bool:
        return self not in (AnsatzKind.XY_WEIGHTED, AnsatzKind.XY_NOJ)

    @property
    def passes_per_round(self) -> int:
        return 2 if self in (AnsatzKind.QAOA, AnsatzKind.QAOA_NOJ) else 1


@dataclass(frozen=True)
class AngleSchedule:
    """Per-round angles; the flat vector form interleaves (g1, b1, g2, b2, ...)."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(x) for x in self.gammas)
        b = tuple(float(x) for x in self.betas)
        if len(g) != len(b):
            raise ValueError(f"{len(g)} gammas vs {len(b)} betas")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def p(self) -> int:
        return len(self.gammas)

    @classmethod
    def zeros(cls, p: int) -> AngleSchedule:
        return cls((0.0,) * p, (0.0,) * p)

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> AngleSchedule:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size % 2:
            raise ValueError("angle vector must have even length")
        return cls(tuple(x[0::2]), tuple(x[1::2]))

    def to_vector(self) -> np.ndarray:
        out = np.empty(2 * self.p)
        out[0::2] = self.gammas
        out[1::2] = self.betas
        return out

    def negated(self) -> AngleSchedule:
        return AngleSchedule(tuple(-g for g in self.gammas), tuple(-b for b in self.betas))

    def extended(self, gamma: float, beta: float) -> AngleSchedule:
        return AngleSchedule(self.gammas + (gamma,), self.betas + (beta,))

    def reduced(self, gamma_max: float, beta_max: float = np.pi) -> AngleSchedule:
        """Angles folded into ``[0, gamma_max) x [0, beta_max)`` for reporting."""
        return AngleSchedule(tuple(float(np.mod(g, gamma_max)) for g in self.gammas),
                             tuple(float(np.mod(b, beta_max)) for b in self.betas))


@dataclass(frozen=True)
class Gate:
    """One logical gate. ``pair`` is None for the per-layer field phases."""

    family: str  # "zz" | "xy" | "mp" | "field"
    pair: tuple[int, int] | None
    coef: float = 1.0
    layer: int = -1  # swap-network layer that meets the pair
    wires: tuple[int, int] | None = None


@dataclass(frozen=True)
class Pass:
    round: int
    family: str
    layout: tuple[int, ...]  # logical qubit on each wire before the pass
    gates: tuple[Gate, ...]

    @property
    def pair_gates(self) -> tuple[Gate, ...]:
        return tuple(g for g in self.gates if g.pair is not None)


@dataclass(frozen=True, eq=False)
class CircuitPlan:
    kind: AnsatzKind
    instance: ProblemInstance
    p: int
    ordering_seed: int
    passes: tuple[Pass, ...]
    initial_layout: tuple[int, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def rounds(self) -> list[list[Gate]]:
        out: list[list[Gate]] = [[] for _ in range(self.p)]
        for ps in self.passes:
            out[ps.round].extend(ps.gates)
        return out

    @property
    def final_layout(self) -> tuple[int, ...]:
        if len(self.passes) % 2:
            return tuple(reversed(self.initial_layout))
        return self.initial_layout

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for ps in self.passes:
            for g in ps.gates:
                counts[g.family] = counts.get(g.family, 0) + 1
        return counts

    @cached_property
    def program(self) -> tuple[np.ndarray, np.ndarray]:
        """Kernel encoding ``(ops, coefs)`` of the plan, see ``_kernels``."""
        opcode = {"zz": _kernels.OP_ZZ, "xy": _kernels.OP_XY,
                  "mp": _kernels.OP_MP, "field": _kernels.OP_FIELD}
        rows, coefs = [], []
        for ps in self.passes:
            for g in ps.gates:
                pidx = -1 if g.pair is None else pair_index(g.pair[0], g.pair[1], self.n)
                rows.append((opcode[g.family], max(pidx, 0), ps.round))
                coefs.append(g.coef)
        ops = np.array(rows, dtype=np.int64).reshape(-1, 3)
        return ops, np.array(coefs, dtype=np.float64)

    @cached_property
    def basis(self) -> FeasibleBasis:
        return get_basis(self.instance.n, self.instance.kappa)

    @cached_property
    def field_diag(self) -> np.ndarray:
        return field_diagonal(self.basis, self.instance.fields)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "instance_id": self.instance.id,
            "n": self.n,
            "p": self.p,
            "ordering_seed": self.ordering_seed,
            "initial_layout": list(self.initial_layout),
            "passes": [
                {"round": ps.round, "family": ps.family, "layout": list(ps.layout),
                 "gates": [{"family": g.family, "pair": None if g.pair is None else list(g.pair),
                            "coef": g.coef, "layer": g.layer,
                            "wires": None if g.wires is None else list(g.wires)}
                           for g in ps.gates]}
                for ps in self.passes
            ],
        }

    def dump(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=1) + "\n")
        return path


@lru_cache(maxsize=32)
def get_basis(n: int, kappa: int) -> FeasibleBasis:
    return FeasibleBasis(n, kappa)


def initial_layout(n: int, ordering_seed: int) -> tuple[int, ...]:
    rng = np.random.default_rng(ordering_seed)
    return tuple(int(x) for x in rng.permutation(n))


def _network_pass(n: int, layout: Sequence[int]) -> list[tuple[int, tuple[int, int], tuple[int, int]]]:
    return build_swap_network(n).meet_sequence(layout)


def gate_order(n: int, ordering_seed: int = 0) -> list[tuple[int, int]]:
    """Pairs in the order met by one swap-network pass from a seeded random layout."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return [pair for _, _, pair in _network_pass(n, initial_layout(n, ordering_seed))]


def build(kind, instance: ProblemInstance, p: int, ordering_seed: int = 0) -> CircuitPlan:
    kind = AnsatzKind.parse(kind)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    n = instance.n
    layout0 = initial_layout(n, ordering_seed)
    weighted = kind in (AnsatzKind.QAOA, AnsatzKind.QAMPA, AnsatzKind.XY_WEIGHTED)
    with_field = instance.has_fields

    if kind in (AnsatzKind.QAOA, AnsatzKind.QAOA_NOJ):
        families = ("zz", "xy")
    elif kind in (AnsatzKind.QAMPA, AnsatzKind.QAMPA_NOJ):
        families = ("mp",)
    else:
        families = ("xy",)

    passes = []
    for r in range(p):
        for fam in families:
            k = len(passes)
            layout = layout0 if k % 2 == 0 else tuple(reversed(layout0))
            gates = []
            for ell, wires, (a, b) in _network_pass(n, layout):
                carries_j = fam in ("zz", "mp") or kind is AnsatzKind.XY_WEIGHTED
                coef = instance.coupling(a, b) if (weighted and carries_j) else 1.0
                gates.append(Gate(fam, (a, b), coef, ell, wires))
            if with_field and fam in ("zz", "mp"):
                gates.append(Gate("field", None, 1.0))
            passes.append(Pass(r, fam, tuple(layout), tuple(gates)))
    return CircuitPlan(kind, instance, p, int(ordering_seed), tuple(passes), layout0)


def execute(plan: CircuitPlan, schedule: AngleSchedule, initial_state: SubspaceState | None = None,
            *, inplace: bool = False) -> SubspaceState:
    """Apply the plan's rounds in order. Starts from the Dicke state when no state is given."""
    if schedule.p != plan.p:
        raise ValueError(f"schedule has {schedule.p} rounds, plan has {plan.p}")
    if initial_state is None:
        state = dicke_state(plan.basis)
    else:
        if initial_state.basis.n != plan.n or initial_state.basis.kappa != plan.instance.kappa:
            raise ValueError("initial state basis does not match the plan's instance")
        state = initial_state if inplace else initial_state.copy()
    ops, coefs = plan.program
    _kernels.run_program(state.amplitudes, state.basis.partner_table, plan.field_diag, ops, coefs,
                         np.asarray(schedule.gammas, dtype=np.float64),
                         np.asarray(schedule.betas, dtype=np.float64))
    return state


def angle_domains(instance: ProblemInstance) -> tuple[float, float]:
    """``(gamma_max, beta_max)`` = (2 pi / smallest nonzero |coefficient|, pi)."""
    coeffs = np.abs(np.concatenate([instance.couplings, instance.fields]))
    nonzero = coeffs[coeffs > 0]
    if nonzero.size == 0:
        raise ValueError("all coefficients are zero; angle domain undefined")
    return 2 * np.pi / float(nonzero.min()), float(np.pi)

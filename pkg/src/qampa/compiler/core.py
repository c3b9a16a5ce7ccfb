"""Swap-network compilation of circuit plans onto a line of qubits."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .. import gates
from ..ansatz import AngleSchedule, AnsatzKind, CircuitPlan
from ..network import build_swap_network
from ..oracle import DenseState, apply_1q, apply_2q, dense_execute
from .synthesis import (CNOT_SET, GATE_SETS, NATIVE_XY_ZZ, NativeOp, native_offsets,
                        synthesize_fused, zyz_angles)


@dataclass(frozen=True)
class FusedGate:
    """SWAP @ exp(i(theta ZZ + phi (XX+YY))) on adjacent wires."""

    family: str
    wires: tuple[int, int]
    pair: tuple[int, int]
    coef: float
    theta: float
    phi: float
    layer: int  # global swap-network layer index
    residual: float


@dataclass(frozen=True, eq=False)
class PhysicalCircuit:
    gate_set: str
    n: int
    kind: AnsatzKind
    p: int
    ops: tuple[NativeOp, ...]
    fused: tuple[FusedGate, ...]
    initial_layout: tuple[int, ...]
    final_layout: tuple[int, ...]
    global_phase: float = 0.0  # exact for NATIVE_XY_ZZ; not tracked for CNOT_SET

    @property
    def layers(self) -> list[list[NativeOp]]:
        """ASAP layering; no layer uses a wire twice."""
        last = [-1] * self.n
        out: list[list[NativeOp]] = []
        for op in self.ops:
            ell = max(last[w] for w in op.wires) + 1
            for w in op.wires:
                last[w] = ell
            if ell == len(out):
                out.append([])
            out[ell].append(op)
        return out

    def count(self, name: str) -> int:
        return sum(1 for op in self.ops if op.name == name)


def _merge_single_qubit(ops: Sequence[NativeOp], n: int) -> list[NativeOp]:
    """Fuse runs of single-qubit rotations on a wire into at most three (ZYZ)."""
    pending: list[np.ndarray | None] = [None] * n
    out: list[NativeOp] = []

    def flush(w):
        U = pending[w]
        pending[w] = None
        if U is None:
            return
        a, b, c = zyz_angles(U)
        for name, t in (("rz", c), ("ry", b), ("rz", a)):
            if abs(np.sin(t / 2)) > 1e-14:
                out.append(NativeOp(name, (w,), (float(t),)))

    for op in ops:
        if op.is_two_qubit:
            for w in op.wires:
                flush(w)
            out.append(op)
        else:
            w = op.wires[0]
            M = gates.op_matrix(op.name, op.params)
            pending[w] = M if pending[w] is None else M @ pending[w]
    for w in range(n):
        flush(w)
    return out


def compile_plan(plan: CircuitPlan, gate_set: str = CNOT_SET,
                 schedule: AngleSchedule | None = None, merge: bool = True) -> PhysicalCircuit:
    """Route ``plan`` through swap networks and synthesize every fused gate.

    QAOA rounds use two network passes (SWAP.ZZ then SWAP.XY); QAMPA and the
    XY-only kinds use one. The layout is tracked independently of the plan and
    each met pair looks up its own gate, so a plan/network mismatch raises.
    """
    if gate_set not in GATE_SETS:
        raise ValueError(f"unsupported gate set {gate_set!r}; choose from {GATE_SETS}")
    schedule = AngleSchedule.zeros(plan.p) if schedule is None else schedule
    if schedule.p != plan.p:
        raise ValueError(f"schedule has {schedule.p} rounds, plan has {plan.p}")
    n = plan.n
    net = build_swap_network(n)
    h = plan.instance.fields
    layout = list(plan.initial_layout)
    ops: list[NativeOp] = []
    fused: list[FusedGate] = []
    phase = 0.0
    off = native_offsets() if gate_set == NATIVE_XY_ZZ else None
    for k, ps in enumerate(plan.passes):
        if tuple(layout) != ps.layout:
            raise RuntimeError(f"pass {k}: layout drifted from plan")
        g, b = schedule.gammas[ps.round], schedule.betas[ps.round]
        by_pair = {gt.pair: gt for gt in ps.pair_gates}
        if len(by_pair) != n * (n - 1) // 2:
            raise RuntimeError(f"pass {k}: plan does not cover every pair once")
        for ell, wires, pair in net.meet_sequence(layout):
            gt = by_pair.pop(pair)
            if gt.family == "zz":
                theta, phi = g * gt.coef, 0.0
            elif gt.family == "xy":
                theta, phi = 0.0, b * gt.coef
            else:
                theta, phi = g * gt.coef, b
            seq, res = synthesize_fused(theta, phi, wires, gate_set)
            ops.extend(seq)
            if off is not None:
                phase += off.phase
            fused.append(FusedGate(gt.family, wires, pair, gt.coef, theta, phi, k * n + ell, res))
        layout = list(net.final_layout(layout))
        if any(gt.family == "field" for gt in ps.gates):
            for w, q in enumerate(layout):
                if h[q] != 0.0:
                    ops.append(NativeOp("rz", (w,), (float(-2 * g * h[q]),)))
    if merge and gate_set == CNOT_SET:
        ops = _merge_single_qubit(ops, n)
    return PhysicalCircuit(gate_set, n, plan.kind, plan.p, tuple(ops), tuple(fused),
                           tuple(plan.initial_layout), tuple(layout), float(phase))


@dataclass(frozen=True)
class DepthReport:
    kind: str
    gate_set: str
    n: int
    p: int
    two_qubit_gates: int  # swap-fused logical gates
    two_qubit_depth: int  # parallel layers of fused gates
    total_depth: int  # ASAP layers of native ops
    native_two_qubit_ops: int
    single_qubit_ops: int
    cnot_count: int
    swap_fused: int
    approx_swap_overhead: int  # p (n-1)^2, approximate formula
    approx_depth_increase: int  # 2 p (n-1), approximate formula

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def depth_report(circuit: PhysicalCircuit) -> DepthReport:
    n, p = circuit.n, circuit.p
    two_q = sum(1 for op in circuit.ops if op.is_two_qubit)
    return DepthReport(
        kind=circuit.kind.value,
        gate_set=circuit.gate_set,
        n=n,
        p=p,
        two_qubit_gates=len(circuit.fused),
        two_qubit_depth=len({f.layer for f in circuit.fused}),
        total_depth=len(circuit.layers),
        native_two_qubit_ops=two_q,
        single_qubit_ops=len(circuit.ops) - two_q,
        cnot_count=circuit.count("cx"),
        swap_fused=len(circuit.fused),
        approx_swap_overhead=p * (n - 1) ** 2,
        approx_depth_increase=2 * p * (n - 1),
    )


def to_wires(vec: np.ndarray, n: int, layout: Sequence[int]) -> np.ndarray:
    """Logical-qubit vector to wire order: wire w carries logical ``layout[w]``."""
    return vec.reshape((2,) * n).transpose(list(layout)).reshape(-1)


def from_wires(vec: np.ndarray, n: int, layout: Sequence[int]) -> np.ndarray:
    inv = np.argsort(layout)
    return vec.reshape((2,) * n).transpose(inv).reshape(-1)


def simulate_physical(circuit: PhysicalCircuit, wire_vector: np.ndarray) -> np.ndarray:
    vec = np.asarray(wire_vector, dtype=complex).copy()
    n = circuit.n
    for op in circuit.ops:
        M = gates.op_matrix(op.name, op.params)
        if op.is_two_qubit:
            vec = apply_2q(vec, n, M, *op.wires)
        else:
            vec = apply_1q(vec, n, M, op.wires[0])
    return vec


def verify_compilation(plan: CircuitPlan, schedule: AngleSchedule, circuit: PhysicalCircuit,
                       initial: DenseState | None = None, seed: int = 0) -> float:
    """|<psi_logical | P^dagger psi_physical>| on the full register.

    Without ``initial`` a seeded random 2**n state is used, which checks the
    compiled unitary on every sector, not only the feasible one.
    """
    n = plan.n
    if initial is None:
        rng = np.random.default_rng(seed)
        v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        initial = DenseState(v / np.linalg.norm(v))
    logical = dense_execute(plan, schedule, initial).vector
    phys = simulate_physical(circuit, to_wires(initial.vector, n, circuit.initial_layout))
    back = from_wires(phys, n, circuit.final_layout)
    return float(min(1.0, abs(np.vdot(logical, back))))

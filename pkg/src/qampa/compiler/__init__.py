"""Routing and synthesis onto a line of qubits."""
from ..network import SwapNetwork, build_swap_network
from .core import (DepthReport, FusedGate, PhysicalCircuit, compile_plan, depth_report,
                   simulate_physical, verify_compilation)
from .qasm import export_qasm, parse_qasm, to_qasm
from .synthesis import (CNOT_SET, GATE_SETS, NATIVE_XY_ZZ, NativeOp, SynthesisError,
                        native_offsets, synthesize_fused)

compile = compile_plan  # noqa: A001 - mirrors the documented operation name

"""Constraint-preserving QAOA / QAMPA ansätze on fixed-Hamming-weight problems."""
from .problem import (
    DegenerateSpectrumError, EnergyTable, FeasibleBasis, ProblemInstance, energy_table,
    evaluate_cost, feasible_basis, generate_instance, load_instance, save_instance,
)
from .subspace import SubspaceState, dicke_state
from .ansatz import AngleSchedule, AnsatzKind, CircuitPlan, angle_domains, build, execute, gate_order
from .metrics import MetricReport, expected_best_r, metric_report, score

__version__ = "0.1.0"

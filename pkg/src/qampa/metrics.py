"""Expected best-of-R normalized energy, <BEST_R>.

For a distribution over feasible states sorted by normalized energy eps,

    <BEST_R> = sum_k eps_k [ (1 - F_{k-1})^R - (1 - F_k)^R ],

with F_k the cumulative probability up to and including group k. It is the
expected minimum of eps over R independent samples, so lower is better and
R = 1 reduces to the plain expectation value.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .problem import EnergyTable
from .subspace import SubspaceState, probabilities

DEFAULT_TIE_TOL = 1e-12
DEFAULT_R = (1, 5)


class InvalidDistributionError(ValueError):
    pass


@dataclass(frozen=True)
class GroupStructure:
    """Sort order of the feasible states and boundaries of equal-eps groups."""

    order: np.ndarray
    starts: np.ndarray
    eps: np.ndarray


def group_structure(eps: np.ndarray, tie_tolerance: float = DEFAULT_TIE_TOL) -> GroupStructure:
    eps = np.asarray(eps, dtype=float)
    order = np.argsort(eps, kind="stable")
    srt = eps[order]
    starts = [0]
    for k in range(1, srt.size):
        if srt[k] - srt[starts[-1]] > tie_tolerance:
            starts.append(k)
    starts = np.asarray(starts, dtype=np.int64)
    return GroupStructure(order.astype(np.int64), starts, srt[starts].copy())


@dataclass(frozen=True)
class ScoredDistribution:
    eps: np.ndarray
    probs: np.ndarray
    cdf: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "cdf", np.cumsum(self.probs))

    def __len__(self) -> int:
        return self.eps.size

    @property
    def groups(self) -> list[tuple[float, float]]:
        return list(zip(self.eps.tolist(), self.probs.tolist()))

    def tail(self) -> np.ndarray:
        """``1 - F`` before each group, computed by suffix sums."""
        return np.cumsum(self.probs[::-1])[::-1]


def score(probs, table: EnergyTable | np.ndarray,
          tie_tolerance: float = DEFAULT_TIE_TOL) -> ScoredDistribution:
    """Merge states with equal eps and sort the groups ascending."""
    eps = table.eps if isinstance(table, EnergyTable) else np.asarray(table, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if probs.shape != eps.shape:
        raise InvalidDistributionError(f"{probs.size} probabilities for {eps.size} states")
    if np.any(probs < 0):
        raise InvalidDistributionError("negative probability")
    total = probs.sum()
    if abs(total - 1.0) > 1e-6:
        raise InvalidDistributionError(f"probabilities sum to {total}")
    gs = group_structure(eps, tie_tolerance)
    mass = np.add.reduceat(probs[gs.order], gs.starts)
    return ScoredDistribution(gs.eps, mass)


def expected_best_r(dist: ScoredDistribution, R: int) -> float:
    if int(R) != R or R < 1:
        raise ValueError(f"R must be a positive integer, got {R}")
    R = int(R)
    tail = dist.tail() / dist.probs.sum()
    tail_next = np.append(tail[1:], 0.0)
    return float(np.dot(dist.eps, tail ** R - tail_next ** R))


def best_r_from_state(state: SubspaceState, gs: GroupStructure, R: int) -> float:
    """Same value as ``expected_best_r(score(...), R)`` via the compiled kernel."""
    return float(_kernels.best_r(state.amplitudes, gs.order, gs.starts, gs.eps, int(R)))


@dataclass(frozen=True)
class MetricReport:
    best: dict[int, float]
    expectation: float
    p_optimum: float

    def rows(self, instance_id: str, ansatz: str, p: int) -> list[dict]:
        return [{"instance_id": instance_id, "ansatz": ansatz, "p": p, "R": R, "value": v}
                for R, v in sorted(self.best.items())]


def metric_report(state: SubspaceState | np.ndarray, table: EnergyTable,
                  R_list: Iterable[int] = DEFAULT_R,
                  tie_tolerance: float = DEFAULT_TIE_TOL) -> MetricReport:
    probs = probabilities(state) if isinstance(state, SubspaceState) else np.asarray(state, float)
    dist = score(probs, table, tie_tolerance)
    Rs = sorted(set(int(r) for r in R_list) | set(DEFAULT_R))
    best = {R: expected_best_r(dist, R) for R in Rs}
    # <BEST_1> is the expectation by construction; keep both fields identical
    return MetricReport(best, best[1], float(dist.probs[0] / dist.probs.sum()))

"""Derivative-free local search and the layerwise ``scanlast`` protocol."""
from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .ansatz import AngleSchedule, AnsatzKind, CircuitPlan, angle_domains, build
from .metrics import DEFAULT_TIE_TOL, GroupStructure, group_structure
from .problem import ProblemInstance, energy_table

log = logging.getLogger(__name__)

GOLD = 1.618033988749895
CGOLD = 0.3819660112501051
TINY = 1e-21


class _BudgetExhausted(Exception):
    pass


class _NonFinite(Exception):
    pass


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    nfev: int
    status: str  # "converged" | "budget" | "nonfinite"
    ncycles: int = 0

    def __iter__(self):
        yield self.x
        yield self.fun


class _Counted:
    """Objective wrapper enforcing the evaluation budget and tracking the best point."""

    def __init__(self, f, budget: int):
        self.f = f
        self.budget = budget
        self.nfev = 0
        self.best_x = None
        self.best_f = math.inf

    def __call__(self, x: np.ndarray) -> float:
        if self.nfev >= self.budget:
            raise _BudgetExhausted
        self.nfev += 1
        val = float(self.f(x))
        if not math.isfinite(val):
            raise _NonFinite
        if val < self.best_f:
            self.best_f = val
            self.best_x = np.array(x, dtype=float)
        return val


def _bracket(g, fa: float, b: float = 1.0, max_steps: int = 40):
    """Golden-ratio expansion from (0, fa) and (b, g(b)) until a minimum is bracketed."""
    a = 0.0
    fb = g(b)
    if fb > fa:
        a, b, fa, fb = b, a, fb, fa
    c = b + GOLD * (b - a)
    fc = g(c)
    steps = 0
    while fb > fc and steps < max_steps:
        steps += 1
        r = (b - a) * (fb - fc)
        q = (b - c) * (fb - fa)
        denom = 2.0 * math.copysign(max(abs(q - r), TINY), q - r)
        u = b - ((b - c) * q - (b - a) * r) / denom
        ulim = b + 100.0 * (c - b)
        if (b - u) * (u - c) > 0.0:
            fu = g(u)
            if fu < fc:
                return b, u, c, fb, fu, fc
            if fu > fb:
                return a, b, u, fa, fb, fu
            u = c + GOLD * (c - b)
            fu = g(u)
        elif (c - u) * (u - ulim) > 0.0:
            fu = g(u)
            if fu < fc:
                b, c, u = c, u, u + GOLD * (u - c)
                fb, fc, fu = fc, fu, g(u)
        elif (u - ulim) * (ulim - c) >= 0.0:
            u = ulim
            fu = g(u)
        else:
            u = c + GOLD * (c - b)
            fu = g(u)
        a, b, c = b, c, u
        fa, fb, fc = fb, fc, fu
    return a, b, c, fa, fb, fc


def _brent(g, a, b, c, fb, tol: float, max_iter: int = 60):
    """Brent's parabolic/golden minimization on the bracket (a, b, c)."""
    lo, hi = min(a, c), max(a, c)
    x = w = v = b
    fx = fw = fv = fb
    d = e = 0.0
    for _ in range(max_iter):
        xm = 0.5 * (lo + hi)
        tol1 = tol * abs(x) + 1e-10
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (hi - lo):
            break
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            etemp = e
            e = d
            if abs(p) >= abs(0.5 * q * etemp) or p <= q * (lo - x) or p >= q * (hi - x):
                e = (lo - x) if x >= xm else (hi - x)
                d = CGOLD * e
            else:
                d = p / q
                u = x + d
                if u - lo < tol2 or hi - u < tol2:
                    d = math.copysign(tol1, xm - x)
        else:
            e = (lo - x) if x >= xm else (hi - x)
            d = CGOLD * e
        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        fu = g(u)
        if fu <= fx:
            if u >= x:
                lo = x
            else:
                hi = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                lo = u
            else:
                hi = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


def _line_min(f, x, fx, d, tol):
    def g(t):
        return f(x + t * d)

    a, b, c, fa, fb, fc = _bracket(g, fx)
    # the bracket may have been cut short; keep whichever point is lowest
    t, ft = min(((a, fa), (b, fb), (c, fc)), key=lambda p: p[1])
    if fb <= fa and fb <= fc and a != c:
        t, ft = _brent(g, a, b, c, fb, tol)
    if ft < fx:
        return x + t * d, ft
    return x, fx


def powell_minimize(objective: Callable[[np.ndarray], float], start_point: Sequence[float],
                    step_scales: Sequence[float] | float | None = None, budget: int = 1000,
                    ftol: float = 1e-8, line_tol: float = 1e-4) -> OptimizeResult:
    """Powell's direction-set method with Brent line searches.

    The direction set starts as the coordinate axes scaled by ``step_scales``
    and is reset to them every ``dim`` cycles. A new point is accepted only
    when it lowers the objective, so the result never exceeds the value at
    ``start_point``. Stops on relative decrease below ``ftol`` per cycle, on
    ``budget`` evaluations, or on a non-finite objective value.
    """
    x = np.array(start_point, dtype=float).reshape(-1)
    dim = x.size
    scales = np.broadcast_to(np.asarray(1.0 if step_scales is None else step_scales, float), (dim,))
    base = np.diag(scales).astype(float)
    f = _Counted(objective, max(int(budget), 1))
    status = "converged"
    cycles = 0
    try:
        fx = f(x)
        dirs = base.copy()
        while True:
            if cycles and cycles % dim == 0:
                dirs = base.copy()
            x0, f0 = x.copy(), fx
            big_drop, ibig = 0.0, 0
            for i in range(dim):
                fprev = fx
                x, fx = _line_min(f, x, fx, dirs[i], line_tol)
                if fprev - fx > big_drop:
                    big_drop, ibig = fprev - fx, i
            cycles += 1
            if 2.0 * (f0 - fx) <= ftol * (abs(f0) + abs(fx)) + TINY:
                break
            dnew = x - x0
            fe = f(x + dnew)
            if fe < f0:
                t = 2.0 * (f0 - 2.0 * fx + fe) * (f0 - fx - big_drop) ** 2 - big_drop * (f0 - fe) ** 2
                if t < 0.0:
                    x, fx = _line_min(f, x, fx, dnew, line_tol)
                    dirs[ibig] = dirs[-1]
                    dirs[-1] = dnew
    except _BudgetExhausted:
        status = "budget"
    except _NonFinite:
        status = "nonfinite"
    if f.best_x is None:
        return OptimizeResult(np.array(start_point, float), math.inf, f.nfev, status, cycles)
    return OptimizeResult(f.best_x, f.best_f, f.nfev, status, cycles)


def nelder_mead_minimize(objective, start_point, step_scales=None, budget: int = 1000,
                         ftol: float = 1e-8) -> OptimizeResult:
    """Nelder-Mead behind the same interface (scipy), for comparisons only."""
    from scipy.optimize import minimize

    x0 = np.array(start_point, dtype=float).reshape(-1)
    scales = np.broadcast_to(np.asarray(1.0 if step_scales is None else step_scales, float), x0.shape)
    simplex = np.vstack([x0] + [x0 + s * e for s, e in zip(scales, np.eye(x0.size))])
    f = _Counted(objective, max(int(budget), 1))
    status = "converged"
    try:
        minimize(f, x0, method="Nelder-Mead",
                 options={"initial_simplex": simplex, "maxfev": budget, "fatol": ftol, "xatol": 1e-10})
        if f.nfev >= budget:
            status = "budget"
    except _BudgetExhausted:
        status = "budget"
    except _NonFinite:
        status = "nonfinite"
    if f.best_x is None:
        return OptimizeResult(x0, math.inf, f.nfev, status)
    return OptimizeResult(f.best_x, f.best_f, f.nfev, status)


OPTIMIZERS = {"powell": powell_minimize, "nelder-mead": nelder_mead_minimize}


# --------------------------------------------------------------------------- #
# objective
# --------------------------------------------------------------------------- #
class CircuitObjective:
    """x (interleaved gamma/beta) -> <BEST_R> of the executed plan, from the Dicke state."""

    def __init__(self, plan: CircuitPlan, groups: GroupStructure, R: int = 5):
        self.plan = plan
        self.groups = groups
        self.R = int(R)
        dim = len(plan.basis)
        self._psi0 = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
        self._ops, self._coefs = plan.program
        self._partner = plan.basis.partner_table
        self._field = plan.field_diag

    def amplitudes(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        amps = self._psi0.copy()
        _kernels.run_program(amps, self._partner, self._field, self._ops, self._coefs,
                             np.ascontiguousarray(x[0::2]), np.ascontiguousarray(x[1::2]))
        return amps

    def __call__(self, x: np.ndarray) -> float:
        g = self.groups
        return float(_kernels.best_r(self.amplitudes(x), g.order, g.starts, g.eps, self.R))


# --------------------------------------------------------------------------- #
# scanlast
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class ScanlastConfig:
    W0: int = 50
    q: int = 10
    W: int = 250
    f_opt: int | Callable[[int], int] = 250
    p_max: int = 4
    master_seed: int = 0
    R: int = 5
    ordering_seed: int | None = None  # None: derived from master_seed and instance id
    optimizer: str = "powell"
    tie_tolerance: float = DEFAULT_TIE_TOL

    def __post_init__(self):
        for name in ("W0", "q", "W", "p_max", "R"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.W < 2:
            raise ValueError("W must be >= 2 to hold the zero and copy-previous starts")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def budget(self, p: int) -> int:
        return int(self.f_opt(p)) if callable(self.f_opt) else int(self.f_opt)

    def to_dict(self) -> dict:
        return {"W0": self.W0, "q": self.q, "W": self.W,
                "f_opt": self.f_opt if not callable(self.f_opt) else "callable",
                "p_max": self.p_max, "master_seed": self.master_seed, "R": self.R,
                "ordering_seed": self.ordering_seed, "optimizer": self.optimizer,
                "tie_tolerance": self.tie_tolerance}


FULL_PROFILE = dict(W0=50, q=10, W=250, f_opt=250)
DESK_PROFILE = dict(W0=10, q=3, W=20, f_opt=100)


def profile_config(name: str, **overrides) -> ScanlastConfig:
    base = {"paper": FULL_PROFILE, "desk": DESK_PROFILE}[name]
    return ScanlastConfig(**{**base, **overrides})


@dataclass
class LayerResult:
    p: int
    schedules: list[AngleSchedule]
    values: list[float]
    evaluations: int
    starts: int = 0

    @property
    def best_schedule(self) -> AngleSchedule:
        return self.schedules[0]

    @property
    def best_value(self) -> float:
        return self.values[0]


class ScanlastAborted(RuntimeError):
    def __init__(self, message: str, partial: list[LayerResult]):
        super().__init__(message)
        self.partial = partial


def stream_seed(master_seed: int, instance_id: str, p: int, survivor: int, batch: int) -> np.random.SeedSequence:
    """RNG stream for one local optimization: SeedSequence over
    (master_seed, crc32(instance_id), p, survivor, batch)."""
    return np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF,
                                   zlib.crc32(instance_id.encode()), p, survivor, batch])


def default_ordering_seed(master_seed: int, instance_id: str) -> int:
    return int(np.random.SeedSequence([int(master_seed), zlib.crc32(instance_id.encode()),
                                       0x0DE5]).generate_state(1)[0])


def scanlast(instance: ProblemInstance, kind, config: ScanlastConfig,
             progress: Callable[[dict], None] | None = None) -> list[LayerResult]:
    """Layerwise parameter setting.

    p = 1: ``W0`` random starts inside the angle domains, each locally optimized.
    p -> p+1: every one of the ``q`` survivors seeds ``W`` starts that append a
    new (gamma, beta) pair: (0, 0), a copy of its last pair, and ``W - 2`` random
    pairs. All angles stay free, including the gammas of the XY-only kinds,
    which those circuits ignore. The best ``q`` results overall survive.
    """
    kind = AnsatzKind.parse(kind)
    gmax, bmax = angle_domains(instance)
    basis_plan = build(kind, instance, 1, 0)
    table = energy_table(instance, basis_plan.basis)
    groups = group_structure(table.eps, config.tie_tolerance)
    oseed = (default_ordering_seed(config.master_seed, instance.id)
             if config.ordering_seed is None else config.ordering_seed)
    minimize = OPTIMIZERS[config.optimizer]
    layers: list[LayerResult] = []
    survivors: list[np.ndarray] = []

    for p in range(1, config.p_max + 1):
        try:
            plan = build(kind, instance, p, oseed)
            obj = CircuitObjective(plan, groups, config.R)
            scales = np.where(np.arange(2 * p) % 2 == 0, gmax / 10, bmax / 10)
            starts: list[tuple[int, int, np.ndarray]] = []
            if p == 1:
                for j in range(config.W0):
                    rng = np.random.default_rng(stream_seed(config.master_seed, instance.id, 1, 0, j))
                    starts.append((0, j, np.array([rng.uniform(0, gmax), rng.uniform(0, bmax)])))
            else:
                for s, prev in enumerate(survivors):
                    for j in range(config.W):
                        if j == 0:
                            new = (0.0, 0.0)
                        elif j == 1:
                            new = (prev[-2], prev[-1])
                        else:
                            rng = np.random.default_rng(stream_seed(config.master_seed, instance.id, p, s, j))
                            new = (rng.uniform(0, gmax), rng.uniform(0, bmax))
                        starts.append((s, j, np.concatenate([prev, new])))
            results = []
            evals = 0
            budget = config.budget(p)
            for s, j, x0 in starts:
                res = minimize(obj, x0, scales, budget)
                evals += res.nfev
                results.append((res.fun, res.nfev, tuple(res.x.tolist())))
                if progress is not None:
                    progress({"instance": instance.id, "kind": kind.value, "p": p, "survivor": s,
                              "start": j, "evals": res.nfev, "best": res.fun, "status": res.status})
            results.sort()
            top = results[:config.q]
        except Exception as exc:
            raise ScanlastAborted(f"scanlast aborted at p={p}: {exc}", layers) from exc
        layers.append(LayerResult(p, [AngleSchedule.from_vector(x) for _, _, x in top],
                                  [v for v, _, _ in top], evals, len(starts)))
        survivors = [np.array(x) for _, _, x in top]
        log.debug("%s %s p=%d best=%.6f evals=%d", instance.id, kind.value, p, top[0][0], evals)
    return layers

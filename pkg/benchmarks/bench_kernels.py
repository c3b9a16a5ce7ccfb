"""Compare the numba and numpy kernel backends on circuit execution and scoring.

    python benchmarks/bench_kernels.py --sizes 8,12,16 --p 4 --repeats 20
"""
import argparse
import time

import numpy as np

from qampa import _kernels
from qampa.ansatz import build
from qampa.metrics import group_structure
from qampa.optimizer import CircuitObjective
from qampa.problem import energy_table, generate_instance


def time_backend(name, objective, xs, repeats):
    _kernels.use_backend(name)
    objective(xs[0])  # warm-up, triggers JIT compilation for numba
    t0 = time.perf_counter()
    for _ in range(repeats):
        for x in xs:
            objective(x)
    return (time.perf_counter() - t0) / (repeats * len(xs))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="8,12,16")
    ap.add_argument("--p", type=int, default=4)
    ap.add_argument("--kinds", default="QAOA,QAMPA")
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    original = _kernels.BACKEND
    print(f"{'kind':8s} {'n':>3s} {'dim':>7s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}  max |diff|")
    try:
        for n in (int(s) for s in args.sizes.split(",")):
            inst = generate_instance(n, n // 2, seed=args.seed)
            for kind in args.kinds.split(","):
                plan = build(kind, inst, args.p, ordering_seed=args.seed)
                groups = group_structure(energy_table(inst, plan.basis).eps)
                obj = CircuitObjective(plan, groups, R=5)
                xs = [rng.uniform(0, np.pi, 2 * args.p) for _ in range(5)]
                t_np = time_backend("numpy", obj, xs, args.repeats)
                a_np = obj.amplitudes(xs[0])
                t_nb = time_backend("numba", obj, xs, args.repeats)
                a_nb = obj.amplitudes(xs[0])
                print(f"{kind:8s} {n:3d} {len(plan.basis):7d} {1e3 * t_np:10.3f} {1e3 * t_nb:10.3f} "
                      f"{t_np / t_nb:8.1f}  {np.max(np.abs(a_np - a_nb)):.1e}")
    finally:
        _kernels.use_backend(original)


if __name__ == "__main__":
    main()

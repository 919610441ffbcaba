"""Benchmark the simplex kernel: numba JIT versus the pure-numpy fallback.

Times the feasibility workloads the package actually runs (random marginal
systems of the sweep/property-suite shape) on both backends and checks that
the two produce bit-identical results.  Run:

    python benchmarks/bench_simplex.py [--instances N]

The numpy path is what you get with HISTORIES_LAB_NO_NUMBA=1 or without
numba installed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from histories_lab._kernels import NUMBA_AVAILABLE
from histories_lab.simplex import solve_lp_float
from histories_lab.unify import (
    JointSampleSpace,
    MarginalTable,
    Variable,
    build_constraint_system,
)


def random_marginal_system(rng, n_vars):
    """A unifier-shaped instance: pairwise marginals over dichotomic variables."""
    variables = [Variable(f"v{k}", (1, -1)) for k in range(n_vars)]
    space = JointSampleSpace(tuple(variables))
    tables = []
    for i in range(n_vars):
        for j in range(i + 1, n_vars):
            c = float(rng.uniform(-1.0, 1.0))
            values = {(s1, s2): 0.25 * (1.0 + s1 * s2 * c)
                      for s1 in (1, -1) for s2 in (1, -1)}
            tables.append(MarginalTable((variables[i], variables[j]), values))
    system = build_constraint_system(space, tables)
    return system.matrix, system.rhs


def run_backend(instances, backend):
    elapsed = 0.0
    outcomes = []
    for matrix, rhs in instances:
        start = time.perf_counter()
        result = solve_lp_float(matrix, rhs, backend=backend)
        elapsed += time.perf_counter() - start
        outcomes.append((result.status,
                         None if result.x is None else result.x.tobytes(),
                         None if result.certificate is None else result.certificate.tobytes()))
    return elapsed, outcomes


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--instances", type=int, default=300,
                        help="number of random LP instances per size (default 300)")
    args = parser.parse_args()

    rng = np.random.default_rng(12345)
    print(f"numba available: {NUMBA_AVAILABLE}")
    if not NUMBA_AVAILABLE:
        print("nothing to compare: only the numpy fallback can run")

    for n_vars in (3, 4, 5):
        instances = [random_marginal_system(rng, n_vars) for _ in range(args.instances)]
        rows, cols = instances[0][0].shape
        print(f"\n{n_vars} variables ({args.instances} instances, "
              f"tableau {rows}x{cols}):")

        if NUMBA_AVAILABLE:
            # trigger compilation outside the timed region
            run_backend(instances[:1], "numba")
            t_numba, out_numba = run_backend(instances, "numba")
            print(f"  numba : {t_numba:8.3f}s  ({1e3 * t_numba / args.instances:6.2f} ms/solve)")
        t_numpy, out_numpy = run_backend(instances, "numpy")
        print(f"  numpy : {t_numpy:8.3f}s  ({1e3 * t_numpy / args.instances:6.2f} ms/solve)")

        if NUMBA_AVAILABLE:
            identical = out_numba == out_numpy
            print(f"  speedup: {t_numpy / t_numba:5.2f}x   bit-identical results: {identical}")
            if not identical:
                raise SystemExit("backends disagreed; this is a bug")


if __name__ == "__main__":
    main()

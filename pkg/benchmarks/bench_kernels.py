"""Compare the numba and pure-numpy kernels on batched Riemann solves and a Glimm run.

    python benchmarks/bench_kernels.py [--pairs 100000] [--repeat 3]

Run with ULTRAREL_NO_NUMBA=1 to time only the numpy path.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from ultrarel import kernels
from ultrarel._accel import USE_NUMBA
from ultrarel.eos import EosParams
from ultrarel.glimm import GridConfig, RiemannProfile, VanDerCorput, run
from ultrarel.states import PrimitiveState


def random_pairs(m: int, params: EosParams, seed: int = 0):
    rng = np.random.default_rng(seed)
    k = params.a / (1.0 + params.a2)
    out = []
    for _ in range(2):
        lnrho = rng.uniform(np.log(0.1), np.log(10.0), m)
        phi = np.arctanh(rng.uniform(-0.9, 0.9, m))
        out += [phi - k * lnrho, phi + k * lnrho, rng.uniform(0.5, 2.0, m)]
    return out


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--pairs", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cells", type=int, default=800)
    args = ap.parse_args(argv)

    params = EosParams()
    a, g = params.a, params.gamma
    data = random_pairs(args.pairs, params)
    xi = np.linspace(-0.99, 0.99, args.pairs)
    prof = RiemannProfile(PrimitiveState(1.0, 0.0, 1.0), PrimitiveState(0.1, 0.0, 1.0))
    grid = GridConfig.from_cells((-1.0, 1.0), args.cells, 0.4)

    paths = [False] + ([True] if USE_NUMBA else [])
    results = {}
    for nb in paths:
        sol = kernels.solve_batch(*data, a, g, use_numba=nb)  # warm-up / compile
        kernels.sample_batch(*data, sol, xi, a, use_numba=nb)
        t_solve = best_of(lambda: kernels.solve_batch(*data, a, g, use_numba=nb), args.repeat)
        t_sample = best_of(lambda: kernels.sample_batch(*data, sol, xi, a, use_numba=nb), args.repeat)
        t_run = best_of(lambda: run(prof, grid, VanDerCorput(), params, store_stride=None,
                                    use_numba=nb), 1)
        results[nb] = (sol, t_solve, t_sample, t_run)

    print(f"{'path':<8}{'solve [s]':>12}{'sample [s]':>12}{'glimm run [s]':>15}")
    for nb, (_, ts, tp, tr) in results.items():
        print(f"{'numba' if nb else 'numpy':<8}{ts:12.4f}{tp:12.4f}{tr:15.4f}")
    if len(results) == 2:
        diff = np.max(np.abs(results[True][0] - results[False][0]))
        print(f"speed-up solve x{results[False][1] / results[True][1]:.1f}, "
              f"glimm x{results[False][3] / results[True][3]:.1f}; "
              f"max |numba - numpy| over all fields = {diff:.2e}")
    print(f"{args.pairs} pairs, glimm N={args.cells}, {grid.n_steps} steps")


if __name__ == "__main__":
    main()

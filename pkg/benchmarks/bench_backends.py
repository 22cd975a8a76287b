#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the index simulator and the empirical absorption/visit estimators
on seeded random models of a few sizes, timing both backends on
identical workloads (results are checked to match along the way).
The first numba call per kernel includes JIT compilation; a warmup
pass keeps it out of the timings.

Usage::

    python benchmarks/bench_backends.py [--cycles 200000] [--runs 1000000] [--repeat 3]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from stochtune import (  # noqa: E402
    ContinuousParameters,
    ControlPolicy,
    SimulationConfig,
    TuningModel,
    estimate_absorption,
    estimate_visits,
    simulate_index,
    validate_chain,
)

BACKENDS = ("numba", "numpy")


def random_model(rng, n):
    raw00 = rng.uniform(size=(n, n))
    raw01 = rng.uniform(0.05, 1.0, size=(n, 2))
    internal = rng.uniform(0.3, 0.7)
    chain = validate_chain(
        raw00 / raw00.sum(1, keepdims=True) * internal,
        raw01 / raw01.sum(1, keepdims=True) * (1.0 - internal),
    )
    params = ContinuousParameters(
        tau=rng.uniform(0.5, 2.0, n),
        c=rng.uniform(-2.0, 5.0, n),
        d0=-rng.uniform(0.0, 3.0, n),
        d1=-rng.uniform(0.0, 3.0, n),
        mu0=rng.uniform(0.0, 1.5, n),
        mu1=rng.uniform(0.0, 1.5, n),
    )
    return TuningModel(chain, params)


def time_call(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cycles", type=int, default=200_000)
    parser.add_argument("--runs", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=12)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    rows = []
    for n in (1, 4, 8):
        model = random_model(rng, n)
        policy = ControlPolicy(
            alpha0=rng.dirichlet(np.ones(n)), alpha1=rng.dirichlet(np.ones(n))
        )
        config = SimulationConfig(n_cycles=args.cycles, seed=7)

        # warmup (includes JIT compilation on the numba side)
        warm = {
            b: simulate_index(model, policy, config, backend=b) for b in BACKENDS
        }
        assert warm["numba"].point_estimate == warm["numpy"].point_estimate

        times = {}
        for backend in BACKENDS:
            times[backend], _ = time_call(
                lambda b=backend: simulate_index(model, policy, config, backend=b),
                args.repeat,
            )
        rows.append((f"simulate n={n} ({args.cycles} cycles)", times))

        chain = model.chain
        for b in BACKENDS:
            estimate_absorption(chain, 0, 1000, seed=3, backend=b)
        times = {}
        for backend in BACKENDS:
            times[backend], _ = time_call(
                lambda b=backend: estimate_absorption(
                    chain, 0, args.runs, seed=3, backend=b
                ),
                args.repeat,
            )
        rows.append((f"absorption n={n} ({args.runs} runs)", times))

        times = {}
        for backend in BACKENDS:
            times[backend], _ = time_call(
                lambda b=backend: estimate_visits(
                    chain, 0, args.runs, seed=3, backend=b
                ),
                args.repeat,
            )
        rows.append((f"visits n={n} ({args.runs} runs)", times))

    width = max(len(name) for name, _ in rows)
    print(f"{'workload':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, times in rows:
        speedup = times["numpy"] / times["numba"]
        print(
            f"{name:<{width}}  {times['numba'] * 1e3:>8.1f}ms  "
            f"{times['numpy'] * 1e3:>8.1f}ms  {speedup:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())

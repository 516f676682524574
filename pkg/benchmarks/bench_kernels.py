"""Compare the numba and numpy kernel backends on circuit evaluation.

Times the Bogoliubov-de Gennes energy (open chains), its adjoint gradient,
and the momentum-block energy (uniform rings) for a few sizes, then prints
per-call times and the speedup.  Run as:

    python3 benchmarks/bench_kernels.py [--repeats 5] [--calls 20]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cdqaoa._kernels import HAVE_NUMBA, warmup
from cdqaoa.fermion import CircuitEngine
from cdqaoa.model import Variant, make_open_random, make_ring_uniform, params_per_step


def best_time(fn, repeats: int, calls: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(calls):
            fn()
        best = min(best, (time.perf_counter() - t0) / calls)
    return best


def bench_case(label, make_engine, run, repeats, calls):
    numpy_engine = make_engine("numpy")
    t_numpy = best_time(lambda: run(numpy_engine), repeats, calls)
    if HAVE_NUMBA:
        numba_engine = make_engine("numba")
        t_numba = best_time(lambda: run(numba_engine), repeats, calls)
        speedup = f"{t_numpy / t_numba:5.1f}x"
    else:
        t_numba = float("nan")
        speedup = "    -"
    print(f"{label:<34} {t_numpy * 1e3:9.3f} {t_numba * 1e3:9.3f} {speedup}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--calls", type=int, default=20)
    parser.add_argument("--depth", type=int, default=8)
    args = parser.parse_args()

    if HAVE_NUMBA:
        warmup()
    else:
        print("numba unavailable; timing the numpy backend only")
    rng = np.random.default_rng(2)
    print(f"{'case':<34} {'numpy ms':>9} {'numba ms':>9} {'speedup':>7}")

    for n in (10, 16, 24):
        spec = make_open_random(n, seed=1)
        values = rng.uniform(-0.5, 0.5, size=(args.depth, params_per_step(Variant.QAOA_2CD)))
        bench_case(
            f"bdg energy      n={n:<3} p={args.depth}",
            lambda b, s=spec: CircuitEngine(s, backend=b),
            lambda e, v=values: e.energy_values(Variant.QAOA_2CD, v),
            args.repeats,
            args.calls,
        )
        bench_case(
            f"bdg energy+grad n={n:<3} p={args.depth}",
            lambda b, s=spec: CircuitEngine(s, backend=b),
            lambda e, v=values: e.energy_grad_values(Variant.QAOA_2CD, v),
            args.repeats,
            args.calls,
        )

    for n in (12, 20):
        ring = make_ring_uniform(n)
        values = rng.uniform(-0.5, 0.5, size=(args.depth, params_per_step(Variant.QAOA_2CD)))
        bench_case(
            f"momentum energy n={n:<3} p={args.depth}",
            lambda b, s=ring: CircuitEngine(s, backend=b),
            lambda e, v=values: e.energy_values(Variant.QAOA_2CD, v),
            args.repeats,
            args.calls,
        )


if __name__ == "__main__":
    main()

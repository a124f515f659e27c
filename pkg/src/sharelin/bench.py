"""Benchmark the compiled kernels against the numpy fallback.

Times the guarded closure and pairwise union on random group sets of
growing size::

    python -m sharelin.bench --sizes 8 12 16 --repeat 5
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from . import _kernels


def _workload(rng: random.Random, n_groups: int, n_vars: int) -> np.ndarray:
    # sparse groups overlap little, so the closure actually grows
    masks = set()
    while len(masks) < n_groups:
        bits = rng.sample(range(n_vars), rng.randint(1, 2))
        masks.add(sum(1 << b for b in bits))
    return np.array(sorted(masks), dtype=np.uint64)


def _time(fn, *args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 12, 16])
    parser.add_argument("--vars", type=int, default=16)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    impls = _kernels.implementations()
    if "numba" not in impls:
        print("numba unavailable; only the numpy fallback will run")
    rng = random.Random(args.seed)
    guard = np.uint64(0b11)  # a couple of guarded bits keeps the result finite

    # trigger compilation outside the timed region
    warm = np.array([1, 2, 4], dtype=np.uint64)
    for closure, pairwise in impls.values():
        closure(warm, guard)
        pairwise(warm, warm, guard)

    header = f"{'op':<10}{'groups':>8}{'result':>9}" + "".join(
        f"{name + ' (s)':>14}" for name in impls
    )
    print(header)
    for size in args.sizes:
        base = _workload(rng, size, args.vars)
        closed_size = len(impls["numpy"][0](base, guard))
        times = [
            _time(closure, base, guard, repeat=args.repeat)
            for closure, _ in impls.values()
        ]
        print(
            f"{'closure':<10}{len(base):>8}{closed_size:>9}"
            + "".join(f"{t:>14.6f}" for t in times)
        )
        pair_size = len(impls["numpy"][1](base, base, guard))
        times = [
            _time(pairwise, base, base, guard, repeat=args.repeat)
            for _, pairwise in impls.values()
        ]
        print(
            f"{'pairwise':<10}{len(base):>8}{pair_size:>9}"
            + "".join(f"{t:>14.6f}" for t in times)
        )
    if "numba" in impls:
        print(f"active backend: {_kernels.BACKEND} (set {_kernels.ENV_VAR}=numpy to force the fallback)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

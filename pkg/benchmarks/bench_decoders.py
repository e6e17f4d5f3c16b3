"""Throughput comparison of the compiled and pure-Python decoding kernels.

Run from the repository root:

    python benchmarks/bench_decoders.py [--quick]

Prints per-decode times for SC and SCL at a few representative sizes and
the native/python speedup. Both backends are exercised directly, so the
numbers are unaffected by the POLARKIT_BACKEND selection.
"""

import argparse
import time

import numpy as np

from polarkit import _kernels_py as kpy
from polarkit.construct import ga_construct

try:
    from polarkit import _kernels_c as kc
except ImportError:
    kc = None

CASES = [
    # (N, K, L, native reps, python reps)
    (128, 64, 1, 2000, 20),
    (128, 64, 8, 400, 5),
    (512, 256, 4, 200, 3),
    (1024, 512, 4, 100, 2),
]


def _time_per_call(fn, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="fewer repetitions")
    args = parser.parse_args()

    rng = np.random.default_rng(1)
    print(f"{'case':>18} {'native':>12} {'python':>12} {'speedup':>9}")
    for N, K, L, reps_c, reps_p in CASES:
        if args.quick:
            reps_c, reps_p = max(reps_c // 10, 1), max(reps_p // 2, 1)
        cfg = ga_construct(N, K, 2.0)
        frozen = cfg.frozen_mask
        llr = rng.normal(3.0, 2.5, N)
        label = f"({N},{K}) L={L}"

        if L == 1:
            f_py = lambda: kpy.sc_decode(llr, frozen)
            f_c = (lambda: kc.sc_decode(llr, frozen)) if kc else None
        else:
            f_py = lambda: kpy.scl_decode(llr, frozen, L, None)
            f_c = (lambda: kc.scl_decode(llr, frozen, L, None)) if kc else None

        t_py = _time_per_call(f_py, reps_p)
        if f_c is None:
            print(f"{label:>18} {'-':>12} {t_py * 1e6:10.1f}us {'-':>9}")
            continue
        t_c = _time_per_call(f_c, reps_c)
        print(
            f"{label:>18} {t_c * 1e6:10.1f}us {t_py * 1e6:10.1f}us "
            f"{t_py / t_c:8.1f}x"
        )
    if kc is None:
        print("compiled backend unavailable: build with "
              "`pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()

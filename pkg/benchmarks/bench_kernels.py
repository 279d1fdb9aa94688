"""Time the compiled kernels against the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py --size 64 --repeats 9

The two backends are imported side by side, so one process measures both.
When the extension failed to build, "active" and "python" coincide and the
speedup column prints 1.0x.

The default size matches the discretized spaces the library actually runs
on; there the scalar loops beat numpy's per-call overhead by 2-7x.  Past
roughly a thousand cells numpy's vectorized loops win instead, so pick the
backend per workload (ORLICZ_LAB_DISABLE_EXT=1 forces the fallback).
"""

import argparse
import time

import numpy as np

from orlicz_lab import _kernels

FAMILIES = (
    ("power", _kernels.FAM_POWER, 2.0),
    ("power_scaled", _kernels.FAM_POWER_SCALED, 3.0),
    ("exp_power", _kernels.FAM_EXP_POWER, 2.0),
    ("entropy", _kernels.FAM_ENTROPY, 2.0),
    ("log_quotient", _kernels.FAM_LOG_QUOTIENT, 0.0),
    ("exp_quartic", _kernels.FAM_EXP_QUARTIC, 0.0),
)


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=64,
                    help="array length per call")
    ap.add_argument("--repeats", type=int, default=9,
                    help="take the best of this many runs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    xs = rng.uniform(0.0, 3.0, args.size)
    absf = np.abs(rng.normal(0.0, 1.0, args.size))
    mass = np.full(args.size, 1.0 / args.size)

    active, fb = _kernels.active, _kernels.fallback
    print(f"active backend: {_kernels.BACKEND}   size={args.size}  "
          f"best of {args.repeats}")
    header = f"{'kernel':<30}{'active':>12}{'python':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))

    rows = []
    for name, fam, p in FAMILIES:
        rows.append((f"eval[{name}]",
                     (active.eval_family, fam, p, xs),
                     (fb.eval_family, fam, p, xs)))
    for name, fam, p in FAMILIES[:3]:
        rows.append((f"modular[{name}]",
                     (active.modular_weighted, fam, p, absf, mass),
                     (fb.modular_weighted, fam, p, absf, mass)))
        rows.append((f"lux_norm[{name}]",
                     (active.lux_norm_family, fam, p, absf, mass, 1e-10, 200),
                     (fb.lux_norm_family, fam, p, absf, mass, 1e-10, 200)))

    for label, act, fbk in rows:
        # one warm-up call keeps allocator effects out of the best-of
        act[0](*act[1:])
        fbk[0](*fbk[1:])
        ta = best_of(args.repeats, *act)
        tf = best_of(args.repeats, *fbk)
        print(f"{label:<30}{ta * 1e3:>10.3f}ms{tf * 1e3:>10.3f}ms"
              f"{tf / ta:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

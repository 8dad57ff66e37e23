"""Benchmark the compiled enumeration kernel against the numpy fallback.

Times the three kernel entry points on merged double covers of seeded
random cycles (the dominant workload: 32^|E| configurations per graph)
and prints per-backend throughput plus the speedup.  Both backends must
agree to 1e-9 relative on every measured sum.

Usage: python benchmarks/bench_kernels.py [--edges 3 4 5] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from nfgcover import GeneratorSpec, gen_instance, trivial_cover
from nfgcover.holo import transform_mdc
from nfgcover.kernels import available_backends
from nfgcover.mdc import build_averaged_mdc, build_mdc
from nfgcover.partition import enumerated


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(edges: list[int], repeats: int) -> int:
    backends = available_backends()
    if len(backends) < 2:
        print("compiled backend not built; nothing to compare")
    print(f"backends: {', '.join(backends)}")
    header = f"{'graph':>22} {'configs':>12}"
    for name in backends:
        header += f" {name + ' (s)':>14}"
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)

    ok = True
    for n in edges:
        base = gen_instance(GeneratorSpec(seed=n, topology="cycle", factors=n), lsm=False)
        merged, _ = build_mdc(base, trivial_cover(base, 2))
        eg = enumerated(merged)
        args = eg.kernel_args()

        row = f"{'merged cycle-' + str(n):>22} {eg.n_configs:>12}"
        times = {}
        sums = {}
        for name, impl in backends.items():
            times[name] = _time(lambda: impl.sum_range(*args, 0, eg.n_configs), repeats)
            sums[name] = impl.sum_range(*args, 0, eg.n_configs)
            row += f" {times[name]:>14.4f}"
        if len(backends) == 2:
            row += f" {times['python'] / times['compiled']:>8.1f}x"
            rel = abs(sums["python"] - sums["compiled"]) / max(abs(sums["compiled"]), 1e-300)
            if rel > 1e-9:
                ok = False
                row += "  DISAGREE"
        print(row)

        # signed log-domain sums on the transformed graph
        avg, cmap = build_averaged_mdc(base)
        transformed, _ = transform_mdc(avg, cmap)
        eg_t = enumerated(transformed)
        args_t = eg_t.kernel_args()
        row = f"{'transformed cycle-' + str(n):>22} {eg_t.n_configs:>12}"
        times = {}
        logs = {}
        for name, impl in backends.items():
            times[name] = _time(
                lambda: impl.signed_log_sum_range(*args_t, 0, eg_t.n_configs), repeats
            )
            logs[name] = impl.signed_log_sum_range(*args_t, 0, eg_t.n_configs)
            row += f" {times[name]:>14.4f}"
        if len(backends) == 2:
            row += f" {times['python'] / times['compiled']:>8.1f}x"
            (s1, l1), (s2, l2) = logs["python"], logs["compiled"]
            if s1 != s2 or abs(l1 - l2) > 1e-9 * max(abs(l1), abs(l2), 1.0):
                ok = False
                row += "  DISAGREE"
        print(row)

    values_check(backends)
    print("agreement: " + ("all sums match to 1e-9 relative" if ok else "MISMATCH"))
    return 0 if ok else 1


def values_check(backends) -> None:
    base = gen_instance(GeneratorSpec(seed=9, topology="cycle", factors=4), lsm=False)
    eg = enumerated(base)
    outs = {}
    for name, impl in backends.items():
        out = np.empty(eg.n_configs)
        impl.values_range(*eg.kernel_args(), 0, eg.n_configs, out)
        outs[name] = out
    if len(outs) == 2:
        worst = float(np.abs(outs["python"] - outs["compiled"]).max())
        print(f"values_range max abs diff on cycle-4: {worst:.2e}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--edges", type=int, nargs="+", default=[3, 4, 5])
    parser.add_argument("--repeats", type=int, default=3)
    ns = parser.parse_args()
    raise SystemExit(bench(ns.edges, ns.repeats))

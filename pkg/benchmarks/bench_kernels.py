#!/usr/bin/env python3
"""Timing comparison between the compiled kernels and the pure twin.

Each workload runs on both backends, results are checked equal, and the
best-of-N wall times are printed as one table row with the speedup.
"""

import argparse
import time

from nbhd.bax import _immediate_superset_famasks
from nbhd.core import full_mask
from nbhd.evaluate import compile_algebra, compile_membership
from nbhd.formulas import expand_named, parse
from nbhd import _kernels_py

try:
    from nbhd import _kernels
except ImportError:
    _kernels = None

WORKLOADS = []


def workload(name):
    def deco(fn):
        WORKLOADS.append((name, fn))
        return fn

    return deco


def membership_programs(specs, n):
    out = []
    for spec in specs:
        formula = expand_named(spec, n).formula
        out.append(compile_membership(formula, n).kernel_args())
    return out


@workload("family_filter n=4, @M, full famask range")
def filter_monotone(kern):
    return kern.family_filter(0, 1 << 16, membership_programs(["@M"], 4))


@workload("family_filter n=4, @N+@C+@M, full famask range")
def filter_principal(kern):
    return kern.family_filter(0, 1 << 16, membership_programs(["@N", "@C", "@M"], 4))


@workload("upset_enumerate n=5, no leaf programs")
def upset_plain(kern):
    return kern.upset_enumerate(1 << 5, _immediate_superset_famasks(5), 0, [])


@workload("upset_enumerate n=5, full set required, @C leaves")
def upset_filtered(kern):
    succ = _immediate_superset_famasks(5)
    required = 1 << full_mask(5)
    return kern.upset_enumerate(1 << 5, succ, required, membership_programs(["@C"], 5))


@workload("algebra_refute n=4, identity box, 4-variable scan")
def refute_valid(kern):
    program = compile_algebra(parse("box(u & v & w & x) -> box(u & v)"))
    box = tuple(range(16))
    return kern.algebra_refute(box, 4, program.opcodes, program.opargs, len(program.names))


def best_time(fn, kern, repeats):
    best = None
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(kern)
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3, help="timed runs per workload, best kept")
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernels unavailable; nothing to compare")
        return

    width = max(len(name) for name, _ in WORKLOADS)
    print(f"{'workload':<{width}}  {'pure s':>9}  {'compiled s':>10}  {'speedup':>8}")
    for name, fn in WORKLOADS:
        pure_t, pure_r = best_time(fn, _kernels_py, args.repeats)
        comp_t, comp_r = best_time(fn, _kernels, args.repeats)
        if pure_r != comp_r:
            raise SystemExit(f"backend mismatch on {name!r}")
        print(f"{name:<{width}}  {pure_t:>9.4f}  {comp_t:>10.4f}  {pure_t / comp_t:>7.1f}x")


if __name__ == "__main__":
    main()

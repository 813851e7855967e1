"""Benchmark the compiled evaluator kernel against the pure-Python engine.

Run as ``python -m etskit.bench``.  The workload mirrors the soundness
sweep: generate systems, compute pool extensions, and run the axiom and
rule-preservation checks.
"""

from __future__ import annotations

import argparse
import time

from .semantics import HAVE_COMPILED, Evaluator
from .testgen import (
    GenParams, axiom_sweep, pool_for_system, random_system,
    rule_preservation_check,
)


def _run(engine: str, count: int, base_seed: int, depth: int) -> float:
    t0 = time.perf_counter()
    for k in range(count):
        sys = random_system(GenParams(seed=base_seed + k))
        pool, _ = pool_for_system(sys, depth=depth)
        ev = Evaluator(sys, engine=engine)
        rep = axiom_sweep(sys, pool, evaluator=ev)
        pres = rule_preservation_check(sys, pool, evaluator=ev)
        if not (rep.ok and pres.ok):
            raise AssertionError(f"sweep found violations at seed "
                                 f"{base_seed + k}")
    return time.perf_counter() - t0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="etskit.bench", description=__doc__)
    parser.add_argument("--count", type=int, default=40,
                        help="systems per engine (default 40)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--depth", type=int, default=2)
    ns = parser.parse_args(argv)

    engines = ["python"]
    if HAVE_COMPILED:
        engines.insert(0, "compiled")
    else:
        print("compiled kernel not built; timing the fallback only")

    times = {}
    for engine in engines:
        _run(engine, min(ns.count, 3), ns.seed, ns.depth)  # warm pool caches
        times[engine] = _run(engine, ns.count, ns.seed, ns.depth)
        rate = ns.count / times[engine]
        print(f"{engine:>8}: {times[engine]:6.2f}s for {ns.count} systems "
              f"({rate:5.1f} systems/s)")

    if len(times) == 2:
        print(f"speedup: {times['python'] / times['compiled']:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

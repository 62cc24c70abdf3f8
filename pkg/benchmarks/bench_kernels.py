#!/usr/bin/env python3
"""Benchmark the compiled trial kernels against the pure-Python fallback.

Run: python benchmarks/bench_kernels.py [--trials N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dibc import _kernels_py
from dibc.adversaries import (
    HONEST_ASSIGNMENT,
    behavior_for_alice_cheat,
    behavior_for_bob_cheat,
    optimal_alice_ghz,
    optimal_bob_ghz,
)
from dibc.behaviors import from_quantum
from dibc.quantum import ghz_state

try:
    from dibc import _kernels as compiled
except ImportError:
    compiled = None


def timeit(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=200_000)
    args = parser.parse_args()
    n = args.trials

    rng = np.random.default_rng(0)
    ghz = np.ascontiguousarray(from_quantum(ghz_state(), [HONEST_ASSIGNMENT] * 3).probs)
    bits = (rng.random(n) >= 0.5).astype(np.uint8)

    alice = optimal_alice_ghz()
    alice_table = np.ascontiguousarray(behavior_for_alice_cheat(alice).probs)
    commit_c = np.array(alice.commit_rule, dtype=np.uint8)
    reveal_s = np.array([[sr[0] for sr in po] for po in alice.reveal_rule], dtype=np.uint8)
    reveal_r = np.array([[sr[1] for sr in po] for po in alice.reveal_rule], dtype=np.uint8)

    bob = optimal_bob_ghz()
    bob_table = np.ascontiguousarray(behavior_for_bob_cheat(bob).probs)
    guess = np.array(bob.guess_rule, dtype=np.uint8)
    rmap0 = np.array(bob.bob_measurements[0].result_map, dtype=np.uint8)
    rmap1 = np.array(bob.bob_measurements[1].result_map, dtype=np.uint8)

    cases = [
        ("bc_trials", (ghz, bits, rng.random((n, 4)))),
        ("coinflip_trials", (ghz, rng.random((n, 6)))),
        (
            "alice_cheat_trials",
            (alice_table, commit_c, reveal_s, reveal_r, bits, rng.random((n, 3))),
        ),
        ("gain_trials", (bob_table, guess, rmap0, rmap1, rng.random((n, 4)))),
    ]

    print(f"{n} trials per kernel (best of 3)\n")
    print(f"{'kernel':<22}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, case_args in cases:
        py_time, py_out = timeit(getattr(_kernels_py, name), *case_args)
        if compiled is None:
            print(f"{name:<22}{py_time * 1e3:>10.1f}ms{'n/a':>12}{'n/a':>10}")
            continue
        cy_time, cy_out = timeit(getattr(compiled, name), *case_args)
        assert np.array_equal(py_out, cy_out), f"{name}: backends disagree"
        print(
            f"{name:<22}{py_time * 1e3:>10.1f}ms{cy_time * 1e3:>10.1f}ms"
            f"{py_time / cy_time:>9.1f}x"
        )
    if compiled is None:
        print("\ncompiled backend not built; showing pure-Python timings only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Benchmark the compiled finite-field kernels against the pure-Python
fallback, verifying on the way that both produce identical results.

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ialab._kernels import available_implementations, substream_state


def _time(fn, repeats=1):
    best = float("inf")
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def bench_sampling(impl, q=7, n=4, count=20_000):
    def run():
        state = substream_state(1, 0)
        acc = 0
        for _ in range(count):
            mat, state = impl.sample_matrix(q, n, state)
            acc += int(mat[0, 0])
        return acc

    return run


def bench_ngjv(impl, trials=20_000):
    def run():
        total = 0
        for trial in range(trials):
            state = substream_state(2, trial)
            wait, _ = impl.ngjv_trial(3, 2, 10**7, state)
            total += wait
        return total

    return run


def bench_stage(impl, q=11, n=3, trials=400):
    def run():
        total = 0
        for trial in range(trials):
            state = substream_state(3, trial)
            mat, state = impl.sample_matrix(q, n, state)
            targets = np.array([1, 2], dtype=np.int64)
            vrows = np.array(
                [[[mat[j, c] for c in range(n) if c != j]] for j in targets],
                dtype=np.int64,
            )
            diags = np.array([[mat[j, j]] for j in targets], dtype=np.int64)
            wait, _, state = impl.stage_wait(q, n, targets, vrows, diags, 10**7, state)
            total += wait
        return total

    return run


def main():
    impls = available_implementations()
    if "compiled" not in impls:
        print("compiled kernels unavailable; nothing to compare")
        return
    benches = {
        "sample_matrix (20k 4x4 states, q=7)": bench_sampling,
        "ngjv_trial (20k waits, n=2, q=3)": bench_ngjv,
        "stage_wait (400 single-stage trials, n=3, q=11)": bench_stage,
    }
    print(f"{'kernel':<50}{'python':>10}{'compiled':>10}{'speedup':>9}")
    for label, factory in benches.items():
        t_py, out_py = _time(factory(impls["python"]))
        t_cy, out_cy = _time(factory(impls["compiled"]), repeats=3)
        assert out_py == out_cy, f"implementations disagree on {label}"
        print(f"{label:<50}{t_py:>9.3f}s{t_cy:>9.3f}s{t_py / t_cy:>8.1f}x")
    print("outputs identical across implementations")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallbacks.

Builds both kernel tables in-process, checks the outputs agree, and
reports per-kernel timings. The same selection is available at runtime
via QUBOFIT_NUMBA=0.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from qubofit.kernels import build_kernels


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def random_instance(m, seed):
    rng = np.random.default_rng(seed)
    bias = rng.normal(size=m)
    coupling = np.zeros((m, m))
    iu, ju = np.triu_indices(m, k=1)
    coupling[iu, ju] = rng.normal(size=iu.size)
    coupling = coupling + coupling.T
    return bias, coupling, rng


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    jit = build_kernels(use_numba=True)
    plain = build_kernels(use_numba=False)

    m = 32
    bias, coupling, rng = random_instance(m, seed=0)
    codes = np.ascontiguousarray(rng.integers(0, 2, size=(20_000, m)), dtype=np.uint8)
    start = codes[0].copy()
    steps = 20_000
    bits = rng.integers(0, m, size=steps)
    uniforms = rng.random(steps)
    queries, book = codes[:2_000], codes[2_000:10_000]

    rows = [("kernel", "workload", "numba", "numpy", "speedup")]

    out_a = np.empty(codes.shape[0])
    out_b = np.empty(codes.shape[0])
    jit["predict_batch"](bias, coupling, codes, out_a)  # warm the JIT
    t_jit = timeit(lambda: jit["predict_batch"](bias, coupling, codes, out_a), args.repeats)
    t_np = timeit(lambda: plain["predict_batch"](bias, coupling, codes, out_b), args.repeats)
    assert np.allclose(out_a, out_b, atol=1e-10)
    rows.append(("predict_batch", f"{codes.shape[0]} codes, m={m}", t_jit, t_np, t_np / t_jit))

    jit["sa_chain"](bias, coupling, start.copy(), bits, uniforms, 1.0, 0.9995)
    t_jit = timeit(
        lambda: jit["sa_chain"](bias, coupling, start.copy(), bits, uniforms, 1.0, 0.9995),
        args.repeats,
    )
    t_np = timeit(
        lambda: plain["sa_chain"](bias, coupling, start.copy(), bits, uniforms, 1.0, 0.9995),
        args.repeats,
    )
    a = jit["sa_chain"](bias, coupling, start.copy(), bits, uniforms, 1.0, 0.9995)
    b = plain["sa_chain"](bias, coupling, start.copy(), bits, uniforms, 1.0, 0.9995)
    assert np.array_equal(a[0], b[0])
    rows.append(("sa_chain", f"{steps} steps, m={m}", t_jit, t_np, t_np / t_jit))

    m_small = 18
    bias_s, coupling_s, _ = random_instance(m_small, seed=1)
    jit["exhaustive_argmax"](bias_s, coupling_s)
    t_jit = timeit(lambda: jit["exhaustive_argmax"](bias_s, coupling_s), args.repeats)
    t_np = timeit(lambda: plain["exhaustive_argmax"](bias_s, coupling_s), 1)
    a = jit["exhaustive_argmax"](bias_s, coupling_s)
    b = plain["exhaustive_argmax"](bias_s, coupling_s)
    assert a[0] == b[0]
    rows.append(("exhaustive_argmax", f"2^{m_small} codes", t_jit, t_np, t_np / t_jit))

    out_a = np.empty(queries.shape[0], dtype=np.int64)
    out_b = np.empty(queries.shape[0], dtype=np.int64)
    jit["min_hamming"](queries, book, out_a)
    t_jit = timeit(lambda: jit["min_hamming"](queries, book, out_a), args.repeats)
    t_np = timeit(lambda: plain["min_hamming"](queries, book, out_b), args.repeats)
    assert np.array_equal(out_a, out_b)
    rows.append(("min_hamming", f"{queries.shape[0]}x{book.shape[0]}, m={m}", t_jit, t_np, t_np / t_jit))

    text_rows = [rows[0]] + [
        (name, work, f"{tj * 1e3:.2f} ms", f"{tn * 1e3:.2f} ms", f"{speed:.1f}x")
        for name, work, tj, tn, speed in rows[1:]
    ]
    widths = [max(len(row[i]) for row in text_rows) for i in range(5)]
    for row in text_rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())


if __name__ == "__main__":
    main()

"""Benchmark the compiled pair kernels against the pure-NumPy fallback.

Runs both implementations on identical pre-generated chunks and prints a
table of per-call timings plus the end-to-end speedup. Usage:

    python benchmarks/bench_kernels.py [--pairs N] [--chunk N] [--bins N]
"""

import argparse
import time

import numpy as np

from riesz_lab.kernels import _numpy_backend
from riesz_lab.pairkernel import make_edges

try:
    from riesz_lab.kernels import _compiled
except ImportError:
    _compiled = None


def make_chunks(n_pairs, chunk, dim, seed):
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    chunks = []
    done = 0
    while done < n_pairs:
        n = min(chunk, n_pairs - done)
        xp = rng.standard_normal((n, dim))
        yp = rng.standard_normal((n, dim))
        xw = rng.uniform(0.5, 1.5, n)
        yw = rng.uniform(0.5, 1.5, n)
        chunks.append((xp, xw, yp, yw))
        done += n
    return chunks


def time_power_sums(backend, chunks, re_z, im_z, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        acc = np.zeros(4)
        n_zero = 0
        for xp, xw, yp, yw in chunks:
            kr, ki, kr2, ki2, nz = backend.pair_power_sums(
                xp, xw, yp, yw, re_z, im_z
            )
            acc += (kr, ki, kr2, ki2)
            n_zero += nz
        best = min(best, time.perf_counter() - t0)
        out = (acc, n_zero)
    return best, out


def time_hist(backend, chunks, edges, repeats):
    nb = edges.shape[0] - 1
    best = float("inf")
    out = None
    for _ in range(repeats):
        mass = np.zeros(nb)
        sq = np.zeros(nb)
        cnt = np.zeros(nb, dtype=np.int64)
        t0 = time.perf_counter()
        for xp, xw, yp, yw in chunks:
            backend.pair_hist(xp, xw, yp, yw, edges, mass, sq, cnt)
        best = min(best, time.perf_counter() - t0)
        out = (mass, sq, cnt)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=2_000_000)
    parser.add_argument("--chunk", type=int, default=262_144)
    parser.add_argument("--bins", type=int, default=128)
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _compiled is None:
        print("compiled extension not importable; benchmarking fallback only")

    chunks = make_chunks(args.pairs, args.chunk, args.dim, args.seed)
    edges = make_edges(6.0, args.bins)
    jobs = [
        ("power sums z=-1", "power", (-1.0, 0.0)),
        ("power sums z=2", "power", (2.0, 0.0)),
        ("power sums z=-1+0.7j", "power", (-1.0, 0.7)),
        (f"histogram ({args.bins} bins)", "hist", None),
    ]

    print(f"{args.pairs:,} pairs in chunks of {args.chunk:,}, dim={args.dim}")
    header = f"{'kernel':<24} {'numpy':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, kind, z in jobs:
        if kind == "power":
            t_np, out_np = time_power_sums(_numpy_backend, chunks, *z, args.repeats)
        else:
            t_np, out_np = time_hist(_numpy_backend, chunks, edges, args.repeats)
        if _compiled is None:
            print(f"{label:<24} {t_np:>9.3f}s {'-':>10} {'-':>8}")
            continue
        if kind == "power":
            t_c, out_c = time_power_sums(_compiled, chunks, *z, args.repeats)
            np.testing.assert_allclose(out_c[0], out_np[0], rtol=1e-10)
        else:
            t_c, out_c = time_hist(_compiled, chunks, edges, args.repeats)
            np.testing.assert_allclose(out_c[0], out_np[0], rtol=1e-10)
        print(f"{label:<24} {t_np:>9.3f}s {t_c:>9.3f}s {t_np / t_c:>7.1f}x")


if __name__ == "__main__":
    main()

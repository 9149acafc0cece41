#!/usr/bin/env python3
"""Benchmark the numpy kernels against the compiled kernels.

Two regimes matter here:

* batched training steps (B=64): dominated by small dense matmuls, where
  numpy/BLAS is already near-optimal;
* sequential chain stepping (B=1): dominated by per-call overhead, where
  the compiled kernels win.

Run:  python benchmarks/bench_backends.py [--rounds N]
"""

import argparse
import time

import numpy as np

from basketdae.backends import available_backends, get_backend


def timeit(fn, *args, reps):
    fn(*args)  # warm-up / JIT import costs
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / reps)
    return best * 1e6  # microseconds


def kernel_rows(rng, B, p, N, reps):
    w_in = rng.normal(0, 0.3, (N, p))
    b_in = rng.normal(0, 0.3, N)
    w_out = rng.normal(0, 0.3, (p, N))
    b_out = rng.normal(0, 0.3, p)
    xt = (rng.random((B, p)) < 0.4).astype(float)
    x = (rng.random((B, p)) < 0.4).astype(float)
    rows = []
    for name in available_backends():
        be = get_backend(name)
        fwd = timeit(be.forward_batch, w_in, b_in, w_out, b_out, xt, reps=reps)
        h, y = be.forward_batch(w_in, b_in, w_out, b_out, xt)
        bwd = timeit(be.backward_batch, w_out, xt, h, y, x, reps=reps)
        ce = timeit(be.cross_entropy_sum, x, y, 1e-7, 1 - 1e-7, reps=reps)
        rows.append((name, fwd, bwd, ce))
    return rows


def adam_rows(rng, size, reps):
    rows = []
    for name in available_backends():
        be = get_backend(name)
        param = rng.normal(size=size)
        grad = rng.normal(size=size)
        m = np.zeros(size)
        v = np.zeros(size)
        rows.append((name, timeit(be.adam_update, param, grad, m, v, 3,
                                  1e-4, 0.9, 0.999, 1e-8, reps=reps)))
    return rows


def train_rows(rounds):
    """End to end: one full training run per backend on planted data."""
    from basketdae import SyntheticSpec, TrainConfig, synth_dataset
    from basketdae import backends, training

    spec = SyntheticSpec()
    tr = synth_dataset(spec, 2000, seed=1)
    ev = synth_dataset(spec, 500, seed=2)
    cfg = TrainConfig(n_hidden=100, batch_size=64, rounds=rounds, lr=1e-4,
                      eval_every=rounds, seed=3)
    rows = []
    saved = (backends.forward_batch, backends.backward_batch,
             backends.cross_entropy_sum, backends.adam_update)
    try:
        for name in available_backends():
            be = get_backend(name)
            backends.forward_batch = be.forward_batch
            backends.backward_batch = be.backward_batch
            backends.cross_entropy_sum = be.cross_entropy_sum
            backends.adam_update = be.adam_update
            t0 = time.perf_counter()
            training.train(tr, ev, cfg)
            rows.append((name, time.perf_counter() - t0))
    finally:
        (backends.forward_batch, backends.backward_batch,
         backends.cross_entropy_sum, backends.adam_update) = saved
    return rows


def print_table(title, header, rows):
    print(f"\n{title}")
    print(f"  {header[0]:<10}" + "".join(f"{h:>14}" for h in header[1:]))
    for row in rows:
        print(f"  {row[0]:<10}" + "".join(f"{v:>14.1f}" for v in row[1:]))
    if len(rows) == 2:
        speedups = [rows[0][i] / rows[1][i] for i in range(1, len(rows[0]))]
        print(f"  {'speedup':<10}" + "".join(f"{s:>13.2f}x" for s in speedups))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=3000,
                        help="training rounds for the end-to-end comparison")
    args = parser.parse_args()

    if len(available_backends()) < 2:
        print("compiled kernels not built; only the numpy backend is available")

    rng = np.random.default_rng(0)
    print_table("training regime: batch 64, p=10, N=100 (microseconds/call)",
                ("backend", "forward", "backward", "xent"),
                kernel_rows(rng, 64, 10, 100, reps=2000))
    print_table("chain regime: batch 1, p=10, N=100 (microseconds/call)",
                ("backend", "forward", "backward", "xent"),
                kernel_rows(rng, 1, 10, 100, reps=5000))
    print_table("adam update, 2,110 parameters (microseconds/call)",
                ("backend", "adam"), adam_rows(rng, 2110, reps=5000))
    print_table(f"end-to-end training, {args.rounds} rounds (seconds)",
                ("backend", "train"), [(n, t) for n, t in train_rows(args.rounds)])


if __name__ == "__main__":
    main()

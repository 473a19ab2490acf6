#!/usr/bin/env python3
"""Benchmark the compiled LSTM kernels against the pure-numpy fallback.

Runs each backend in its own subprocess (backend selection happens at
import time via ``UNRAVEL_BACKEND``) and times the per-document
forward + backward pass that dominates training.  Both backends compute
the same recurrence, so the reported mean loss should agree to several
digits; exact bits differ because they are distinct floating-point
programs.

    python benchmarks/bench_lstm_kernels.py [--docs 200] [--tokens 120]
                                            [--d-h 50] [--d-e 100]
                                            [--repeats 3]
"""

import argparse
import json
import os
import subprocess
import sys


def parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=200, help="documents per pass")
    parser.add_argument("--tokens", type=int, default=120, help="tokens per document")
    parser.add_argument("--d-h", type=int, default=50, help="hidden size")
    parser.add_argument("--d-e", type=int, default=100, help="embedding size")
    parser.add_argument("--vocab", type=int, default=2000, help="lexicon size")
    parser.add_argument(
        "--repeats",
        type=int,
        default=3,
        choices=range(1, 100),
        metavar="N",
        help="timed passes (best is reported)",
    )
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    return parser.parse_args(argv)


def run_worker(args: argparse.Namespace) -> None:
    """Time forward+backward passes under whichever backend imported."""
    import time

    import numpy as np

    from unravel.rnn import BACKEND, LstmModel

    rng = np.random.default_rng(11)
    model = LstmModel(args.vocab, d_e=args.d_e, d_h=args.d_h, seed=11)
    sequences = [
        rng.integers(0, args.vocab, size=args.tokens).tolist()
        for _ in range(args.docs)
    ]
    labels = rng.integers(0, 2, size=args.docs).tolist()

    losses = [
        model.loss_and_gradients(seq, label)[0]
        for seq, label in zip(sequences[:8], labels[:8])
    ]  # warm-up
    best = float("inf")
    for _ in range(args.repeats):
        start = time.perf_counter()
        total = 0.0
        for seq, label in zip(sequences, labels):
            loss, _ = model.loss_and_gradients(seq, label)
            total += loss
        best = min(best, time.perf_counter() - start)
    json.dump(
        {
            "backend": BACKEND,
            "seconds": best,
            "docs_per_sec": args.docs / best,
            "mean_loss": total / args.docs,
            "warmup_loss": losses[0],
        },
        sys.stdout,
    )
    print()


def run_backend(backend: str, argv: list[str]) -> dict | None:
    env = dict(os.environ, UNRAVEL_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker", *argv],
        env=env,
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        print(f"backend {backend!r} unavailable:\n{proc.stderr.strip()}")
        return None
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.worker:
        run_worker(args)
        return 0

    passthrough = [
        f"--docs={args.docs}",
        f"--tokens={args.tokens}",
        f"--d-h={args.d_h}",
        f"--d-e={args.d_e}",
        f"--vocab={args.vocab}",
        f"--repeats={args.repeats}",
    ]
    print(
        f"forward+backward over {args.docs} documents × {args.tokens} tokens, "
        f"d_h={args.d_h}, d_e={args.d_e} (best of {args.repeats})"
    )
    results = {}
    for backend in ("py", "cy"):
        result = run_backend(backend, passthrough)
        if result is None:
            continue
        results[backend] = result
        print(
            f"  {backend}: {result['seconds']:.3f}s "
            f"({result['docs_per_sec']:.0f} docs/s, "
            f"mean loss {result['mean_loss']:.6f})"
        )
    if {"py", "cy"} <= results.keys():
        speedup = results["py"]["seconds"] / results["cy"]["seconds"]
        print(f"  compiled kernel speedup: {speedup:.2f}×")
    return 0


if __name__ == "__main__":
    sys.exit(main())

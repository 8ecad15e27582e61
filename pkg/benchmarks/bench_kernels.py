"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--nodes N ...] [--repeat R]

Each kernel runs on the same inputs under every importable backend. The
table reports the best time per call and the largest deviation from the
pure-Python result.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from plienard.kernels import backends


def _cases(N: int, rng: np.random.Generator) -> dict[str, tuple]:
    t = np.linspace(0.0, 1.0, N + 1)
    p = 3.0 + np.sin(2 * np.pi * t)
    x = rng.normal(size=N + 1)
    W = np.cumsum(rng.normal(size=N + 1)) / N
    W -= W[-1] * t
    dt = 1.0 / N
    lower = rng.uniform(0.5, 1.0, size=N)
    upper = rng.uniform(0.5, 1.0, size=N)
    diag = -(lower + upper) - 1.0
    rhs = rng.normal(size=N)
    return {
        "phi": (p, x),
        "phi_inv": (p, x),
        "flux_mismatch": (p, W, 0.1, dt),
        "cumtrapz": (x, dt),
        "cyclic_tridiag_solve": (lower, diag, upper, rhs),
    }


def run(nodes: list[int], repeat: int) -> None:
    impls = backends()
    names = sorted(impls)
    rng = np.random.default_rng(0)
    print(f"backends: {', '.join(names)}")
    head = f"{'kernel':22s} {'N':>6s}" + "".join(f" {n + ' [us]':>14s}" for n in names) + f" {'speedup':>8s} {'max dev':>10s}"
    print(head)
    for N in nodes:
        for kernel, args in _cases(N, rng).items():
            times, outs = {}, {}
            for name in names:
                fn = getattr(impls[name], kernel)
                outs[name] = np.asarray(fn(*args))
                timer = timeit.Timer(lambda fn=fn: fn(*args))
                number, _ = timer.autorange()
                times[name] = min(timer.repeat(repeat, number)) / number * 1e6
            ref = outs["python"]
            dev = max(float(np.max(np.abs(o - ref))) for o in outs.values())
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            row = f"{kernel:22s} {N:6d}" + "".join(f" {times[n]:14.2f}" for n in names)
            print(f"{row} {speed:8.2f} {dev:10.2e}")


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, nargs="+", default=[128, 512, 4096])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    run(args.nodes, args.repeat)


if __name__ == "__main__":
    main()

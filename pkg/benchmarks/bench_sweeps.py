"""Compare the compiled and pure-Python sweep kernels.

    python benchmarks/bench_sweeps.py [--sizes 100,1000,10000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from shadow_cover import kernels
from shadow_cover._sweeps_py import backward_recurrence as py_backward
from shadow_cover._sweeps_py import forward_recurrence as py_forward


def _inputs(M, n, seed=0):
    rng = np.random.default_rng(seed)
    A = 0.4 * rng.standard_normal((M - 1, n, n))
    b = rng.standard_normal((M, n))
    return A, b


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="100,1000,10000")
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    compiled = kernels.BACKENDS.get("compiled")
    if compiled is None:
        print("compiled extension not available; timing the Python kernels only")
    print(f"{'length':>8} {'python fwd':>12} {'compiled fwd':>13} {'python bwd':>12} "
          f"{'compiled bwd':>13} {'speedup':>8} {'max diff':>10}")
    for M in (int(s) for s in args.sizes.split(",")):
        A, b = _inputs(M, args.dim)
        tp_f = min(timeit.repeat(lambda: py_forward(A, b), number=1, repeat=args.repeat))
        tp_b = min(timeit.repeat(lambda: py_backward(A, b), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{M:>8} {tp_f:>12.2e} {'-':>13} {tp_b:>12.2e} {'-':>13}")
            continue
        tc_f = min(timeit.repeat(lambda: compiled.forward_recurrence(A, b), number=1, repeat=args.repeat))
        tc_b = min(timeit.repeat(lambda: compiled.backward_recurrence(A, b), number=1, repeat=args.repeat))
        diff = max(np.abs(py_forward(A, b) - compiled.forward_recurrence(A, b)).max(),
                   np.abs(py_backward(A, b) - compiled.backward_recurrence(A, b)).max())
        speed = (tp_f + tp_b) / (tc_f + tc_b)
        print(f"{M:>8} {tp_f:>12.2e} {tc_f:>13.2e} {tp_b:>12.2e} {tc_b:>13.2e} {speed:>7.0f}x {diff:>10.1e}")


if __name__ == "__main__":
    main()

"""Time the compiled and pure-Python shooting kernels on the same problems.

    python3 benchmarks/bench_kernel.py [--repeat N]

Reports wall time per eigenvalue batch and the largest relative difference
between the two backends' eigenvalues.
"""
import argparse
import time

from cheegerspec.bounds import omega_problem
from cheegerspec.sturm import BACKENDS, eigenvalue
from cheegerspec.validate import sphere2_case
from cheegerspec.weights import GeometryParams, build_weights

PROBLEMS = {
    "sphere2 k=1..13": (sphere2_case().problem, 13),
    "omega1 n=3 h=1 k=1..8": (omega_problem(1, build_weights(GeometryParams(3, 1.0, 1.0, "agol"))), 8),
    "omega2 n=2 h=1 k=1..8": (omega_problem(2, build_weights(GeometryParams(2, 1.0, 1.0, "agol"))), 8),
}


def run(prob, count, backend):
    out, lower = [], 0.0
    for k in range(1, count + 1):
        lower = eigenvalue(prob, k, lower=lower, backend=backend)
        out.append(lower)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "cython" not in BACKENDS:
        print("compiled kernel not built; only the python backend is available")
    print(f"{'problem':<24} {'backend':<8} {'best s':>9} {'speedup':>8} {'max rel diff':>13}")
    for name, (prob, count) in PROBLEMS.items():
        times, vals = {}, {}
        for backend in sorted(BACKENDS):
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                vals[backend] = run(prob, count, backend)
                best = min(best, time.perf_counter() - t0)
            times[backend] = best
        diff = 0.0
        if len(vals) == 2:
            diff = max(abs(a - b) / abs(b) for a, b in zip(vals["cython"], vals["python"]))
        for backend, t in times.items():
            print(f"{name:<24} {backend:<8} {t:>9.4f} {times['python'] / t:>7.1f}x {diff:>13.2e}")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

from gigcontract import EmployerPolicy, GridSpec, ModelParams, SimulationConfig, simulate, solve
from gigcontract import _backend


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    det = ModelParams(1.0, 1.0, 0.8, 0.8, 0.0)
    noisy = ModelParams(1.0, 1.0, 0.8, 0.8, 0.1)
    _, policy, _ = solve(noisy)
    cases = {
        "solve sigma=0, 1201 nodes": lambda b: solve(det, GridSpec(0.0, 0.6, 1201), backend=b),
        "solve sigma=0.1, 601 nodes": lambda b: solve(noisy, backend=b),
        "simulate 1e4 paths x 120 rounds": lambda b: simulate(
            noisy, EmployerPolicy.tabulated(policy),
            SimulationConfig(r0=0.0, rounds=120, paths=10_000), backend=b),
    }
    backends = ["python"] + (["cython"] if _backend.BACKEND == "cython" else [])
    print(f"{'case':36s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        t = [best_of(lambda: fn(b), args.repeat) for b in backends]
        line = f"{name:36s}" + "".join(f"{x:11.3f}s" for x in t)
        if len(t) > 1:
            line += f"{t[0] / t[1]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()

"""Benchmark the compiled simulation kernel against the pure-Python fallback.

Runs each policy on the built-in instance with both kernels, reports
rounds/second and the speedup, and verifies the traces are bit-identical.

Usage: python benchmarks/bench_backends.py [--horizon 100000] [--policies ...]
"""

import argparse
import time

import numpy as np

from greedybandit.analysis import make_figure1_instance
from greedybandit.backend import available_backends, lower_instance, simulate
from greedybandit.model import replication_rng

OUTCOME_FOR_POLICY = {
    "cts-beta": "bernoulli",
    "cts-gaussian": "deterministic",
    "cucb": "bernoulli",
}


def run_once(kernel, policy, horizon):
    inst = make_figure1_instance(0.04, outcome_model=OUTCOME_FOR_POLICY[policy])
    lowered = lower_instance(inst)
    rng = replication_rng(0, 0)
    m = inst.arm_count
    kwargs = {}
    if policy == "cts-beta":
        kwargs["beta_a"] = np.ones(m)
        kwargs["beta_b"] = np.ones(m)
    else:
        kwargs["counts"] = np.ones(m, dtype=np.int64)
        kwargs["emp_means"] = np.array(inst.means)
    start = time.perf_counter()
    actions, regret = simulate(
        lowered, policy, horizon, rng, 0.892, kernel=kernel, **kwargs
    )
    return time.perf_counter() - start, actions, regret


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--horizon", type=int, default=100_000)
    parser.add_argument(
        "--policies",
        nargs="+",
        default=["cts-beta", "cts-gaussian", "cucb"],
        choices=list(OUTCOME_FOR_POLICY),
    )
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; benchmarking the python kernel only")

    print(f"horizon: {args.horizon} rounds, built-in 4-unit instance")
    header = f"{'policy':<14} {'kernel':<10} {'seconds':>9} {'rounds/s':>12}"
    print(header)
    print("-" * len(header))
    for policy in args.policies:
        results = {}
        for name, kernel in sorted(backends.items()):
            # python kernel is slow; scale its horizon down and extrapolate
            horizon = args.horizon if name == "compiled" else min(args.horizon, 20_000)
            elapsed, actions, regret = run_once(kernel, policy, horizon)
            results[name] = (horizon, elapsed, actions, regret)
            print(
                f"{policy:<14} {name:<10} {elapsed:>9.3f} {horizon / elapsed:>12.0f}"
            )
        if len(results) == 2:
            h_py, t_py, a_py, r_py = results["python"]
            h_c, t_c, a_c, r_c = results["compiled"]
            speedup = (h_c / t_c) / (h_py / t_py)
            same = np.array_equal(a_py, a_c[:h_py]) and np.array_equal(
                r_py, r_c[:h_py]
            )
            print(
                f"{'':<14} speedup {speedup:>6.1f}x   "
                f"traces identical over {h_py} rounds: {same}"
            )
    print()


if __name__ == "__main__":
    main()

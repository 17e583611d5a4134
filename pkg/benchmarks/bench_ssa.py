"""Compiled vs pure-Python SSA kernel on the bundled models.

Runs the same batch on both backends, checks that the summaries agree
exactly and reports jumps per second.

    python benchmarks/bench_ssa.py [--trials N] [--repeat R]
"""

import argparse
import statistics
import time
from pathlib import Path

from polyctmc.network import parse_model
from polyctmc.simulator import SimConfig, available_backends, simulate
from polyctmc.simulator.model import SimModel

MODELS = Path(__file__).resolve().parent.parent / "models"

CASES = [
    # file, x0, t_max, max_jumps, state_cap, target
    ("c12.crn", 20, 50.0, 10**6, 10**6, range(6)),
    ("c3.crn", 20, 50.0, 10**6, 10**6, None),
    ("bdp_j2.crn", 10, 5.0, 10**5, 10**5, None),
    ("pair_implosive.crn", 10, 20.0, 10**5, 10**5, None),
    ("runaway.crn", 10, 100.0, 10**6, 10**4, None),
    ("verhulst.crn", 10, 50.0, 10**5, 10**5, None),
    ("branching.crn", 10, 20.0, 10**5, 10**5, None),
]


def time_backend(spec, model, cfg, backend, repeat):
    times = []
    batch = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        batch = simulate(spec, cfg, backend=backend, model=model)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), batch


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if "compiled" not in available_backends():
        print("compiled kernel not built; nothing to compare")
        return 1
    print(f"{'model':<16} {'jumps':>10} {'pure s':>9} {'compiled s':>11} {'speedup':>8} {'Mjump/s':>8}  equal")
    ok = True
    for name, x0, t_max, max_jumps, cap, target in CASES:
        spec = parse_model((MODELS / name).read_text(), name).build()
        model = SimModel(spec)
        cfg = SimConfig(x0, t_max, max_jumps, cap, args.trials, seed=1, target_set=target)
        tp, bp = time_backend(spec, model, cfg, "pure", 1)
        tc, bc = time_backend(spec, model, cfg, "compiled", args.repeat)
        jumps = sum(r.jump_count for r in bc.results)
        same = bp.summary_json() == bc.summary_json() and bp.results == bc.results
        ok &= same
        print(f"{name:<16} {jumps:>10} {tp:>9.3f} {tc:>11.4f} {tp / tc:>8.1f} {jumps / tc / 1e6:>8.2f}  {same}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())

"""Stochastic simulation driver.

Trials are cut into fixed-size chunks; each chunk is simulated by the
selected backend and the chunks are merged in trial order.  The chunking
does not depend on the worker count, so the merged batch (including every
floating-point aggregate) is the same for any degree of parallelism.
"""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from ..chain import ChainSpec
from . import _pure
from .model import SimModel, SimulationError
from .rng import trial_key

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

CHUNK_TRIALS = 256
REASONS = ("t_max", "max_jumps", "state_cap", "absorbed", "hit_target")


def available_backends() -> list[str]:
    return (["compiled"] if _core is not None else []) + ["pure"]


def default_backend() -> str:
    forced = os.environ.get("POLYCTMC_BACKEND", "").strip().lower()
    if forced in ("pure", "compiled"):
        if forced == "compiled" and _core is None:
            raise ImportError("POLYCTMC_BACKEND=compiled but the extension is not built")
        return forced
    return "compiled" if _core is not None else "pure"


def _kernel(backend: str):
    if backend == "compiled":
        if _core is None:
            raise ImportError("compiled simulation kernel is not available")
        return _core.run_chunk
    if backend == "pure":
        return _pure.run_chunk
    raise ValueError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class SimConfig:
    x0: int
    t_max: float = math.inf
    max_jumps: int = 10**6
    state_cap: int = 10**6
    trials: int = 1000
    seed: int = 0
    target_set: Optional[frozenset] = None
    record_occupation: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_jumps < 1:
            raise ValueError("max_jumps must be >= 1")
        if self.x0 < 0:
            raise ValueError("x0 must be >= 0")
        if self.state_cap <= self.x0:
            raise ValueError("state_cap must exceed x0")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.target_set is not None:
            object.__setattr__(self, "target_set", frozenset(int(s) for s in self.target_set))

    def to_dict(self) -> dict:
        return {
            "x0": self.x0,
            "t_max": None if math.isinf(self.t_max) else self.t_max,
            "max_jumps": self.max_jumps,
            "state_cap": self.state_cap,
            "trials": self.trials,
            "seed": self.seed,
            "target_set": None if self.target_set is None else sorted(self.target_set),
        }


@dataclass(frozen=True)
class TrialResult:
    end_reason: str
    final_state: int
    final_time: float
    jump_count: int
    hitting_time: Optional[float]
    occupation: Optional[dict] = None
    note: str = ""


@dataclass
class TrialBatch:
    config: SimConfig
    results: list
    seeds: list
    occupation: dict = field(default_factory=dict)
    backend: str = ""

    @property
    def hitting_times(self) -> list:
        return [r.hitting_time for r in self.results if r.hitting_time is not None]

    def censoring(self) -> tuple[list, list]:
        """(time, event) pairs for survival analysis of the hitting time."""
        times, events = [], []
        for r in self.results:
            if r.hitting_time is not None:
                times.append(r.hitting_time)
                events.append(True)
            elif r.end_reason in ("t_max", "max_jumps", "state_cap"):
                times.append(r.final_time)
                events.append(False)
        return times, events

    def reason_counts(self) -> dict:
        out = {k: 0 for k in REASONS}
        for r in self.results:
            out[r.end_reason] += 1
        return out

    def summary(self, grid_points: int = 25) -> dict:
        n = len(self.results)
        hits = self.hitting_times
        out = {
            "trials": n,
            "seed": self.config.seed,
            "config": self.config.to_dict(),
            "end_reasons": self.reason_counts(),
            "hit_fraction": len(hits) / n,
            "mean_hitting_time": math.fsum(hits) / len(hits) if hits else None,
            "median_hitting_time": statistics.median(hits) if hits else None,
            "mean_final_time": math.fsum(r.final_time for r in self.results) / n,
            "mean_jumps": sum(r.jump_count for r in self.results) / n,
            "max_final_state": max(r.final_state for r in self.results),
            "neutral_stops": sum(1 for r in self.results if r.note),
            "survival": survival_grid(self, grid_points),
            "occupation": occupation_summary(self.occupation),
        }
        return out

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "end_reason", "final_state", "final_time", "jump_count", "hitting_time"])
            for i, r in enumerate(self.results):
                w.writerow(
                    [i, r.end_reason, r.final_state, repr(r.final_time), r.jump_count,
                     "" if r.hitting_time is None else repr(r.hitting_time)]
                )


def kaplan_meier(times: list, events: list) -> tuple[list, list]:
    """Product-limit survival estimate; returns event times and S just after each."""
    order = sorted(range(len(times)), key=lambda i: (times[i], not events[i]))
    at_risk = len(times)
    s = 1.0
    ts, ss = [], []
    i = 0
    while i < len(order):
        t = times[order[i]]
        d = c = 0
        while i < len(order) and times[order[i]] == t:
            if events[order[i]]:
                d += 1
            else:
                c += 1
            i += 1
        if d:
            s *= 1.0 - d / at_risk
            ts.append(t)
            ss.append(s)
        at_risk -= d + c
    return ts, ss


def survival_grid(batch: TrialBatch, points: int) -> list:
    times, events = batch.censoring()
    ev = [t for t, e in zip(times, events) if e and t > 0]
    if not ev:
        return []
    ts, ss = kaplan_meier(times, events)
    lo, hi = min(ev), max(ev)
    if hi <= lo:
        return [[lo, ss[-1]]]
    grid = [lo * (hi / lo) ** (i / (points - 1)) for i in range(points)]
    out = []
    j = 0
    s = 1.0
    for g in grid:
        while j < len(ts) and ts[j] <= g:
            s = ss[j]
            j += 1
        out.append([g, s])
    return out


def occupation_summary(agg: dict) -> dict:
    if not agg:
        return {"total_time": 0.0, "states": 0}
    states = sorted(agg)
    total = math.fsum(agg[s] for s in states)
    out = {"total_time": total, "states": len(states), "min_state": states[0], "max_state": states[-1]}
    if total > 0:
        out["mean_state"] = math.fsum(s * agg[s] for s in states) / total
        qs = {}
        acc = 0.0
        want = [0.1, 0.25, 0.5, 0.75, 0.9]
        for s in states:
            acc += agg[s] / total
            while want and acc >= want[0]:
                qs[str(want.pop(0))] = s
        for q in want:
            qs[str(q)] = states[-1]
        out["quantiles"] = qs
    return out


def _run(args):
    backend, model, cfg, start, stop, rec = args
    return _kernel(backend)(model, cfg, start, stop, rec)


def simulate(
    spec: ChainSpec,
    cfg: SimConfig,
    workers: int = 1,
    backend: Optional[str] = None,
    model: Optional[SimModel] = None,
) -> TrialBatch:
    """Run ``cfg.trials`` independent SSA trials of ``spec``."""
    backend = backend or default_backend()
    _kernel(backend)
    model = model or SimModel(spec)
    target = cfg.target_set or frozenset()
    kcfg = (cfg.x0, float(cfg.t_max), cfg.max_jumps, cfg.state_cap, cfg.seed, target)
    chunks = [(s, min(s + CHUNK_TRIALS, cfg.trials)) for s in range(0, cfg.trials, CHUNK_TRIALS)]
    jobs = [(backend, model, kcfg, a, b, cfg.record_occupation) for a, b in chunks]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            outs = list(ex.map(_run, jobs))
    else:
        outs = [_run(j) for j in jobs]

    results = []
    agg_cells: dict = {}
    for res, agg in outs:
        for reason, x, t, n, hit, occ, neutral in res:
            results.append(
                TrialResult(
                    REASONS[reason],
                    int(x),
                    t,
                    int(n),
                    None if math.isnan(hit) else hit,
                    occ,
                    "total rate 0 at a non-absorbing state (neutral state)" if neutral else "",
                )
            )
        for s in sorted(agg):
            v = agg[s][0] + agg[s][1]
            _pure._occ_add(agg_cells, s, v)
    occupation = {s: agg_cells[s][0] + agg_cells[s][1] for s in sorted(agg_cells)}
    seeds = [trial_key(cfg.seed, i) for i in range(cfg.trials)]
    return TrialBatch(cfg, results, seeds, occupation, backend)


__all__ = [
    "SimConfig",
    "SimulationError",
    "TrialBatch",
    "TrialResult",
    "available_backends",
    "default_backend",
    "kaplan_meier",
    "simulate",
]

"""Power-law tail of the hitting-time distribution.

If E tau^eps is finite below delta and infinite above it, the survival
function behaves like t^(-delta).  The exponent is estimated by least
squares of log S(t) against log t over one decade, centred (in log scale)
between the median and the deepest point of the tail that still has about
100 trials beyond it.  S is the Kaplan-Meier estimate, so trials stopped by
the horizon count as censored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

MIN_HITS = 1000
TAIL_COUNT = 100
BOOTSTRAP = 200
BOOTSTRAP_SEED = 20240917
GRID_POINTS = 20


class TailEstimationError(ValueError):
    pass


@dataclass(frozen=True)
class TailEstimate:
    exponent: Optional[float]
    ci: Optional[tuple]
    window: Optional[tuple]
    hits: int
    trials: int
    rejected: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "ci": None if self.ci is None else list(self.ci),
            "window": None if self.window is None else list(self.window),
            "hits": self.hits,
            "trials": self.trials,
            "rejected": self.rejected,
            "reason": self.reason,
        }


def _km(times: np.ndarray, events: np.ndarray):
    # events sort before censorings at equal times
    order = np.lexsort((~events, times))
    t = times[order]
    e = events[order]
    at_risk = len(t) - np.arange(len(t))
    s = np.cumprod(1.0 - e / at_risk)
    return t, s


def _survival_at(t: np.ndarray, s: np.ndarray, grid: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(t, grid, side="right") - 1
    return np.where(idx >= 0, s[np.maximum(idx, 0)], 1.0)


def _slope(grid: np.ndarray, surv: np.ndarray) -> float:
    lx = np.log(grid)
    ly = np.log(surv)
    lx = lx - lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))


def estimate_hitting_tail(
    batch,
    min_hits: int = MIN_HITS,
    bootstrap: int = BOOTSTRAP,
    seed: int = BOOTSTRAP_SEED,
    points: int = GRID_POINTS,
) -> TailEstimate:
    """Slope of log S(t) vs log t over the central decade, with a bootstrap CI."""
    times_l, events_l = batch.censoring()
    times = np.asarray(times_l, dtype=float)
    events = np.asarray(events_l, dtype=bool)
    hits = int(events.sum())
    n = len(times)
    if hits < min_hits:
        raise TailEstimationError(f"only {hits} completed hitting times (need {min_hits})")
    t, s = _km(times, events)
    below = np.nonzero(s <= 0.5)[0]
    if len(below) == 0:
        return TailEstimate(None, None, None, hits, n, True, "fewer than half the trials hit the target")
    t_a = float(t[below[0]])
    deep = np.nonzero(s >= TAIL_COUNT / n)[0]
    t_b = float(t[deep[-1]]) if len(deep) else t_a
    if t_a <= 0 or t_b / t_a < 10.0:
        return TailEstimate(
            None, None, (t_a, t_b), hits, n, True, "tail spread below one decade (no power-law range)"
        )
    centre = math.sqrt(t_a * t_b)
    lo, hi = centre / math.sqrt(10.0), centre * math.sqrt(10.0)
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), points))
    est = _slope(grid, _survival_at(t, s, grid))

    rng = np.random.default_rng(seed)
    slopes = []
    for _ in range(bootstrap):
        idx = rng.integers(0, n, n)
        bt, bs = _km(times[idx], events[idx])
        sv = _survival_at(bt, bs, grid)
        if np.all(sv > 0):
            slopes.append(_slope(grid, sv))
    ci = None
    if slopes:
        ci = (float(np.percentile(slopes, 2.5)), float(np.percentile(slopes, 97.5)))
    return TailEstimate(est, ci, (lo, hi), hits, n)

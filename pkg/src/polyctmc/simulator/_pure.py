"""Reference SSA kernel in plain Python.

Bit-for-bit twin of the compiled kernel in ``_core.pyx``: same uniforms,
same float operations in the same order.  Used when the extension is not
built, and as the baseline in the benchmark.
"""

from __future__ import annotations

import math

from .model import FAM_ALIAS, FAM_DIRAC, FAM_GEOM, FAM_NEGBIN, FAM_POISSON, SimModel
from .rng import GOLDEN, MASK, M1, M2, TWO_M53, trial_key

REASON_T_MAX = 0
REASON_MAX_JUMPS = 1
REASON_STATE_CAP = 2
REASON_ABSORBED = 3
REASON_HIT = 4

MAX_DRAW = 1 << 62


def _u(base: int, sub: int) -> float:
    # rng.uniform, inlined
    z = (((base + sub * GOLDEN) & MASK) + GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * M1) & MASK
    z = ((z ^ (z >> 27)) * M2) & MASK
    z ^= z >> 31
    return ((z >> 11) + 1) * TWO_M53


def _step_base(key: int, step: int) -> int:
    z = ((key ^ step) + GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * M1) & MASK
    z = ((z ^ (z >> 27)) * M2) & MASK
    return z ^ (z >> 31)


def _geom(u: float, logq: float) -> int:
    v = math.floor(math.log(u) / logq)
    return MAX_DRAW if v >= MAX_DRAW else int(v)


def _sample(model: SimModel, fi: int, base: int, sub: int):
    """Forward jump of family ``fi`` conditioned on k > shift; returns (jump, next sub)."""
    fam = model.families[fi]
    kind = fam.kind
    s = fam.shift
    if kind == FAM_DIRAC:
        return fam.iparam - s, sub
    if kind == FAM_ALIAS:
        u = _u(base, sub)
        sub += 1
        n = fam.alias_len
        v = u * n
        i = int(v)
        if i >= n:
            i = n - 1
        idx = fam.iparam + i
        if v - i >= model.alias_prob[idx]:
            idx = model.alias_idx[idx]
        return model.alias_val[idx] - s, sub
    if kind == FAM_GEOM:
        # memoryless: k - s - 1 is again geometric
        u = _u(base, sub)
        return 1 + _geom(u, fam.dparam), sub + 1
    while True:
        k = 0
        if kind == FAM_POISSON:
            lam = fam.dparam
            for _ in range(fam.iparam):
                u = _u(base, sub)
                sub += 1
                p = fam.dparam2
                acc = p
                j = 0
                while u > acc and p > 0.0:
                    j += 1
                    p = p * lam / j
                    acc = acc + p
                k += j
        else:  # FAM_NEGBIN: r geometric failure counts
            for _ in range(fam.iparam):
                u = _u(base, sub)
                sub += 1
                k += _geom(u, fam.dparam)
                if k >= MAX_DRAW:
                    k = MAX_DRAW
        if k > s:
            return k - s, sub


def run_chunk(model: SimModel, cfg: tuple, start: int, stop: int, record_occupation: bool):
    """Simulate trials ``start..stop-1``.

    ``cfg`` is ``(x0, t_max, max_jumps, state_cap, seed, target)``.  Returns
    the per-trial tuples ``(reason, state, time, jumps, hit_time, occupation,
    neutral)`` and the chunk's occupation aggregate ``{state: [sum, comp]}``.
    """
    x0, t_max, max_jumps, state_cap, seed, target = cfg
    absorbing = model.absorbing
    cache: dict = {}
    cache_cap = model.CACHE_STATES
    n_fin = model.n_finite
    jumps = model.jumps
    results = []
    agg: dict = {}
    for trial in range(start, stop):
        key = trial_key(seed, trial)
        x = x0
        t = 0.0
        tc = 0.0
        n = 0
        occ: dict = {}
        neutral = False
        while True:
            if x in absorbing:
                reason = REASON_ABSORBED
                break
            if x in target:
                reason = REASON_HIT
                break
            if x >= state_cap:
                reason = REASON_STATE_CAP
                break
            rates = cache.get(x)
            if rates is None:
                rates = model.rates(x)
                if len(cache) < cache_cap:
                    cache[x] = rates
            total = 0.0
            for r in rates:
                total += r
            if total <= 0.0:
                reason = REASON_ABSORBED
                neutral = True
                break
            if n >= max_jumps:
                reason = REASON_MAX_JUMPS
                break
            base = _step_base(key, n)
            dt = -math.log(_u(base, 0)) / total
            now = t + tc
            if now + dt > t_max:
                dt = t_max - now
                _occ_add(occ, x, dt)
                t = t_max
                tc = 0.0
                reason = REASON_T_MAX
                break
            _occ_add(occ, x, dt)
            # Neumaier step
            s2 = t + dt
            if abs(t) >= abs(dt):
                tc += (t - s2) + dt
            else:
                tc += (dt - s2) + t
            t = s2
            level = _u(base, 1) * total
            acc = 0.0
            ch = -1
            last = -1
            for i, r in enumerate(rates):
                if r > 0.0:
                    last = i
                    acc += r
                    if level < acc:
                        ch = i
                        break
            if ch < 0:
                ch = last
            if ch < n_fin:
                x += jumps[ch]
            else:
                w, _ = _sample(model, ch - n_fin, base, 2)
                x += w
            n += 1
        final_time = t + tc
        hit = final_time if reason in (REASON_ABSORBED, REASON_HIT) else math.nan
        occ_out = {s: v[0] + v[1] for s, v in occ.items()}
        for s in sorted(occ_out):
            _occ_add(agg, s, occ_out[s])
        results.append((reason, x, final_time, n, hit, occ_out if record_occupation else None, neutral))
    return results, agg


def _occ_add(occ: dict, x: int, v: float):
    cell = occ.get(x)
    if cell is None:
        occ[x] = [v, 0.0]
        return
    s = cell[0]
    s2 = s + v
    if abs(s) >= abs(v):
        cell[1] += (s - s2) + v
    else:
        cell[1] += (v - s2) + s
    cell[0] = s2

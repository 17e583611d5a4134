# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled SSA kernel; same arithmetic as ``_pure.run_chunk``, in C."""

from libc.math cimport log, floor, fabs, INFINITY
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, calloc, realloc, free

import math

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef double TWO_M53 = 1.0 / 9007199254740992.0
cdef int64_t MAX_DRAW = (<int64_t>1) << 62

cdef enum:
    FAM_DIRAC = 0
    FAM_ALIAS = 1
    FAM_GEOM = 2
    FAM_POISSON = 3
    FAM_NEGBIN = 4


cdef inline uint64_t mix(uint64_t z) nogil:
    z += GOLDEN
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


cdef inline double unif(uint64_t base, uint64_t sub) nogil:
    cdef uint64_t z = mix(base + sub * GOLDEN)
    return <double>((z >> 11) + 1) * TWO_M53


cdef inline int64_t geom_draw(double u, double logq) nogil:
    cdef double v = floor(log(u) / logq)
    if v >= <double>MAX_DRAW:
        return MAX_DRAW
    return <int64_t>v


cdef struct Fam:
    int kind
    int64_t shift
    int64_t iparam
    double dparam
    double dparam2
    int64_t alias_len


cdef inline void occ_add(double* s, double* c, double v) nogil:
    cdef double t = s[0] + v
    if fabs(s[0]) >= fabs(v):
        c[0] += (s[0] - t) + v
    else:
        c[0] += (v - t) + s[0]
    s[0] = t


cdef class _Buffers:
    cdef double* cache
    cdef char* cached
    cdef double* occ_s
    cdef double* occ_c
    cdef char* occ_on
    cdef int64_t* touched
    cdef double* agg_s
    cdef double* agg_c
    cdef char* agg_on
    cdef int64_t* agg_list
    cdef int64_t n_agg

    def __dealloc__(self):
        free(self.cache)
        free(self.cached)
        free(self.occ_s)
        free(self.occ_c)
        free(self.occ_on)
        free(self.touched)
        free(self.agg_s)
        free(self.agg_c)
        free(self.agg_on)
        free(self.agg_list)


cdef void _py_occ_add(dict d, object x, double v):
    cell = d.get(x)
    if cell is None:
        d[x] = [v, 0.0]
        return
    cdef double s = cell[0]
    cdef double c = cell[1]
    occ_add(&s, &c, v)
    cell[0] = s
    cell[1] = c


def run_chunk(model, tuple cfg, int64_t start, int64_t stop, bint record_occupation):
    """See ``_pure.run_chunk``; results are identical bit for bit."""
    x0_obj, t_max_obj, max_jumps_obj, state_cap_obj, seed_obj, target = cfg
    cdef double t_max = float(t_max_obj)
    cdef int64_t max_jumps = int(max_jumps_obj)
    cdef int64_t state_cap = int(state_cap_obj)
    cdef uint64_t seed = (<uint64_t>(int(seed_obj) & 0xFFFFFFFFFFFFFFFF))
    cdef int64_t x0 = int(x0_obj)
    cdef int nch = model.n_channels
    cdef int n_fin = model.n_finite
    cdef int n_fam = nch - n_fin
    cdef int64_t dense = min(state_cap, <int64_t>model.CACHE_STATES)
    if dense < 1:
        dense = 1

    cdef _Buffers B = _Buffers()
    B.cache = <double*>malloc(dense * nch * sizeof(double)) if nch > 0 else NULL
    B.cached = <char*>calloc(dense, 1)
    B.occ_s = <double*>calloc(dense, sizeof(double))
    B.occ_c = <double*>calloc(dense, sizeof(double))
    B.occ_on = <char*>calloc(dense, 1)
    B.touched = <int64_t*>malloc(dense * sizeof(int64_t))
    B.agg_s = <double*>calloc(dense, sizeof(double))
    B.agg_c = <double*>calloc(dense, sizeof(double))
    B.agg_on = <char*>calloc(dense, 1)
    B.agg_list = <int64_t*>malloc(dense * sizeof(int64_t))
    B.n_agg = 0
    if B.cached == NULL or B.occ_s == NULL or B.agg_list == NULL or (nch > 0 and B.cache == NULL):
        raise MemoryError()

    # jumps, families, alias tables
    cdef int64_t* jumps = <int64_t*>malloc(max(n_fin, 1) * sizeof(int64_t))
    cdef Fam* fams = <Fam*>malloc(max(n_fam, 1) * sizeof(Fam))
    ap = model.alias_prob
    cdef int64_t na = len(ap)
    cdef double* alias_prob = <double*>malloc(max(na, 1) * sizeof(double))
    cdef int64_t* alias_idx = <int64_t*>malloc(max(na, 1) * sizeof(int64_t))
    cdef int64_t* alias_val = <int64_t*>malloc(max(na, 1) * sizeof(int64_t))
    cdef double* rates = <double*>malloc(max(nch, 1) * sizeof(double))
    cdef int i
    for i in range(n_fin):
        jumps[i] = model.jumps[i]
    kinds, shifts, ip, dp, dp2, alen = model.family_arrays()
    for i in range(n_fam):
        fams[i].kind = kinds[i]
        fams[i].shift = shifts[i]
        fams[i].iparam = ip[i]
        fams[i].dparam = dp[i]
        fams[i].dparam2 = dp2[i]
        fams[i].alias_len = alen[i]
    for i in range(na):
        alias_prob[i] = ap[i]
        alias_idx[i] = model.alias_idx[i]
        alias_val[i] = model.alias_val[i]

    # membership tables for the absorbing and target sets
    absorbing = model.absorbing
    cdef int64_t top = max([0] + [int(s) for s in absorbing] + [int(s) for s in target]) + 1
    cdef char* is_abs = <char*>calloc(top, 1)
    cdef char* is_tgt = <char*>calloc(top, 1)
    for s in absorbing:
        is_abs[<int64_t>s] = 1
    for s in target:
        is_tgt[<int64_t>s] = 1

    results = []
    big_agg = {}
    cdef int64_t trial, x, n, ch, last, k, j, rep, idx, n_touched
    cdef uint64_t key, base, sub
    cdef double t, tc, total, dt, now, s2, level, acc, u, p, pacc, lam, v
    cdef int reason
    cdef bint neutral
    cdef Fam* f
    cdef double* row
    try:
        for trial in range(start, stop):
            key = mix(mix(seed) ^ <uint64_t>trial)
            x = x0
            t = 0.0
            tc = 0.0
            n = 0
            n_touched = 0
            neutral = False
            big_occ = None
            while True:
                if x < top and is_abs[x]:
                    reason = 3
                    break
                if x < top and is_tgt[x]:
                    reason = 4
                    break
                if x >= state_cap:
                    reason = 2
                    break
                if x < dense:
                    row = B.cache + x * nch
                    if not B.cached[x]:
                        vals = model.rates(x)
                        for i in range(nch):
                            row[i] = vals[i]
                        B.cached[x] = 1
                else:
                    vals = model.rates(x)
                    for i in range(nch):
                        rates[i] = vals[i]
                    row = rates
                total = 0.0
                for i in range(nch):
                    total += row[i]
                if total <= 0.0:
                    reason = 3
                    neutral = True
                    break
                if n >= max_jumps:
                    reason = 1
                    break
                base = mix(key ^ <uint64_t>n)
                dt = -log(unif(base, 0)) / total
                now = t + tc
                if now + dt > t_max:
                    dt = t_max - now
                    if x < dense:
                        if not B.occ_on[x]:
                            B.occ_on[x] = 1
                            B.touched[n_touched] = x
                            n_touched += 1
                            B.occ_s[x] = dt
                            B.occ_c[x] = 0.0
                        else:
                            occ_add(&B.occ_s[x], &B.occ_c[x], dt)
                    else:
                        if big_occ is None:
                            big_occ = {}
                        _py_occ_add(big_occ, x, dt)
                    t = t_max
                    tc = 0.0
                    reason = 0
                    break
                if x < dense:
                    if not B.occ_on[x]:
                        B.occ_on[x] = 1
                        B.touched[n_touched] = x
                        n_touched += 1
                        B.occ_s[x] = dt
                        B.occ_c[x] = 0.0
                    else:
                        occ_add(&B.occ_s[x], &B.occ_c[x], dt)
                else:
                    if big_occ is None:
                        big_occ = {}
                    _py_occ_add(big_occ, x, dt)
                s2 = t + dt
                if fabs(t) >= fabs(dt):
                    tc += (t - s2) + dt
                else:
                    tc += (dt - s2) + t
                t = s2
                level = unif(base, 1) * total
                acc = 0.0
                ch = -1
                last = -1
                for i in range(nch):
                    if row[i] > 0.0:
                        last = i
                        acc += row[i]
                        if level < acc:
                            ch = i
                            break
                if ch < 0:
                    ch = last
                if ch < n_fin:
                    x += jumps[ch]
                else:
                    f = &fams[ch - n_fin]
                    sub = 2
                    if f.kind == FAM_DIRAC:
                        x += f.iparam - f.shift
                    elif f.kind == FAM_ALIAS:
                        u = unif(base, sub)
                        v = u * f.alias_len
                        idx = <int64_t>v
                        if idx >= f.alias_len:
                            idx = f.alias_len - 1
                        level = v - idx
                        idx = f.iparam + idx
                        if level >= alias_prob[idx]:
                            idx = alias_idx[idx]
                        x += alias_val[idx] - f.shift
                    elif f.kind == FAM_GEOM:
                        x += 1 + geom_draw(unif(base, sub), f.dparam)
                    else:
                        while True:
                            k = 0
                            if f.kind == FAM_POISSON:
                                lam = f.dparam
                                for rep in range(f.iparam):
                                    u = unif(base, sub)
                                    sub += 1
                                    p = f.dparam2
                                    pacc = p
                                    j = 0
                                    while u > pacc and p > 0.0:
                                        j += 1
                                        p = p * lam / j
                                        pacc = pacc + p
                                    k += j
                            else:
                                for rep in range(f.iparam):
                                    u = unif(base, sub)
                                    sub += 1
                                    k += geom_draw(u, f.dparam)
                                    if k >= MAX_DRAW:
                                        k = MAX_DRAW
                            if k > f.shift:
                                x += k - f.shift
                                break
                n += 1

            final_time = t + tc
            hit = final_time if (reason == 3 or reason == 4) else math.nan
            occ_out = {} if record_occupation else None
            for i in range(n_touched):
                k = B.touched[i]
                v = B.occ_s[k] + B.occ_c[k]
                B.occ_on[k] = 0
                if record_occupation:
                    occ_out[k] = v
                if not B.agg_on[k]:
                    B.agg_on[k] = 1
                    B.agg_list[B.n_agg] = k
                    B.n_agg += 1
                    B.agg_s[k] = v
                    B.agg_c[k] = 0.0
                else:
                    occ_add(&B.agg_s[k], &B.agg_c[k], v)
            if big_occ is not None:
                for s in sorted(big_occ):
                    cell = big_occ[s]
                    v = cell[0] + cell[1]
                    if record_occupation:
                        occ_out[s] = v
                    _py_occ_add(big_agg, s, v)
            results.append((reason, x, final_time, n, hit, occ_out, neutral))
    finally:
        free(jumps)
        free(fams)
        free(alias_prob)
        free(alias_idx)
        free(alias_val)
        free(rates)
        free(is_abs)
        free(is_tgt)

    agg = {}
    for i in range(B.n_agg):
        k = B.agg_list[i]
        agg[k] = [B.agg_s[k], B.agg_c[k]]
    agg.update(big_agg)
    return results, agg

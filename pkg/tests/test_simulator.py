import csv
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import load_model
from polyctmc.network import compile_mass_action, parse_network
from polyctmc.simulator import (
    SimConfig,
    SimModel,
    SimulationError,
    TailEstimationError,
    available_backends,
    check_generator_expansion,
    estimate_hitting_tail,
    kaplan_meier,
    simulate,
)
from polyctmc.simulator import _pure, engine, rng

BACKENDS = available_backends()
compiled_only = pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")


def net(text, absorbing=None):
    return compile_mass_action(parse_network(text), absorbing)


# -- rng


def test_mix_matches_splitmix64_reference():
    # first outputs of the reference generator for seeds 0 and 1234567
    assert rng.mix(0) == 0xE220A8397B1DCDAF
    assert rng.mix(1234567) == 6457827717110365317


def test_uniforms_in_unit_interval_and_keyed():
    us = rng.uniforms(3, 17, 5, 1000)
    assert all(0.0 < u <= 1.0 for u in us)
    assert us == rng.uniforms(3, 17, 5, 1000)
    assert us != rng.uniforms(3, 18, 5, 1000)
    assert abs(sum(us) / len(us) - 0.5) < 0.05


def test_pure_inlined_mixers_agree_with_rng():
    key = rng.trial_key(9, 4)
    base = _pure._step_base(key, 11)
    assert base == rng.step_key(key, 11)
    assert [_pure._u(base, i) for i in range(5)] == [rng.uniform(base, i) for i in range(5)]


# -- kernels


def test_pure_death_hitting_time_mean():
    # lambda_-1 = x from 5: the holding times are Exp(k), so E T = H_5
    spec = net("S -> 0 @ 1")
    b = simulate(spec, SimConfig(5, trials=4000, seed=1), backend="pure")
    assert b.reason_counts()["absorbed"] == 4000
    h5 = sum(1 / k for k in range(1, 6))
    sd = math.sqrt(sum(1 / k**2 for k in range(1, 6)))
    mean = sum(b.hitting_times) / 4000
    assert abs(mean - h5) < 4 * sd / math.sqrt(4000)
    assert all(r.jump_count == 5 and r.final_state == 0 for r in b.results)


def test_birth_death_stationary_mean():
    # lambda_1 = 1, lambda_-1 = x: Poisson(1) stationary law
    spec = load_model("c3.crn")
    b = simulate(spec, SimConfig(1, t_max=2000.0, trials=4, seed=2), backend="pure")
    occ = b.summary()["occupation"]
    assert abs(occ["total_time"] - 8000.0) < 1e-6
    assert abs(occ["mean_state"] - 1.0) < 0.05


@pytest.mark.parametrize("backend", BACKENDS)
def test_stop_reasons(backend):
    c12 = load_model("c12.crn")
    b = simulate(c12, SimConfig(20, t_max=0.01, trials=20, seed=3), backend=backend)
    assert b.reason_counts()["t_max"] == 20
    assert all(r.final_time == 0.01 and r.hitting_time is None for r in b.results)

    b = simulate(c12, SimConfig(20, max_jumps=7, trials=20, seed=3), backend=backend)
    assert all(r.end_reason == "max_jumps" and r.jump_count == 7 for r in b.results)

    b = simulate(c12, SimConfig(20, state_cap=21, trials=50, seed=3, target_set=range(6)), backend=backend)
    assert set(b.reason_counts()) >= {"state_cap"}
    for r in b.results:
        assert r.end_reason in ("state_cap", "hit_target")
        assert (r.final_state >= 21) == (r.end_reason == "state_cap")
        assert (r.final_state <= 5) == (r.end_reason == "hit_target")

    b = simulate(net("S -> 0 @ 1"), SimConfig(3, trials=10, seed=3), backend=backend)
    assert b.reason_counts()["absorbed"] == 10


@pytest.mark.parametrize("backend", BACKENDS)
def test_neutral_state_stop(backend):
    # 2S -> 0 leaves state 1 with no way out and it is not declared absorbing
    spec = net("2S -> 0 @ 1", absorbing=[0])
    b = simulate(spec, SimConfig(5, trials=5, seed=1), backend=backend)
    assert all(r.final_state == 1 and r.note for r in b.results)
    assert b.summary()["neutral_stops"] == 5


def test_start_in_target_or_absorbing():
    b = simulate(load_model("c12.crn"), SimConfig(3, trials=3, target_set={3}), backend="pure")
    assert all(r.hitting_time == 0.0 and r.jump_count == 0 for r in b.results)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(5, state_cap=5)
    with pytest.raises(ValueError):
        SimConfig(1, trials=0)
    with pytest.raises(ValueError):
        SimConfig(1, t_max=0.0)
    with pytest.raises(ValueError):
        SimConfig(-1)


def test_unknown_backend():
    with pytest.raises(ValueError):
        simulate(load_model("c3.crn"), SimConfig(1, trials=1), backend="gpu")


def test_default_backend_env(monkeypatch):
    monkeypatch.setenv("POLYCTMC_BACKEND", "pure")
    assert engine.default_backend() == "pure"
    monkeypatch.setenv("POLYCTMC_BACKEND", "")
    assert engine.default_backend() == BACKENDS[0]


@compiled_only
@pytest.mark.parametrize(
    "name,x0,cap,target",
    [
        ("c12.crn", 20, 10**4, range(6)),
        ("bdp_j2.crn", 10, 10**4, None),
        ("runaway.crn", 10, 10**4, None),
        ("verhulst.crn", 10, 10**4, None),
        ("branching.crn", 10, 10**4, None),
        ("gene.crn", 3, 10**4, None),
        ("pair_implosive.crn", 10, 10**4, None),
    ],
)
def test_backends_bit_identical(name, x0, cap, target):
    spec = load_model(name)
    cfg = SimConfig(x0, t_max=5.0, max_jumps=2000, state_cap=cap, trials=300, seed=11, target_set=target)
    model = SimModel(spec)
    bp = simulate(spec, cfg, backend="pure", model=model)
    bc = simulate(spec, cfg, backend="compiled", model=model)
    assert bp.results == bc.results
    assert bp.summary_json() == bc.summary_json()


def test_deterministic_across_workers():
    spec = load_model("c12.crn")
    cfg = SimConfig(20, t_max=5.0, trials=600, seed=7, target_set=range(6))
    a = simulate(spec, cfg, workers=1)
    b = simulate(spec, cfg, workers=3)
    assert a.results == b.results
    assert a.summary_json() == b.summary_json()
    assert a.seeds == b.seeds and len(set(a.seeds)) == 600


def test_trial_prefix_stable():
    # trial i depends only on (seed, i), not on the batch size
    spec = load_model("c3.crn")
    a = simulate(spec, SimConfig(5, t_max=3.0, trials=10, seed=4), backend="pure")
    b = simulate(spec, SimConfig(5, t_max=3.0, trials=300, seed=4), backend="pure")
    assert a.results == b.results[:10]


@pytest.mark.parametrize("backend", BACKENDS)
def test_occupation_sums_to_final_time(backend):
    b = simulate(load_model("c3.crn"), SimConfig(4, t_max=7.5, trials=20, seed=5), backend=backend)
    for r in b.results:
        assert math.isclose(math.fsum(r.occupation.values()), r.final_time, rel_tol=1e-12)
    assert math.isclose(b.summary()["occupation"]["total_time"], 150.0, rel_tol=1e-12)


# -- jump-size samplers


@pytest.mark.parametrize("name", ["verhulst.crn", "branching.crn", "gene.crn"])
def test_sampler_conditional_mean(name):
    model = SimModel(load_model(name))
    for fi, fam in enumerate(model.spec.kernel.positive_part):
        tot, m1, m2 = fam.law.forward_moments(fam.shift)
        if tot is None:
            tot = -math.expm1(-float(fam.law.params[0]))
        mean = float(m1) / float(tot)
        var = float(m2) / float(tot) - mean**2
        n = 20000
        draws = []
        for i in range(n):
            w, _ = _pure._sample(model, fi, _pure._step_base(12345, i), 2)
            assert w >= 1
            draws.append(w)
        assert abs(sum(draws) / n - mean) < 5 * math.sqrt(var / n)


def test_alias_table_probabilities():
    from polyctmc.simulator.model import build_alias

    ws = [0.1, 0.2, 0.3, 0.4]
    prob, alias = build_alias(ws)
    got = [0.0] * 4
    for i in range(4):
        got[i] += prob[i] / 4
        got[alias[i]] += (1 - prob[i]) / 4
    assert np.allclose(got, ws)


def test_rates_exact_rounding():
    spec = net("S -> 2S @ 1/3")
    m = SimModel(spec)
    assert m.rates(7) == [7 / 3]
    assert m.rates(7)[0] == float(Fraction(7, 3))


def test_negative_state_rate_rejected():
    spec = net("S -> 0 @ 1")
    m = SimModel(spec)
    assert m.rates(0) == [0.0]
    with pytest.raises(SimulationError):
        SimModel._checked(0, -1, Fraction(1))


# -- survival and tail


def test_kaplan_meier_uncensored_is_empirical():
    ts, ss = kaplan_meier([3.0, 1.0, 2.0, 2.0], [True] * 4)
    assert ts == [1.0, 2.0, 3.0]
    assert ss == [0.75, 0.25, 0.0]


def test_kaplan_meier_censoring():
    ts, ss = kaplan_meier([1.0, 2.0, 3.0, 4.0], [True, False, True, True])
    assert ts == [1.0, 3.0, 4.0]
    assert np.allclose(ss, [0.75, 0.375, 0.0])


class _FakeBatch:
    def __init__(self, times, events):
        self._c = (list(times), list(events))

    def censoring(self):
        return self._c


@pytest.mark.parametrize("delta", [0.5, 1.5])
def test_tail_estimator_on_pareto(delta):
    g = np.random.default_rng(1)
    t = g.random(20000) ** (-1.0 / delta)
    horizon = 1e5
    ev = t <= horizon
    est = estimate_hitting_tail(_FakeBatch(np.minimum(t, horizon), ev))
    assert not est.rejected
    assert abs(est.exponent + delta) < 0.1
    assert est.ci[0] < est.exponent < est.ci[1]


def test_tail_estimator_light_tail_rejected():
    g = np.random.default_rng(2)
    t = g.exponential(1.0, 5000)
    est = estimate_hitting_tail(_FakeBatch(t, [True] * 5000))
    assert est.rejected or est.exponent < -3


def test_tail_estimator_needs_hits():
    with pytest.raises(TailEstimationError):
        estimate_hitting_tail(_FakeBatch([1.0] * 10, [True] * 10))


# -- generator expansion and csv


def test_expansion_error_decreases():
    rows = check_generator_expansion(load_model("bdp_j2.crn"), "pow", 0.5, [10**2, 10**3, 10**4])
    errs = [r.rel_error for r in rows]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-6


def test_expansion_flags_vanishing_terms():
    rows = check_generator_expansion(load_model("pair_implosive.crn"), "log", 1.0, [10**2, 10**3])
    assert all(r.flagged for r in rows)


def test_csv_output(tmp_path):
    b = simulate(load_model("c3.crn"), SimConfig(2, t_max=1.0, trials=5, seed=1))
    path = tmp_path / "out.csv"
    b.write_csv(path)
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 5
    assert [float(r["final_time"]) for r in rows] == [r.final_time for r in b.results]

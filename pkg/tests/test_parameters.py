import random
from fractions import Fraction as F

import pytest

from polyctmc.chain import ChainSpec, DistributionFamily, FiniteKernel, ForwardFamily
from polyctmc.laws import JumpLaw
from polyctmc.network import build_branching, build_runaway, build_verhulst, compile_mass_action, srn2_network
from polyctmc.parameters import compute_parameters, drift_polynomial, from_values
from polyctmc.polynomials import Polynomial

X = Polynomial.x()


def srn2_expected(m, k):
    k1, k2, k3, k4, k5 = k
    R = m + 1
    alpha = 2 * k5 - k4
    beta = k3 - m * k2 + F(m * m + m - 1, 2) * k4 - (m * m + m + 2) * k5
    gamma = k3 - m * k2 + F(m * (m + 1), 2) * k4 - m * (m + 1) * k5
    return R, alpha, beta, gamma


def rand_q(rng):
    return F(rng.randint(1, 40), rng.randint(1, 12))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_srn2_symbolic(m):
    rng = random.Random(m)
    for _ in range(10):
        k = [rand_q(rng) for _ in range(5)]
        p = compute_parameters(compile_mass_action(srn2_network(m, k)))
        assert (p.R, p.alpha, p.beta, p.gamma) == srn2_expected(m, k)


def test_definition_by_rate_sums():
    # alpha = sum a_w w over degree-R rates, gamma adds b_w w and degree R-1 leaders
    spec = ChainSpec(FiniteKernel({2: 3 * X * X + X, -1: X * X + 5 * X, 1: 7 * X}))
    p = compute_parameters(spec)
    assert p.R == 2
    assert p.alpha == 3 * 2 - 1
    assert p.gamma == (1 * 2 - 5) + 7
    assert p.beta == p.gamma - F(1, 2) * (3 * 4 + 1)
    assert p.vartheta == p.gamma - p.beta


def test_drift_polynomial():
    spec = ChainSpec(FiniteKernel({1: X + 1, -1: X}))
    assert drift_polynomial(spec) == Polynomial([1])


def test_R0_gamma_zero():
    spec = ChainSpec(FiniteKernel({1: Polynomial([2]), -1: Polynomial([3])}), frozenset({0}))
    p = compute_parameters(spec)
    assert (p.R, p.alpha, p.gamma, p.beta) == (0, -1, 0, F(-5, 2))


def test_verhulst_and_runaway():
    for c, K in [(1, 10), (F(3, 2), 4)]:
        for mu in (JumpLaw.dirac(2), JumpLaw.geom(F(1, 3)), JumpLaw.poisson(3)):
            v = compute_parameters(build_verhulst(c, K, mu))
            assert (v.R, v.alpha) == (2, -F(c) / K)
            r = compute_parameters(build_runaway(c, K, mu))
            assert (r.R, r.alpha) == (2, F(c) * mu.mean / K)
            assert not v.support_finite or mu.finite_support


def test_branching_formulas():
    rng = random.Random(5)
    for _ in range(20):
        a, b = rand_q(rng), rand_q(rng)
        R = rng.randint(1, 3)
        r = Polynomial.monomial(R, a) + Polynomial.monomial(R - 1, b)
        w = {0: rand_q(rng), 2: rand_q(rng), rng.randint(3, 6): rand_q(rng)}
        tot = sum(w.values())
        mu = JumpLaw.pmf({k: v / tot for k, v in w.items()})
        E, E2 = mu.mean, mu.factorial_moment
        p = compute_parameters(build_branching(r, mu))
        assert p.R == R
        assert p.alpha == a * (E - 1)
        assert p.gamma == b * (E - 1)
        assert p.beta == (a / 2 + b) * (E - 1) - a * E2 / 2


def test_infinite_support_beta_informational():
    fam = ForwardFamily(X, JumpLaw.geom(F(1, 2)), 0)
    spec = ChainSpec(DistributionFamily((fam,), {-1: X * X}, 1), frozenset({0}))
    p = compute_parameters(spec)
    assert not p.support_finite
    assert p.beta_informational


def test_scaling_multiplies_parameters():
    spec = compile_mass_action(srn2_network(2, (1, 2, 3, 4, 5)))
    p, q = compute_parameters(spec), compute_parameters(spec.scaled(F(7, 3)))
    assert q.R == p.R
    assert (q.alpha, q.beta, q.gamma) == (p.alpha * F(7, 3), p.beta * F(7, 3), p.gamma * F(7, 3))


def test_to_dict_rationals_as_strings():
    d = from_values(2, 0, F(-3), 0).to_dict()
    assert d["alpha"] == "0/1" and d["beta"] == "-3/1"

from fractions import Fraction as F

import pytest

from polyctmc.laws import JumpLaw, LawError


@pytest.mark.parametrize(
    "law, mean, second",
    [
        (JumpLaw.dirac(3), F(3), F(9)),
        (JumpLaw.geom(F(1, 2)), F(1), F(3)),  # mean q/p, second q(2-p)/p^2 on {0,1,...}
        (JumpLaw.poisson(2), F(2), F(6)),
        (JumpLaw.negbin(2, F(1, 2)), F(2), F(8)),  # variance r q / p^2 = 4
        (JumpLaw.pmf({0: F(1, 2), 2: F(1, 2)}), F(1), F(2)),
    ],
)
def test_moments(law, mean, second):
    assert law.mean == mean
    assert law.second_moment == second


def test_geom_mass_sums():
    law = JumpLaw.geom(F(1, 3))
    assert law.mass(0) == F(1, 3)
    assert sum(law.mass(k) for k in range(200)) == pytest.approx(1.0)


def test_pmf_must_sum_to_one():
    with pytest.raises(LawError):
        JumpLaw.pmf({0: F(1, 2), 1: F(1, 3)})


@pytest.mark.parametrize("bad", [lambda: JumpLaw.geom(1), lambda: JumpLaw.poisson(0), lambda: JumpLaw.negbin(F(3, 2), F(1, 2))])
def test_invalid_parameters(bad):
    with pytest.raises(LawError):
        bad()


def test_forward_moments_shift_one():
    law = JumpLaw.pmf({0: F(1, 2), 1: F(1, 6), 3: F(1, 3)})
    tot, m1, m2 = law.forward_moments(1)
    assert tot == F(1, 3)
    assert m1 == F(2, 3)  # jump 2 with mass 1/3
    assert m2 == F(4, 3)


def test_poisson_forward_mass_irrational():
    tot, m1, m2 = JumpLaw.poisson(1).forward_moments(0)
    assert tot is None
    assert m1 == 1 and m2 == 2


def test_float_pmf_tail():
    probs = JumpLaw.poisson(3).float_pmf()
    assert 1 - sum(probs) < 1e-11

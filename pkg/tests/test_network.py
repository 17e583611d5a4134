from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyctmc.laws import JumpLaw
from polyctmc.network import (
    HypothesisError,
    Network,
    ParseError,
    Reaction,
    build_branching,
    build_gene_model,
    build_runaway,
    build_verhulst,
    compile_mass_action,
    mass_action_rates,
    parse_law,
    parse_model,
    parse_network,
    parse_polynomial,
    render,
    srn2_network,
)
from polyctmc.polynomials import Polynomial, descending_factorial

X = Polynomial.x()


def test_parse_reversible_and_comments():
    net = parse_network("S <-> 2S @ 1, 2   # dimerisation\n\n0 -> S @ 1/2\n")
    assert [(r.n, r.m, r.kappa) for r in net.reactions] == [(1, 2, 1), (2, 1, 2), (0, 1, F(1, 2))]


def test_malformed_arrow_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_network("S -> 2S @ 1\nS -> 0 @ 1\nS => 0 @ 2\n")
    assert str(exc.value).startswith("line 3: expected '->' or '<->'")
    assert exc.value.line == 3


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("S -> S @ 1", "no net change"),
        ("S -> 2S @ 0", "line 1"),
        ("S -> 2S", "'@'"),
        ("S <-> 2S @ 1", "reverse rate"),
        ("model = verhulst\nS -> 0 @ 1", "takes parameters"),
        ("absorbing = {0}\nabsorbing = {1}\nS -> 0 @ 1", "duplicate"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as exc:
        parse_model(text)
    assert fragment in str(exc.value)


def test_mass_action_descending_factorials():
    net = parse_network("3S -> S @ 2\n0 -> S @ 5")
    rates = mass_action_rates(net)
    assert rates[-2] == descending_factorial(3).scale(2)
    assert rates[1] == Polynomial([5])


def test_render_roundtrip_canonical():
    text = "S <-> 2S @ 1, 2\n2S <-> 3S @ 3, 1\n3S -> 4S @ 1\n"
    net = parse_network(text)
    again = parse_network(render(net))
    assert again.reactions == net.reactions
    assert render(again) == render(net)


complexes = st.integers(0, 4)
rates = st.fractions(min_value=F(1, 10), max_value=10, max_denominator=20)
reactions = st.tuples(complexes, complexes, rates).filter(lambda t: t[0] != t[1]).map(lambda t: Reaction(*t))
networks = st.lists(reactions, min_size=1, max_size=6).map(lambda rs: Network(tuple(rs)))


@given(networks)
def test_roundtrip_property(net):
    assert parse_network(render(net)).reactions == net.reactions


@given(networks, networks)
def test_mass_action_additive(a, b):
    ra, rb, rab = mass_action_rates(a), mass_action_rates(b), mass_action_rates(a + b)
    for w in set(ra) | set(rb):
        expect = ra.get(w, Polynomial()) + rb.get(w, Polynomial())
        assert rab.get(w, Polynomial()) == expect


def test_compile_overrides_below_u():
    spec = compile_mass_action(parse_network("2S -> 0 @ 1\n0 -> S @ 1"))
    k = spec.kernel
    assert k.tail_threshold == 2
    assert k.rate(1, -2) == 0  # x(x-1) vanishes at 1
    assert k.rate(0, 1) == 1


def test_auto_absorbing():
    assert compile_mass_action(parse_network("S -> 2S @ 1\nS -> 0 @ 1")).absorbing_set == {0}
    # no reaction enters 0 from the tail: 0 is neutral and not declared absorbing
    assert compile_mass_action(parse_network("S <-> 2S @ 1, 1")).absorbing_set == frozenset()


def test_explicit_absorbing_directive_wins():
    mf = parse_model("absorbing = {0, 1}\nS -> 2S @ 1\nS -> 0 @ 1")
    assert mf.build().absorbing_set == {0, 1}


def test_srn2_rates():
    net = srn2_network(1, (1, 1, 1, 2, 1))
    rates = mass_action_rates(net)
    assert rates[1] == Polynomial([1, 1])
    assert rates[-1] == Polynomial([0, 1]) + descending_factorial(2).scale(2)
    assert rates[2] == descending_factorial(2)


def test_parse_polynomial_forms():
    assert parse_polynomial("x(x-1)/2") == descending_factorial(2).scale(F(1, 2))
    assert parse_polynomial("2x^2 + 1") == Polynomial([1, 0, 2])
    with pytest.raises(ParseError):
        parse_polynomial("x / x")


def test_parse_law_forms():
    assert parse_law("pmf{0: 1/2, 3: 1/2}") == JumpLaw.pmf({0: F(1, 2), 3: F(1, 2)})
    assert parse_law("negbin(2, 1/3)") == JumpLaw.negbin(2, F(1, 3))
    with pytest.raises(ParseError):
        parse_law("geom(2)")


def test_builder_model_roundtrip():
    text = "model = branching\nr = x^2 + 1\nmu = geom(2/3)\nq0 = {2: 1}\n"
    mf = parse_model(text)
    again = parse_model(mf.render())
    assert again.params == mf.params and again.kind == "branching"


def test_declared_moments_must_match():
    with pytest.raises(HypothesisError):
        parse_model("model = verhulst\nc = 1\nK = 10\nmu = dirac(2)\nE = 3\n").build()


def test_branching_hypotheses():
    with pytest.raises(HypothesisError, match="H1"):
        build_branching(X, JumpLaw.pmf({1: F(1, 2), 2: F(1, 2)}))
    with pytest.raises(HypothesisError, match="H1"):
        build_branching(X, JumpLaw.poisson(1))
    with pytest.raises(HypothesisError, match="H3"):
        build_branching(Polynomial([1]), JumpLaw.geom(F(1, 2)))


def test_branching_kernel():
    spec = build_branching(X * X, JumpLaw.pmf({0: F(1, 2), 3: F(1, 2)}), {2: 1})
    assert spec.absorbing_set == frozenset()
    assert spec.kernel.rate(4, -1) == 8
    assert spec.kernel.rate(4, 2) == 8
    assert spec.kernel.rate(0, 2) == 1
    assert build_branching(X, JumpLaw.geom(F(1, 2))).absorbing_set == {0}


def test_gene_model_kernel():
    spec = build_gene_model([1, 2], [3], [JumpLaw.dirac(1), JumpLaw.dirac(2)])
    k = spec.kernel
    assert k.rate(5, -1) == 15
    assert k.rate(5, 1) == 1
    assert k.rate(5, 2) == 10


def test_gene_model_hypotheses():
    with pytest.raises(HypothesisError, match="H4"):
        build_gene_model([1, 1, 1], [1], [JumpLaw.dirac(1)] * 3)


def test_population_models():
    v = build_verhulst(1, 10, JumpLaw.dirac(1))
    assert v.kernel.rate(10, -1) == 20 and v.absorbing_set == {0}
    r = build_runaway(1, 10, JumpLaw.dirac(2))
    assert r.kernel.rate(10, 2) == 9 and r.absorbing_set == {0, 1}
    with pytest.raises(HypothesisError, match="H6"):
        build_verhulst(1, F(5, 2), JumpLaw.dirac(1))

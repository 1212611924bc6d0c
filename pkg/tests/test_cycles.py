"""Cycle calculus: sums, scalars, divisor intersections, gap removal,
pushforward, ordinary cycles."""

import random
from fractions import Fraction

import pytest

from gecc_kit.cycles import (
    AmbientSpace,
    EnrichedCycle,
    GenericInjectivityFailure,
    GradedEnrichedCycle,
    ImproperIntersection,
    cycle_add,
    ci_intersect,
    component_from_prime,
    divisor_intersect,
    gap_remove,
    proper_pushforward,
    scalar_multiply,
    to_ordinary,
)
from gecc_kit.ideal import Ideal
from gecc_kit.modclass import ModClass
from gecc_kit.polyring import parse_polynomial

AMB_T = AmbientSpace("TstarU", 2, ("x", "y", "t"))
AMB_U = AmbientSpace("U", 2, ("x", "y", "t"))
CTX = AMB_T.context()
Z = ModClass.free


def P(text, ctx=CTX):
    return parse_polynomial(text, ctx)


def comp(*gens, amb=AMB_T):
    ctx = amb.context()
    return component_from_prime(Ideal(ctx, [parse_polynomial(g, ctx) for g in gens]), amb)


def single(component, m, degree=0):
    return GradedEnrichedCycle.single(degree, EnrichedCycle(component.ambient, {component: m}))


@pytest.fixture()
def rng():
    return random.Random(123)


E_GENS = ("y^2-x^3-t^2*x^2", "y*w2+t*x^2*w1", "(x+t^2)*w2+y*t*w1")


def E_component():
    from gecc_kit.ideal import saturate_element

    full = Ideal(CTX, [P(g) for g in E_GENS])
    sat = saturate_element(full, P("y"))
    return component_from_prime(sat, AMB_T)


def test_cycle_add_identity():
    D = single(comp("x", "y", "t"), Z(2))
    assert cycle_add(D, GradedEnrichedCycle.zero(AMB_T)) == D


def test_cycle_add_merges_coefficients():
    c = comp("x", "y", "t")
    total = cycle_add(single(c, Z(2)), single(c, Z(2)))
    assert total.degree(0).terms[c] == Z(4)
    c2 = comp("x", "y", "w2")
    total2 = cycle_add(single(c2, Z(1)), single(c2, Z(2)))
    assert total2.degree(0).terms[c2] == Z(3)


def test_scalar_multiply():
    c = comp("x+t^2", "y")
    E = single(c, Z(1))
    assert scalar_multiply(Z(1), E) == E
    assert scalar_multiply(Z(2), E).degree(0).terms[c] == Z(2)
    twisted = scalar_multiply(ModClass.cyclic(2), single(c, Z(2)))
    assert twisted.degree(0).terms[c] == ModClass(0, (2, 2))


def test_divisor_intersect_paper_e_component(rng):
    # E . V(x) = 2[V(x,y,t)] + 2[V(x,y,w2)]
    E = single(E_component(), Z(1))
    result = divisor_intersect(E, P("x"), rng)
    expected = {comp("x", "y", "t"): Z(2), comp("x", "y", "w2"): Z(2)}
    assert result.degree(0).terms == expected


def test_divisor_intersect_parametrization_oracles(rng):
    # frozen via the parametrization (x,y,t) = (-s^2, 0, s):
    # order of vanishing of t is 1, of x is 2
    c = comp("x+t^2", "y")
    assert divisor_intersect(single(c, Z(1)), P("t"), rng).degree(0).terms == {
        comp("x", "y", "t"): Z(1)
    }
    assert divisor_intersect(single(c, Z(1)), P("x"), rng).degree(0).terms == {
        comp("x", "y", "t"): Z(2)
    }


def test_divisor_intersect_improper(rng):
    c = comp("x+t^2", "y")
    with pytest.raises(ImproperIntersection):
        divisor_intersect(single(c, Z(1)), P("y"), rng)


def test_ci_intersect_empty_list(rng):
    E = single(comp("x+t^2", "y"), Z(1))
    assert ci_intersect(E, [], rng) == E


def test_ci_intersect_graph_chain(rng):
    # E . V(w0, w1, w2-1) = [V(x+t^2, y, w0, w1, w2-1)]
    E = single(E_component(), Z(1))
    result = ci_intersect(E, [P("w0"), P("w1"), P("w2-1")], rng)
    assert result.degree(0).terms == {
        comp("x+t^2", "y", "w0", "w1", "w2-1"): Z(1)
    }


def test_ci_intersect_whole_graph(rng):
    c = comp("x+t^2", "y")
    result = ci_intersect(single(c, Z(1)), [P("w0"), P("w1"), P("w2-1")], rng)
    assert result.degree(0).terms == {
        comp("x+t^2", "y", "w0", "w1", "w2-1"): Z(1)
    }


def test_gap_remove_split(rng):
    cyc = cycle_add(
        single(comp("x", "y", "w0", "w1-1", "w2"), Z(2)),
        single(comp("y", "t^2+x", "2*t*w1-w0", "w2"), Z(2)),
    )
    graph = Ideal(CTX, [P("w0"), P("w1-1"), P("w2")])
    inside, outside = gap_remove(cyc, graph)
    assert list(inside.degree(0).terms) == [comp("x", "y", "w0", "w1-1", "w2")]
    assert list(outside.degree(0).terms) == [comp("y", "t^2+x", "2*t*w1-w0", "w2")]
    # exact partition
    assert cycle_add(inside, outside) == cyc
    # split by the zero ideal: everything inside
    allin, allout = gap_remove(cyc, Ideal(CTX, []))
    assert allin == cyc and not allout


def test_proper_pushforward_examples(rng):
    big = single(comp("t", "x", "y", "w0", "w1-1", "w2"), Z(4))
    image = proper_pushforward(big, AMB_U, rng)
    assert image.degree(0).terms == {comp("t", "x", "y", amb=AMB_U): Z(4)}
    small = single(comp("x", "y", "w0", "w1-1", "w2"), Z(2))
    image2 = proper_pushforward(small, AMB_U, rng)
    assert image2.degree(0).terms == {comp("x", "y", amb=AMB_U): Z(2)}
    assert proper_pushforward(GradedEnrichedCycle.zero(AMB_T), AMB_U, rng) == \
        GradedEnrichedCycle.zero(AMB_U)


def test_proper_pushforward_rejects_collapse(rng):
    # fibers of V(y) over U are the whole cotangent plane
    with pytest.raises(GenericInjectivityFailure):
        proper_pushforward(single(comp("y"), Z(1)), AMB_U, rng)


def test_proper_pushforward_rejects_degree_two(rng):
    amb1 = AmbientSpace("TstarU", 0, ("x",))
    ctx1 = amb1.context()
    c = component_from_prime(Ideal(ctx1, [parse_polynomial("x-w0^2", ctx1)]), amb1)
    with pytest.raises(GenericInjectivityFailure):
        proper_pushforward(
            GradedEnrichedCycle.single(0, EnrichedCycle(amb1, {c: Z(1)})),
            AmbientSpace("U", 0, ("x",)),
            rng,
        )


def test_to_ordinary_alternating():
    c = comp("x", "y", "t")
    cyc = GradedEnrichedCycle(
        AMB_T,
        {-1: EnrichedCycle(AMB_T, {c: Z(1)}), 0: EnrichedCycle(AMB_T, {c: Z(1)})},
    )
    assert not to_ordinary(cyc)
    shifted = single(c, Z(3)).shift(1)
    assert to_ordinary(shifted).terms == {c: -3}


def test_to_ordinary_additivity(rng):
    c1, c2 = comp("x", "y", "t"), comp("x", "y", "w2")
    D = single(c1, Z(2))
    E = cycle_add(single(c1, Z(1)), single(c2, ModClass(1, (2,))))
    lhs = to_ordinary(cycle_add(D, E))
    rhs = to_ordinary(D).plus(to_ordinary(E))
    assert lhs == rhs

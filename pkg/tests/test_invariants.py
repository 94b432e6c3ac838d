import random

import pytest

from cgkit import cgvariety as cv
from cgkit import invariants as inv
from cgkit.exactnum import BivarPoly
from cgkit.reptheory import KleinianGroup, supported_groups

GROUPS = list(supported_groups())


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_pullbacks_equal_plane_invariants(G):
    r = inv.check_stage3(G)
    assert all(r["match"].values())
    assert r["relation_zero"]


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_plane_relation(G):
    assert inv.check_kleinian_relation(G)


def test_plane_invariants_for_d5():
    X, Y = BivarPoly.X(), BivarPoly.Y()
    a, b, c = inv.generators(KleinianGroup("D", 5)).plane_side
    assert a == X ** 2 * Y ** 2
    assert b == X ** 6 + Y ** 6
    assert c == X ** 7 * Y - X * Y ** 7


@pytest.mark.parametrize("n", [6, 8])
def test_displayed_b_normalization_is_off_by_a_scalar(n):
    r = inv.check_stage3(KleinianGroup("D", n), "displayed")
    assert r["match"] == {"A": True, "B": False, "C": True}
    scale = 2 ** (n - 4)
    assert r["pulled_back"][1] == r["expected"][1] * scale


def test_displayed_b_undefined_for_odd_n():
    with pytest.raises(ValueError):
        inv.pulled_back(KleinianGroup("D", 5), "displayed")


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_stabilizer(G):
    S = inv.stabilizer(G)
    assert len(S.elements) == G.order
    assert inv.stabilizer_relations_hold(S)
    assert inv.action_matches_embedding(S)
    assert inv.plane_invariant_under_stabilizer(S)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_power_map_closed_form(n):
    G = KleinianGroup("D", n)
    g = cv.random_gauge(G, random.Random(n))
    P = inv.power_map_phi(cv.gauge_act(g, cv.phi0(G)))
    cf = inv.power_map_closed_form(G, g)
    last = 2 ** (n - 2) - 1
    assert P[0, 0] == cf[("E3", 1)] and P[0, last] == cf[("E3", 2)]
    assert P[1, 0] == cf[("E4", 1)] and P[1, last] == cf[("E4", 2)]


def test_an_stabilizer_solutions_are_roots_of_unity():
    sols = inv.an_stabilizer_solutions(4)
    assert len(sols) == 5
    for s in sols:
        for z in s:
            assert z ** 5 == 1


@pytest.mark.parametrize("name", ["A4", "D6"])
def test_distinct_generator_monomials_restrict_differently(name):
    G = KleinianGroup(name[0], int(name[1:]))
    a, b, c = inv.pulled_back(G)
    polys = [a ** i * b ** j * c ** k for i in range(4) for j in range(3) for k in range(3)]
    for s, p in enumerate(polys):
        assert all(not p == q for q in polys[s + 1:])

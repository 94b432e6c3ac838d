import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from cgkit import cgvariety as cv
from cgkit import quiver as qv
from cgkit import reference
from cgkit.exactnum import Cyclotomic
from cgkit.reptheory import KleinianGroup, supported_groups

X = qv.x_symbolic()


@pytest.mark.parametrize("G", list(supported_groups()), ids=lambda G: G.name)
def test_arrow_counts_match_mckay_graph(G):
    assert all(got == want for got, want in qv.arrow_count_check(G).values())


@pytest.mark.parametrize("G", list(supported_groups()), ids=lambda G: G.name)
def test_rphi0_is_preprojective(G):
    assert qv.check_preprojective(qv.comparison_R(cv.phi0(G), X))["ok"]


@pytest.mark.parametrize("name", ["A3", "D4", "D5", "D8"])
def test_gauge_translates_stay_preprojective(name):
    G = KleinianGroup(name[0], int(name[1:]))
    rng = random.Random(4)
    for _ in range(3):
        phi = cv.gauge_act(cv.random_gauge(G, rng), cv.phi0(G))
        assert qv.check_preprojective(qv.comparison_R(phi, X))["ok"]


def test_figures_differ_only_for_odd_d():
    for G in supported_groups():
        diff = reference.rmap_differences(G, qv.comparison_R(cv.phi0(G), X))
        if G.family == "D" and G.n % 2:
            n = G.n
            assert sorted(diff) == sorted([f"A{n - 1}", f"A{n - 1}*", f"A{n}", f"A{n}*"])
        else:
            assert diff == [], G.name


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_comparison_map_equivariance(seed):
    G = KleinianGroup("D", 5)
    g = cv.random_gauge(G, random.Random(seed))
    assert qv.gauge_rep_equivariance(cv.phi0(G), g, X)


def test_generic_point_is_semistable():
    G = KleinianGroup("D", 6)
    rho = qv.comparison_R(cv.phi0(G), (Cyclotomic.rational(2), Cyclotomic.rational(3)))
    ok, dims = qv.is_theta2_semistable(rho)
    assert ok and dims["O1"] == 2


def test_origin_is_unstable():
    G = KleinianGroup("A", 3)
    rho = qv.comparison_R(cv.phi0(G), (Cyclotomic.rational(0), Cyclotomic.rational(0)))
    ok, dims = qv.is_theta2_semistable(rho)
    assert not ok
    assert dims == {"U0": 1, "U1": 0, "U2": 0, "U3": 0}


def test_theta2_pairs_to_zero_with_alpha():
    for G in [KleinianGroup("A", 4), KleinianGroup("D", 7)]:
        assert qv.theta_pairing_alpha(G, cv.theta2(G)) == 0


def test_rep_json_round_trip():
    rho = qv.comparison_R(cv.phi0(KleinianGroup("D", 4)), (Cyclotomic.rational(1), Cyclotomic.rational(-2)))
    assert qv.QuiverRep.from_json(json.loads(json.dumps(rho.to_json()))) == rho


def test_specialize_matches_numeric_evaluation():
    G = KleinianGroup("D", 4)
    x = (Cyclotomic.rational(5), Cyclotomic.rational(7))
    assert qv.comparison_R(cv.phi0(G), X).specialize(*x) == qv.comparison_R(cv.phi0(G), x)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_generation_is_monotone_in_arrows(seed):
    rng = random.Random(seed)
    G = KleinianGroup("D", 5)
    full = qv.comparison_R(cv.phi0(G), (Cyclotomic.rational(rng.randint(-3, 3)),
                                        Cyclotomic.rational(rng.randint(-3, 3))))
    names = list(full.maps)
    dropped = set(rng.sample(names, rng.randint(0, len(names))))
    sparse = qv.QuiverRep(full.quiver, {k: (M.scale(0) if k in dropped else M) for k, M in full.maps.items()})
    if qv.is_theta2_semistable(sparse)[0]:
        assert qv.is_theta2_semistable(full)[0]
    small, big = qv.generated_subrep(sparse), qv.generated_subrep(full)
    assert all(small[v] <= big[v] for v in big)

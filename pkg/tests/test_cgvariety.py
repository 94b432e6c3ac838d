import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from cgkit import cgvariety as cv
from cgkit import reference
from cgkit.exactnum import Matrix, is_zero
from cgkit.reptheory import KleinianGroup

SMALL = [KleinianGroup("A", 2), KleinianGroup("A", 5), KleinianGroup("D", 4), KleinianGroup("D", 5),
         KleinianGroup("D", 6)]
ids = [G.name for G in SMALL]


@pytest.mark.parametrize("G", SMALL, ids=ids)
def test_phi0_blocks_are_equivariant_isomorphisms(G):
    rep = cv.check_equivariance(cv.phi0(G))
    assert all(v["equivariant"] and v["invertible"] for v in rep.values())


@pytest.mark.parametrize("G", SMALL, ids=ids)
def test_phi0_coherent_and_symmetric(G):
    phi = cv.phi0(G)
    assert cv.verify_coherence(phi) == []
    assert cv.verify_symmetry(phi) == []


@pytest.mark.parametrize("G", SMALL, ids=ids)
def test_batch_checks_on_gauge_translates(G):
    rng = random.Random(3)
    gauges = [cv.random_gauge(G, rng) for _ in range(20)]
    phi = cv.phi0(G)
    assert cv.verify_coherence_batch(phi, gauges) == []
    assert cv.verify_symmetry_batch(phi, gauges) == []


def test_batch_agrees_with_direct_check():
    G = KleinianGroup("D", 4)
    rng = random.Random(11)
    gauges = [cv.random_gauge(G, rng) for _ in range(3)]
    phi = cv.phi0(G)
    for g in gauges:
        assert cv.verify_coherence(cv.gauge_act(g, phi)) == []


def test_coherence_detects_a_rescaled_block():
    G = KleinianGroup("D", 4)
    phi = cv.phi0(G)
    bad = phi.replace({("O1", "E2"): phi.block("O1", "E2").scale(2)})
    assert ("O1", "E2", "E3") in cv.verify_coherence(bad)


def test_d4_gamma_table_against_printed_values():
    tab = cv.coherence_table(KleinianGroup("D", 4))
    ref = reference.published_gamma_table()
    bad = {k for k, M in ref.items() if not tab[k].matrix == M}
    assert bad == {("E2", "E2", "O1"), ("O1", "O1", "E2"), ("O1", "O1", "E3"),
                   ("E3", "O1", "O1"), ("E4", "O1", "O1")}
    assert tab[("O1", "O1", "O1")].matrix == reference.gamma_ooo()


@pytest.mark.parametrize("G", SMALL, ids=ids)
def test_gamma_factors_are_block_scalar(G):
    for key, c in cv.coherence_table(G).items():
        assert cv.is_block_scalar(G, *key, c.matrix)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_gauge_action_is_a_group_action(seed):
    G = KleinianGroup("D", 5)
    rng = random.Random(seed)
    g, h = cv.random_gauge(G, rng), cv.random_gauge(G, rng)
    phi = cv.phi0(G)
    assert cv.gauge_act(g, cv.gauge_act(h, phi)) == cv.gauge_act(g @ h, phi)
    assert cv.gauge_act(g.inverse(), cv.gauge_act(g, phi)) == phi


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(2, 7))
def test_f0_semiinvariance_a(seed, n):
    G = KleinianGroup("A", n)
    g = cv.random_gauge(G, random.Random(seed))
    phi = cv.phi0(G)
    lhs = cv.f0(cv.gauge_act(g, phi))
    assert lhs == cv.character_value(g, cv.theta1(G)) ** G.order * cv.f0(phi)


def test_f0_semiinvariance_d():
    G = KleinianGroup("D", 6)
    rng = random.Random(5)
    phi = cv.phi0(G)
    for _ in range(5):
        g = cv.random_gauge(G, rng)
        assert cv.f0(cv.gauge_act(g, phi)) == cv.character_value(g, cv.theta1(G)) ** G.order * cv.f0(phi)
    assert not is_zero(cv.f0(phi))


@pytest.mark.parametrize("G", SMALL, ids=ids)
def test_f0_weight_identity(G):
    blocks = cv.f0_weight_from_blocks(G)
    for v, (lhs, rhs) in cv.f0_weight_identity(G).items():
        assert lhs == rhs == blocks[v]


def test_theta_vectors():
    G = KleinianGroup("D", 5)
    assert cv.theta1(G) == {"E2": -1, "E3": -1, "E4": -1, "O1": -2, "I2": -2}
    assert set(cv.theta2(G).values()) == {1}


def test_datum_json_round_trip():
    phi = cv.gauge_act(cv.random_gauge(KleinianGroup("D", 4), random.Random(2)), cv.phi0(KleinianGroup("D", 4)))
    assert cv.CGDatum.from_json(json.loads(json.dumps(phi.to_json()))) == phi


def test_replace_rejects_wrong_shape():
    phi = cv.phi0(KleinianGroup("D", 4))
    with pytest.raises(ValueError):
        phi.replace({("O1", "O1"): Matrix.identity(2)})


def test_singular_gauge_rejected():
    G = KleinianGroup("A", 2)
    with pytest.raises(ValueError):
        cv.GaugeElement.from_scalars(G, {"U1": 0})


@pytest.mark.parametrize("G", SMALL, ids=ids)
def test_f0_batch_matches_direct_route(G):
    rng = random.Random(8)
    gauges = [cv.random_gauge(G, rng) for _ in range(4)]
    phi = cv.phi0(G)
    assert cv.f0_batch(phi, gauges) == [cv.f0(cv.gauge_act(g, phi)) for g in gauges]


def test_gamma_is_gauge_independent():
    G = KleinianGroup("D", 4)
    phi = cv.gauge_act(cv.random_gauge(G, random.Random(6)), cv.phi0(G))
    tab = cv.coherence_table(G)
    for key in [("O1", "O1", "O1"), ("E2", "O1", "E3"), ("O1", "O1", "E2"), ("E4", "O1", "O1")]:
        top, bottom = cv.top_path(phi, *key), cv.bottom_path(phi, *key)
        assert top == tab[key].matrix @ bottom

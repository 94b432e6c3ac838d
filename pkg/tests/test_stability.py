import random

import pytest

from cgkit import cgvariety as cv
from cgkit import quiver as qv
from cgkit import stability as st
from cgkit.exactnum import ONE, ZERO, Cyclotomic, Diverges, is_zero
from cgkit.reptheory import KleinianGroup


def test_stability_pair_signs():
    p = st.stability_pair(KleinianGroup("D", 6))
    assert p.theta1["O1"] == -2 and p.theta1["E3"] == -1
    assert set(p.theta2.values()) == {1}


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_destabilizer_agrees_with_king_criterion(n):
    G = KleinianGroup("A", n)
    rng = random.Random(n)
    for _ in range(40):
        phi, x = st.random_planted_an(n, rng)
        semistable, _ = qv.is_theta2_semistable(qv.comparison_R(phi, x))
        alpha, _ = st.destabilizer_exponents_an(phi, x)
        s = cv.OneParamSubgroup(G, {f"U{i}": (a,) for i, a in enumerate(alpha, start=1)})
        assert st.hm_check(s, phi, x, cv.theta2(G)).certificate != semistable
        if not semistable:
            assert st.key_inequality_violations(phi, alpha) == []


def test_planted_points_are_coherent():
    rng = random.Random(9)
    for _ in range(10):
        phi, _ = st.random_planted_an(rng.randint(2, 6), rng)
        assert cv.verify_coherence(phi) == []


def test_destabilize_rejects_semistable_input():
    G = KleinianGroup("A", 3)
    with pytest.raises(ValueError):
        st.destabilize_an(cv.phi0(G), (ONE, ONE))


def test_zero_x_uses_all_ones():
    phi = cv.phi0(KleinianGroup("A", 4))
    assert st.destabilizer_exponents_an(phi, (ZERO, ZERO)) == ((1, 1, 1, 1), "x=0")


def test_x_n_zero_needs_alpha1_zero():
    phi = cv.phi0(KleinianGroup("A", 3))
    alpha, case = st.destabilizer_exponents_an(phi, (ONE, ZERO))
    assert case == "x_n=0" and alpha[0] == 0


@pytest.mark.parametrize("n", [2, 4, 7])
def test_an_nullcone_families(n):
    a, b = Cyclotomic.rational(2), Cyclotomic.rational(-3)
    for k in range(1, n + 2):
        fam = st.nullcone_an(n, k, a, b)
        assert not isinstance(fam.limit, Diverges)
        assert fam.matches
        assert is_zero(cv.f0(fam.limit))
        got = {"phi_i1": [0 if is_zero(st.an_value(fam.limit, i, 1)) else 1 for i in range(1, n + 1)],
               "phi_in": [0 if is_zero(st.an_value(fam.limit, i, n)) else 1 for i in range(1, n + 1)]}
        assert got == st.nullcone_pattern_an(n, k)


def test_nullcone_exponents_clamped_at_ends():
    assert st.nullcone_exponents_an(3, 1) == (-3, -2, -1)
    assert st.nullcone_exponents_an(3, 4) == (-1, -2, -3)
    with pytest.raises(ValueError):
        st.nullcone_exponents_an(3, 5)


@pytest.mark.parametrize("n", st.DN_SUPPORTED)
def test_dn_nullcone_corrected_exponents(n):
    fam = st.nullcone_dn(n, a=2)
    assert fam.matches
    assert fam.notes["datum_limit_exists"]
    assert is_zero(cv.f0(fam.limit))


def test_dn_displayed_exponents_diverge():
    expected = {4: ["A3*", "A4*"], 5: ["A3*"], 6: ["A4*"]}
    for n, arrows in expected.items():
        fam = st.nullcone_dn(n, a=2, exponents="displayed")
        assert sorted(fam.notes["diverging_arrows"]) == arrows


def test_dn_corrected_exponents_values():
    # exponents of g(t)^-1: 2n-4 on E2, n-2 on E3 and E4, (i, 2n-4-i) on the chain
    ex = st.dn_subgroup_exponents(6)
    assert ex["E2"] == (8,) and ex["E3"] == ex["E4"] == (4,)
    assert ex["O1"] == (1, 7) and ex["I2"] == (2, 6) and ex["O3"] == (3, 5)


@pytest.mark.parametrize("n", [1, 2, 3, 6, 10])
def test_fq_restriction(n):
    for q in range(n + 1):
        assert st.check_fq_restriction(n, q)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_reynolds_classification(n):
    assert st.reynolds_image(n, 16) == st.reynolds_expected(n, 16)


@pytest.mark.parametrize("case_id", st.CASE_IDS)
def test_d4_catalogue(case_id):
    rep = st.d4_catalogue_check(case_id)
    assert rep.passed


def test_catalogue_size():
    assert len(st.CASE_IDS) == 17


@pytest.mark.parametrize("n", [2, 5])
def test_nullcone_limits_are_fixed_by_their_subgroup(n):
    G = KleinianGroup("A", n)
    for k in range(1, n + 2):
        alpha = st.nullcone_exponents_an(n, k)
        lim = st.nullcone_an(n, k, ONE, ONE).limit
        for scale in (1, 3):
            s = cv.OneParamSubgroup(G, {f"U{i}": (scale * e,) for i, e in enumerate(alpha, start=1)})
            assert st.is_fixed_by_subgroup(s, lim)


def test_fq_semiinvariance_under_diagonal_gauge():
    n = 4
    G = KleinianGroup("A", n)
    rng = random.Random(12)
    rho = qv.comparison_R(cv.phi0(G), (Cyclotomic.rational(2), Cyclotomic.rational(-3)))
    for _ in range(5):
        g = cv.GaugeElement.from_scalars(G, {f"U{i}": Cyclotomic.rational(rng.choice([-3, -2, 2, 5]))
                                             for i in range(1, n + 1)})
        for q in range(n + 1):
            lhs = st.fq_semiinvariant(n, q, rho.gauge(g))
            assert lhs == cv.character_value(g, cv.theta2(G)) * st.fq_semiinvariant(n, q, rho)

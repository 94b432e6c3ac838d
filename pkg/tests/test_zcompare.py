import random

import pytest
from hypothesis import given, settings, strategies as st

from cgkit import zcompare as zc
from cgkit.cgvariety import phi0, random_gauge
from cgkit.exactnum import ZERO, Cyclotomic, Matrix
from cgkit.quiver import check_preprojective, comparison_R, x_symbolic

X = x_symbolic()


def test_example_point_membership():
    r = zc.z_membership(zc.example_point())
    assert r.ok
    assert r.det == 2
    assert r.wedge == Matrix([[0, -2, 0], [-1, 0, -1], [-1, 0, 1]])
    assert r.wedge_crosscheck


def test_scaled_beta_leaves_z():
    p = zc.example_point()
    q = zc.ZPoint(p.beta * 2, p.A, p.B)
    assert not zc.z_membership(q).E3


def test_wedge_formulas_agree_on_random_matrices():
    rng = random.Random(1)
    for _ in range(20):
        B = Matrix([[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)])
        if B.det() != 0:
            assert zc.wedge2(B) == zc.wedge2_via_inverse(B)


def test_gram_is_multiplicative():
    rng = random.Random(2)
    for _ in range(10):
        g = Matrix([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
        h = Matrix([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
        assert zc.gram(g @ h) == zc.gram(g) @ zc.gram(h)
    assert zc.gram(Matrix.diag([1, 2])) == Matrix.diag([1, 2, 4])


def test_psi_of_phi0_is_example_point():
    assert zc.psi_circ(phi0(zc.D4)) == zc.example_point()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_psi_is_equivariant(seed):
    g, phi = zc.random_regular(random.Random(seed))
    p = zc.psi_circ(phi)
    assert p == zc.gauge_act_z(g, zc.example_point())
    assert zc.z_membership(p).ok


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_r_z_after_psi_is_comparison_map(seed):
    _, phi = zc.random_regular(random.Random(seed))
    assert zc.r_z(zc.psi_circ(phi), X) == comparison_R(phi, X)


def test_gauge_translates_of_example_stay_in_z():
    rng = random.Random(3)
    for _ in range(10):
        assert zc.z_membership(zc.gauge_act_z(random_gauge(zc.D4, rng), zc.example_point())).ok


def test_r_z_is_preprojective():
    assert check_preprojective(zc.r_z(zc.example_point(), X))["ok"]


def test_r_z_at_origin_is_zero():
    rho = zc.r_z(zc.example_point(), (ZERO, ZERO))
    assert all(M.is_zero() for M in rho.maps.values())


def test_boundary_family_outside_open_locus():
    one = Cyclotomic.rational(1)
    with pytest.raises(zc.NotInOpenLocus) as exc:
        zc.psi_circ(zc.family_phi_ab(one, one))
    assert exc.value.code == "NOT_IN_OPEN_LOCUS"


def test_psi_rejects_other_groups():
    from cgkit.reptheory import KleinianGroup
    with pytest.raises(ValueError):
        zc.psi_circ(phi0(KleinianGroup("D", 5)))


def test_family_beta_is_constant():
    a, b = Cyclotomic.rational(3), Cyclotomic.rational(2)
    beta = zc.family_beta(a, b)
    assert set(beta.terms) == {0}
    assert beta.terms[0] == -b * b / (2 * a)


def test_non_extension_witness():
    rep = zc.non_extension_witness(steps=6)
    assert rep.ok
    betas = [beta for _, beta, _ in rep.samples]
    assert betas[0] == Cyclotomic.rational(-1) / 2
    assert all(y == 2 * x for x, y in zip(betas, betas[1:]))

import pytest

from cgkit.exactnum import ONE, ZERO, I
from cgkit.reptheory import (InternalError, KleinianGroup, cg_closed_form, cg_table, character, decomposition,
                             inner_product, natural_rep, presentation_holds, sl2_embedding, supported_groups)

GROUPS = list(supported_groups())


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_dimensions_square_sum_to_order(G):
    assert sum(G.dim(v) ** 2 for v in G.labels()) == G.order


@pytest.mark.parametrize("G", [KleinianGroup("A", 5), KleinianGroup("D", 4), KleinianGroup("D", 7)],
                         ids=lambda G: G.name)
def test_character_orthogonality(G):
    for a in G.labels():
        for b in G.labels():
            ip = inner_product(G, lambda g: character(G, G.irrep(a), g), lambda g: character(G, G.irrep(b), g))
            assert ip == (ONE if a == b else ZERO)


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_closed_form_cg_matches_characters(G):
    assert cg_closed_form(G) == cg_table(G)


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_irreps_satisfy_presentation(G):
    for r in G.irreps():
        assert presentation_holds(G, list(r.generator_images))
    assert presentation_holds(G, sl2_embedding(G))


def test_o1_squared_deviation_at_n4():
    assert [k for k, _ in decomposition(KleinianGroup("D", 4), "O1", "O1")] == ["E1", "E2", "E3", "E4"]
    for n in range(5, 11):
        assert [k for k, _ in decomposition(KleinianGroup("D", n), "O1", "O1")] == ["E1", "E2", "I2"]


def test_odd_n_forces_i_on_e3():
    G = KleinianGroup("D", 5)
    x = G.irrep("E3").generator_images[1]
    assert x[0, 0] == I
    assert KleinianGroup("D", 6).irrep("E3").generator_images[1][0, 0] == ONE


def test_natural_representation():
    assert natural_rep(KleinianGroup("A", 4)) == ["U1", "U4"]
    assert natural_rep(KleinianGroup("D", 6)) == ["O1"]


def test_a_n_delta_rule():
    G = KleinianGroup("A", 6)
    assert decomposition(G, "U4", "U5") == [("U2", 1)]


def test_internal_error_type():
    assert issubclass(InternalError, RuntimeError)


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_cg_dimension_identity(G):
    tab = cg_table(G)
    for i in G.labels():
        for j in G.labels():
            assert sum(tab[(i, j, k)] * G.dim(k) for k in G.labels()) == G.dim(i) * G.dim(j)


@pytest.mark.parametrize("G", [KleinianGroup("A", 3), KleinianGroup("D", 5)], ids=lambda G: G.name)
def test_regular_squared_is_multiple_of_regular(G):
    # chi_reg = sum dim(k) chi_k, so chi_reg^2 = |G| chi_reg
    tab = cg_table(G)
    mult = {k: 0 for k in G.labels()}
    for i in G.labels():
        for j in G.labels():
            for k in G.labels():
                mult[k] += G.dim(i) * G.dim(j) * tab[(i, j, k)]
    assert mult == {k: G.order * G.dim(k) for k in G.labels()}

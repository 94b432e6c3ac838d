"""Published values transcribed for cross-checking: the D4 coherence factors
as printed and the printed shape of R(phi0, x).  Nothing here is used to
compute; the checks compare computed objects against these tables."""

from __future__ import annotations

from fractions import Fraction

from .exactnum import Matrix
from .quiver import QuiverRep, build_quiver, x_symbolic
from .reptheory import KleinianGroup

D4 = KleinianGroup("D", 4)

# gamma_{E_i, E_j, O1}, gamma_{E_i, O1, E_j}, gamma_{O1, E_i, E_j} are +-Id_2
GAMMA_SIGNS = {
    "EEO": {(2, 2): -1, (2, 3): 1, (2, 4): 1, (3, 2): -1, (3, 3): -1, (3, 4): 1,
            (4, 2): -1, (4, 3): -1, (4, 4): 1},
    "EOE": {(2, 2): 1, (2, 3): -1, (2, 4): -1, (3, 2): -1, (3, 3): 1, (3, 4): -1,
            (4, 2): -1, (4, 3): -1, (4, 4): 1},
    "OEE": {(2, 2): 1, (2, 3): -1, (2, 4): -1, (3, 2): 1, (3, 3): -1, (3, 4): -1,
            (4, 2): 1, (4, 3): 1, (4, 4): 1},
}

_SWAP12 = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]

GAMMA_FOUR = {
    ("O1", "O1", "E2"): Matrix(_SWAP12),
    ("O1", "O1", "E3"): Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]),
    ("O1", "O1", "E4"): Matrix([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]),
    ("O1", "E2", "O1"): Matrix.diag([-1, -1, 1, 1]),
    ("O1", "E3", "O1"): Matrix.diag([-1, 1, -1, 1]),
    ("O1", "E4", "O1"): Matrix.diag([-1, 1, 1, -1]),
    ("E2", "O1", "O1"): Matrix(_SWAP12),
    ("E3", "O1", "O1"): Matrix.diag([1, -1, -1, 1]),
    ("E4", "O1", "O1"): Matrix.diag([-1, 1, 1, -1]),
}

# gamma_{O1,O1,O1}: 4x4 grid of scalar blocks s/2 * Id_2
_OOO_SIGNS = [[-1, -1, 1, 1], [1, 1, 1, 1], [-1, 1, 1, -1], [-1, 1, -1, 1]]


def gamma_ooo() -> Matrix:
    rows = []
    for r in range(4):
        for a in range(2):
            rows.append([Fraction(_OOO_SIGNS[r][c], 2) if a == b else 0
                         for c in range(4) for b in range(2)])
    return Matrix(rows)


def published_gamma_table() -> dict:
    """(i, j, k) -> printed coherence factor, for the D4 triples shown."""
    out = {}
    Id2 = Matrix.identity(2)
    for kind, signs in GAMMA_SIGNS.items():
        for (i, j), s in signs.items():
            a, b = f"E{i}", f"E{j}"
            key = {"EEO": (a, b, "O1"), "EOE": (a, "O1", b), "OEE": ("O1", a, b)}[kind]
            out[key] = Id2.scale(s)
    out.update(GAMMA_FOUR)
    out[("O1", "O1", "O1")] = gamma_ooo()
    return out


def published_rmap(G: KleinianGroup) -> QuiverRep:
    """R(phi0, x) with the arrow labels of the printed figures."""
    X, Y = x_symbolic()
    Q = build_quiver(G)
    if G.family == "A":
        maps = {}
        for a in Q.arrows:
            maps[a.name] = Matrix([[Y if a.starred else X]])
        return QuiverRep(Q, maps)
    n = G.n
    maps = {
        "A1": Matrix([[X], [Y]]), "A1*": Matrix([[Y, -X]]),
        "A2": Matrix([[X], [-Y]]), "A2*": Matrix([[Y, X]]),
        f"A{n - 1}": Matrix([[X, Y]]), f"A{n - 1}*": Matrix([[Y], [-X]]),
        f"A{n}": Matrix([[X, -Y]]), f"A{n}*": Matrix([[Y], [X]]),
    }
    for k in range(3, n - 1):
        maps[f"A{k}"] = Matrix([[2 * X, 0], [0, 2 * Y]])
        maps[f"A{k}*"] = Matrix([[Y, 0], [0, -X]])
    return QuiverRep(Q, maps)


def rmap_differences(G: KleinianGroup, computed: QuiverRep) -> list[str]:
    """Arrow names where computed R(phi0, x) differs from the printed figure."""
    ref = published_rmap(G)
    return [a.name for a in ref.quiver.arrows if not computed[a.name] == ref[a.name]]

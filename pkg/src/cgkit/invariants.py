"""Invariants on both sides of the comparison map, the restriction pi to
{phi0} x C^2, the Kleinian relations, and the stabilizer of phi0.

Quiver-side generators for D_n.  The trace words are the palindromic paths
E1 -> O1 -> ... -> last -> E3 -> last -> ... -> O1 -> E1 (for B) and the
same loop preceded by the E1 and E2 detours (for C).  With the weight-2
forward chain arrows of phi0 the displayed normalisation of B restricts to
2^(n-4) (X^(2(n-2)) + Y^(2(n-2))), so :func:`generators_dn` rescales the
trace by 2^(4-n) (this agrees with the displayed formula at n = 4).  For
odd n the E3/E4 arrows carry the factors +-i and the constants differ; they
are fixed so that the plane generators come out exactly.  The literal
displayed formulas stay available through ``variant="displayed"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cgvariety import CGDatum, GaugeElement, gauge_act, phi0
from .exactnum import ONE, I, BivarPoly, Cyclotomic, Matrix, root_of_unity, to_rational
from .quiver import comparison_R, path_product, trace, x_symbolic
from .reptheory import KleinianGroup, image, natural_intertwiner, natural_rep, sl2_embedding


@dataclass(frozen=True)
class InvariantTriple:
    group: KleinianGroup
    quiver_side: tuple  # three callables QuiverRep -> value
    plane_side: tuple  # three BivarPoly
    names: tuple = ("A", "B", "C")


def _q(x) -> Cyclotomic:
    return Cyclotomic.rational(to_rational(Fraction(x)))


def _an_words(n: int):
    a = [f"A{i}" for i in range(n + 1, 0, -1)]
    b = [f"A{i}*" for i in range(1, n + 2)]
    c = ["A1", "A1*"]
    return a, b, c


def generators_an(n: int) -> InvariantTriple:
    G = KleinianGroup("A", n)
    wa, wb, wc = _an_words(n)
    funcs = (
        lambda rho: path_product(rho, wa)[0, 0],
        lambda rho: path_product(rho, wb)[0, 0],
        lambda rho: path_product(rho, wc)[0, 0],
    )
    X, Y = BivarPoly.X(), BivarPoly.Y()
    plane = (X ** (n + 1), Y ** (n + 1), X * Y)
    return InvariantTriple(G, funcs, plane)


def dn_words(n: int):
    mid = [f"A{k}*" for k in range(3, n - 1)]
    back = [f"A{k}" for k in range(n - 2, 2, -1)]
    wa = ["A1*", "A2", "A2*", "A1"]
    wb = ["A1*"] + mid + [f"A{n - 1}*", f"A{n - 1}"] + back + ["A1"]
    wc = ["A1", "A1*", "A2", "A2*"] + mid + [f"A{n - 1}*", f"A{n - 1}"] + back
    return wa, wb, wc


def dn_constants(n: int, variant: str = "normalized") -> dict:
    """Scalars (cA, cB, sB, cC, sC) in
    A = cA tr(wa),  B = cB tr(wb) + sB A^((n-2)/2 or 0),
    C = cC tr(wc) + sC A^((n-1)/2 or 0)."""
    quarter = _q(Fraction(1, 4))
    if variant == "displayed":
        return {"cA": quarter, "cB": ONE, "sB": -_q(2 ** (n - 3)), "eB": Fraction(n - 2, 2),
                "cC": -_q(Fraction(2) ** (3 - n)), "sC": _q(0), "eC": 0}
    if variant != "normalized":
        raise ValueError(variant)
    if n % 2 == 0:
        return {"cA": quarter, "cB": _q(Fraction(2) ** (4 - n)), "sB": -_q(2), "eB": (n - 2) // 2,
                "cC": -_q(Fraction(2) ** (3 - n)), "sC": _q(0), "eC": 0}
    return {"cA": quarter, "cB": -I * _q(Fraction(2) ** (4 - n)), "sB": _q(0), "eB": 0,
            "cC": I * _q(Fraction(2) ** (3 - n)), "sC": -2 * I, "eC": (n - 1) // 2}


def generators_dn(n: int, variant: str = "normalized") -> InvariantTriple:
    G = KleinianGroup("D", n)
    wa, wb, wc = dn_words(n)
    k = dn_constants(n, variant)

    def A(rho):
        return trace(path_product(rho, wa)) * k["cA"]

    def _power(v, e):
        if e != int(e):
            raise ValueError("A^((n-2)/2) needs n even; the displayed B formula is undefined here")
        out = ONE
        for _ in range(int(e)):
            out = v * out
        return out

    def B(rho):
        out = trace(path_product(rho, wb)) * k["cB"]
        if k["sB"] != 0:
            out = out + _power(A(rho), k["eB"]) * k["sB"]
        return out

    def C(rho):
        out = trace(path_product(rho, wc)) * k["cC"]
        if k["sC"] != 0:
            out = out + _power(A(rho), k["eC"]) * k["sC"]
        return out

    X, Y = BivarPoly.X(), BivarPoly.Y()
    m = n - 2
    plane = (X ** 2 * Y ** 2, X ** (2 * m) + Y ** (2 * m), X ** (2 * m + 1) * Y - X * Y ** (2 * m + 1))
    return InvariantTriple(G, (A, B, C), plane)


def generators(G: KleinianGroup, variant: str = "normalized") -> InvariantTriple:
    return generators_an(G.n) if G.family == "A" else generators_dn(G.n, variant)


def pi_restrict(G: KleinianGroup, f: Callable[[CGDatum, tuple], object]) -> BivarPoly:
    """f(phi0, (X, Y)) as a bivariate polynomial."""
    val = f(phi0(G), x_symbolic())
    if isinstance(val, BivarPoly):
        return val
    return BivarPoly.const(val)


def pulled_back(G: KleinianGroup, variant: str = "normalized") -> tuple:
    """pi(R* A), pi(R* B), pi(R* C)."""
    T = generators(G, variant)
    return tuple(pi_restrict(G, lambda phi, x, h=h: h(comparison_R(phi, x))) for h in T.quiver_side)


def kleinian_relation(G: KleinianGroup, a, b, c):
    if G.family == "A":
        return a * b - c ** (G.n + 1)
    return c * c - a * b * b + (a ** (G.n - 1)) * 4


def check_kleinian_relation(G: KleinianGroup) -> bool:
    a, b, c = generators(G).plane_side
    r = kleinian_relation(G, a, b, c)
    return r.is_zero()


def check_stage3(G: KleinianGroup, variant: str = "normalized") -> dict:
    T = generators(G, variant)
    got = pulled_back(G, variant)
    match = [g == p for g, p in zip(got, T.plane_side)]
    rel = kleinian_relation(G, *got)
    return {"match": dict(zip(T.names, match)), "relation_zero": rel.is_zero(),
            "pulled_back": got, "expected": T.plane_side}


# ---------------------------------------------------------------------------
# stabilizer


@dataclass(frozen=True)
class Stabilizer:
    group: KleinianGroup
    generators: tuple  # GaugeElements
    elements: tuple  # GaugeElements (closure)
    action_on_x: tuple  # 2x2 matrices in natural_rep coordinates, aligned with elements


def _gauge_key(g: GaugeElement):
    return tuple((lab, tuple(tuple(x for x in row) for row in g.components[lab].rows))
                 for lab in sorted(g.components))


def _closure(G: KleinianGroup, gens: list[GaugeElement], limit: int) -> list[GaugeElement]:
    ident = GaugeElement.identity(G)
    elems = [ident]
    seen = {_gauge_key(ident)}
    frontier = [ident]
    while frontier:
        new = []
        for h in frontier:
            for s in gens:
                p = s @ h
                key = _gauge_key(p)
                if key not in seen:
                    seen.add(key)
                    elems.append(p)
                    new.append(p)
                    if len(elems) > limit:
                        raise RuntimeError("stabilizer closure too large; broken data")
        frontier = new
    return elems


def an_stabilizer_solutions(n: int) -> list[list[Cyclotomic]]:
    """All g with g phi0 = phi0 for A_n.  With phi0_{i,j} = 1 the conditions
    read g_{i+j} = g_i g_j (g_0 = 1), so g_i = g_1^i by induction on i and
    the pair (1, n) forces g_1^(n+1) = g_0 = 1.  Each root of unity gives a
    solution, which is then checked against the gauge action."""
    G = KleinianGroup("A", n)
    out = []
    for k in range(n + 1):
        z = root_of_unity(n + 1, k)
        g = [ONE] + [z ** i for i in range(1, n + 1)]
        gauge = GaugeElement.from_scalars(G, {f"U{i}": g[i] for i in range(1, n + 1)})
        if gauge_act(gauge, phi0(G)) == phi0(G):
            out.append(g)
    return out


def sigma_generators(G: KleinianGroup) -> list[GaugeElement]:
    """A_n: sigma_j = zeta^j.  D_n: sigma_a = rho(a), sigma_x = rho(x)^-1 on
    every nontrivial irrep (for even n these are the displayed matrices)."""
    if G.family == "A":
        z = root_of_unity(G.n + 1, 1)
        return [GaugeElement.from_scalars(G, {f"U{j}": z ** j for j in range(1, G.n + 1)})]
    a, x = G.generators()
    comps_a = {lab: image(G, G.irrep(lab), a) for lab in G.nontrivial_labels()}
    comps_x = {lab: image(G, G.irrep(lab), x).inverse() for lab in G.nontrivial_labels()}
    return [GaugeElement(G, comps_a), GaugeElement(G, comps_x)]


def displayed_sigma(G: KleinianGroup) -> list[GaugeElement]:
    """sigma_a, sigma_x exactly as displayed for D_n (E3, E4 entries of
    sigma_x are +1, -1 regardless of parity)."""
    m = 2 * (G.n - 2)
    ca, cx = {}, {}
    for lab in G.nontrivial_labels():
        if lab[0] == "E":
            ca[lab] = Matrix([[{"E2": 1, "E3": -1, "E4": -1}[lab]]])
            cx[lab] = Matrix([[{"E2": -1, "E3": 1, "E4": -1}[lab]]])
        else:
            j = int(lab[1:])
            ca[lab] = Matrix.diag([root_of_unity(m, j), root_of_unity(m, -j)])
            cx[lab] = Matrix([[0, 1], [-1, 0]]) if lab[0] == "O" else Matrix([[0, 1], [1, 0]])
    return [GaugeElement(G, ca), GaugeElement(G, cx)]


def stabilizer(G: KleinianGroup) -> Stabilizer:
    phi = phi0(G)
    gens = sigma_generators(G)
    for s in gens:
        if not gauge_act(s, phi) == phi:
            raise RuntimeError("stabilizer generator does not fix phi0")
    elems = _closure(G, gens, 2 * G.order)
    acts = tuple(Matrix.block_diag([g[lab] for lab in natural_rep(G)]) for g in elems)
    return Stabilizer(G, tuple(gens), tuple(elems), acts)


def stabilizer_relations_hold(S: Stabilizer) -> bool:
    G = S.group
    ident = GaugeElement.identity(G)

    def power(g, e):
        out = ident
        for _ in range(e):
            out = g @ out
        return out

    if G.family == "A":
        (s,) = S.generators
        return power(s, G.n + 1) == ident and all(not power(s, d) == ident for d in range(1, G.n + 1))
    sa, sx = S.generators
    m = 2 * (G.n - 2)
    return (power(sa, m) == ident
            and sx @ sx == power(sa, G.n - 2)
            and sx.inverse() @ sa @ sx == sa.inverse())


def embedding_matrices(G: KleinianGroup) -> list[Matrix]:
    """All matrices of the SL_2 embedding, moved to natural_rep coordinates."""
    T = natural_intertwiner(G)
    Tinv = T.inverse()
    gens = [T @ M @ Tinv for M in sl2_embedding(G)]
    elems = [Matrix.identity(2)]
    frontier = list(elems)
    while frontier:
        new = []
        for h in frontier:
            for s in gens:
                p = s @ h
                if not any(p == e for e in elems):
                    elems.append(p)
                    new.append(p)
        frontier = new
    return elems


def action_matches_embedding(S: Stabilizer) -> bool:
    emb = embedding_matrices(S.group)
    acts = list(S.action_on_x)
    if len(emb) != len(acts):
        return False
    return all(any(a == e for e in emb) for a in acts)


def plane_invariant_under_stabilizer(S: Stabilizer) -> bool:
    T = generators(S.group)
    for M in S.action_on_x:
        X, Y = BivarPoly.X(), BivarPoly.Y()
        nx = X * M[0, 0] + Y * M[0, 1]
        ny = X * M[1, 0] + Y * M[1, 1]
        for h in T.plane_side:
            if not h.substitute(nx, ny) == h:
                return False
    return True


# ---------------------------------------------------------------------------
# the power map used in the stage-5 argument for D_n


def power_map_phi(phi: CGDatum) -> Matrix:
    """Phi: O1^(x)(n-2) -> E3 (+) E4, composed from
    pi_{next} phi_{V, O1} along the chain and pi_{E3 (+) E4} phi_{last, O1}
    at the end.  Rows E3, E4; columns the tensor basis (left-factor-major)."""
    G = phi.group
    chain = G.labels()[4:]
    k = G.n - 2
    cols = []
    for idx in range(2 ** k):
        bits = [(idx >> (k - 1 - t)) & 1 for t in range(k)]
        v = Matrix([[ONE], [0]]) if bits[0] == 0 else Matrix([[0], [ONE]])
        for t, b in enumerate(bits[1:]):
            u = Matrix([[ONE], [0]]) if b == 0 else Matrix([[0], [ONE]])
            V = chain[t]
            if t < len(chain) - 1:
                P = phi.component(V, "O1", chain[t + 1])
            else:
                P = Matrix.vstack([phi.component(V, "O1", "E3"), phi.component(V, "O1", "E4")])
            v = P @ v.kron(u)
        cols.append(v.col(0))
    return Matrix([[c[r] for c in cols] for r in range(2)])


def power_map_closed_form(G: KleinianGroup, g: GaugeElement) -> dict:
    """Entries of power_map_phi(g phi0) at e1^(x)k and e2^(x)k (k = n-2).

    Intermediate gauge components cancel in pairs, so
    Phi(g phi0) = g_{E3 (+) E4} Phi(phi0) (g_O1^-1)^(x)k.  Phi(phi0) kills
    every mixed tensor (the forward chain maps are diagonal) and sends
    e_a^(x)k to 2^(n-4) c_{E,a}, where c_{E,a} is the e_a (x) e_a entry of the
    last block's E row.  Writing g_O1^-1 = (p q / r s) this gives
    pi_E Phi(e1^k) = g_E 2^(n-4) (c_{E,1} p^k + c_{E,2} r^k) and
    pi_E Phi(e2^k) = g_E 2^(n-4) (c_{E,1} q^k + c_{E,2} s^k)."""
    k = G.n - 2
    last = G.labels()[-1]
    phi = phi0(G)
    inv = g["O1"].inverse()
    p, q, r, s = inv[0, 0], inv[0, 1], inv[1, 0], inv[1, 1]
    scale = 2 ** (G.n - 4)
    out = {}
    for E in ("E3", "E4"):
        row = phi.component(last, "O1", E)
        c1, c2 = row[0, 0], row[0, 3]
        ge = g[E][0, 0]
        out[(E, 1)] = ge * scale * (c1 * p ** k + c2 * r ** k)
        out[(E, 2)] = ge * scale * (c1 * q ** k + c2 * s ** k)
    return out

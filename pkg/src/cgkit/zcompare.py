"""The D4 variety Z of triples (beta, A, B) in basis form, the isomorphism
psi_circ from the open orbit of CG, the comparison map r_z, and the
degenerate family phi^{a,b} showing psi_circ does not extend.

Labels: the Z side is written with E1..E4, O1.  A = diag(alpha1, alpha2,
alpha3) where alpha_i belongs to E_{i+1}.  B has rows E2, E3, E4 and columns
e1e1, e1e2, e2e2 of Sym^2 O1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cgvariety import CGDatum, GaugeElement, codomain_layout, phi0, random_gauge, verify_coherence
from .exactnum import ONE, ZERO, LaurentPoly, Matrix, cyc, is_zero, laurent_limit_at_zero
from .quiver import QuiverRep, build_quiver, comparison_R
from .reptheory import KleinianGroup

D4 = KleinianGroup("D", 4)

F = Matrix.diag([2, 4, 2])
F_INV = Matrix.diag([cyc(1) / 2, cyc(1) / 4, cyc(1) / 2])
S = Matrix.diag([-1, 1, -1])
SIGMA = Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
H = Matrix([[0, -1], [1, 0]])

# columns of a 4-column O1 (x) O1 block used for Sym^2: e1e1, e1e2, e2e2
_SYM_COLS = (0, 1, 3)


class NotInOpenLocus(ValueError):
    """A denominator in psi_circ vanishes."""

    code = "NOT_IN_OPEN_LOCUS"


@dataclass(frozen=True)
class ZConstants:
    F: Matrix = F
    F_inv: Matrix = F_INV
    S: Matrix = S
    sigma: Matrix = SIGMA
    H: Matrix = H


@dataclass(frozen=True)
class ZPoint:
    beta: object
    A: Matrix
    B: Matrix

    @property
    def alphas(self) -> tuple:
        return self.A[0, 0], self.A[1, 1], self.A[2, 2]

    def __eq__(self, other):
        if not isinstance(other, ZPoint):
            return NotImplemented
        return self.beta == other.beta and self.A == other.A and self.B == other.B

    __hash__ = None

    def to_json(self) -> dict:
        return {"beta": cyc(self.beta).to_json(), "A": self.A.to_json(), "B": self.B.to_json()}


def example_point() -> ZPoint:
    return ZPoint(cyc(-1) / 2, Matrix.identity(3), Matrix([[0, 1, 0], [1, 0, 1], [1, 0, -1]]))


def wedge2(B: Matrix) -> Matrix:
    """The displayed 3x3 minor formula for wedge^2 B (0-based entries)."""
    b = lambda i, j: B[i - 1, j - 1]

    def m(r1, r2, c1, c2):
        return b(r1, c1) * b(r2, c2) - b(r2, c1) * b(r1, c2)

    return Matrix([
        [m(2, 3, 1, 2), m(2, 3, 1, 3), m(2, 3, 2, 3)],
        [m(1, 3, 1, 2), m(1, 3, 1, 3), m(1, 3, 2, 3)],
        [m(1, 2, 1, 2), m(1, 2, 1, 3), m(1, 2, 2, 3)],
    ])


def wedge2_via_inverse(B: Matrix) -> Matrix:
    """S det(B) B^{-T} sigma S, defined only when det(B) != 0."""
    d = B.det()
    return S @ B.inverse().T().scale(d) @ SIGMA @ S


@dataclass
class MembershipReport:
    E1: bool
    E2: bool
    E3: bool
    det_identity: bool
    wedge_crosscheck: bool | None
    det: object
    wedge: Matrix

    @property
    def ok(self) -> bool:
        return self.E1 and self.E2 and self.E3 and self.det_identity and self.wedge_crosscheck is not False


def z_membership(p: ZPoint) -> MembershipReport:
    a1, a2, a3 = p.alphas
    rhs = Matrix.identity(3).scale(cyc(-16) * a1 * a2 * a3 * p.beta * p.beta)
    twisted = S @ p.B @ SIGMA @ S @ F
    e1 = p.B.T() @ p.A @ twisted == rhs
    e2 = twisted @ p.B.T() @ p.A == rhs
    W = wedge2(p.B)
    e3 = W @ F_INV == (p.A @ p.B).scale(p.beta)
    d = p.B.det()
    det_ok = d == cyc(-16) * p.beta ** 3 * a1 * a2 * a3
    cross = None if is_zero(d) else W == wedge2_via_inverse(p.B)
    return MembershipReport(e1, e2, e3, det_ok, cross, d, W)


def gram(G: Matrix) -> Matrix:
    """Matrix of Sym^2 G on the basis e1e1, e1e2, e2e2."""
    g11, g12, g21, g22 = G[0, 0], G[0, 1], G[1, 0], G[1, 1]
    return Matrix([
        [g11 * g11, g11 * g12, g12 * g12],
        [2 * g11 * g21, g11 * g22 + g21 * g12, 2 * g12 * g22],
        [g21 * g21, g21 * g22, g22 * g22],
    ])


def gauge_act_z(g: GaugeElement, p: ZPoint) -> ZPoint:
    e2, e3, e4 = g["E2"][0, 0], g["E3"][0, 0], g["E4"][0, 0]
    gO = g["O1"]
    det = gO.det()
    beta = e2 * e3 * e4 * p.beta / (det * det)
    A = (p.A @ Matrix.diag([ONE / (e2 * e2), ONE / (e3 * e3), ONE / (e4 * e4)])).scale(det)
    B = Matrix.diag([e2, e3, e4]) @ p.B @ gram(gO.inverse())
    return ZPoint(beta, A, B)


# ---------------------------------------------------------------------------
# psi_circ and the comparison map on Z


def _scalar(phi: CGDatum, i: str, j: str, k: str):
    return phi.component(i, j, k)[0, 0]


def _inv(x):
    if isinstance(x, LaurentPoly):
        if len(x.terms) != 1:
            raise NotInOpenLocus("only Laurent monomials can be inverted here")
        (e, c), = x.terms.items()
        return LaurentPoly.monomial(ONE / c, -e)
    return ONE / x


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, LaurentPoly) else is_zero(x)


def psi_circ(phi: CGDatum) -> ZPoint:
    if phi.group != D4:
        raise ValueError("psi_circ is defined for D4 only")
    w = phi.component("O1", "O1", "E1")[0, 1]
    e23 = _scalar(phi, "E2", "E3", "E4")
    e44 = _scalar(phi, "E4", "E4", "E1")
    for name, v in (("phi_{E2,E3}", e23), ("phi_{E4,E4}", e44), ("phi_{O1,O1->E1}(e1 e2)", w)):
        if _is_zero(v):
            raise NotInOpenLocus(f"{name} vanishes")
    beta = cyc(-1) / 2 * _inv(e23) * _inv(e44) * w * w
    wi = _inv(w)
    A = Matrix.diag([wi * _scalar(phi, k, k, "E1") for k in ("E2", "E3", "E4")])
    B = Matrix([[phi.component("O1", "O1", k)[0, c] for c in _SYM_COLS] for k in ("E2", "E3", "E4")])
    return ZPoint(beta, A, B)


def r_z(p: ZPoint, x) -> QuiverRep:
    x1, x2 = x
    a1, a2, a3 = p.alphas
    B = p.B

    def row(r):
        return Matrix([[x1 * B[r, 0] + x2 * B[r, 1], x1 * B[r, 1] + x2 * B[r, 2]]])

    c = 4 * a1 * a2 * a3 * p.beta * p.beta
    maps = {
        "A1": Matrix([[x1], [x2]]),
        "A1*": Matrix([[c * x2, -c * x1]]),
        "A2*": row(0),
        "A3": row(1),
        "A4": row(2),
    }
    maps["A2"] = (H @ maps["A2*"].T()).scale(-a1)
    maps["A3*"] = (H @ maps["A3"].T()).scale(-a2)
    maps["A4*"] = (H @ maps["A4"].T()).scale(a3)
    return QuiverRep(build_quiver(D4), maps)


def commutativity_check(phi: CGDatum, x) -> bool:
    return r_z(psi_circ(phi), x) == comparison_R(phi, x)


def random_regular(rng: random.Random) -> tuple[GaugeElement, CGDatum]:
    from .cgvariety import gauge_act
    g = random_gauge(D4, rng)
    return g, gauge_act(g, phi0(D4))


# ---------------------------------------------------------------------------
# the degenerate family and the non-extension witness


def family_gauge(a, b) -> dict[str, Matrix]:
    """g(t) = (a t^-2, t^-1, t^-1, diag(a b^-1 t^-1, t^-1)) as Laurent matrices."""
    a, b = cyc(a), cyc(b)
    L = LaurentPoly.monomial
    return {
        "E1": Matrix([[L(ONE, 0)]]),
        "E2": Matrix([[L(a, -2)]]),
        "E3": Matrix([[L(ONE, -1)]]),
        "E4": Matrix([[L(ONE, -1)]]),
        "O1": Matrix.diag([L(a / b, -1), L(ONE, -1)]),
    }


def _laurent_inverse(g: dict[str, Matrix]) -> dict[str, Matrix]:
    return {lab: Matrix.diag([_inv(M[i, i]) for i in range(M.nrows)]) for lab, M in g.items()}


def family_translate(a, b) -> dict:
    """Blocks of g(t) phi0 as Laurent matrices."""
    phi = phi0(D4)
    g = family_gauge(a, b)
    ginv = _laurent_inverse(g)
    out = {}
    for (i, j), M in phi.blocks.items():
        left = Matrix.block_diag([g[k] for k, _, _, _ in codomain_layout(D4, i, j)])
        out[(i, j)] = left @ M @ ginv[i].kron(ginv[j])
    return out


def family_phi_ab(a, b) -> CGDatum:
    """The displayed two-parameter datum: phi0 on blocks with a trivial
    factor, phi_{E3,E4} = phi_{E4,E3} = a, phi_{O1,O1} with b in the E2 row
    at e1e2 and e2e1, and zero elsewhere."""
    a, b = cyc(a), cyc(b)
    base = phi0(D4)
    blocks = {}
    for (i, j), M in base.blocks.items():
        if "E1" in (i, j):
            blocks[(i, j)] = M
        elif {i, j} == {"E3", "E4"}:
            blocks[(i, j)] = Matrix([[a]])
        elif (i, j) == ("O1", "O1"):
            blocks[(i, j)] = Matrix([[0, 0, 0, 0], [0, b, b, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
        else:
            blocks[(i, j)] = Matrix.zeros(M.nrows, M.ncols)
    return CGDatum(D4, blocks)


def family_limit(a, b):
    """lim_{t -> 0} g(t) phi0 as a CGDatum, or the first Diverges record."""
    blocks = {}
    for key, M in family_translate(a, b).items():
        lim = laurent_limit_at_zero(M)
        if not isinstance(lim, Matrix):
            return type(lim)(lim.row, lim.col, lim.exponent, key)
        blocks[key] = lim
    return CGDatum(D4, blocks)


def family_beta(a, b):
    """pi_beta(psi_circ(g(t) phi0)) as a Laurent polynomial in t."""
    translate = CGDatum(D4, family_translate(a, b))
    return psi_circ(translate).beta


@dataclass
class NonExtensionReport:
    b: object
    samples: list = field(default_factory=list)  # (a, beta, expected)
    limits_match: bool = True
    coherent: bool = True
    beta_constant_in_t: bool = True
    doubling: bool = True

    @property
    def ok(self) -> bool:
        return (self.limits_match and self.coherent and self.beta_constant_in_t and self.doubling
                and all(beta == exp for _, beta, exp in self.samples))


def non_extension_witness(b=1, steps: int = 8) -> NonExtensionReport:
    """Sample a = 1, 1/2, 1/4, ... at fixed b.  For each a: the limit of
    g(t) phi0 equals phi^{a,b}, it is coherent, and pi_beta along the curve
    is the constant -b^2/(2a).  The values double in absolute value at every
    halving of a, so no regular function of phi^{a,b} can extend them."""
    b = cyc(b)
    rep = NonExtensionReport(b)
    prev = None
    for k in range(steps):
        a = cyc(1) / (2 ** k)
        lim = family_limit(a, b)
        if not isinstance(lim, CGDatum) or lim != family_phi_ab(a, b):
            rep.limits_match = False
        elif verify_coherence(lim):
            rep.coherent = False
        beta_t = family_beta(a, b)
        if set(beta_t.terms) - {0}:
            rep.beta_constant_in_t = False
        beta = beta_t.terms.get(0, ZERO)
        rep.samples.append((a, beta, -b * b / (2 * a)))
        if prev is not None and beta != 2 * prev:
            rep.doubling = False
        prev = beta
    return rep

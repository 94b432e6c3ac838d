"""Kleinian double quivers, quiver representations, preprojective relations,
theta_2 semistability and the comparison map R(phi, x) = phi(- (x) x).

Arrow names follow the standard figure.  A_n: A_i runs i-1 -> i (vertex
indices mod n+1) and A_i* runs back.  D_n: A1 = E1 -> O1, A2 = E2 -> O1,
A3 .. A_{n-2} run forward along the chain of two-dimensional vertices,
A_{n-1} = last -> E3 and A_n = last -> E4, where "last" is the
two-dimensional vertex of highest index (O1 itself when n = 4).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .cgvariety import CGDatum, GaugeElement, act_on_x
from .exactnum import ZERO, BivarPoly, Matrix
from .reptheory import KleinianGroup, cg_table, natural_rep


@dataclass(frozen=True)
class Arrow:
    name: str
    tail: str
    head: str

    @property
    def starred(self) -> bool:
        return self.name.endswith("*")

    @property
    def partner(self) -> str:
        return self.name[:-1] if self.starred else self.name + "*"


@dataclass(frozen=True)
class KleinianQuiver:
    group: KleinianGroup
    vertices: tuple
    arrows: tuple  # unstarred arrows first, then their stars in the same order

    @property
    def special(self) -> str:
        return self.group.trivial

    def alpha(self, v: str) -> int:
        return self.group.dim(v)

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(name)

    def unstarred(self) -> list[Arrow]:
        return [a for a in self.arrows if not a.starred]

    def arrows_between(self, tail: str, head: str) -> list[Arrow]:
        return [a for a in self.arrows if a.tail == tail and a.head == head]


def build_quiver(G: KleinianGroup) -> KleinianQuiver:
    labels = G.labels()
    plain = []
    if G.family == "A":
        m = G.n + 1
        for i in range(1, m + 1):
            plain.append(Arrow(f"A{i}", f"U{(i - 1) % m}", f"U{i % m}"))
    else:
        n = G.n
        chain = labels[4:]
        plain.append(Arrow("A1", "E1", "O1"))
        plain.append(Arrow("A2", "E2", "O1"))
        for t in range(len(chain) - 1):
            plain.append(Arrow(f"A{t + 3}", chain[t], chain[t + 1]))
        plain.append(Arrow(f"A{n - 1}", chain[-1], "E3"))
        plain.append(Arrow(f"A{n}", chain[-1], "E4"))
    stars = [Arrow(a.name + "*", a.head, a.tail) for a in plain]
    return KleinianQuiver(G, tuple(labels), tuple(plain + stars))


def arrow_count_check(G: KleinianGroup) -> dict:
    """Arrows i -> j against dim Hom_G(U_i (x) C^2, U_j) from CG coefficients."""
    Q = build_quiver(G)
    tab = cg_table(G)
    nat = natural_rep(G)
    out = {}
    for i in G.labels():
        for j in G.labels():
            expected = sum(tab[(i, v, j)] for v in nat)
            out[(i, j)] = (len(Q.arrows_between(i, j)), expected)
    return out


@dataclass(frozen=True)
class QuiverRep:
    quiver: KleinianQuiver
    maps: Mapping[str, Matrix]

    def __post_init__(self):
        Q = self.quiver
        for a in Q.arrows:
            M = self.maps[a.name]
            if M.shape != (Q.alpha(a.head), Q.alpha(a.tail)):
                raise ValueError(f"arrow {a.name} has shape {M.shape}")

    def __getitem__(self, name: str) -> Matrix:
        return self.maps[name]

    def specialize(self, x1, x2) -> "QuiverRep":
        def sub(e):
            return e.substitute(x1, x2) if isinstance(e, BivarPoly) else e
        return QuiverRep(self.quiver, {k: M.map(sub) for k, M in self.maps.items()})

    def gauge(self, g: GaugeElement) -> "QuiverRep":
        out = {}
        for a in self.quiver.arrows:
            out[a.name] = g[a.head] @ self.maps[a.name] @ g[a.tail].inverse()
        return QuiverRep(self.quiver, out)

    def __eq__(self, other):
        if not isinstance(other, QuiverRep):
            return NotImplemented
        return all(self.maps[k] == other.maps[k] for k in self.maps)

    __hash__ = None

    def to_json(self) -> dict:
        G = self.quiver.group
        return {"family": G.family, "n": G.n,
                "arrows": [{"name": a.name, "tail": a.tail, "head": a.head,
                            "matrix": _matrix_json(self.maps[a.name])} for a in self.quiver.arrows]}

    @classmethod
    def from_json(cls, data: dict) -> "QuiverRep":
        G = KleinianGroup(data["family"], int(data["n"]))
        Q = build_quiver(G)
        return cls(Q, {a["name"]: Matrix.from_json(a["matrix"]) for a in data["arrows"]})


def _matrix_json(M: Matrix):
    if any(isinstance(x, BivarPoly) for r in M.rows for x in r):
        raise ValueError("specialize the representation before serializing")
    return M.to_json()


def x_symbolic() -> tuple:
    return BivarPoly.X(), BivarPoly.Y()


def _x_column(x) -> Matrix:
    return Matrix([[x[0]], [x[1]]])


def comparison_R(phi: CGDatum, x) -> QuiverRep:
    """R(phi, x): each arrow V -> U is the U-component of phi_{V,N}(- (x) x_N)
    with N the natural summand the arrow is built from."""
    G = phi.group
    Q = build_quiver(G)
    maps = {}
    if G.family == "A":
        m = G.n + 1
        for i in range(1, m + 1):
            maps[f"A{i}"] = phi.block(f"U{(i - 1) % m}", "U1").scale(x[0])
            maps[f"A{i}*"] = phi.block(f"U{i % m}", f"U{G.n}").scale(x[1])
        return QuiverRep(Q, maps)
    xc = _x_column(x)
    for a in Q.arrows:
        V, U = a.tail, a.head
        block = phi.component(V, "O1", U)
        maps[a.name] = block @ Matrix.identity(G.dim(V)).kron(xc)
    return QuiverRep(Q, maps)


def moment_residuals(rho: QuiverRep) -> dict[str, Matrix]:
    """sum_{h(a)=v} a a* - sum_{t(a)=v} a* a over unstarred arrows a."""
    Q = rho.quiver
    out = {}
    for v in Q.vertices:
        d = Q.alpha(v)
        acc = Matrix.zeros(d, d)
        for a in Q.unstarred():
            if a.head == v:
                acc = acc + rho[a.name] @ rho[a.partner]
            if a.tail == v:
                acc = acc - rho[a.partner] @ rho[a.name]
        out[v] = acc
    return out


def check_preprojective(rho: QuiverRep) -> dict:
    res = moment_residuals(rho)
    failing = [v for v, M in res.items() if not M.is_zero()]
    return {"ok": not failing, "failing_vertices": failing, "residuals": res}


def generated_subrep(rho: QuiverRep, start: str | None = None) -> dict[str, int]:
    """Dimension vector of the subrepresentation generated by the full space
    at the start vertex (default: the special vertex)."""
    Q = rho.quiver
    start = start or Q.special
    spans: dict[str, list] = {v: [] for v in Q.vertices}
    spans[start] = [Matrix.identity(Q.alpha(start)).col(c) for c in range(Q.alpha(start))]
    changed = True
    while changed:
        changed = False
        for a in Q.arrows:
            if not spans[a.tail]:
                continue
            M = rho[a.name]
            for v in spans[a.tail]:
                w = M @ Matrix([[e] for e in v])
                cand = spans[a.head] + [w.col(0)]
                if _rank(cand) > len(spans[a.head]):
                    spans[a.head] = cand
                    changed = True
    return {v: len(spans[v]) for v in Q.vertices}


def _rank(vectors) -> int:
    if not vectors:
        return 0
    return Matrix([list(v) for v in vectors]).rank()


def is_theta2_semistable(rho: QuiverRep) -> tuple[bool, dict[str, int]]:
    """theta_2 = (+1, ..., +1) off the special vertex: semistable iff the
    subrepresentation generated by the special vertex is everything."""
    dims = generated_subrep(rho)
    ok = all(dims[v] == rho.quiver.alpha(v) for v in rho.quiver.vertices)
    return ok, dims


def theta_pairing_alpha(G: KleinianGroup, theta: Mapping[str, int]) -> int:
    """Full pairing with alpha including the induced special-vertex weight."""
    theta0 = -sum(w * G.dim(v) for v, w in theta.items())
    return theta0 * 1 + sum(w * G.dim(v) for v, w in theta.items())


def gauge_rep_equivariance(phi: CGDatum, g: GaugeElement, x) -> bool:
    """R(g phi, g x) == g R(phi, x)."""
    from .cgvariety import gauge_act
    lhs = comparison_R(gauge_act(g, phi), act_on_x(phi.group, g, x))
    rhs = comparison_R(phi, x).gauge(g)
    return lhs == rhs


def path_product(rho: QuiverRep, arrows: list[str]) -> Matrix:
    """Composite along a path written left to right in composition order:
    path_product(rho, ["A1*", "A2", "A2*", "A1"]) = A1* A2 A2* A1."""
    out = None
    for name in arrows:
        out = rho[name] if out is None else out @ rho[name]
    return out


def trace(M: Matrix):
    total = ZERO
    for i in range(M.nrows):
        total = total + M[i, i]
    return total

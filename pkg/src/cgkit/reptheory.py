"""Kleinian groups of type A_n (cyclic) and D_n (binary dihedral), their
irreducible representations as explicit exact matrices, characters and
Clebsch-Gordan coefficients.

Irrep order (fixed, every block layout downstream depends on it):

* A_n: U0, U1, ..., Un with the generator s acting on Uk by zeta_{n+1}^k.
* D_n: E1, E2, E3, E4, then O1, I2, O3, I4, ... up to index n-3.  The
  two-dimensional irrep with index k is called Ok for odd k and Ik for even k.

For D_n the generators are a and x with a^(2(n-2)) = 1, x^2 = a^(n-2) and
x^-1 a x = a^-1.  On a one-dimensional irrep a acts by +-1.  When n is even
x acts by +-1 as in the usual sign table.  When n is odd the relation
x^2 = a^(n-2) forces x to act by +-i on E3 and E4 (a acts by -1 there), so
those two characters take the values i and -i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .exactnum import ONE, ZERO, I, Cyclotomic, Matrix, root_of_unity


class InternalError(RuntimeError):
    """Broken internal data (e.g. a non-integral character inner product)."""


@dataclass(frozen=True)
class GroupElement:
    """Normal form word.  A_n: (e,) meaning s^e.  D_n: (p, s) meaning a^p x^s."""

    word: tuple

    def __repr__(self):
        return f"GroupElement{self.word}"


@dataclass(frozen=True)
class Irrep:
    label: str
    dim: int
    generator_images: tuple  # tuple of Matrix, one per group generator

    def __repr__(self):
        return f"Irrep({self.label}, dim={self.dim})"


@dataclass(frozen=True)
class KleinianGroup:
    family: str
    n: int

    def __post_init__(self):
        if self.family not in ("A", "D"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "A" and self.n < 1:
            raise ValueError("A_n needs n >= 1")
        if self.family == "D" and self.n < 4:
            raise ValueError("D_n needs n >= 4")

    def __repr__(self):
        return f"{self.family}{self.n}"

    @property
    def name(self) -> str:
        return f"{self.family}{self.n}"

    @property
    def order(self) -> int:
        return self.n + 1 if self.family == "A" else 4 * (self.n - 2)

    # -- group law ---------------------------------------------------------
    @property
    def _m(self) -> int:
        # order of a in D_n
        return 2 * (self.n - 2)

    def identity(self) -> GroupElement:
        return GroupElement((0,)) if self.family == "A" else GroupElement((0, 0))

    def generators(self) -> list[GroupElement]:
        if self.family == "A":
            return [GroupElement((1,))]
        return [GroupElement((1, 0)), GroupElement((0, 1))]

    def generator_names(self) -> list[str]:
        return ["s"] if self.family == "A" else ["a", "x"]

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        if self.family == "A":
            return GroupElement(((g.word[0] + h.word[0]) % (self.n + 1),))
        p, s = g.word
        q, r = h.word
        m = self._m
        e = p + (q if s == 0 else -q)
        if s == 1 and r == 1:
            e += self.n - 2
        return GroupElement((e % m, (s + r) % 2))

    def inverse(self, g: GroupElement) -> GroupElement:
        for h in self.elements():
            if self.multiply(g, h) == self.identity():
                return h
        raise InternalError("no inverse")

    def elements(self) -> list[GroupElement]:
        return _elements(self)

    def conjugacy_classes(self) -> list[list[GroupElement]]:
        return _classes(self)

    # -- representations ---------------------------------------------------
    def irreps(self) -> list[Irrep]:
        return irreps_of(self)

    def labels(self) -> list[str]:
        return [r.label for r in self.irreps()]

    def irrep(self, label: str) -> Irrep:
        for r in self.irreps():
            if r.label == label:
                return r
        raise KeyError(f"{label} is not an irrep label of {self.name}")

    def index(self, label: str) -> int:
        return self.labels().index(label)

    def dim(self, label: str) -> int:
        return self.irrep(label).dim

    @property
    def trivial(self) -> str:
        return "U0" if self.family == "A" else "E1"

    def nontrivial_labels(self) -> list[str]:
        return self.labels()[1:]


@lru_cache(maxsize=None)
def _elements(G: KleinianGroup) -> list[GroupElement]:
    if G.family == "A":
        return [GroupElement((e,)) for e in range(G.n + 1)]
    return [GroupElement((p, s)) for s in (0, 1) for p in range(G._m)]


@lru_cache(maxsize=None)
def _classes(G: KleinianGroup) -> list[list[GroupElement]]:
    seen: set = set()
    out = []
    elems = G.elements()
    for g in elems:
        if g in seen:
            continue
        cls = []
        for h in elems:
            c = G.multiply(G.multiply(h, g), G.inverse(h))
            if c not in cls:
                cls.append(c)
        seen.update(cls)
        out.append(cls)
    return out


def two_dim_label(k: int) -> str:
    return f"O{k}" if k % 2 else f"I{k}"


@lru_cache(maxsize=None)
def irreps_of(G: KleinianGroup) -> list[Irrep]:
    """The irreducible representations of G in the fixed order."""
    if G.family == "A":
        m = G.n + 1
        return [Irrep(f"U{k}", 1, (Matrix([[root_of_unity(m, k)]]),)) for k in range(m)]
    n = G.n
    odd = n % 2 == 1
    x3 = I if odd else ONE
    ones = [
        ("E1", ONE, ONE),
        ("E2", ONE, -ONE),
        ("E3", -ONE, x3),
        ("E4", -ONE, -x3),
    ]
    out = [Irrep(lab, 1, (Matrix([[a]]), Matrix([[x]]))) for lab, a, x in ones]
    m = 2 * (n - 2)
    for k in range(1, n - 2):
        a = Matrix.diag([root_of_unity(m, k), root_of_unity(m, -k)])
        if k % 2:
            x = Matrix([[0, -1], [1, 0]])
        else:
            x = Matrix([[0, 1], [1, 0]])
        out.append(Irrep(two_dim_label(k), 2, (a, x)))
    return out


def image(G: KleinianGroup, rho: Irrep, g: GroupElement) -> Matrix:
    """Matrix of g in the irrep rho."""
    return _image(G, rho.label, g)


@lru_cache(maxsize=None)
def _image(G: KleinianGroup, label: str, g: GroupElement) -> Matrix:
    rho = G.irrep(label)
    gens = rho.generator_images
    if G.family == "A":
        return _power(gens[0], g.word[0])
    p, s = g.word
    out = _power(gens[0], p)
    if s:
        out = out @ gens[1]
    return out


def _power(M: Matrix, e: int) -> Matrix:
    out = Matrix.identity(M.nrows)
    for _ in range(e):
        out = out @ M
    return out


def character(G: KleinianGroup, rho: Irrep, g: GroupElement) -> Cyclotomic:
    return _character(G, rho.label, g)


@lru_cache(maxsize=None)
def _character(G: KleinianGroup, label: str, g: GroupElement) -> Cyclotomic:
    M = _image(G, label, g)
    tr = ZERO
    for i in range(M.nrows):
        tr = tr + M[i, i]
    return tr


def inner_product(G: KleinianGroup, chi1, chi2) -> Cyclotomic:
    """(1/|G|) sum_g chi1(g) conj(chi2(g)) for class functions given as
    callables on group elements."""
    total = ZERO
    for cls in G.conjugacy_classes():
        g = cls[0]
        total = total + len(cls) * chi1(g) * chi2(g).conjugate()
    return total / G.order


def cg_coefficient(G: KleinianGroup, i: str, j: str, k: str) -> int:
    """Multiplicity of U_k in U_i (x) U_j, computed from characters."""
    return cg_table(G)[(i, j, k)]


@lru_cache(maxsize=None)
def cg_table(G: KleinianGroup) -> dict:
    labels = G.labels()
    reps = [cls[0] for cls in G.conjugacy_classes()]
    sizes = [len(cls) for cls in G.conjugacy_classes()]
    chars = {lab: [_character(G, lab, g) for g in reps] for lab in labels}
    conj = {lab: [c.conjugate() for c in chars[lab]] for lab in labels}
    table = {}
    for i in labels:
        for j in labels:
            prod = [a * b for a, b in zip(chars[i], chars[j])]
            for k in labels:
                total = ZERO
                for s, p, c in zip(sizes, prod, conj[k]):
                    total = total + s * p * c
                total = total / G.order
                if not total.is_rational():
                    raise InternalError(f"non-rational CG coefficient for {i},{j},{k}")
                q = total.as_rational()
                if q.denominator != 1 or q < 0:
                    raise InternalError(f"CG coefficient {q} for {i},{j},{k} is not a nonneg integer")
                table[(i, j, k)] = int(q)
    return table


def _v_decompose(G: KleinianGroup, k: int) -> list[str]:
    """The 2-dim 'V_k' of D_n as irreps: V_0 = E1+E2, V_{n-2} = E3+E4,
    indices folded into 0..n-2 by k -> 2(n-2) - k."""
    m = 2 * (G.n - 2)
    k %= m
    k = min(k, m - k)
    if k == 0:
        return ["E1", "E2"]
    if k == G.n - 2:
        return ["E3", "E4"]
    return [two_dim_label(k)]


def _one_dim_product(G: KleinianGroup, i: str, j: str) -> str:
    idx = {"E1": 1, "E2": 2, "E3": 3, "E4": 4}
    a, b = idx[i], idx[j]
    if a == 1 or b == 1:
        return i if b == 1 else j
    if G.n % 2 == 1 and {a, b} <= {3, 4}:
        # x acts by +-i on E3, E4
        return "E2" if a == b else "E1"
    if a == b:
        return "E1"
    return f"E{({2, 3, 4} - {a, b}).pop()}"


def cg_closed_form(G: KleinianGroup) -> dict:
    """CG coefficients from the tensor product rules, without characters.

    A_n: U_i (x) U_j = U_{i+j mod n+1}.  D_n: products of one-dimensional
    irreps multiply their (a, x) signs; E1, E2 fix V_k while E3, E4 send it
    to V_{n-2-k}; V_k (x) V_l = V_{k+l} + V_{|k-l|}.
    """
    labels = G.labels()
    table = {(i, j, k): 0 for i in labels for j in labels for k in labels}
    if G.family == "A":
        m = G.n + 1
        for a in range(m):
            for b in range(m):
                table[(f"U{a}", f"U{b}", f"U{(a + b) % m}")] = 1
        return table
    index = {lab: int(lab[1:]) for lab in labels if G.dim(lab) == 2}
    for i in labels:
        for j in labels:
            if G.dim(i) == 1 and G.dim(j) == 1:
                out = [_one_dim_product(G, i, j)]
            elif G.dim(i) == 1 or G.dim(j) == 1:
                e, v = (i, j) if G.dim(i) == 1 else (j, i)
                k = index[v]
                out = _v_decompose(G, k if e in ("E1", "E2") else G.n - 2 - k)
            else:
                a, b = index[i], index[j]
                out = _v_decompose(G, a + b) + _v_decompose(G, abs(a - b))
            for k in out:
                table[(i, j, k)] += 1
    return table


def decomposition(G: KleinianGroup, i: str, j: str) -> list[tuple[str, int]]:
    """Irreps of U_i (x) U_j with multiplicities, in the fixed irrep order."""
    tab = cg_table(G)
    return [(k, tab[(i, j, k)]) for k in G.labels() if tab[(i, j, k)]]


def natural_rep(G: KleinianGroup) -> list[str]:
    """Decomposition of the defining representation C^2."""
    if G.family == "A":
        return ["U1", f"U{G.n}"]
    return ["O1"]


def sl2_embedding(G: KleinianGroup) -> list[Matrix]:
    """Generator images of the defining SL_2 embedding (the standard figure):
    A_n: s -> diag(z, z^-1); D_n: a -> diag(w, w^-1), x -> (0 i / i 0)."""
    if G.family == "A":
        m = G.n + 1
        return [Matrix.diag([root_of_unity(m, 1), root_of_unity(m, -1)])]
    m = 2 * (G.n - 2)
    return [Matrix.diag([root_of_unity(m, 1), root_of_unity(m, -1)]),
            Matrix([[0, I], [I, 0]])]


def natural_intertwiner(G: KleinianGroup) -> Matrix:
    """T with T rho_emb(g) T^-1 = (direct sum of natural_rep irreps)(g)."""
    if G.family == "A":
        return Matrix.identity(2)
    return Matrix.diag([ONE, -I])


def natural_action(G: KleinianGroup, g: GroupElement) -> Matrix:
    """Action of g on C^2 in the coordinates of natural_rep (block diagonal)."""
    blocks = [image(G, G.irrep(lab), g) for lab in natural_rep(G)]
    return Matrix.block_diag(blocks)


def presentation_holds(G: KleinianGroup, gens: list[Matrix]) -> bool:
    """Check the defining relations on a tuple of generator images."""
    d = gens[0].nrows
    Id = Matrix.identity(d)
    if G.family == "A":
        return _power(gens[0], G.n + 1) == Id
    a, x = gens
    m = 2 * (G.n - 2)
    return (_power(a, m) == Id
            and x @ x == _power(a, G.n - 2)
            and x.inverse() @ a @ x == a.inverse())


def regular_character(G: KleinianGroup, g: GroupElement) -> Cyclotomic:
    """chi_reg(g) = sum_i dim U_i chi_i(g)."""
    total = ZERO
    for r in G.irreps():
        total = total + r.dim * _character(G, r.label, g)
    return total


def supported_groups(a_range=range(2, 13), d_range=range(4, 11)) -> Iterator[KleinianGroup]:
    for n in a_range:
        yield KleinianGroup("A", n)
    for n in d_range:
        yield KleinianGroup("D", n)

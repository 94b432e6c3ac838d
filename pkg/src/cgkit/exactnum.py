"""Scalar substrate: exact cyclotomic numbers, high precision complex floats,
Laurent polynomials in a formal parameter t, bivariate polynomials in X, Y and
a small generic dense matrix type that works over all of them.

Two tracks exist.  ``Cyclotomic`` values are exact elements of Q(zeta_m) stored
in the power basis 1, z, ..., z^(phi(m)-1) after reduction modulo the m-th
cyclotomic polynomial.  ``AppComplex`` values wrap mpmath complex numbers at a
fixed bit precision.  Mixing the two yields an ``AppComplex``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Callable, Iterable, Sequence, Union

import gmpy2
import mpmath
from gmpy2 import mpq

Rational = type(mpq(0))

DEFAULT_PRECISION = 256
DEFAULT_TOLERANCE = mpmath.mpf("1e-30")


def default_precision() -> int:
    """Working precision for the approximate track (``CGKIT_PRECISION`` wins)."""
    env = os.environ.get("CGKIT_PRECISION")
    if env:
        bits = int(env)
        if bits < 64:
            raise ValueError("CGKIT_PRECISION must be at least 64")
        return bits
    return DEFAULT_PRECISION


def to_rational(x) -> Rational:
    if isinstance(x, Rational):
        return x
    if isinstance(x, (int, type(gmpy2.mpz(0)))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x).numerator, Fraction(x).denominator)
    raise TypeError(f"cannot make a rational out of {x!r}")


# ---------------------------------------------------------------------------
# cyclotomic field data


def _factorize(m: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def euler_phi(m: int) -> int:
    r = m
    for p in _factorize(m):
        r = r // p * (p - 1)
    return r


def moebius(m: int) -> int:
    f = _factorize(m)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first, den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    assert not any(num), "inexact polynomial division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds the reduced power-basis coordinates of z^k, 0 <= k < m."""
    phi = cyclotomic_polynomial(m)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by z and reduce z^d = -(phi_0 + ... + phi_{d-1} z^{d-1})
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(d):
                cur[i] -= top * phi[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _trace_weights(m: int) -> tuple[Rational, ...]:
    # normalized trace Tr(z^k)/phi(m) = mu(m/g)/phi(m/g) with g = gcd(k, m)
    out = []
    for k in range(euler_phi(m)):
        q = m // gcd(k, m)
        out.append(mpq(moebius(q), euler_phi(q)))
    return tuple(out)


def _reduce(m: int, unreduced: Sequence) -> tuple:
    d = euler_phi(m)
    table = _reduction_table(m)
    res = [mpq(0)] * d
    for k, c in enumerate(unreduced):
        if not c:
            continue
        row = table[k % m]
        if k % m < d:
            res[k % m] += c
        else:
            for i, r in enumerate(row):
                if r:
                    res[i] += c * r
    return tuple(res)


class Cyclotomic:
    """Exact element of the cyclotomic field Q(zeta_order)."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs: Sequence, _reduced: bool = False):
        if order < 1:
            raise ValueError("order must be positive")
        if not _reduced:
            coeffs = _reduce(order, [to_rational(c) for c in coeffs])
        else:
            coeffs = tuple(coeffs)
        if order > 1 and not any(coeffs[1:]):
            order, coeffs = 1, (coeffs[0],)
        self.order = order
        self.coeffs = coeffs
        self._hash = None

    # -- constructors
    @classmethod
    def rational(cls, x) -> "Cyclotomic":
        return cls(1, (to_rational(x),), _reduced=True)

    # -- predicates
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return self.order == 1

    def as_rational(self) -> Rational:
        if self.order != 1:
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- lifting to a common field
    def lift(self, big: int) -> tuple:
        if big % self.order:
            raise ValueError("can only lift into a multiple of the order")
        if big == self.order:
            return self.coeffs
        if self.order == 1:
            return (self.coeffs[0],) + (mpq(0),) * (euler_phi(big) - 1)
        step = big // self.order
        unreduced = [mpq(0)] * big
        for k, c in enumerate(self.coeffs):
            if c:
                unreduced[(k * step) % big] += c
        return _reduce(big, unreduced)

    @staticmethod
    def _common(a: "Cyclotomic", b: "Cyclotomic"):
        if a.order == b.order:
            return a.order, a.coeffs, b.coeffs
        m = a.order * b.order // gcd(a.order, b.order)
        return m, a.lift(m), b.lift(m)

    # -- arithmetic
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, AppComplex):
            return self.to_app(other.bits) + other
        if self.order == 1 and other.order == 1:
            return Cyclotomic(1, (self.coeffs[0] + other.coeffs[0],), True)
        m, a, b = Cyclotomic._common(self, other)
        return Cyclotomic(m, tuple(x + y for x, y in zip(a, b)), True)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, tuple(-c for c in self.coeffs), True)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, AppComplex):
            return self.to_app(other.bits) * other
        if self.order == 1:
            s = self.coeffs[0]
            if other.order == 1:
                return Cyclotomic(1, (s * other.coeffs[0],), True)
            return Cyclotomic(other.order, tuple(s * c for c in other.coeffs), True)
        if other.order == 1:
            s = other.coeffs[0]
            return Cyclotomic(self.order, tuple(s * c for c in self.coeffs), True)
        m, a, b = Cyclotomic._common(self, other)
        conv = [mpq(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        return Cyclotomic(m, _reduce(m, conv), True)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.order == 1:
            return Cyclotomic(1, (1 / self.coeffs[0],), True)
        m = self.order
        d = len(self.coeffs)
        # columns: coordinates of self * z^k
        cols = []
        for k in range(d):
            conv = [mpq(0)] * (d + k)
            for i, c in enumerate(self.coeffs):
                conv[i + k] = c
            cols.append(_reduce(m, conv))
        mat = [[cols[k][i] for k in range(d)] for i in range(d)]
        rhs = [mpq(1)] + [mpq(0)] * (d - 1)
        sol = _solve_rational(mat, rhs)
        return Cyclotomic(m, tuple(sol), True)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, AppComplex):
            return self.to_app(other.bits) / other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "Cyclotomic":
        if self.order == 1:
            return self
        m = self.order
        unreduced = [mpq(0)] * m
        for k, c in enumerate(self.coeffs):
            unreduced[(-k) % m] += c
        return Cyclotomic(m, _reduce(m, unreduced), True)

    # -- comparison
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, AppComplex):
            return other == self
        if self.order == other.order:
            return self.coeffs == other.coeffs
        _, a, b = Cyclotomic._common(self, other)
        return a == b

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            if self.order == 1:
                self._hash = hash(self.coeffs[0])
            else:
                w = _trace_weights(self.order)
                self._hash = hash(sum((c * x for c, x in zip(self.coeffs, w)), mpq(0)))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- conversion
    def to_app(self, bits: int | None = None) -> "AppComplex":
        bits = bits or default_precision()
        ctx = _context(bits)
        z = ctx.expjpi(ctx.mpf(2) / self.order) if self.order > 1 else ctx.mpc(1)
        acc = ctx.mpc(0)
        p = ctx.mpc(1)
        for c in self.coeffs:
            if c:
                acc += ctx.mpf(int(c.numerator)) / int(c.denominator) * p
            p *= z
        return AppComplex(acc, bits)

    def to_complex(self) -> complex:
        return complex(self.to_app(64).value)

    def __repr__(self):
        if self.order == 1:
            return f"Cyclotomic({self.coeffs[0]})"
        terms = [f"{c}*z{self.order}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Cyclotomic(" + (" + ".join(terms) or "0") + ")"

    def __str__(self):
        if self.order == 1:
            return str(self.coeffs[0])
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = f"z{self.order}" + (f"^{k}" if k > 1 else "")
                terms.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ") or "0"

    # -- JSON
    def to_json(self) -> dict:
        return {"cyc": {"order": self.order,
                        "coeffs": [[int(c.numerator), int(c.denominator)] for c in self.coeffs]}}


def _solve_rational(mat, rhs):
    n = len(mat)
    a = [list(row) + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col])
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


ZERO = Cyclotomic(1, (mpq(0),), True)
ONE = Cyclotomic(1, (mpq(1),), True)


def root_of_unity(m: int, k: int = 1) -> Cyclotomic:
    """zeta_m^k with zeta_m = exp(2 pi i / m)."""
    if m < 1:
        raise ValueError("m must be positive")
    k %= m
    unreduced = [mpq(0)] * m
    unreduced[k] = mpq(1)
    return Cyclotomic(m, _reduce(m, unreduced), True)


I = root_of_unity(4, 1)


def cyc(x) -> Cyclotomic:
    """Coerce an int / Fraction / mpq / Cyclotomic to ``Cyclotomic``."""
    r = _coerce(x)
    if r is NotImplemented or isinstance(r, AppComplex):
        raise TypeError(f"not an exact scalar: {x!r}")
    return r


# ---------------------------------------------------------------------------
# approximate track


@lru_cache(maxsize=None)
def _context(bits: int):
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


class AppComplex:
    """High precision complex number carrying its own bit precision."""

    __slots__ = ("value", "bits")

    def __init__(self, value, bits: int | None = None):
        bits = bits or default_precision()
        if bits < 64:
            raise ValueError("precision_bits must be at least 64")
        ctx = _context(bits)
        if isinstance(value, Rational):
            value = ctx.mpf(int(value.numerator)) / int(value.denominator)
        self.value = ctx.mpc(value)
        self.bits = bits

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def _pair(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented, None
        if isinstance(other, Cyclotomic):
            other = other.to_app(self.bits)
        bits = min(self.bits, other.bits)
        ctx = _context(bits)
        return ctx, (ctx.mpc(self.value), ctx.mpc(other.value), bits)

    def __add__(self, other):
        ctx, data = self._pair(other)
        if ctx is NotImplemented:
            return NotImplemented
        a, b, bits = data
        return AppComplex(a + b, bits)

    __radd__ = __add__

    def __neg__(self):
        return AppComplex(-self.value, self.bits)

    def __sub__(self, other):
        ctx, data = self._pair(other)
        if ctx is NotImplemented:
            return NotImplemented
        a, b, bits = data
        return AppComplex(a - b, bits)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        ctx, data = self._pair(other)
        if ctx is NotImplemented:
            return NotImplemented
        a, b, bits = data
        return AppComplex(a * b, bits)

    __rmul__ = __mul__

    def __truediv__(self, other):
        ctx, data = self._pair(other)
        if ctx is NotImplemented:
            return NotImplemented
        a, b, bits = data
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return AppComplex(a / b, bits)

    def __rtruediv__(self, other):
        ctx, data = self._pair(other)
        if ctx is NotImplemented:
            return NotImplemented
        a, b, bits = data
        return AppComplex(b / a, bits)

    def inverse(self):
        return AppComplex(1 / self.value, self.bits)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        return AppComplex(self.value ** e, self.bits)

    def conjugate(self):
        return AppComplex(self.value.conjugate(), self.bits)

    def __abs__(self):
        return abs(self.value)

    def tolerance(self):
        # 10^(-bits/4): well above rounding noise, well below data magnitudes
        return _context(self.bits).mpf(10) ** (-(self.bits // 4))

    def is_zero(self, tol=None) -> bool:
        return abs(self.value) <= (self.tolerance() if tol is None else tol)

    def close_to(self, other, tol=None) -> bool:
        diff = self - other
        return diff.is_zero(tol)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.close_to(other)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    def to_app(self, bits=None):
        return self if bits in (None, self.bits) else AppComplex(self.value, min(bits, self.bits))

    def to_complex(self) -> complex:
        return complex(self.value)

    def __repr__(self):
        return f"AppComplex({mpmath.nstr(self.value, 20)}, bits={self.bits})"

    def to_json(self) -> dict:
        ctx = _context(self.bits)
        digits = int(self.bits * 0.30103) + 2
        return {"app": {"re": ctx.nstr(self.value.real, digits),
                        "im": ctx.nstr(self.value.imag, digits),
                        "bits": self.bits}}


Scalar = Union[Cyclotomic, AppComplex]


def _coerce(x):
    if isinstance(x, (Cyclotomic, AppComplex)):
        return x
    if isinstance(x, (int, Rational, Fraction)):
        return Cyclotomic(1, (to_rational(x),), True)
    return NotImplemented


def scalar_from_json(obj: dict) -> Scalar:
    if "cyc" in obj:
        data = obj["cyc"]
        coeffs = [mpq(int(n), int(d)) for n, d in data["coeffs"]]
        return Cyclotomic(int(data["order"]), coeffs, _reduced=True)
    if "app" in obj:
        data = obj["app"]
        bits = int(data["bits"])
        ctx = _context(bits)
        return AppComplex(ctx.mpc(ctx.mpf(data["re"]), ctx.mpf(data["im"])), bits)
    raise ValueError(f"unknown scalar encoding {obj!r}")


def app(re, im=0, bits: int | None = None) -> AppComplex:
    bits = bits or default_precision()
    ctx = _context(bits)
    return AppComplex(ctx.mpc(ctx.mpf(re), ctx.mpf(im)), bits)


def app_root(base: int, q: int, bits: int | None = None) -> AppComplex:
    """Real q-th root of a positive rational, e.g. 2^(1/3)."""
    bits = bits or default_precision()
    ctx = _context(bits)
    return AppComplex(ctx.root(ctx.mpf(base), q), bits)


def is_zero(x) -> bool:
    if isinstance(x, (Cyclotomic, AppComplex)):
        return x.is_zero()
    if hasattr(x, "is_zero"):
        return x.is_zero()
    return x == 0


# ---------------------------------------------------------------------------
# Laurent polynomials in t


class LaurentPoly:
    """Finite Laurent polynomial sum_e c_e t^e with scalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            c = _coerce(c)
            if not is_zero(c):
                clean[int(e)] = c
        self.terms = clean

    @classmethod
    def monomial(cls, c, e: int) -> "LaurentPoly":
        return cls({e: c})

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls({0: c})

    def is_zero(self) -> bool:
        return not self.terms

    def min_exponent(self):
        return min(self.terms) if self.terms else None

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
            other = LaurentPoly.const(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
            return LaurentPoly({e: c * other for e, c in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
            other = LaurentPoly.const(other)
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})t^{e}" for e, c in sorted(self.terms.items()))


@dataclass(frozen=True)
class Diverges:
    """Outcome of a limit computation that hit a negative power of t."""

    row: int
    col: int
    exponent: int
    block: object = None

    def __bool__(self):
        return False


def laurent_limit_at_zero(M: "Matrix"):
    """Constant-term matrix of a Laurent matrix, or ``Diverges``.

    The first negative exponent found (row-major scan) is reported.
    """
    rows = []
    for i, row in enumerate(M.rows):
        out = []
        for j, p in enumerate(row):
            if not isinstance(p, LaurentPoly):
                out.append(_coerce(p))
                continue
            e = p.min_exponent()
            if e is not None and e < 0:
                return Diverges(i, j, e)
            out.append(p.terms.get(0, ZERO))
        rows.append(out)
    return Matrix(rows)


# ---------------------------------------------------------------------------
# bivariate polynomials


class BivarPoly:
    """Polynomial in X and Y with scalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        clean = {}
        for (a, b), c in (terms or {}).items():
            if a < 0 or b < 0:
                raise ValueError("negative degree in BivarPoly")
            c = _coerce(c)
            if not is_zero(c):
                clean[(int(a), int(b))] = c
        self.terms = clean

    @classmethod
    def X(cls):
        return cls({(1, 0): 1})

    @classmethod
    def Y(cls):
        return cls({(0, 1): 1})

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, a: int, b: int, c=1):
        return cls({(a, b): c})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((a + b for a, b in self.terms), default=-1)

    def __add__(self, other):
        if not isinstance(other, BivarPoly):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
            other = BivarPoly.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return BivarPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BivarPoly):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
            return BivarPoly({k: c * other for k, c in self.terms.items()})
        out: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out[k] + c1 * c2 if k in out else c1 * c2
        return BivarPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = BivarPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def substitute(self, x, y):
        """Evaluate at X = x, Y = y (any ring elements)."""
        total = ZERO
        for (a, b), c in self.terms.items():
            total = total + c * (x ** a) * (y ** b)
        return total

    def __eq__(self, other):
        if not isinstance(other, (BivarPoly, Cyclotomic, AppComplex, int, Rational, Fraction)):
            return NotImplemented
        return bivar_equal(self, other if isinstance(other, BivarPoly) else BivarPoly.const(other))

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(s for s in (f"X^{a}" if a > 1 else "X" if a else "",
                                        f"Y^{b}" if b > 1 else "Y" if b else "") if s)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def bivar_equal(p: BivarPoly, q: BivarPoly) -> bool:
    """Coefficientwise equality; approximate coefficients compare within
    10^(-bits/4)."""
    keys = set(p.terms) | set(q.terms)
    for k in keys:
        a = p.terms.get(k, ZERO)
        b = q.terms.get(k, ZERO)
        if not is_zero(a - b):
            return False
    return True


# ---------------------------------------------------------------------------
# dense matrices over any of the rings above


class Matrix:
    """Small dense matrix over scalars, Laurent or bivariate polynomials."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(_coerce_entry(x) for x in row) for row in rows)
        self.rows = data
        self.nrows = len(data)
        self.ncols = len(data[0]) if data else 0
        if any(len(r) != self.ncols for r in data):
            raise ValueError("ragged matrix")

    # constructors
    @classmethod
    def zeros(cls, r: int, c: int, zero=None):
        z = ZERO if zero is None else zero
        m = cls.__new__(cls)
        m.rows = tuple(tuple(z for _ in range(c)) for _ in range(r))
        m.nrows, m.ncols = r, c
        return m

    @classmethod
    def identity(cls, n: int, one=None):
        o = ONE if one is None else one
        return cls([[o if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence):
        n = len(entries)
        return cls([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def block_diag(cls, blocks: Sequence["Matrix"]):
        r = sum(b.nrows for b in blocks)
        c = sum(b.ncols for b in blocks)
        out = [[ZERO] * c for _ in range(r)]
        i0 = j0 = 0
        for b in blocks:
            for i, row in enumerate(b.rows):
                out[i0 + i][j0:j0 + b.ncols] = row
            i0 += b.nrows
            j0 += b.ncols
        return cls(out)

    @classmethod
    def vstack(cls, blocks: Sequence["Matrix"]):
        rows = []
        for b in blocks:
            rows.extend(b.rows)
        return cls(rows)

    @classmethod
    def hstack(cls, blocks: Sequence["Matrix"]):
        return cls([sum((b.rows[i] for b in blocks), ()) for i in range(blocks[0].nrows)])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def col(self, j):
        return tuple(r[j] for r in self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        return Matrix([[self.rows[i][j] for j in cols] for i in rows])

    def map(self, fn: Callable):
        return Matrix([[fn(x) for x in r] for r in self.rows])

    def T(self):
        return Matrix([self.col(j) for j in range(self.ncols)])

    transpose = T

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, s):
        return Matrix([[s * x for x in r] for r in self.rows])

    def __mul__(self, s):
        if isinstance(s, Matrix):
            return self @ s
        return self.scale(s)

    __rmul__ = scale

    def __matmul__(self, other: "Matrix"):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [other.col(j) for j in range(other.ncols)]
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if not is_zero(a)]
            row = []
            for c in cols:
                acc = None
                for k, a in nz:
                    b = c[k]
                    if is_zero(b):
                        continue
                    acc = a * b if acc is None else acc + a * b
                row.append(ZERO if acc is None else acc)
            out.append(row)
        return Matrix(out)

    def kron(self, other: "Matrix"):
        out = []
        for r1 in self.rows:
            for r2 in other.rows:
                out.append([a * b for a in r1 for b in r2])
        return Matrix(out)

    def is_zero(self) -> bool:
        return all(is_zero(x) for r in self.rows for x in r)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return all(is_zero(a - b) for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    __hash__ = None

    def close_to(self, other: "Matrix", tol) -> bool:
        if self.shape != other.shape:
            return False
        for r1, r2 in zip(self.rows, other.rows):
            for a, b in zip(r1, r2):
                d = a - b
                if isinstance(d, Cyclotomic):
                    if not d.is_zero():
                        return False
                elif abs(d) > tol:
                    return False
        return True

    # field linear algebra ----------------------------------------------------
    def _echelon(self):
        a = [list(r) for r in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            piv = next((i for i in range(r, self.nrows) if not is_zero(a[i][c])), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            inv = a[r][c].inverse()
            a[r] = [x * inv for x in a[r]]
            for i in range(self.nrows):
                if i != r and not is_zero(a[i][c]):
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return a, pivots

    def rank(self) -> int:
        return len(self._echelon()[1])

    def nullspace(self) -> list["Matrix"]:
        """Basis of column vectors v with self @ v = 0."""
        a, pivots = self._echelon()
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for f in free:
            v = [ZERO] * self.ncols
            v[f] = ONE
            for i, p in enumerate(pivots):
                v[p] = -a[i][f]
            basis.append(Matrix([[x] for x in v]))
        return basis

    def det(self):
        if self.nrows != self.ncols:
            raise ValueError("det of non-square matrix")
        n = self.nrows
        if n == 0:
            return ONE
        if n == 1:
            return self.rows[0][0]
        if n == 2:
            (a, b), (c, d) = self.rows
            return a * d - b * c
        a = [list(r) for r in self.rows]
        det = ONE
        for c in range(n):
            piv = next((i for i in range(c, n) if not is_zero(a[i][c])), None)
            if piv is None:
                return ZERO * a[0][0]
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            det = det * a[c][c]
            inv = a[c][c].inverse()
            for i in range(c + 1, n):
                if not is_zero(a[i][c]):
                    f = a[i][c] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return det

    def inverse(self) -> "Matrix":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of non-square matrix")
        aug = Matrix([list(r) + [ONE if i == j else ZERO for j in range(n)]
                      for i, r in enumerate(self.rows)])
        a, pivots = aug._echelon()
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return Matrix([row[n:] for row in a[:n]])

    def solve_left(self, other: "Matrix") -> "Matrix":
        """X with X @ self = other (self square invertible)."""
        return other @ self.inverse()

    def __repr__(self):
        return "Matrix(" + "; ".join(", ".join(str(x) for x in r) for r in self.rows) + ")"

    def to_json(self):
        return [[x.to_json() for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data):
        return cls([[scalar_from_json(x) for x in r] for r in data])


def _coerce_entry(x):
    if isinstance(x, (Cyclotomic, AppComplex, LaurentPoly, BivarPoly)):
        return x
    c = _coerce(x)
    if c is NotImplemented:
        raise TypeError(f"unsupported matrix entry {x!r}")
    return c


def mat(rows) -> Matrix:
    return Matrix(rows)

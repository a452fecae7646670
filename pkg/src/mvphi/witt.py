"""Truncated p-typical Witt vectors over perfect rings of characteristic p.

Structure polynomials are generated once per (p, N) by solving the ghost
identities over the rationals and verifying integrality; arithmetic applies
them coordinatewise through a small handle protocol, so the same code runs
over any perfect base (finite fields, perfectoid Laurent rings).

For E unramified, O_E = W(F), so the ramified functor W_{O_E} coincides with
W itself and O_E-scalars act through their Teichmueller digit expansions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .coeff import FElt, FField, OEInt


# ---------------------------------------------------------------------------
# integer multivariate polynomials (exponent tuple -> coefficient)
# ---------------------------------------------------------------------------

class ZPoly:
    """Sparse polynomial with Fraction coefficients over 2N variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[dict] = None):
        self.nvars = nvars
        self.terms = {} if terms is None else \
            {e: c for e, c in terms.items() if c}

    @staticmethod
    def var(nvars, j):
        e = tuple(1 if i == j else 0 for i in range(nvars))
        return ZPoly(nvars, {e: Fraction(1)})

    @staticmethod
    def const(nvars, c):
        return ZPoly(nvars, {(0,) * nvars: Fraction(c)})

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return ZPoly(self.nvars, out)

    def __sub__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) - c
        return ZPoly(self.nvars, out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ZPoly(self.nvars, {e: c * other
                                      for e, c in self.terms.items()})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return ZPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = ZPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def div_exact(self, n: int):
        out = {}
        for e, c in self.terms.items():
            q = c / n
            out[e] = q
        return ZPoly(self.nvars, out)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def eval_int(self, values) -> int:
        total = 0
        for e, c in self.terms.items():
            assert c.denominator == 1
            term = c.numerator
            for v, d in zip(values, e):
                if d:
                    term *= v ** d
            total += term
        return total


def _ghost(nvars, offset, n, p):
    """w_n = sum_{j <= n} p^j Z_{offset+j}^{p^(n-j)} as a ZPoly."""
    acc = ZPoly(nvars, {})
    for j in range(n + 1):
        acc = acc + (ZPoly.var(nvars, offset + j) ** (p ** (n - j))) * (p ** j)
    return acc


_STRUCT_CACHE: dict = {}


class StructurePolys:
    """Addition and multiplication polynomials S_n, P_n for W_N."""

    def __init__(self, p: int, N: int, sums, prods):
        self.p = p
        self.N = N
        self.sums = sums
        self.prods = prods


def gen_structure_polys(p: int, N: int) -> StructurePolys:
    key = (p, N)
    got = _STRUCT_CACHE.get(key)
    if got is not None:
        return got
    nv = 2 * N
    sums, prods = [], []
    for n in range(N):
        wx = _ghost(nv, 0, n, p)
        wy = _ghost(nv, N, n, p)
        target_s = wx + wy
        target_p = wx * wy
        acc_s = ZPoly(nv, {})
        acc_p = ZPoly(nv, {})
        for j in range(n):
            acc_s = acc_s + (sums[j] ** (p ** (n - j))) * (p ** j)
            acc_p = acc_p + (prods[j] ** (p ** (n - j))) * (p ** j)
        s_n = (target_s - acc_s).div_exact(p ** n)
        p_n = (target_p - acc_p).div_exact(p ** n)
        if not (s_n.is_integral() and p_n.is_integral()):
            raise RuntimeError("non-integral structure polynomial (bug)")
        sums.append(s_n)
        prods.append(p_n)
    got = StructurePolys(p, N, sums, prods)
    _STRUCT_CACHE[key] = got
    return got


def ghost_components(p: int, N: int, values) -> list:
    """Ghost vector of an integer tuple (x_0, ..., x_{N-1})."""
    out = []
    for n in range(N):
        out.append(sum(p ** j * values[j] ** (p ** (n - j))
                       for j in range(n + 1)))
    return out


# ---------------------------------------------------------------------------
# handles
# ---------------------------------------------------------------------------

class FiniteFieldHandle:
    """Perfect-ring handle over F_{p^h} (Gauss valuation: 0 or +infinity)."""

    def __init__(self, field: FField):
        self.field = field
        self.p = field.p

    def zero(self):
        return self.field.zero

    def one(self):
        return self.field.one

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def frobenius(self, a):
        return a.frobenius()

    def pth_root(self, a):
        return a.pth_root()

    def is_zero(self, a):
        return not a

    def eq(self, a, b):
        return a == b

    def embed_residue(self, lam: FElt):
        return lam

    def gauss_val(self, a):
        return None if not a else Fraction(0)


WITT_COORDS = "witt-coordinates"
TEICH_EXPANSION = "teichmuller-expansion"


class WittVec:
    """Length-N Witt vector over a handle, in either coordinate form.

    The forms are related by (x_0, x_1, ...) = sum_n p^n [x_n^{1/p^n}]:
    expansion digit d_n is the p^n-th root of coordinate x_n.
    """

    __slots__ = ("handle", "prec", "form", "comps")

    def __init__(self, handle, prec: int, form: str, comps: tuple):
        if len(comps) != prec:
            raise ValueError("component count must equal the precision")
        self.handle = handle
        self.prec = prec
        self.form = form
        self.comps = tuple(comps)

    def coordinates(self) -> "WittVec":
        if self.form == WITT_COORDS:
            return self
        h = self.handle
        comps = []
        for n, d in enumerate(self.comps):
            x = d
            for _ in range(n):
                x = h.frobenius(x)
            comps.append(x)
        return WittVec(self.handle, self.prec, WITT_COORDS, tuple(comps))

    def expansion(self) -> "WittVec":
        if self.form == TEICH_EXPANSION:
            return self
        h = self.handle
        comps = []
        for n, x in enumerate(self.comps):
            d = x
            for _ in range(n):
                d = h.pth_root(d)
            comps.append(d)
        return WittVec(self.handle, self.prec, TEICH_EXPANSION, tuple(comps))

    def digits(self) -> tuple:
        return self.expansion().comps

    def is_zero(self) -> bool:
        return all(self.handle.is_zero(c) for c in self.comps)

    def eq(self, other) -> bool:
        a, b = self.coordinates(), other.coordinates()
        return all(self.handle.eq(x, y) for x, y in zip(a.comps, b.comps))

    def truncate(self, prec: int) -> "WittVec":
        if prec > self.prec:
            raise ValueError("cannot extend precision")
        return WittVec(self.handle, prec, self.form, self.comps[:prec])


def _eval_struct(poly: ZPoly, handle, xs, ys, p):
    """Evaluate a structure polynomial on handle elements (coeffs mod p)."""
    acc = handle.zero()
    one = handle.one()
    pow_cache = {}

    def power(idx, val, e):
        key = (idx, e)
        got = pow_cache.get(key)
        if got is None:
            got = one
            base = val
            n = e
            while n:
                if n & 1:
                    got = handle.mul(got, base)
                base = handle.mul(base, base) if n > 1 else base
                n >>= 1
            pow_cache[key] = got
        return got

    N = len(xs)
    for e, c in poly.terms.items():
        ci = c.numerator % p
        if ci == 0:
            continue
        term = None
        for j, d in enumerate(e):
            if d:
                val = xs[j] if j < N else ys[j - N]
                pw = power(j, val, d)
                term = pw if term is None else handle.mul(term, pw)
        if term is None:
            term = one
        scaled = handle.zero()
        for _ in range(ci):
            scaled = handle.add(scaled, term)
        acc = handle.add(acc, scaled)
    return acc


def witt_add(u: WittVec, v: WittVec) -> WittVec:
    if u.handle is not v.handle or u.prec != v.prec:
        raise ValueError("operands live over different Witt rings")
    sp = gen_structure_polys(u.handle.p, u.prec)
    xs, ys = u.coordinates().comps, v.coordinates().comps
    comps = tuple(_eval_struct(sp.sums[n], u.handle, xs, ys, u.handle.p)
                  for n in range(u.prec))
    return WittVec(u.handle, u.prec, WITT_COORDS, comps)


def witt_mul(u: WittVec, v: WittVec) -> WittVec:
    if u.handle is not v.handle or u.prec != v.prec:
        raise ValueError("operands live over different Witt rings")
    sp = gen_structure_polys(u.handle.p, u.prec)
    xs, ys = u.coordinates().comps, v.coordinates().comps
    comps = tuple(_eval_struct(sp.prods[n], u.handle, xs, ys, u.handle.p)
                  for n in range(u.prec))
    return WittVec(u.handle, u.prec, WITT_COORDS, comps)


def witt_neg(u: WittVec) -> WittVec:
    minus_one = from_int(u.handle, -1, u.prec)
    return witt_mul(u, minus_one)


def witt_sub(u: WittVec, v: WittVec) -> WittVec:
    return witt_add(u, witt_neg(v))


def teich(handle, x, prec: int) -> WittVec:
    comps = (x,) + tuple(handle.zero() for _ in range(prec - 1))
    return WittVec(handle, prec, TEICH_EXPANSION, comps)


def witt_zero(handle, prec: int) -> WittVec:
    return WittVec(handle, prec, TEICH_EXPANSION,
                   tuple(handle.zero() for _ in range(prec)))


def from_expansion(handle, digits, prec: Optional[int] = None) -> WittVec:
    pr = len(digits) if prec is None else prec
    if len(digits) > pr:
        raise ValueError("too many digits for the precision")
    comps = tuple(digits) + tuple(handle.zero()
                                  for _ in range(pr - len(digits)))
    return WittVec(handle, pr, TEICH_EXPANSION, comps)


def to_expansion(u: WittVec) -> tuple:
    return u.digits()


def from_oe_scalar(handle, c: OEInt) -> WittVec:
    """O_E scalar as a Witt vector via its Teichmueller digit expansion."""
    digits = c.ring.teich_digits(c.coords, c.prec)
    return from_expansion(handle,
                          tuple(handle.embed_residue(d) for d in digits))


def from_int(handle, n: int, prec: int) -> WittVec:
    """Integer as a Witt vector: digits of its Teichmueller expansion in Z_p."""
    p = handle.p
    digits = []
    rem_prec = prec
    cur = n % p ** prec
    for _ in range(prec):
        lam = cur % p
        digits.append(handle.embed_residue(handle.field.from_int(lam)))
        if rem_prec > 1:
            t = _teich_int(lam, p, rem_prec)
            cur = ((cur - t) % p ** rem_prec) // p
        rem_prec -= 1
    return from_expansion(handle, tuple(digits), prec)


def _teich_int(lam: int, p: int, prec: int) -> int:
    """Teichmueller lift of lam mod p inside Z/p^prec."""
    t = lam % p ** prec
    for _ in range(prec):
        t = pow(t, p, p ** prec)
    return t


def map_coefficients(sigma, u: WittVec) -> WittVec:
    """Apply a base-ring endomorphism to every Teichmueller digit."""
    digits = tuple(sigma(d) for d in u.digits())
    return WittVec(u.handle, u.prec, TEICH_EXPANSION, digits)


def scalar_mul(c: OEInt, u: WittVec) -> WittVec:
    return witt_mul(from_oe_scalar(u.handle, c.reduce(u.prec)), u)

"""Coefficient arithmetic.

Three layers, all exact:

* ``FField`` / ``FElt`` -- the residue field F_{p^h} in a fixed polynomial
  basis over F_p, with Frobenius and p-th roots.
* ``OERing`` / ``OEInt`` -- truncated Witt scalars O_E/p^prec for E unramified
  (pi = p), realized as (Z/p^prec)[x]/(g) for a monic lift g of the defining
  polynomial.  Elements carry their own capped-absolute precision.
* ``OKRing`` / ``OKElement`` -- O_K/p^prec inside O_E via the Teichmueller
  lifts of a fixed F_p-basis of F_q, with coordinate solving for the
  unit-group action.

Everything downstream (series, Laurent elements, Witt digits) stores raw
coordinate tuples and calls the ``raw_*`` kernels here in hot loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import NotAUnit, PrecisionExhausted


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_factorial(j: int, p: int) -> int:
    """v_p(j!) by Legendre's formula."""
    v, q = 0, p
    while q <= j:
        v += j // q
        q *= p
    return v


# ---------------------------------------------------------------------------
# F_{p^h}
# ---------------------------------------------------------------------------

def _fp_poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _fp_poly_rem(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * mod[j]) % p
    return [c % p for c in a[:dm]] + [0] * max(0, dm - len(a))


def _fp_poly_powmod(base, e, mod, p):
    result = [1]
    base = _fp_poly_rem(base, mod, p)
    while e:
        if e & 1:
            result = _fp_poly_rem(_fp_poly_mul(result, base, p), mod, p)
        base = _fp_poly_rem(_fp_poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def _fp_poly_gcd(a, b, p):
    a = [c % p for c in a]
    b = [c % p for c in b]

    def deg(u):
        d = len(u) - 1
        while d >= 0 and u[d] == 0:
            d -= 1
        return d

    while deg(b) >= 0:
        da, db = deg(a), deg(b)
        if da < db:
            a, b = b, a
            continue
        inv = pow(b[deg(b)], p - 2, p)
        shift = da - db
        factor = (a[da] * inv) % p
        for j in range(db + 1):
            a[shift + j] = (a[shift + j] - factor * b[j]) % p
    return a


def _is_irreducible(poly, p):
    """Monic poly over F_p: x^{p^h} == x mod poly and no subfield fixes it."""
    h = len(poly) - 1
    if h == 1:
        return True
    x = [0, 1]
    xq = _fp_poly_powmod(x, p ** h, poly, p)
    if _fp_poly_rem([(a - b) % p for a, b in
                     zip(xq + [0] * 2, x + [0] * len(xq))], poly, p) != [0] * h:
        return False
    for ell in {d for d in range(2, h + 1) if h % d == 0 and is_prime(d)}:
        xe = _fp_poly_powmod(x, p ** (h // ell), poly, p)
        diff = [(a - b) % p for a, b in zip(xe + [0] * 2, x + [0] * len(xe))]
        g = _fp_poly_gcd(poly, diff, p)
        dg = max((i for i, c in enumerate(g) if c), default=-1)
        if dg != 0:
            return False
    return True


def default_poly(p: int, h: int) -> tuple:
    """Smallest monic irreducible of degree h over F_p (lexicographic tail)."""
    if h == 1:
        return (0, 1)
    count = p ** h
    for tail in range(count):
        coeffs = []
        t = tail
        for _ in range(h):
            coeffs.append(t % p)
            t //= p
        poly = coeffs + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise RuntimeError("no irreducible polynomial found")  # unreachable


class FField:
    """F_{p^h} with basis 1, x, ..., x^{h-1} modulo a monic irreducible."""

    def __init__(self, p: int, h: int, poly: tuple):
        self.p = p
        self.h = h
        self.poly = tuple(c % p for c in poly)
        if len(self.poly) != h + 1 or self.poly[h] != 1:
            raise ValueError("defining polynomial must be monic of degree h")
        if not _is_irreducible(list(self.poly), p):
            raise ValueError("defining polynomial is not irreducible mod p")
        self.zero = FElt(self, (0,) * h)
        self.one = FElt(self, tuple([1] + [0] * (h - 1)))

    def __call__(self, coords: Iterable[int]) -> "FElt":
        c = tuple(int(v) % self.p for v in coords)
        if len(c) != self.h:
            raise ValueError("coordinate vector has wrong length")
        return FElt(self, c)

    def from_int(self, n: int) -> "FElt":
        return self(tuple([n] + [0] * (self.h - 1)))

    def elements(self):
        p, h = self.p, self.h
        for idx in range(p ** h):
            coords, t = [], idx
            for _ in range(h):
                coords.append(t % p)
                t //= p
            yield FElt(self, tuple(coords))

    def raw_mul(self, a: tuple, b: tuple) -> tuple:
        p = self.p
        if self.h == 1:
            return ((a[0] * b[0]) % p,)
        prod = _fp_poly_mul(a, b, p)
        return tuple(_fp_poly_rem(prod, self.poly, p))


class FElt:
    __slots__ = ("field", "coords")

    def __init__(self, field: FField, coords: tuple):
        self.field = field
        self.coords = coords

    def __eq__(self, other):
        return (isinstance(other, FElt) and self.field is other.field
                and self.coords == other.coords)

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    def __add__(self, other):
        p = self.field.p
        return FElt(self.field, tuple((a + b) % p for a, b in
                                      zip(self.coords, other.coords)))

    def __sub__(self, other):
        p = self.field.p
        return FElt(self.field, tuple((a - b) % p for a, b in
                                      zip(self.coords, other.coords)))

    def __neg__(self):
        p = self.field.p
        return FElt(self.field, tuple((-a) % p for a in self.coords))

    def __mul__(self, other):
        return FElt(self.field, self.field.raw_mul(self.coords, other.coords))

    def __pow__(self, e: int):
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        result, base = f.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "FElt":
        if not self:
            raise NotAUnit("0 has no inverse in the residue field")
        return self ** (self.field.p ** self.field.h - 2)

    def frobenius(self) -> "FElt":
        return self ** self.field.p

    def pth_root(self) -> "FElt":
        # Frobenius has order h, so x^(p^(h-1)) inverts it.
        return self ** (self.field.p ** (self.field.h - 1))

    def __repr__(self):
        return f"FElt{self.coords}"


# ---------------------------------------------------------------------------
# O_E / p^prec
# ---------------------------------------------------------------------------

class OERing:
    """O_E at capped-absolute precision; elements are coordinate tuples."""

    def __init__(self, fld: FField):
        self.field = fld
        self.p = fld.p
        self.h = fld.h
        # canonical integral lift of the defining polynomial
        self.poly = tuple(int(c) for c in fld.poly)
        self._teich_cache: dict = {}

    # -- raw kernels (tuples of ints, explicit precision) -------------------

    def raw_reduce(self, coords, prec: int) -> tuple:
        m = self.p ** prec
        return tuple(c % m for c in coords)

    def raw_add(self, a, b, prec: int) -> tuple:
        m = self.p ** prec
        return tuple((x + y) % m for x, y in zip(a, b))

    def raw_sub(self, a, b, prec: int) -> tuple:
        m = self.p ** prec
        return tuple((x - y) % m for x, y in zip(a, b))

    def raw_neg(self, a, prec: int) -> tuple:
        m = self.p ** prec
        return tuple((-x) % m for x in a)

    def raw_smul(self, s: int, a, prec: int) -> tuple:
        m = self.p ** prec
        return tuple((s * x) % m for x in a)

    def raw_mul(self, a, b, prec: int) -> tuple:
        h, m = self.h, self.p ** prec
        if h == 1:
            return ((a[0] * b[0]) % m,)
        out = [0] * (2 * h - 1)
        for i in range(h):
            ai = a[i]
            if ai:
                for j in range(h):
                    out[i + j] += ai * b[j]
        poly = self.poly
        for i in range(2 * h - 2, h - 1, -1):
            c = out[i] % m
            if c:
                for j in range(h):
                    out[i - h + j] -= c * poly[j]
            out[i] = 0
        return tuple(c % m for c in out[:h])

    def raw_is_zero(self, a) -> bool:
        return not any(a)

    def raw_val(self, a, prec: int) -> int:
        """min v_p over coordinates; prec when indistinguishable from 0."""
        v = prec
        for c in a:
            if c:
                v = min(v, vp(c, self.p))
                if v == 0:
                    return 0
        return v

    # -- wrapped elements ----------------------------------------------------

    def __call__(self, coords, prec: int) -> "OEInt":
        c = self.raw_reduce(tuple(int(v) for v in coords), prec)
        if len(c) != self.h:
            raise ValueError("coordinate vector has wrong length")
        return OEInt(self, prec, c)

    def from_int(self, n: int, prec: int) -> "OEInt":
        return self(tuple([n] + [0] * (self.h - 1)), prec)

    def zero(self, prec: int) -> "OEInt":
        return OEInt(self, prec, (0,) * self.h)

    def one(self, prec: int) -> "OEInt":
        return self.from_int(1, prec)

    def reduce_mod_p(self, a) -> FElt:
        return FElt(self.field, tuple(c % self.p for c in a))

    def lift_felt(self, x: FElt, prec: int) -> tuple:
        return self.raw_reduce(x.coords, prec)

    def raw_teich(self, x: FElt, prec: int) -> tuple:
        """Hensel lift of x to the root of T^(p^h) = T at the given precision."""
        key = (x.coords, prec)
        cached = self._teich_cache.get(key)
        if cached is not None:
            return cached
        a = self.lift_felt(x, prec)
        e = self.p ** self.h
        for _ in range(prec):
            a = self.raw_pow(a, e, prec)
        self._teich_cache[key] = a
        return a

    def raw_pow(self, a, e: int, prec: int) -> tuple:
        result = self.raw_reduce(tuple([1] + [0] * (self.h - 1)), prec)
        base = a
        while e:
            if e & 1:
                result = self.raw_mul(result, base, prec)
            base = self.raw_mul(base, base, prec)
            e >>= 1
        return result

    def raw_inv(self, a, prec: int) -> tuple:
        """Newton inverse; requires a unit (nonzero residue)."""
        res = self.reduce_mod_p(a)
        if not res:
            raise NotAUnit("not a unit in O_E at this precision")
        b = self.lift_felt(res.inverse(), prec)
        two = self.from_int(2, prec).coords
        k = 1
        while k < prec:
            ab = self.raw_mul(a, b, prec)
            b = self.raw_mul(b, self.raw_sub(two, ab, prec), prec)
            k *= 2
        return b

    def raw_div_exact_p(self, a, v: int, prec: int) -> tuple:
        """Divide by p^v, asserting exactness; result precision is prec - v."""
        q = self.p ** v
        if any(c % q for c in a):
            raise ValueError("division by p^v is not exact")
        return self.raw_reduce(tuple(c // q for c in a), prec - v)

    def teich_digits(self, a, prec: int) -> list:
        """Teichmueller digit decomposition a = sum p^n [lambda_n], n < prec."""
        digits = []
        cur = a
        for n in range(prec):
            lam = self.reduce_mod_p(cur)
            digits.append(lam)
            t = self.raw_teich(lam, prec - n)
            cur = self.raw_div_exact_p(self.raw_sub(cur, t, prec - n), 1,
                                       prec - n)
        return digits

    def from_teich_digits(self, digits, prec: int) -> tuple:
        acc = (0,) * self.h
        for n, lam in enumerate(digits):
            if n >= prec:
                break
            t = self.raw_smul(self.p ** n, self.raw_teich(lam, prec), prec)
            acc = self.raw_add(acc, t, prec)
        return acc

    def raw_frobenius(self, a, prec: int) -> tuple:
        """The Frobenius lift: p-th power on every Teichmueller digit."""
        digits = [lam.frobenius() for lam in self.teich_digits(a, prec)]
        return self.from_teich_digits(digits, prec)


class OEInt:
    """Element of O_E known mod p^prec (capped absolute precision)."""

    __slots__ = ("ring", "prec", "coords")

    def __init__(self, ring: OERing, prec: int, coords: tuple):
        self.ring = ring
        self.prec = prec
        self.coords = coords

    def _join(self, other) -> int:
        return min(self.prec, other.prec)

    def __add__(self, other):
        pr = self._join(other)
        return OEInt(self.ring, pr, self.ring.raw_add(
            self.ring.raw_reduce(self.coords, pr),
            self.ring.raw_reduce(other.coords, pr), pr))

    def __sub__(self, other):
        pr = self._join(other)
        return OEInt(self.ring, pr, self.ring.raw_sub(
            self.ring.raw_reduce(self.coords, pr),
            self.ring.raw_reduce(other.coords, pr), pr))

    def __neg__(self):
        return OEInt(self.ring, self.prec,
                     self.ring.raw_neg(self.coords, self.prec))

    def __mul__(self, other):
        if isinstance(other, int):
            return OEInt(self.ring, self.prec,
                         self.ring.raw_smul(other, self.coords, self.prec))
        pr = self._join(other)
        return OEInt(self.ring, pr, self.ring.raw_mul(
            self.ring.raw_reduce(self.coords, pr),
            self.ring.raw_reduce(other.coords, pr), pr))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return OEInt(self.ring, self.prec,
                     self.ring.raw_pow(self.coords, e, self.prec))

    def __eq__(self, other):
        return (isinstance(other, OEInt) and self.ring is other.ring
                and self.prec == other.prec and self.coords == other.coords)

    def __hash__(self):
        return hash((self.prec, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def valuation(self) -> int:
        return self.ring.raw_val(self.coords, self.prec)

    def reduce(self, prec: int) -> "OEInt":
        if prec > self.prec:
            raise PrecisionExhausted(
                f"element known mod p^{self.prec}, requested p^{prec}")
        return OEInt(self.ring, prec, self.ring.raw_reduce(self.coords, prec))

    def residue(self) -> FElt:
        return self.ring.reduce_mod_p(self.coords)

    def inverse(self) -> "OEInt":
        return OEInt(self.ring, self.prec,
                     self.ring.raw_inv(self.coords, self.prec))

    def frobenius(self) -> "OEInt":
        return OEInt(self.ring, self.prec,
                     self.ring.raw_frobenius(self.coords, self.prec))

    def __repr__(self):
        return f"OEInt{self.coords}~p^{self.prec}"


# ---------------------------------------------------------------------------
# Params
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Params:
    """Global shape of one computation: field sizes and precision windows.

    p: prime; f: [K:Q_p]; h: residue degree of E (f | h); N: pi-adic
    precision; M: total-degree window for series; B: cross-exponent band;
    k: denominator depth p^-k for perfectoid exponents.
    """

    p: int
    f: int
    h: int
    N: int
    M: int
    B: int
    k: int
    poly: tuple

    @classmethod
    def create(cls, p: int, f: int, h: Optional[int] = None, N: int = 3,
               M: int = 12, B: int = 6, k: int = 4,
               poly: Optional[tuple] = None) -> "Params":
        if h is None:
            h = f
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if f < 1 or h % f != 0:
            raise ValueError("need f >= 1 and f | h")
        if min(N, M, B, k) < 1:
            raise ValueError("N, M, B, k must all be >= 1")
        if poly is None:
            poly = default_poly(p, h)
        else:
            poly = tuple(int(c) % p for c in poly)
            if len(poly) != h + 1 or poly[h] != 1:
                raise ValueError("defining polynomial must be monic of "
                                 "degree h")
            if not _is_irreducible(list(poly), p):
                raise ValueError("defining polynomial is reducible mod p")
        return cls(p, f, h, N, M, B, k, tuple(poly))

    @property
    def q(self) -> int:
        return self.p ** self.f

    def guard(self, window: Optional[int] = None) -> int:
        """Extra pi-digits needed so degree-(window-1) binomials certify."""
        w = self.M if window is None else window
        return vp_factorial(w - 1, self.p)

    def n_work(self, window: Optional[int] = None) -> int:
        return self.N + self.guard(window)

    @property
    def embed_window(self) -> int:
        """Degree window for the fixpoint series of the perfectoid embedding."""
        return self.M if self.f == 1 else max(self.M, 15)

    def key(self) -> tuple:
        return (self.p, self.f, self.h, self.N, self.M, self.B, self.k,
                self.poly)


_FIELD_CACHE: dict = {}
_OERING_CACHE: dict = {}
_OKRING_CACHE: dict = {}


def fq_field(params: Params) -> FField:
    key = (params.p, params.h, params.poly)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FField(params.p, params.h, params.poly)
    return _FIELD_CACHE[key]


def oe_ring(params: Params) -> OERing:
    key = (params.p, params.h, params.poly)
    if key not in _OERING_CACHE:
        _OERING_CACHE[key] = OERing(fq_field(params))
    return _OERING_CACHE[key]


def ok_ring(params: Params) -> "OKRing":
    key = params.key()
    if key not in _OKRING_CACHE:
        _OKRING_CACHE[key] = OKRing(params)
    return _OKRING_CACHE[key]


# ---------------------------------------------------------------------------
# scalar operations
# ---------------------------------------------------------------------------

def teichmuller(params: Params, x: FElt, prec: Optional[int] = None) -> OEInt:
    """Multiplicative lift: reduces to x mod p, satisfies t^(p^h) = t."""
    ring = oe_ring(params)
    pr = params.N if prec is None else prec
    return OEInt(ring, pr, ring.raw_teich(x, pr))


def frobenius_lift(x: OEInt) -> OEInt:
    return x.frobenius()


def padic_binomial(params: Params, a, j: int,
                   prec: Optional[int] = None) -> OEInt:
    """C(a, j) for a p-adic scalar a known mod p^prec.

    The numerator a(a-1)...(a-j+1) is determined mod p^prec; dividing by j!
    leaves prec - v_p(j!) certified digits.  Raises PrecisionExhausted when
    none remain.
    """
    ring = oe_ring(params)
    p = params.p
    if isinstance(a, OEInt):
        if any(a.coords[1:]):
            raise ValueError("binomial base must be a scalar (prime subring)")
        pr = a.prec if prec is None else min(prec, a.prec)
        a_int = a.coords[0]
    else:
        pr = params.N if prec is None else prec
        a_int = int(a) % p ** pr
    if j < 0:
        raise ValueError("binomial index must be nonnegative")
    if j == 0:
        return ring.one(pr)
    v = vp_factorial(j, p)
    out_prec = pr - v
    if out_prec <= 0:
        raise PrecisionExhausted(
            f"C(a, {j}) retains no digits at precision {pr} (v_p(j!) = {v})")
    m = p ** pr
    num = 1
    for i in range(j):
        num = (num * (a_int - i)) % m
    if num % p ** v:
        raise PrecisionExhausted("numerator lost expected divisibility")
    unit = 1
    fact = 1
    for i in range(2, j + 1):
        fact *= i
    fact //= p ** v
    unit = pow(fact, -1, p ** out_prec)
    return ring.from_int((num // p ** v) * unit, out_prec)


# ---------------------------------------------------------------------------
# O_K inside O_E
# ---------------------------------------------------------------------------

def _solve_mod(matrix, rhs_cols, p, prec):
    """Gauss-Jordan over Z/p^prec with unit pivots; matrix is square."""
    n = len(matrix)
    m = p ** prec
    a = [row[:] for row in matrix]
    rhs = [row[:] for row in rhs_cols]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] % p), None)
        if piv is None:
            raise NotAUnit("matrix is singular mod p")
        a[col], a[piv] = a[piv], a[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = pow(a[col][col], -1, m)
        a[col] = [(x * inv) % m for x in a[col]]
        rhs[col] = [(x * inv) % m for x in rhs[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [(x - c * y) % m for x, y in zip(a[r], a[col])]
                rhs[r] = [(x - c * y) % m for x, y in zip(rhs[r], rhs[col])]
    return rhs


class OKRing:
    """O_K = W(F_q) realized inside O_E via Teichmueller lifts of a basis."""

    def __init__(self, params: Params):
        self.params = params
        self.oe = oe_ring(params)
        self.field = fq_field(params)
        p, f, h = params.p, params.f, params.h
        self.prec = params.n_work()
        self.fq_basis = self._subfield_basis()
        # Teichmueller lifts of the basis, as raw O_E coordinate tuples
        self.teich_basis = [self.oe.raw_teich(b, self.prec)
                            for b in self.fq_basis]
        # h x f matrix with columns the basis lifts
        self.T = [[self.teich_basis[j][i] for j in range(f)] for i in range(h)]
        self._solver_cache: dict = {}
        self._prepare_solver()

    def _subfield_basis(self):
        """Echelonized kernel basis of Frob^f - id acting on F_{p^h}."""
        p, f, h = self.params.p, self.params.f, self.params.h
        field = self.field
        cols = []
        for i in range(h):
            e = field((0,) * i + (1,) + (0,) * (h - 1 - i))
            im = e ** (p ** f)
            cols.append([(a - b) % p for a, b in zip(im.coords, e.coords)])
        # kernel of the h x h matrix with those columns
        a = [[cols[j][i] for j in range(h)] for i in range(h)]
        pivots, free = [], []
        row = 0
        for col in range(h):
            piv = next((r for r in range(row, h) if a[r][col]), None)
            if piv is None:
                free.append(col)
                continue
            a[row], a[piv] = a[piv], a[row]
            inv = pow(a[row][col], p - 2, p)
            a[row] = [(x * inv) % p for x in a[row]]
            for r in range(h):
                if r != row and a[r][col]:
                    c = a[r][col]
                    a[r] = [(x - c * y) % p for x, y in zip(a[r], a[row])]
            pivots.append(col)
            row += 1
        basis = []
        for fc in free:
            vec = [0] * h
            vec[fc] = 1
            for r, pc in enumerate(pivots):
                vec[pc] = (-a[r][fc]) % p
            basis.append(self.field(vec))
        if len(basis) != self.params.f:
            raise RuntimeError("subfield dimension mismatch")
        return basis

    def _prepare_solver(self):
        p, f, h = self.params.p, self.params.f, self.params.h
        # choose f pivot rows of T that are independent mod p
        rows, used = [], []
        work = [row[:] for row in self.T]
        reduced = [[c % p for c in row] for row in work]
        rank_rows = []
        basis_rows = []
        for i in range(h):
            cand = reduced[i][:]
            for r, br in zip(rank_rows, basis_rows):
                if cand[r]:
                    c = cand[r]
                    cand = [(x - c * y) % p for x, y in zip(cand, br)]
            piv = next((c for c in range(f) if cand[c]), None)
            if piv is not None:
                inv = pow(cand[piv], p - 2, p)
                cand = [(x * inv) % p for x in cand]
                rank_rows.append(piv)
                basis_rows.append(cand)
                rows.append(i)
            if len(rows) == f:
                break
        if len(rows) != f:
            raise RuntimeError("Teichmueller basis matrix is singular mod p")
        self.pivot_rows = rows

    # -- elements ------------------------------------------------------------

    def __call__(self, coords, prec: Optional[int] = None) -> "OKElement":
        pr = self.prec if prec is None else prec
        m = self.params.p ** pr
        c = tuple(int(v) % m for v in coords)
        if len(c) != self.params.f:
            raise ValueError("coordinate vector has wrong length")
        return OKElement(self, pr, c)

    def zero(self, prec: Optional[int] = None) -> "OKElement":
        return self((0,) * self.params.f, prec)

    def one(self, prec: Optional[int] = None) -> "OKElement":
        return self.coordinates_of_felt(self.field.one, prec)

    def image(self, x: "OKElement") -> tuple:
        """Raw O_E coordinates of sum x_j * t_j at x.prec."""
        oe = self.oe
        tb, _, _ = self._solver_at(x.prec)
        acc = (0,) * self.params.h
        for j, c in enumerate(x.coords):
            if c:
                acc = oe.raw_add(acc, oe.raw_smul(c, tb[j], x.prec), x.prec)
        return acc

    def _solver_at(self, prec: int):
        """(teich basis, basis matrix, pivot-square inverse) at a precision."""
        got = self._solver_cache.get(prec)
        if got is not None:
            return got
        p, f = self.params.p, self.params.f
        tb = [self.oe.raw_teich(b, prec) for b in self.fq_basis]
        T = [[tb[j][i] for j in range(f)] for i in range(self.params.h)]
        square = [T[i][:] for i in self.pivot_rows]
        ident = [[1 if i == j else 0 for j in range(f)] for i in range(f)]
        inv = _solve_mod(square, ident, p, prec)
        self._solver_cache[prec] = (tb, T, inv)
        return tb, T, inv

    def coordinates_raw(self, vec: tuple, prec: int) -> tuple:
        """Solve sum x_j t_j = vec; raises if vec is not in the O_K lattice."""
        p, f = self.params.p, self.params.f
        m = p ** prec
        _, T, inv = self._solver_at(prec)
        rhs = [[vec[i] % m] for i in self.pivot_rows]
        x = tuple(sum(inv[i][j] * rhs[j][0] for j in range(f)) % m
                  for i in range(f))
        # consistency on all h rows
        for i in range(self.params.h):
            s = sum(T[i][j] * x[j] for j in range(f)) % m
            if s != vec[i] % m:
                raise ValueError("vector is not in the O_K lattice")
        return x

    def coordinates_of_felt(self, lam: FElt,
                            prec: Optional[int] = None) -> "OKElement":
        """Teichmueller coordinates of lambda in F_q (must lie in F_q)."""
        pr = self.prec if prec is None else prec
        t = self.oe.raw_teich(lam, pr)
        return OKElement(self, pr, self.coordinates_raw(t, pr))

    def fq_elements(self):
        """All q elements of F_q as FElt of the big field."""
        p, f = self.params.p, self.params.f
        for idx in range(p ** f):
            digits, t = [], idx
            for _ in range(f):
                digits.append(t % p)
                t //= p
            acc = self.field.zero
            for d, b in zip(digits, self.fq_basis):
                if d:
                    acc = acc + self.field.from_int(d) * b
            yield acc

    def sigma(self, x: "OKElement", i: int) -> OEInt:
        """Embedding sigma_i = sigma_0 . Frob^i applied to x, as an O_E scalar."""
        img = self.image(x)
        for _ in range(i % self.params.h):
            img = self.oe.raw_frobenius(img, x.prec)
        return OEInt(self.oe, x.prec, img)

    def random_unit(self, rng, prec: Optional[int] = None) -> "OKElement":
        pr = self.prec if prec is None else prec
        while True:
            coords = tuple(rng.randrange(self.params.p ** self.params.N)
                           for _ in range(self.params.f))
            x = self(coords, pr)
            if x.is_unit():
                return x


class OKElement:
    """Element of O_K/p^prec in the Teichmueller coordinate basis."""

    __slots__ = ("okr", "prec", "coords")

    def __init__(self, okr: OKRing, prec: int, coords: tuple):
        self.okr = okr
        self.prec = prec
        self.coords = coords

    def __eq__(self, other):
        return (isinstance(other, OKElement) and self.okr is other.okr
                and self.prec == other.prec and self.coords == other.coords)

    def __hash__(self):
        return hash((self.prec, self.coords))

    def image(self) -> OEInt:
        return OEInt(self.okr.oe, self.prec, self.okr.image(self))

    def residue(self) -> FElt:
        return self.okr.oe.reduce_mod_p(self.okr.image(self))

    def is_unit(self) -> bool:
        return bool(self.residue())

    def __add__(self, other):
        pr = min(self.prec, other.prec)
        m = self.okr.params.p ** pr
        return OKElement(self.okr, pr, tuple(
            (a + b) % m for a, b in zip(self.coords, other.coords)))

    def __mul__(self, other):
        if isinstance(other, int):
            m = self.okr.params.p ** self.prec
            return OKElement(self.okr, self.prec,
                             tuple((other * c) % m for c in self.coords))
        pr = min(self.prec, other.prec)
        img = self.okr.oe.raw_mul(self.okr.image(self), self.okr.image(other),
                                  pr)
        return OKElement(self.okr, pr, self.okr.coordinates_raw(img, pr))

    __rmul__ = __mul__

    def inverse(self) -> "OKElement":
        if not self.is_unit():
            raise NotAUnit("O_K element is not a unit")
        inv = self.okr.oe.raw_inv(self.okr.image(self), self.prec)
        return OKElement(self.okr, self.prec,
                         self.okr.coordinates_raw(inv, self.prec))

    def __repr__(self):
        return f"OK{self.coords}~p^{self.prec}"

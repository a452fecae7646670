"""Truncated perfectoid Laurent rings with Gauss norms.

``PerfLaurent`` holds a finite sum of terms c * (monomial with exponents in
p^{-k} Z) over the residue field, with a Gauss-valuation window and a cross
band.  Three ring descriptors share the implementation:

* the completed perfection of the mod-pi coefficient ring (variables
  Y_0, ..., Y_{f-1}; every variable has Gauss weight 1);
* the tilted Lubin-Tate field F((T_LT^{1/p^oo})) (one variable, weight 1);
* the product-side ring with variables T_LT,i and the cross structure
  (T_LT,i / T_LT,0^{p^i}); weights (p-1)/(q-1) * p^i, so the embedding of
  the Lubin-Tate line into coordinate i scales valuations by exactly the
  radius factor of pr_radius.

``BElt`` wraps an expansion-form Witt vector over such a ring together with
a radius and a global monomial shift (the [1/uniformizer] localization).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .coeff import FElt, Params, fq_field
from .errors import BandOverflow, DepthExhausted
from . import witt as wt


class PerfRing:
    """Descriptor: variable count, Gauss weights, denominator depth."""

    def __init__(self, params: Params, nvars: int, weights, name: str):
        self.params = params
        self.nvars = nvars
        self.weights = tuple(weights)
        self.name = name
        self.scale = params.p ** params.k
        self.field = fq_field(params)
        # capacity guard: roots and structure-polynomial powers reach
        # p^(N+1)-fold exponents of banded inputs
        self.band_cap = max(params.B, 8) * self.scale \
            * params.p ** (params.N + 1)

    def __repr__(self):
        return f"PerfRing({self.name})"


def ainf_ring(params: Params) -> PerfRing:
    return PerfRing(params, params.f, (Fraction(1),) * params.f, "Ainf")


def lt_ring(params: Params) -> PerfRing:
    return PerfRing(params, 1, (Fraction(1),), "LTperf")


def ainf_prime_ring(params: Params) -> PerfRing:
    w = Fraction(params.p - 1, params.q - 1)
    return PerfRing(params, params.f,
                    tuple(w * params.p ** i for i in range(params.f)),
                    "AinfPrime")


class PerfLaurent:
    """Element with exponents in (1/scale) Z, coefficients in the residue field.

    terms: scaled pure-exponent tuple -> FElt.  w_lo/w_hi bound the Gauss
    valuation (w_hi None = exact); band bounds |scaled cross exponents|.
    """

    __slots__ = ("ring", "terms", "w_lo", "w_hi", "band")

    def __init__(self, ring: PerfRing, terms: dict, w_lo=None, w_hi=None,
                 band=None, _normalized=False):
        self.ring = ring
        self.w_hi = w_hi
        self.band = ring.band_cap if band is None else band
        if _normalized:
            self.terms = terms
            self.w_lo = Fraction(0) if w_lo is None else w_lo
            return
        out = {}
        for e, c in terms.items():
            gv = self._gv(e)
            if w_hi is not None and gv >= w_hi:
                continue
            if any(abs(x) > self.band for x in e[1:]):
                raise BandOverflow(f"cross exponents {e[1:]} exceed the band")
            if c:
                out[tuple(e)] = c
        self.terms = out
        lo = min((self._gv(e) for e in out), default=Fraction(0))
        self.w_lo = lo if w_lo is None else min(w_lo, lo)

    def _gv(self, e) -> Fraction:
        ring = self.ring
        return sum((Fraction(x, ring.scale) * w
                    for x, w in zip(e, ring.weights)), Fraction(0))

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero(ring):
        return PerfLaurent(ring, {}, Fraction(0), None, None,
                           _normalized=True)

    @staticmethod
    def monomial(ring, exponents, coeff=None):
        """exponents: pure rational exponents (Fractions or ints)."""
        c = ring.field.one if coeff is None else coeff
        e = []
        for x in exponents:
            s = Fraction(x) * ring.scale
            if s.denominator != 1:
                raise DepthExhausted(
                    f"exponent {x} below depth p^-{ring.params.k}")
            e.append(int(s))
        return PerfLaurent(ring, {tuple(e): c})

    @staticmethod
    def one(ring):
        return PerfLaurent.monomial(ring, (0,) * ring.nvars)

    # -- structure ---------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def exponents(self, e) -> tuple:
        return tuple(Fraction(x, self.ring.scale) for x in e)

    def __eq__(self, other):
        return (isinstance(other, PerfLaurent) and self.ring is other.ring
                and self.terms == other.terms)

    def eq_within(self, other) -> bool:
        """Equality of represented terms inside the common window."""
        hi = _min_f(self.w_hi, other.w_hi)
        for e in set(self.terms) | set(other.terms):
            if hi is not None and self._gv(e) >= hi:
                continue
            if self.terms.get(e) != other.terms.get(e):
                return False
        return True

    def __repr__(self):
        bits = []
        for e in sorted(self.terms):
            mon = "*".join(f"{v}^{Fraction(x, self.ring.scale)}"
                           for v, x in zip(self._names(), e) if x)
            bits.append(f"{list(self.terms[e].coords)}{'*' + mon if mon else ''}")
        return " + ".join(bits) if bits else "0"

    def _names(self):
        if self.ring.name == "Ainf":
            return [f"Y{i}" for i in range(self.ring.nvars)]
        if self.ring.name == "LTperf":
            return ["T"]
        return [f"T{i}" for i in range(self.ring.nvars)]

    # -- arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        hi = _min_f(self.w_hi, other.w_hi)
        lo = min(self.w_lo, other.w_lo)
        band = min(self.band, other.band)
        out = dict()
        for src in (self.terms, other.terms):
            for e, c in src.items():
                if hi is not None and self._gv(e) >= hi:
                    continue
                cur = out.get(e)
                s = c if cur is None else cur + c
                if s:
                    out[e] = s
                elif cur is not None:
                    del out[e]
        return PerfLaurent(self.ring, out, lo, hi, band, _normalized=True)

    def __neg__(self):
        return PerfLaurent(self.ring, {e: -c for e, c in self.terms.items()},
                           self.w_lo, self.w_hi, self.band, _normalized=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        lo = self.w_lo + other.w_lo
        hi = _min_f(_add_f(self.w_lo, other.w_hi),
                    _add_f(other.w_lo, self.w_hi))
        band = min(self.band, other.band)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if hi is not None and self._gv(e) >= hi:
                    continue
                if any(abs(x) > band for x in e[1:]):
                    raise BandOverflow(
                        f"product cross exponents {e[1:]} exceed the band")
                prod = c1 * c2
                cur = out.get(e)
                s = prod if cur is None else cur + prod
                if s:
                    out[e] = s
                elif cur is not None:
                    del out[e]
        return PerfLaurent(self.ring, out, lo, hi, band, _normalized=True)

    def scalar_mul(self, lam: FElt):
        if not lam:
            return PerfLaurent.zero(self.ring)
        return PerfLaurent(self.ring,
                           {e: c * lam for e, c in self.terms.items()},
                           self.w_lo, self.w_hi, self.band, _normalized=True)

    def frobenius(self):
        """The ring Frobenius x -> x^p (coefficients included)."""
        out = {tuple(p * x for x in e): c.frobenius()
               for e, c in self.terms.items()
               for p in (self.ring.params.p,)}
        return PerfLaurent(self.ring, out, self.w_lo * self.ring.params.p,
                           _mul_f(self.w_hi, self.ring.params.p),
                           self.band * self.ring.params.p, _normalized=True)

    def pth_root(self):
        p = self.ring.params.p
        out = {}
        for e, c in self.terms.items():
            if any(x % p for x in e):
                raise DepthExhausted(
                    f"p-th root leaves depth p^-{self.ring.params.k}")
            out[tuple(x // p for x in e)] = c.pth_root()
        return PerfLaurent(self.ring, out, self.w_lo / p,
                           _div_f(self.w_hi, p),
                           max(1, self.band // p), _normalized=True)


def _min_f(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_f(a, b):
    if a is None or b is None:
        return None
    return a + b


def _mul_f(a, c):
    return None if a is None else a * c


def _div_f(a, c):
    return None if a is None else Fraction(a, 1) / c


# ---------------------------------------------------------------------------
# Gauss norms and the F-linear Frobenius substitution
# ---------------------------------------------------------------------------

def gauss_val(x: PerfLaurent) -> Optional[Fraction]:
    """min Gauss valuation over terms (value |x| = p^{-gauss_val}); None = 0."""
    if not x.terms:
        return None
    return min(x._gv(e) for e in x.terms)


def gauss_val_certified(x: PerfLaurent):
    v = gauss_val(x)
    if v is None:
        return None, False
    return v, (x.w_hi is None or v < x.w_hi)


def phi_linear(x: PerfLaurent) -> PerfLaurent:
    """The coefficient-fixing substitution Y_i -> Y_{i-1}^p (index shift)."""
    p = x.ring.params.p
    f = x.ring.nvars
    out = {}
    for e, c in x.terms.items():
        out[tuple(p * e[(j + 1) % f] for j in range(f))] = c
    return PerfLaurent(x.ring, out, x.w_lo * p, _mul_f(x.w_hi, p),
                       x.band * p, _normalized=True)


def phi_linear_inv(x: PerfLaurent) -> PerfLaurent:
    p = x.ring.params.p
    f = x.ring.nvars
    out = {}
    for e, c in x.terms.items():
        if any(v % p for v in e):
            raise DepthExhausted(
                f"phi^-1 leaves depth p^-{x.ring.params.k}")
        out[tuple(e[(j - 1) % f] // p for j in range(f))] = c
    return PerfLaurent(x.ring, out, x.w_lo / p, _div_f(x.w_hi, p),
                       max(1, x.band // p), _normalized=True)


def phi_q_linear(x: PerfLaurent) -> PerfLaurent:
    out = x
    for _ in range(x.ring.params.f):
        out = phi_linear(out)
    return out


def pr_embedding(lt: PerfLaurent, target: PerfRing, i: int) -> PerfLaurent:
    """The coordinate-i embedding of the Lubin-Tate line: T_LT -> T_LT,i."""
    if lt.ring.nvars != 1 or target.name != "AinfPrime":
        raise ValueError("embedding goes from the Lubin-Tate line to the "
                         "product-side ring")
    out = {}
    for (e,), c in lt.terms.items():
        key = tuple(e if j == i else 0 for j in range(target.nvars))
        out[key] = c
    factor = target.weights[i]
    return PerfLaurent(target, out, lt.w_lo * factor,
                       _mul_f(lt.w_hi, factor), lt.band, _normalized=True)


def pr_radius(params: Params, i: int, r: Fraction) -> Fraction:
    """Radius conversion factor (p-1)/((q-1) p^i) for coordinate i."""
    if not 0 <= i < params.f:
        raise ValueError("coordinate index out of range")
    if r <= 0:
        raise ValueError("radius must be positive")
    return Fraction(params.p - 1, (params.q - 1) * params.p ** i) * Fraction(r)


# ---------------------------------------------------------------------------
# Witt handle over a perfectoid ring
# ---------------------------------------------------------------------------

class PerfHandle:
    """Perfect-ring handle exposing PerfLaurent to the Witt layer."""

    def __init__(self, ring: PerfRing):
        self.ring = ring
        self.p = ring.params.p
        self.field = ring.field

    def zero(self):
        return PerfLaurent.zero(self.ring)

    def one(self):
        return PerfLaurent.one(self.ring)

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
        return a.is_zero()

    def eq(self, a, b):
        return a.eq_within(b)

    def embed_residue(self, lam: FElt):
        return PerfLaurent(self.ring, {(0,) * self.ring.nvars: lam})

    def gauss_val(self, a):
        return gauss_val(a)


_HANDLE_CACHE: dict = {}


def ainf_handle(params: Params) -> PerfHandle:
    key = ("ainf", params.key())
    if key not in _HANDLE_CACHE:
        _HANDLE_CACHE[key] = PerfHandle(ainf_ring(params))
    return _HANDLE_CACHE[key]


def lt_handle(params: Params) -> PerfHandle:
    key = ("lt", params.key())
    if key not in _HANDLE_CACHE:
        _HANDLE_CACHE[key] = PerfHandle(lt_ring(params))
    return _HANDLE_CACHE[key]


# ---------------------------------------------------------------------------
# BElt: Witt expansions with a radius
# ---------------------------------------------------------------------------

@dataclass
class BElt:
    """[uniformizer]^(-shift) * w at radius r, with w integrally normalized.

    ``floor`` is a proven lower bound for the Gauss valuation of every digit
    of w, including the ones beyond the pi-precision.
    """
    witt: wt.WittVec
    r: Fraction
    shift: Fraction = Fraction(0)
    floor: Fraction = Fraction(0)

    def digits(self):
        return self.witt.digits()


def b_val_r(w: BElt):
    """min over digits n of gauss_val(x_n) + n/r, minus the monomial shift."""
    from .mvring import NormValue
    r = Fraction(w.r)
    best = None
    for n, d in enumerate(w.digits()):
        gv = gauss_val(d)
        if gv is None:
            continue
        lvl = gv + Fraction(n, 1) / r
        if best is None or lvl < best:
            best = lvl
    if best is None:
        return NormValue(None, False)
    certified = True
    for n, d in enumerate(w.digits()):
        if d.w_hi is not None and best >= d.w_hi + Fraction(n, 1) / r:
            certified = False
    if best >= Fraction(w.witt.prec, 1) / r + w.floor:
        certified = False
    return NormValue(best - w.shift, certified)


def member_B0r(w: BElt) -> bool:
    """Power-bounded test: every digit has gauss_val(x_n) + n/r - shift >= 0."""
    r = Fraction(w.r)
    for n, d in enumerate(w.digits()):
        gv = gauss_val(d)
        if gv is None:
            continue
        if gv + Fraction(n, 1) / r - w.shift < 0:
            return False
    return True


def phi_q_belt(w: BElt) -> BElt:
    """Digitwise F-linear phi_q; lands at radius r/q with shift scaled by q."""
    q = w.witt.handle.ring.params.q
    mapped = wt.map_coefficients(phi_q_linear, w.witt)
    return BElt(mapped, Fraction(w.r) / q, w.shift * q, w.floor * q)

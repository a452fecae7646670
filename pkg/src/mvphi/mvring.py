"""Truncated arithmetic in the multivariable Laurent ring.

``MvLaurent`` represents an element of the pi-adically complete Laurent ring
generated by Y_0 and the unit-norm cross variables X_i = Y_i/Y_0 as a finite
sum of terms c * Y_0^{n_0} * prod X_i^{n_i} together with a two-sided
precision: coefficients live mod p^prec, terms with n_0 >= w_hi are unknown
(w_hi = None means the element is exact), w_lo is a proven support floor, and
cross exponents are capped by a band.

The s-indexed sup norms, the subring membership certificates, the Frobenius
and unit-group substitutions, and the Frobenius-basis decomposition all
operate on this representation with conservative interval propagation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .coeff import Params, OKElement, oe_ring
from .errors import (BandOverflow, NotAUnit, WindowTooSmall)
from . import iwasawa


def _min_w(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_w(a, b):
    if a is None or b is None:
        return None
    return a + b


class MvLaurent:
    __slots__ = ("params", "prec", "w_lo", "w_hi", "band", "terms")

    def __init__(self, params: Params, prec: int, terms: dict,
                 w_lo: Optional[int] = None, w_hi: Optional[int] = None,
                 band: Optional[int] = None, _normalized: bool = False):
        self.params = params
        self.prec = prec
        self.w_hi = w_hi
        self.band = params.B if band is None else band
        if _normalized:
            self.terms = terms
            self.w_lo = 0 if w_lo is None else w_lo
            return
        ring = oe_ring(params)
        out = {}
        for (n0, cross), c in terms.items():
            if w_hi is not None and n0 >= w_hi:
                continue
            if any(abs(e) > self.band for e in cross):
                raise BandOverflow(
                    f"cross exponent {cross} exceeds band {self.band}")
            rc = ring.raw_reduce(c, prec)
            if any(rc):
                out[(n0, tuple(cross))] = rc
        self.terms = out
        support_lo = min((k[0] for k in out), default=0)
        self.w_lo = support_lo if w_lo is None else min(w_lo, support_lo)

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(params, prec=None, w_hi=None, band=None):
        return MvLaurent(params, params.N if prec is None else prec, {},
                         0, w_hi, band, _normalized=True)

    @staticmethod
    def one(params, prec=None, w_hi=None, band=None):
        return MvLaurent.monomial(params, 0, None, 1, prec, w_hi, band)

    @staticmethod
    def monomial(params, n0, cross=None, scalar=1, prec=None, w_hi=None,
                 band=None):
        pr = params.N if prec is None else prec
        cr = (0,) * (params.f - 1) if cross is None else tuple(cross)
        c = (scalar,) + (0,) * (params.h - 1)
        return MvLaurent(params, pr, {(n0, cr): c}, None, w_hi, band)

    @staticmethod
    def from_y_series(ts: "iwasawa.TSeries", band=None) -> "MvLaurent":
        """Interpret a series in the Y-generators as a Laurent element.

        prod Y_i^{e_i} = Y_0^{sum e} * prod X_i^{e_i}; the degree window
        becomes the Y_0-knowledge horizon.
        """
        params = ts.params
        terms = {}
        for e, c in ts.terms.items():
            terms[(sum(e), tuple(e[1:]))] = c
        return MvLaurent(params, ts.prec, terms, None, ts.window,
                         ts.window if band is None else band)

    # -- views ----------------------------------------------------------------

    def lift_band(self, band: int) -> "MvLaurent":
        if band < self.band:
            raise ValueError("band can only be raised")
        return MvLaurent(self.params, self.prec, self.terms, self.w_lo,
                         self.w_hi, band, _normalized=True)

    def with_window(self, w_lo=None, w_hi=None) -> "MvLaurent":
        """Weaken the window (narrow the claim); never strengthens it."""
        new_hi = _min_w(self.w_hi, w_hi)
        terms = {k: c for k, c in self.terms.items()
                 if new_hi is None or k[0] < new_hi}
        lo = self.w_lo if w_lo is None else max(self.w_lo, w_lo)
        lo = min(lo, min((k[0] for k in terms), default=lo))
        return MvLaurent(self.params, self.prec, terms, lo, new_hi,
                         self.band, _normalized=True)

    def reduce(self, prec: int) -> "MvLaurent":
        if prec >= self.prec:
            return self
        ring = oe_ring(self.params)
        out = {}
        for k, c in self.terms.items():
            rc = ring.raw_reduce(c, prec)
            if any(rc):
                out[k] = rc
        return MvLaurent(self.params, prec, out, self.w_lo, self.w_hi,
                         self.band, _normalized=True)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, n0: int, cross=None) -> tuple:
        cr = (0,) * (self.params.f - 1) if cross is None else tuple(cross)
        return self.terms.get((n0, cr), (0,) * self.params.h)

    def pure_y_exponents(self):
        """Term keys as full exponent vectors (d_0, ..., d_{f-1})."""
        for (n0, cross), c in self.terms.items():
            yield (n0 - sum(cross),) + tuple(cross), c

    def __eq__(self, other):
        return (isinstance(other, MvLaurent) and self.params == other.params
                and self.prec == other.prec and self.terms == other.terms
                and self.w_lo == other.w_lo and self.w_hi == other.w_hi)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (n0, cross) in sorted(self.terms):
            c = self.terms[(n0, cross)]
            mon = f"Y^{n0}" if n0 else ""
            for i, e in enumerate(cross):
                if e:
                    mon += f"X{i + 1}^{e}"
            bits.append(f"{list(c)}{'*' + mon if mon else ''}")
        win = f"[{self.w_lo},{self.w_hi})" if self.w_hi is not None else "exact"
        return " + ".join(bits) + f" ~(p^{self.prec},{win})"

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        prec = min(self.prec, other.prec)
        w_hi = _min_w(self.w_hi, other.w_hi)
        w_lo = min(self.w_lo, other.w_lo)
        band = min(self.band, other.band)
        ring = oe_ring(self.params)
        out = {}
        for src in (self.terms, other.terms):
            for k, c in src.items():
                if w_hi is not None and k[0] >= w_hi:
                    continue
                cur = out.get(k)
                out[k] = ring.raw_add(cur, c, prec) if cur is not None \
                    else ring.raw_reduce(c, prec)
        for k in [k for k, c in out.items() if not any(c)]:
            del out[k]
        return MvLaurent(self.params, prec, out, w_lo, w_hi, band,
                         _normalized=True)

    def __neg__(self):
        ring = oe_ring(self.params)
        return MvLaurent(self.params, self.prec,
                         {k: ring.raw_neg(c, self.prec)
                          for k, c in self.terms.items()},
                         self.w_lo, self.w_hi, self.band, _normalized=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        prec = min(self.prec, other.prec)
        w_lo = _add_w(self.w_lo, other.w_lo)
        w_hi = _min_w(_add_w(self.w_lo, other.w_hi),
                      _add_w(other.w_lo, self.w_hi))
        band = min(self.band, other.band)
        ring = oe_ring(self.params)
        out = {}
        for (n1, x1), c1 in self.terms.items():
            for (n2, x2), c2 in other.terms.items():
                n0 = n1 + n2
                if w_hi is not None and n0 >= w_hi:
                    continue
                cross = tuple(a + b for a, b in zip(x1, x2))
                if any(abs(e) > band for e in cross):
                    raise BandOverflow(
                        f"product cross exponent {cross} exceeds band {band}")
                prod = ring.raw_mul(c1, c2, prec)
                key = (n0, cross)
                cur = out.get(key)
                out[key] = ring.raw_add(cur, prod, prec) if cur is not None \
                    else prod
        for k in [k for k, c in out.items() if not any(c)]:
            del out[k]
        return MvLaurent(self.params, prec, out, w_lo, w_hi, band,
                         _normalized=True)

    def scalar_mul(self, c) -> "MvLaurent":
        ring = oe_ring(self.params)
        prec = self.prec
        if hasattr(c, "coords"):
            prec = min(prec, c.prec)
            craw = ring.raw_reduce(c.coords, prec)
        elif isinstance(c, int):
            craw = ring.raw_reduce((c,) + (0,) * (self.params.h - 1), prec)
        else:
            craw = ring.raw_reduce(c, prec)
        out = {}
        for k, v in self.terms.items():
            prod = ring.raw_mul(craw, ring.raw_reduce(v, prec), prec)
            if any(prod):
                out[k] = prod
        return MvLaurent(self.params, prec, out, self.w_lo, self.w_hi,
                         self.band, _normalized=True)

    def __pow__(self, e: int):
        if e < 0:
            return invert_unit(self) ** (-e)
        result = MvLaurent.one(self.params, self.prec, None, self.band)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result


def add(x: MvLaurent, y: MvLaurent) -> MvLaurent:
    return x + y


def mul(x: MvLaurent, y: MvLaurent) -> MvLaurent:
    return x * y


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------

def invert_unit(x: MvLaurent, horizon: Optional[int] = None) -> MvLaurent:
    """Inverse of u * monomial * (1 + t) with t topologically nilpotent.

    The leading slice (valuation-0 terms of minimal Y_0-degree) must be a
    single monomial with unit coefficient, and every term of t must have
    coefficient valuation >= 1 or Y_0-degree >= 1.  ``horizon`` bounds the
    knowledge window of the geometric series when x is exact but t has
    unit-coefficient terms (defaults to the params degree window).
    """
    params = x.params
    ring = oe_ring(params)
    p = params.p
    lead_candidates = [(k, c) for k, c in x.terms.items()
                       if ring.raw_val(c, x.prec) == 0]
    if not lead_candidates:
        raise NotAUnit("no unit-coefficient term at this precision")
    min_n0 = min(k[0] for k, _ in lead_candidates)
    leads = [(k, c) for k, c in lead_candidates if k[0] == min_n0]
    if len(leads) > 1:
        raise NotAUnit("leading slice is not a single monomial")
    (ln0, lcross), lc = leads[0]
    lc_inv = ring.raw_inv(lc, x.prec)
    # m_inv = monomial inverse; t = x * m_inv * lc_inv - 1
    m_inv = MvLaurent(params, x.prec,
                      {(-ln0, tuple(-e for e in lcross)): lc_inv},
                      None, None, x.band, _normalized=True)
    normalized = (x * m_inv)
    one = MvLaurent.one(params, x.prec, None, x.band)
    t = normalized - one
    has_degree_terms = False
    for (n0, cross), c in t.terms.items():
        v = ring.raw_val(c, t.prec)
        if v >= 1:
            continue
        if n0 >= 1:
            has_degree_terms = True
            continue
        raise NotAUnit(f"term Y^{n0} obstructs topological nilpotency")
    w_hi = t.w_hi
    if w_hi is None and has_degree_terms:
        w_hi = params.M if horizon is None else horizon
    if w_hi is not None:
        t = t.with_window(w_hi=w_hi)
    acc = MvLaurent.one(params, x.prec, w_hi, x.band)
    pw = one
    t_lo = min(t.w_lo, 0)
    cap = x.prec * (1 + abs(t_lo)) + (w_hi - min(t.w_lo, 0)
                                      if w_hi is not None else 0) + 4
    for _ in range(cap):
        pw = pw * (-t)
        if pw.is_zero():
            break
        acc = acc + pw
    else:
        raise RuntimeError("geometric series failed to terminate")
    return acc * m_inv


# ---------------------------------------------------------------------------
# norms and membership
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormValue:
    """p-adic size as an exponent: value p^{-val}; val None means zero."""
    val: Optional[Fraction]
    certified: bool

    def __repr__(self):
        v = "inf" if self.val is None else str(self.val)
        return f"NormValue({v}{'' if self.certified else ', uncertified'})"


def norm_s(x: MvLaurent, s: int) -> NormValue:
    """sup-norm exponent: min over terms of v_p(c) + n_0/s."""
    ring = oe_ring(x.params)
    best = None
    for (n0, _), c in x.terms.items():
        lvl = Fraction(ring.raw_val(c, x.prec)) + Fraction(n0, s)
        if best is None or lvl < best:
            best = lvl
    if best is None:
        return NormValue(None, False)
    certified = True
    if x.w_hi is not None and best >= Fraction(x.w_hi, s):
        certified = False
    if best >= x.prec + Fraction(x.w_lo, s):
        certified = False
    return NormValue(best, certified)


RING_A0 = "A0"
RING_A = "A"
RING_DAGGER_S_MINUS = "dagger_s_minus"
RING_DAGGER_S = "dagger_s"


def member(x: MvLaurent, tag: str, s: Optional[int] = None) -> bool:
    """Membership certificate for the represented terms at the precision."""
    ring = oe_ring(x.params)
    if tag == RING_A:
        return True
    if tag == RING_A0:
        return all(k[0] >= 0 for k, c in x.terms.items()
                   if ring.raw_val(c, x.prec) == 0)
    if tag in (RING_DAGGER_S_MINUS, RING_DAGGER_S):
        if s is None:
            raise ValueError("dagger membership needs the radius index s")
        return all(s * ring.raw_val(c, x.prec) + k[0] >= 0
                   for k, c in x.terms.items())
    raise ValueError(f"unknown ring tag {tag!r}")


# ---------------------------------------------------------------------------
# phi, phi_q and the unit action
# ---------------------------------------------------------------------------

_SUBST_CACHE: dict = {}


def _work_band(params: Params) -> int:
    return (params.B + params.M) * (params.p + 1)


class _SubstImages:
    """Cached substitution data: images of the Y-generators and their powers."""

    def __init__(self, params: Params, images, horizon: int,
                 unit_degree: int):
        self.params = params
        self.horizon = horizon
        self.unit_degree = unit_degree
        band = _work_band(params)
        self.images = [im.lift_band(band) for im in images]
        self.inv = {}
        self.pows: dict = {}
        self._drop = None

    def power(self, i: int, e: int) -> MvLaurent:
        params = self.params
        key = (i, e)
        got = self.pows.get(key)
        if got is not None:
            return got
        if e == 0:
            got = MvLaurent.one(params, params.N, None, _work_band(params))
        elif e > 0:
            got = self.power(i, e - 1) * self.images[i]
        else:
            base = self.inv.get(i)
            if base is None:
                base = invert_unit(self.images[i], self.horizon)
                self.inv[i] = base
            got = self.power(i, e + 1) * base
        self.pows[key] = got
        return got

    def _level_floors(self, x: MvLaurent):
        """Per-pi-level support floors of an atom, window included."""
        ring = oe_ring(self.params)
        prec = self.params.N
        fl = [None] * prec
        for (n0, _), c in x.terms.items():
            v = ring.raw_val(c, x.prec)
            if v < prec and (fl[v] is None or n0 < fl[v]):
                fl[v] = n0
        run = None
        out = []
        for v in range(prec):
            if fl[v] is not None:
                run = fl[v] if run is None else min(run, fl[v])
            cur = run
            if x.w_hi is not None:
                cur = x.w_hi if cur is None else min(cur, x.w_hi)
            out.append(cur)
        return out

    def level_drop(self) -> int:
        """Worst |level-0 floor - level-v floor| per pi-level over all atoms.

        Used to bound the pollution of the unknown region of a windowed
        input; the level-0 part of any substitution is exact exponent
        arithmetic, so the bound is independent of the cross band.
        """
        if self._drop is None:
            worst = 0
            atoms = list(self.images)
            for i in range(self.params.f):
                atoms.append(self.power(i, -1))
            for a in atoms:
                fl = self._level_floors(a)
                if fl[0] is None:
                    continue
                for v in range(1, len(fl)):
                    if fl[v] is not None:
                        worst = max(worst, (fl[0] - fl[v] + v - 1) // v)
            self._drop = worst
        return self._drop

    def apply(self, x: MvLaurent) -> MvLaurent:
        params = self.params
        band = _work_band(params)
        acc = MvLaurent.zero(params, x.prec, None, band)
        for d, c in x.pure_y_exponents():
            term = None
            for i, e in enumerate(d):
                if e:
                    pw = self.power(i, e)
                    term = pw if term is None else term * pw
            if term is None:
                term = MvLaurent.one(params, x.prec, None, band)
            acc = acc + term.scalar_mul(c)
        if x.w_hi is not None:
            # unknown x-terms sit at pure-Y total degree >= w_hi; their
            # images have level-0 support >= unit_degree * w_hi, and each
            # pi-level can cost at most level_drop of support
            clamp = self.unit_degree * x.w_hi \
                - (min(x.prec, params.N) - 1) * self.level_drop()
            acc = acc.with_window(w_hi=clamp)
        return acc


def phi_images(params: Params, window: Optional[int] = None) -> _SubstImages:
    w = params.M if window is None else window
    key = ("phi", params.key(), w)
    got = _SUBST_CACHE.get(key)
    if got is None:
        images = [MvLaurent.from_y_series(iwasawa.phi_y(params, i, w))
                  for i in range(params.f)]
        got = _SubstImages(params, images, w - params.p, params.p)
        _SUBST_CACHE[key] = got
    return got


def phi_q_images(params: Params) -> _SubstImages:
    key = ("phi_q", params.key())
    got = _SUBST_CACHE.get(key)
    if got is None:
        images = [MvLaurent.from_y_series(
            iwasawa.phi_power_y(params, i, params.f))
            for i in range(params.f)]
        got = _SubstImages(params, images, params.M - params.q, params.q)
        _SUBST_CACHE[key] = got
    return got


def decompose_window(params: Params) -> int:
    """Image window for the basis decomposition: wide enough that the
    pi-adic lifting and the recomposition stay certified past the inputs.

    Cross variables map to quotients of generator images, so for f > 1 the
    lift loses roughly 2p + (N-2)(p-1) degrees of certified window to the
    inverse expansions before the final division by p."""
    if params.f == 1:
        return max(params.M, 4 * params.p)
    return max(params.M, 4 * params.p, 20)


def gamma_images(params: Params, a: OKElement) -> _SubstImages:
    key = ("gamma", params.key(), a.prec, a.coords)
    got = _SUBST_CACHE.get(key)
    if got is None:
        images = [MvLaurent.from_y_series(iwasawa.gamma_y(a, i))
                  for i in range(params.f)]
        got = _SubstImages(params, images, params.M - 1, 1)
        _SUBST_CACHE[key] = got
    return got


def apply_phi(x: MvLaurent) -> MvLaurent:
    """The Frobenius substitution Y_i -> phi(Y_i) on a Laurent element."""
    return phi_images(x.params).apply(x)


def apply_phi_q(x: MvLaurent) -> MvLaurent:
    """The f-th Frobenius power, as the single substitution [a] -> [qa]."""
    return phi_q_images(x.params).apply(x)


def apply_gamma(a: OKElement, x: MvLaurent) -> MvLaurent:
    if not a.is_unit():
        raise NotAUnit("the action is defined for units only")
    return gamma_images(x.params, a).apply(x)


# ---------------------------------------------------------------------------
# the Frobenius-basis decomposition
# ---------------------------------------------------------------------------

def phi_basis(params: Params):
    """The q basis monomials Y_0^{n_0} prod X_i^{n_i}, 0 <= n_j <= p-1."""
    p, f = params.p, params.f
    out = []

    def rec(i, acc):
        if i == f:
            out.append((acc[0], tuple(acc[1:])))
            return
        for d in range(p):
            rec(i + 1, acc + [d])
    rec(0, [])
    return out


def _basis_for_residue(params: Params, r: tuple):
    """Basis monomial whose pure-Y exponent vector is congruent to r mod p."""
    p = params.p
    n0 = sum(r) % p
    cross = tuple(r[1:])
    d0 = n0 - sum(cross)
    return (n0, cross), (d0,) + cross


def phi_decompose(x: MvLaurent) -> dict:
    """Components g_a with x = sum over basis monomials a of a * phi(g_a).

    Buckets pure-Y exponents by residue class mod p (exact mod p since
    phi(Y_i) = Y_{i-1}^p there) and lifts pi-adically by successive
    approximation, one digit per pass.
    """
    params = x.params
    p, f = params.p, params.f
    ring = oe_ring(params)
    images = phi_images(params, decompose_window(params))
    band = _work_band(params)
    comps = {a: {} for a in phi_basis(params)}
    rem = x.lift_band(band)
    h_run = x.w_hi
    for n in range(x.prec):
        if rem.is_zero():
            break
        slice_terms = [(d, c) for d, c in rem.pure_y_exponents()
                       if ring.raw_val(c, rem.prec) == n]
        if not slice_terms:
            # valuation skipped a level; keep going
            continue
        delta = {a: {} for a in phi_basis(params)}
        for d, c in slice_terms:
            r = tuple(e % p for e in d)
            a, da = _basis_for_residue(params, r)
            shifted = tuple((d[j] - da[j]) // p for j in range(f))
            # w_{(j+1) mod f} = (d_j - da_j)/p
            w = tuple(shifted[(j - 1) % f] for j in range(f))
            key = (sum(w), tuple(w[1:]))
            cur = delta[a].get(key)
            delta[a][key] = ring.raw_add(cur, c, rem.prec) \
                if cur is not None else c
        correction = MvLaurent.zero(params, rem.prec, None, band)
        for a, terms in delta.items():
            if not terms:
                continue
            g_delta = MvLaurent(params, rem.prec, terms, None, None, band)
            for key, c in terms.items():
                cur = comps[a].get(key)
                comps[a][key] = ring.raw_add(cur, c, x.prec) \
                    if cur is not None else c
            mono = MvLaurent.monomial(params, a[0], a[1], 1, rem.prec, None,
                                      band)
            correction = correction + mono * images.apply(g_delta)
        rem = rem - correction
        h_run = _min_w(h_run, rem.w_hi)
    if not rem.is_zero():
        raise WindowTooSmall(
            f"decomposition left a remainder within the window: {rem!r}")
    if h_run is None:
        comp_hi = None
    else:
        comp_hi = -((-(h_run - p + 1)) // p)
    out = {}
    for a, terms in comps.items():
        out[a] = MvLaurent(params, x.prec, terms, None, comp_hi, band)
    return out


def recompose(components: dict, params: Params) -> MvLaurent:
    """sum_a a * phi(g_a), for checking the decomposition roundtrip."""
    images = phi_images(params, decompose_window(params))
    band = _work_band(params)
    acc = MvLaurent.zero(params, params.N, None, band)
    for (n0, cross), g in components.items():
        mono = MvLaurent.monomial(params, n0, cross, 1, g.prec, None, band)
        acc = acc + mono * images.apply(g.lift_band(band))
    return acc


# ---------------------------------------------------------------------------
# local analyticity of the action
# ---------------------------------------------------------------------------

def analytic_generators(params: Params, s: int):
    gens = [("Y0", MvLaurent.monomial(params, 1)),
            ("p/Y0^s", MvLaurent.monomial(params, -s, None, params.p))]
    for i in range(1, params.f):
        cross = tuple(1 if j == i - 1 else 0 for j in range(params.f - 1))
        gens.append((f"X{i}", MvLaurent.monomial(params, 0, cross)))
    return gens


def check_local_analyticity(params: Params, s: int, gammas) -> list:
    """Measure |gamma(x) - x|_s for generators x and gamma in 1 + p^s O_K.

    Returns one row per (gamma, generator) with the measured exponent and
    whether it clears the analyticity threshold 1/(p-1).
    """
    bound = Fraction(1, params.p - 1)
    rows = []
    for a in gammas:
        for name, x in analytic_generators(params, s):
            diff = apply_gamma(a, x) - x
            nv = norm_s(diff, s)
            ok = nv.val is None or nv.val >= bound
            rows.append({
                "gamma": list(a.coords),
                "generator": name,
                "exponent": nv.val,
                "certified": nv.certified,
                "ok": bool(ok),
            })
    return rows

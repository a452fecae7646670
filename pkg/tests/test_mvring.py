import random
from fractions import Fraction

import pytest

from mvphi.coeff import Params, fq_field, oe_ring, ok_ring
from mvphi.mvring import (MvLaurent, invert_unit, norm_s, member, apply_phi,
                          apply_gamma, phi_decompose, recompose,
                          phi_basis, check_local_analyticity, NormValue,
                          RING_A0, RING_A, RING_DAGGER_S_MINUS, RING_DAGGER_S)
from mvphi.errors import BandOverflow, NotAUnit


GRID = [(2, 1, 1), (3, 1, 1), (3, 2, 2), (5, 2, 2)]


def params(p, f, h, **kw):
    return Params.create(p, f, h, **kw)


def mono(pr, n0, cross=None, scalar=1, prec=None):
    return MvLaurent.monomial(pr, n0, cross, scalar, prec)


def test_mul_trivial_cases():
    pr = params(3, 1, 1)
    y = mono(pr, 1)
    yinv = mono(pr, -1)
    assert (y * yinv).terms == MvLaurent.one(pr).terms
    assert (y * MvLaurent.zero(pr)).is_zero()


def test_difference_of_squares():
    pr = params(3, 1, 1)
    one = MvLaurent.one(pr)
    a = one + mono(pr, -1, None, 3)
    b = one - mono(pr, -1, None, 3)
    prod = a * b
    assert prod.coefficient(0) == (1,)
    assert prod.coefficient(-2) == ((-9) % 3 ** pr.N,)
    assert len(prod.terms) == 2


def test_band_overflow_on_mul():
    pr = params(3, 2, 2, B=2)
    a = mono(pr, 0, (2,))
    b = mono(pr, 0, (1,))
    with pytest.raises(BandOverflow):
        a * b


def test_invert_unit_monomial_and_cross():
    pr = params(3, 2, 2)
    y = mono(pr, 1)
    assert invert_unit(y).terms == mono(pr, -1).terms
    x1 = mono(pr, 0, (1,))
    got = invert_unit(x1)
    assert got.terms == mono(pr, 0, (-1,)).terms


def test_invert_unit_geometric_series():
    pr = params(3, 1, 1)
    x = MvLaurent.one(pr) + mono(pr, -1, None, 3)
    inv = invert_unit(x)
    # 1 - 3/Y + 9/Y^2 (27 = 0 at N = 3)
    assert inv.coefficient(0) == (1,)
    assert inv.coefficient(-1) == ((-3) % 27,)
    assert inv.coefficient(-2) == (9,)
    assert (x * inv).terms == MvLaurent.one(pr).terms


def test_invert_unit_rejects():
    pr = params(3, 2, 2)
    with pytest.raises(NotAUnit):
        invert_unit(mono(pr, 0, None, 3))  # p is not a unit
    with pytest.raises(NotAUnit):
        invert_unit(MvLaurent.one(pr) + mono(pr, 0, (1,)))  # two lead terms


def test_invert_unit_laurent_lead():
    # 1 + Y^-1 = Y^-1 (1 + Y): the minimal-degree unit term leads
    pr = params(3, 2, 2)
    x = MvLaurent.one(pr) + mono(pr, -1)
    inv = invert_unit(x)
    prod = x * inv
    assert prod.coefficient(0) == (1, 0)
    assert all(not any(c) for k, c in prod.terms.items() if k != (0, (0,)))


def test_norm_s_basics():
    pr = params(3, 1, 1)
    s = 2
    assert norm_s(mono(pr, 1), s) == NormValue(Fraction(1, 2), True)
    # p / Y^s has norm exponent 0
    assert norm_s(mono(pr, -s, None, 3), s).val == 0
    assert norm_s(MvLaurent.zero(pr), s).val is None


def test_norm_cross_variable():
    pr = params(3, 2, 2)
    assert norm_s(mono(pr, 0, (1,)), 3).val == 0


def test_norm_certification_window():
    pr = params(3, 1, 1)
    x = MvLaurent(pr, pr.N, {(2, ()): (1,)}, 0, 3, pr.B)
    assert norm_s(x, 1).certified  # 2 < 3
    y = MvLaurent(pr, pr.N, {(2, ()): (3,)}, 0, 3, pr.B)
    # level 3 >= w_hi/1 -> uncertified
    assert not norm_s(y, 1).certified


def test_norm_multiplicative_and_ultrametric():
    pr = params(3, 2, 2)
    rng = random.Random(20)
    hits = 0
    for s in (1, 2, 3):
        for _ in range(20):
            x = rand_elt(pr, rng)
            y = rand_elt(pr, rng)
            nx, ny, nxy = norm_s(x, s), norm_s(y, s), norm_s(x * y, s)
            if nx.certified and ny.certified and nxy.certified:
                assert nxy.val == nx.val + ny.val
                hits += 1
            nsum = norm_s(x + y, s)
            if nsum.val is not None:
                assert nsum.val >= min(v for v in (nx.val, ny.val)
                                       if v is not None)
    assert hits >= 20


def rand_elt(pr, rng, nterms=3, maxv=None):
    ring = oe_ring(pr)
    maxv = pr.N - 1 if maxv is None else maxv
    terms = {}
    for _ in range(nterms):
        n0 = rng.randrange(-3, 5)
        cross = tuple(rng.randrange(-2, 3) for _ in range(pr.f - 1))
        v = rng.randrange(0, maxv + 1)
        c = [rng.randrange(pr.p ** pr.N) for _ in range(pr.h)]
        c[0] = c[0] or 1
        c = tuple((x * pr.p ** v) % pr.p ** pr.N for x in c)
        if any(c):
            terms[(n0, cross)] = c
    return MvLaurent(pr, pr.N, terms)


def test_member_examples():
    pr = params(3, 1, 1)
    s = 2
    assert member(mono(pr, -s, None, 3), RING_DAGGER_S_MINUS, s)
    assert not member(mono(pr, -s - 1, None, 3), RING_DAGGER_S_MINUS, s)
    assert not member(mono(pr, -1), RING_A0)
    assert member(mono(pr, 0), RING_A0)
    assert member(mono(pr, -5), RING_A)
    assert member(mono(pr, -s, None, 3), RING_DAGGER_S, s)


class ModPOracle:
    """Independent N=1 model: exponent arithmetic only, coefficients in F."""

    def __init__(self, pr):
        self.pr = pr
        self.field = fq_field(pr)

    def reduce(self, x: MvLaurent):
        out = {}
        for d, c in x.pure_y_exponents():
            lam = self.field(tuple(v % self.pr.p for v in c))
            if lam:
                out[d] = out.get(d, self.field.zero) + lam
        return {d: c for d, c in out.items() if c}

    def mul(self, a, b):
        out = {}
        for d1, c1 in a.items():
            for d2, c2 in b.items():
                d = tuple(x + y for x, y in zip(d1, d2))
                out[d] = out.get(d, self.field.zero) + c1 * c2
        return {d: c for d, c in out.items() if c}

    def add(self, a, b):
        out = dict(a)
        for d, c in b.items():
            out[d] = out.get(d, self.field.zero) + c
        return {d: c for d, c in out.items() if c}

    def phi(self, a):
        f = self.pr.f
        return {tuple(self.pr.p * d[(j + 1) % f] for j in range(f)): c
                for d, c in a.items()}


@pytest.mark.parametrize("p,f,h", GRID)
def test_mod_p_compatibility(p, f, h):
    pr = params(p, f, h)
    oracle = ModPOracle(pr)
    rng = random.Random(21)
    for _ in range(10):
        x, y = rand_elt(pr, rng), rand_elt(pr, rng)
        assert oracle.reduce(x * y) == oracle.mul(oracle.reduce(x),
                                                  oracle.reduce(y))
        assert oracle.reduce(x + y) == oracle.add(oracle.reduce(x),
                                                  oracle.reduce(y))


@pytest.mark.parametrize("p,f,h", GRID)
def test_apply_phi_mod_p_oracle(p, f, h):
    # mod p, phi is pure exponent arithmetic: d -> p * shift(d)
    pr = params(p, f, h)
    oracle = ModPOracle(pr)
    rng = random.Random(22)
    for _ in range(6):
        x = rand_elt(pr, rng, nterms=2)
        got = oracle.reduce(apply_phi(x))
        want = oracle.phi(oracle.reduce(x))
        w_hi = apply_phi(x).w_hi
        for d, c in want.items():
            if w_hi is None or sum(d) < w_hi:
                assert got.get(d) == c, (d, got.get(d), c)


def test_apply_phi_trivial_and_p2():
    pr = params(2, 1, 1)
    one = MvLaurent.one(pr)
    assert apply_phi(one).terms == one.terms
    got = apply_phi(mono(pr, 1))
    assert got.coefficient(1) == (2,)
    assert got.coefficient(2) == (1,)


@pytest.mark.parametrize("p,f,h", GRID)
def test_phi_norm_equivariance(p, f, h):
    pr = params(p, f, h)
    rng = random.Random(23)
    hits = 0
    for s in (1, 2, 3):
        anchor = mono(pr, -s)
        for _ in range(8):
            x = rand_elt(pr, rng) + anchor
            nx = norm_s(x, s)
            img = apply_phi(x)
            nimg = norm_s(img, p * s)
            if nx.certified and nimg.certified:
                assert nimg.val == nx.val
                hits += 1
    assert hits >= 12


@pytest.mark.parametrize("p,f,h", [(3, 1, 1), (3, 2, 2)])
def test_gamma_norm_equivariance(p, f, h):
    pr = params(p, f, h)
    okr = ok_ring(pr)
    rng = random.Random(24)
    a = okr.random_unit(rng)
    hits = 0
    for s in (1, 2):
        for _ in range(8):
            x = rand_elt(pr, rng) + mono(pr, -s)
            nx = norm_s(x, s)
            img = apply_gamma(a, x)
            nimg = norm_s(img, s)
            if nx.certified and nimg.certified:
                assert nimg.val == nx.val
                hits += 1
    assert hits >= 8


def test_dagger_stability_under_phi():
    pr = params(3, 1, 1)
    s = 2
    rng = random.Random(25)
    for _ in range(10):
        x = rand_elt(pr, rng)
        if not member(x, RING_DAGGER_S_MINUS, s):
            continue
        assert member(apply_phi(x), RING_DAGGER_S_MINUS, pr.p * s)


def test_phi_decompose_basis_monomial():
    pr = params(3, 1, 1)
    x = mono(pr, 1)
    comps = phi_decompose(x)
    for a, g in comps.items():
        if a == (1, ()):
            assert g.terms == MvLaurent.one(pr).terms
        else:
            assert g.is_zero()


def test_phi_decompose_spec_example_f2():
    # mod p: x = Y_0^p decomposes with component Y_1 at the unit monomial
    pr = params(3, 2, 2, N=1)
    x = mono(pr, 3, None, 1, prec=1)
    comps = phi_decompose(x)
    unit_mono = (0, (0,))
    g = comps[unit_mono]
    assert g.terms == {(1, (1,)): (1, 0)}
    for a, other in comps.items():
        if a != unit_mono:
            assert other.is_zero()


@pytest.mark.parametrize("p,f,h", GRID)
@pytest.mark.parametrize("prec", [1, 3])
def test_phi_decompose_roundtrip(p, f, h, prec):
    pr = params(p, f, h)
    rng = random.Random(26)
    for _ in range(6):
        if prec == 1:
            x = rand_elt(pr, rng, nterms=3, maxv=0).reduce(1)
        else:
            from mvphi.suites import rand_pure_cone
            x = rand_pure_cone(pr, rng)
        comps = phi_decompose(x)
        back = recompose(comps, pr)
        diff = x - back
        assert diff.is_zero(), (x, back, diff)
        supmax = max((k[0] for k in x.terms), default=0)
        # the certified window must cover the input support
        assert back.w_hi is None or back.w_hi > supmax


def test_phi_decompose_components_zero_for_zero():
    pr = params(3, 2, 2)
    comps = phi_decompose(MvLaurent.zero(pr))
    assert all(g.is_zero() for g in comps.values())


def test_phi_decompose_dagger_membership():
    pr = params(3, 1, 1)
    s = 1
    ps = pr.p * s
    rng = random.Random(27)
    for _ in range(8):
        # sample inside the integral part of the ps-dagger ring
        terms = {}
        for _ in range(3):
            v = rng.randrange(0, pr.N)
            n0 = rng.randrange(-ps * v, 5)
            c = ((rng.randrange(1, pr.p) * pr.p ** v) % pr.p ** pr.N,)
            terms[(n0, ())] = c
        x = MvLaurent(pr, pr.N, terms)
        assert member(x, RING_DAGGER_S_MINUS, ps)
        for g in phi_decompose(x).values():
            assert member(g, RING_DAGGER_S_MINUS, s)


@pytest.mark.parametrize("p,f,h", GRID)
def test_local_analyticity(p, f, h):
    pr = params(p, f, h)
    okr = ok_ring(pr)
    rng = random.Random(28)
    for s in (1, 2):
        gammas = []
        for _ in range(2):
            coords = [1 + p ** s * rng.randrange(p)] + \
                [p ** s * rng.randrange(p) for _ in range(f - 1)]
            gammas.append(okr(tuple(coords)))
        rows = check_local_analyticity(pr, s, gammas)
        assert all(r["ok"] for r in rows), [r for r in rows if not r["ok"]]


def test_local_analyticity_sharper_bound_for_y0():
    # for the main variable the difference is p*m + m^(p^s), so the measured
    # exponent clears min(1, p^s/s), sharper than 1/(p-1)
    from fractions import Fraction
    for p, f, h in [(2, 1, 1), (3, 1, 1), (3, 2, 2)]:
        pr = params(p, f, h)
        okr = ok_ring(pr)
        rng = random.Random(29)
        for s in (1, 2):
            coords = [1 + p ** s * (1 + rng.randrange(p - 1 or 1))] + \
                [p ** s * rng.randrange(p) for _ in range(f - 1)]
            a = okr(tuple(coords))
            diff = apply_gamma(a, mono(pr, 1)) - mono(pr, 1)
            nv = norm_s(diff, s)
            if nv.val is not None:
                assert nv.val >= min(Fraction(1), Fraction(p ** s, s))


def test_local_analyticity_identity_gamma():
    pr = params(3, 1, 1)
    okr = ok_ring(pr)
    rows = check_local_analyticity(pr, 1, [okr.one()])
    assert all(r["exponent"] is None for r in rows)


def test_phi_basis_size():
    for p, f, h in GRID:
        pr = params(p, f, h)
        assert len(phi_basis(pr)) == pr.q

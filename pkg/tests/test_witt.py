import random
from fractions import Fraction

import pytest

from mvphi.coeff import Params, fq_field, oe_ring
from mvphi.witt import (ZPoly, gen_structure_polys, ghost_components,
                        FiniteFieldHandle, witt_add, witt_mul,
                        witt_neg, witt_sub, teich, witt_zero, from_expansion,
                        to_expansion, from_oe_scalar, from_int,
                        map_coefficients, scalar_mul)


def handle(p, h=1):
    pr = Params.create(p, 1 if h == 1 else h, h)
    return FiniteFieldHandle(fq_field(pr))


def test_structure_polys_degree_zero():
    sp = gen_structure_polys(3, 3)
    s0 = sp.sums[0].terms
    assert s0 == {(1, 0, 0, 0, 0, 0): Fraction(1),
                  (0, 0, 0, 1, 0, 0): Fraction(1)}
    p0 = sp.prods[0].terms
    assert p0 == {(1, 0, 0, 1, 0, 0): Fraction(1)}


@pytest.mark.parametrize("p", [2, 3, 5])
def test_s1_closed_form(p):
    # S_1 = X_1 + Y_1 - sum_{j=1}^{p-1} (1/p) C(p,j) X_0^j Y_0^{p-j}
    sp = gen_structure_polys(p, 2)
    want = ZPoly.var(4, 1) + ZPoly.var(4, 3)
    from math import comb
    for j in range(1, p):
        e = [0, 0, 0, 0]
        e[0], e[2] = j, p - j
        want = want - ZPoly(4, {tuple(e): Fraction(comb(p, j), p)})
    assert sp.sums[1].terms == want.terms


@pytest.mark.parametrize("p,N", [(2, 3), (3, 3), (5, 3), (2, 4), (3, 4)])
def test_ghost_identities_on_random_integers(p, N):
    sp = gen_structure_polys(p, N)
    rng = random.Random(30)
    mod = p ** (N + 2)
    for _ in range(25):
        xs = [rng.randrange(50) for _ in range(N)]
        ys = [rng.randrange(50) for _ in range(N)]
        svals = [sp.sums[n].eval_int(xs + ys) for n in range(N)]
        pvals = [sp.prods[n].eval_int(xs + ys) for n in range(N)]
        gx = ghost_components(p, N, xs)
        gy = ghost_components(p, N, ys)
        gs = ghost_components(p, N, svals)
        gp = ghost_components(p, N, pvals)
        for n in range(N):
            assert (gs[n] - gx[n] - gy[n]) % mod == 0
            assert (gp[n] - gx[n] * gy[n]) % mod == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_witt_over_prime_field_matches_integers(p):
    N = 3
    h = handle(p)
    rng = random.Random(31)
    for _ in range(50):
        a, b = rng.randrange(p ** N), rng.randrange(p ** N)
        wa, wb = from_int(h, a, N), from_int(h, b, N)
        assert witt_add(wa, wb).eq(from_int(h, a + b, N))
        assert witt_mul(wa, wb).eq(from_int(h, a * b, N))
        assert witt_sub(wa, wb).eq(from_int(h, a - b, N))


def test_witt_ring_axioms_over_extension_field():
    pr = Params.create(3, 2, 2)
    h = FiniteFieldHandle(fq_field(pr))
    rng = random.Random(32)
    elts = list(fq_field(pr).elements())

    def rand_vec():
        return from_expansion(h, tuple(rng.choice(elts) for _ in range(3)))

    for _ in range(10):
        a, b, c = rand_vec(), rand_vec(), rand_vec()
        assert witt_add(a, b).eq(witt_add(b, a))
        assert witt_mul(a, b).eq(witt_mul(b, a))
        assert witt_add(witt_add(a, b), c).eq(witt_add(a, witt_add(b, c)))
        assert witt_mul(witt_mul(a, b), c).eq(witt_mul(a, witt_mul(b, c)))
        lhs = witt_mul(a, witt_add(b, c))
        rhs = witt_add(witt_mul(a, b), witt_mul(a, c))
        assert lhs.eq(rhs)
        assert witt_add(a, witt_neg(a)).is_zero()
        assert witt_add(a, witt_zero(h, 3)).eq(a)


def test_teichmuller_multiplicativity_and_digit0_addition():
    pr = Params.create(2, 1, 1)
    h = FiniteFieldHandle(fq_field(pr))
    F = fq_field(pr)
    one = F.one
    for x in F.elements():
        for y in F.elements():
            tx, ty = teich(h, x, 3), teich(h, y, 3)
            assert witt_mul(tx, ty).eq(teich(h, x * y, 3))
            assert witt_add(tx, ty).digits()[0] == x + y


def test_expansion_coordinate_roundtrip():
    pr = Params.create(3, 2, 2)
    h = FiniteFieldHandle(fq_field(pr))
    rng = random.Random(33)
    elts = list(fq_field(pr).elements())
    for _ in range(20):
        digits = tuple(rng.choice(elts) for _ in range(4))
        w = from_expansion(h, digits)
        assert to_expansion(w.coordinates().expansion()) == digits
        assert to_expansion(w.coordinates()) == digits


def test_from_expansion_two_digit_coordinates():
    # [a] + p[b] has Witt coordinates (a, b^p)
    pr = Params.create(3, 1, 1)
    h = FiniteFieldHandle(fq_field(pr))
    F = fq_field(pr)
    a, b = F.from_int(2), F.from_int(2)
    w = from_expansion(h, (a, b), 2).coordinates()
    assert w.comps == (a, b ** 3)


def test_oe_scalar_embedding_is_ring_hom():
    pr = Params.create(3, 2, 2)
    ring = oe_ring(pr)
    h = FiniteFieldHandle(fq_field(pr))
    rng = random.Random(34)
    for _ in range(15):
        a = ring(tuple(rng.randrange(27) for _ in range(2)), 3)
        b = ring(tuple(rng.randrange(27) for _ in range(2)), 3)
        wa, wb = from_oe_scalar(h, a), from_oe_scalar(h, b)
        assert witt_add(wa, wb).eq(from_oe_scalar(h, a + b))
        assert witt_mul(wa, wb).eq(from_oe_scalar(h, a * b))


def test_map_coefficients_functorial():
    pr = Params.create(3, 2, 2)
    h = FiniteFieldHandle(fq_field(pr))
    rng = random.Random(35)
    elts = list(fq_field(pr).elements())
    frob = lambda x: x.frobenius()
    root = lambda x: x.pth_root()
    for _ in range(10):
        u = from_expansion(h, tuple(rng.choice(elts) for _ in range(3)))
        assert map_coefficients(lambda x: x, u).eq(u)
        assert map_coefficients(frob, map_coefficients(root, u)).eq(u)
        v = map_coefficients(frob, u)
        w = map_coefficients(lambda x: frob(frob(x)), u)
        assert map_coefficients(frob, v).eq(w)


def test_map_coefficients_teich_equivariance():
    pr = Params.create(3, 2, 2)
    h = FiniteFieldHandle(fq_field(pr))
    F = fq_field(pr)
    x = F((1, 2))
    frob = lambda t: t.frobenius()
    assert map_coefficients(frob, teich(h, x, 3)).eq(teich(h, x.frobenius(), 3))


def test_scalar_mul_matches_repeated_addition():
    pr = Params.create(3, 1, 1)
    ring = oe_ring(pr)
    h = FiniteFieldHandle(fq_field(pr))
    F = fq_field(pr)
    u = from_expansion(h, (F.from_int(2), F.from_int(1), F.from_int(2)))
    acc = witt_zero(h, 3)
    for _ in range(7):
        acc = witt_add(acc, u)
    assert scalar_mul(ring.from_int(7, 3), u).eq(acc)

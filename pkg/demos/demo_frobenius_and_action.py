"""Walk through the group-ring layer: generators, Frobenius, unit action.

The completed group ring of the additive group of an unramified p-adic
integer ring is a power-series ring in f variables.  The distinguished
generators Y_i are character-sum combinations of group-likes; this script
prints them, applies the substitution induced by multiplication by p, and
verifies the congruences that make the Y_i a useful coordinate system.
"""

import random

from mvphi.coeff import Params, ok_ring
from mvphi.iwasawa import TSeries, y_generator, phi_y, gamma_y
from mvphi.serialize import tseries_str


def shown(series, names):
    text = tseries_str(series, names)
    return text[:64] + (" ..." if len(text) > 64 else "")


def main():
    for (p, f) in [(2, 1), (3, 1), (3, 2)]:
        pr = Params.create(p, f)
        print(f"\n=== p = {p}, f = {f} (q = {pr.q}), precision p^{pr.N}, "
              f"degree < {pr.M} ===")
        for i in range(f):
            y = y_generator(pr, i)
            print(f"  Y_{i} in T-coordinates: {shown(y, 'T')}")
        for i in range(f):
            fy = phi_y(pr, i)
            print(f"  phi(Y_{i}) in Y-coordinates: {shown(fy, 'Y')}")
            prev = (i - 1) % f
            e = [0] * f
            e[prev] = p
            lead = TSeries(pr, pr.N, pr.M, {tuple(e): (1,) + (0,) * (pr.h - 1)})
            diff = fy - lead
            divisible = all(all(v % p == 0 for v in c)
                            for c in diff.terms.values())
            print(f"    phi(Y_{i}) - Y_{prev}^{p} divisible by {p}: "
                  f"{divisible}")
        okr = ok_ring(pr)
        a = okr.random_unit(random.Random(1))
        for i in range(f):
            gy = gamma_y(a, i)
            sig = okr.sigma(a, i).reduce(pr.N)
            diff = gy - TSeries.variable(pr, i, pr.N).scalar_mul(sig)
            ok = all(all(v % p == 0 for v in c) or sum(e) >= p
                     for e, c in diff.terms.items())
            print(f"  a(Y_{i}) = sigma_{i}(a) Y_{i} mod (p*m + m^{p}): {ok}")


if __name__ == "__main__":
    main()

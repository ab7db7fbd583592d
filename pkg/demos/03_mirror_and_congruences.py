"""
Mirror map, integer relations and p-adic checks
===============================================

The x-expansion of the bilateral pieces gives the mirror quantities t and q,
and the curvature-like numbers k and j.  Two t values multiply to a quadratic
irrationality, which PSLQ finds.  Finally the truncated sums S_p are compared
with A p^3 and A p^2 modulo p^5.

Run with ``python3 demos/03_mirror_and_congruences.py`` (about half a minute).
"""

import mpmath as mp

from bilateral_sums import check_supercongruence, load_catalog, mirror, pslq
from bilateral_sums.relations import primes_between

PREC = 200
catalog = load_catalog(verify_numeric=False)

with mp.workprec(PREC):
    m1 = mirror(catalog["f1"], PREC)
    m9 = mirror(catalog["f9"], PREC)
    for name, m in (("f1", m1), ("f9", m9)):
        print(f"{name}: t = {mp.nstr(m.t, 30)}  q = {mp.nstr(m.q, 12)}  k = {m.k_exact}  j = {m.j_exact}")

# d2 shares the field Q(sqrt(41)) with f1; its z lies outside the unit disk
with mp.workprec(PREC):
    t2 = mirror(catalog["d2"], PREC, with_kj=False).t
    print(f"d2: t = {mp.nstr(t2, 30)}")
    rel = pslq([m1.t * t2, mp.mpf(1), mp.sqrt(41)], PREC // 2, 1000)
    print(f"\nrelation for t(f1) t(d2), 1, sqrt(41): {rel.coefficients if rel else None}")

rec = catalog["d6"]
print(f"\n{rec.id}: A = {rec.A.pretty()}")
print("   p   v_p(S_p - A p^3)   v_p(S_p - A p^2)")
for p in primes_between(7, 41):
    r3 = check_supercongruence(rec, p, exponent=3)
    r2 = check_supercongruence(rec, p, exponent=2)
    print(f"{p:4d}   {str(r3.valuation):>16s}   {str(r2.valuation):>16s}")

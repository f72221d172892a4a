"""Uniqueness in practice: only the true pair, up to a constant, factorises.

A rescaled pair is recognised and its constant recovered; a pair that is
wrong by a single 1e-3 mass transfer is rejected by the identity residual.
"""

from whlab import StepLaw, spectral_factorise
from whlab.spitzer import spitzer_ascending_factor, spitzer_descending_factor
from whlab.uniqueness import f_grid, normalise_factor_pair, perturb_law, ratio_F, verify_factorisation

law = StepLaw.from_pmf({-3: 0.1, -1: 0.35, 1: 0.3, 2: 0.25})
fac = spectral_factorise(law)
asc, desc = fac.ascending, fac.descending

# Two construction paths at r = 0.9: the ratio F of their factors is constant.
r = 0.9
killed = spectral_factorise(law, r)
stats = ratio_F(killed.ascending, spitzer_ascending_factor(law, r)[0],
                killed.descending, spitzer_descending_factor(law, r)[0], f_grid(1024))
print(f"F between spectral and Spitzer factors: mean {stats.mean.real:.12f}, deviation {stats.deviation:.1e}")

for c in (0.1, 2.0, 10.0):
    got, _, _ = normalise_factor_pair(asc.to_exponent().scaled(c), desc.to_exponent().scaled(1 / c), law)
    print(f"pair scaled by c = {c:<4} -> recovered c = {got:.12f}")

print("\nperturbing one coefficient by 1e-3:")
for side, ladder in (("ascending", asc), ("descending", desc)):
    for k in range(ladder.masses.size):
        try:
            bent = perturb_law(ladder, k, 1e-3)
        except Exception as exc:
            print(f"  {side} atom {k}: skipped ({exc})")
            continue
        pair = (bent, desc) if side == "ascending" else (asc, bent)
        print(f"  {side} atom {k}: residual {verify_factorisation(law, *pair).residual_max:.2e}")
print(f"unperturbed residual {verify_factorisation(law, asc, desc).residual_max:.2e}")

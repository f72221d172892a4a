"""Three independent ways to get the same ladder law.

The root split, the truncated Spitzer series and direct simulation should
all agree, each within its own error budget.
"""

from whlab import StepLaw, spectral_factorise
from whlab.montecarlo import compare_laws, simulate_ladder_samples
from whlab.spitzer import choose_horizon, spitzer_ascending_factor
from whlab.uniqueness import law_distance

law = StepLaw.from_pmf({-2: 0.15, -1: 0.2, 0: 0.1, 1: 0.25, 3: 0.3})

print("spectral vs Spitzer (L-infinity gap against the truncation bound)")
for r in (0.3, 0.5, 0.9, 0.99):
    spectral = spectral_factorise(law, r).ascending
    spitzer, bound = spitzer_ascending_factor(law, r)
    gap = law_distance(spectral, spitzer)
    print(f"  r = {r:<5} N = {choose_horizon(r):>5}  gap {gap:.2e}  bound {bound:.2e}")

print("\nspectral vs Monte Carlo, 2e5 samples, 99% intervals")
for r, kind in ((0.95, "strict"), (0.95, "weak"), (1.0, "weak")):
    fac = spectral_factorise(law, r)
    exact = fac.ascending if kind == "strict" else fac.descending
    emp = simulate_ladder_samples(law, kind, r, 200_000, seed=7, t_max=10**5).to_empirical()
    cmp = compare_laws(emp, exact)
    print(f"  r = {r:<5} {kind:<6} passed={cmp.passed}  max |z| {max(abs(z) for z in cmp.z_scores.values()):.2f}")
    for k in range(min(4, exact.masses.size)):
        print(f"      atom {k}: exact {exact.mass(k):.5f}  simulated {emp.probabilities[k] if k < emp.probabilities.size else 0:.5f}")

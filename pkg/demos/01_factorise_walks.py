"""Factorise the three bundled walks and look at their ladder laws.

Run with ``python demos/01_factorise_walks.py``.
"""

import json
from importlib import resources

from whlab import StepLaw, spectral_factorise
from whlab.uniqueness import verify_factorisation


def bundled(name):
    return StepLaw.from_json(json.loads((resources.files("whlab") / "data" / f"{name}.json").read_text()))


def show(title, ladder):
    atoms = ", ".join(f"{k}: {p:.6f}" for k, p in ladder.pmf().items())
    print(f"  {title:<11} {{{atoms}}}  defect {ladder.defect:.6f}")


for name in ("ssrw", "drift", "mixed", "span3"):
    law = bundled(name)
    print(f"{name}: steps {law.pmf()}  mean {law.mean:+.3f}  span {law.span}")
    for r in (1.0, 0.5):
        fac = spectral_factorise(law, r)
        print(f" killing r = {r}")
        show("ascending", fac.ascending)
        show("descending", fac.descending)
        report = verify_factorisation(law, fac.ascending, fac.descending, r)
        print(f"  identity residual on 1024 grid points: {report.residual_max:.2e}")
    print()

# A walk drifting to -infinity never climbs for sure: the strict ascending
# ladder is defective, and the defect is the chance the maximum stays at 0.
fac = spectral_factorise(bundled("drift"))
print(f"drift: P(max >= 1) = {fac.ascending.total_mass:.10f}  (gambler's ruin 3/7 = {3 / 7:.10f})")

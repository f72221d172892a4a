"""Run the full lemma suite on a few walks and print the lab's verdicts."""

from whlab import StepLaw, renewal_limit_check, renewal_sequence, spectral_factorise
from whlab.uniqueness import h_sequence, run_lab

walks = {
    "symmetric": StepLaw.from_pmf({-1: 0.5, 1: 0.5}),
    "upward drift": StepLaw.from_pmf({-1: 0.3, 1: 0.7}),
    "skewed": StepLaw.from_pmf({-2: 0.15, -1: 0.2, 0: 0.1, 1: 0.25, 3: 0.3}),
    "span 2": StepLaw.from_pmf({-2: 0.4, 2: 0.6}),
}

for name, law in walks.items():
    report, _ = run_lab(law, K=5_000)
    print(f"{name}:")
    for lemma, outcome in report.lemmas.items():
        value = "-" if outcome.value is None else f"{outcome.value:.2e}"
        print(f"  {lemma:<12} {str(outcome.passed):<5} {value:>9}  {outcome.detail}")

# The renewal sequence of a proper ladder law settles at one over its mean,
# and h built from it is flat far out.
law = walks["skewed"]
asc = spectral_factorise(law).ascending
u = renewal_sequence(asc, 2_000)
ok, dev = renewal_limit_check(u, 20)
print(f"\nskewed walk: u_k -> 1/mean = {1 / asc.mean:.8f}; tail deviation {dev:.1e}")
h = h_sequence(asc, u)
print("h at k = 0, 10, 100, 1000:", [round(float(h.values[k]), 10) for k in (0, 10, 100, 1000)])

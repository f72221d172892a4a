"""Numerical checks of the uniqueness of the spatial Wiener-Hopf factorisation.

Factors enter either as :class:`~whlab.lattice.DefectiveLaw` (the
probabilistic normalisation, ``kappa(z) = 1 - E[exp(izH)]``) or as a bare
:class:`~whlab.lattice.SubordinatorExponent`, which allows arbitrary
positive rescalings ``(c kappa_+, kappa_- / c)`` of a pair.  Every check
returns plain numbers; :func:`run_lab` folds them into a
:class:`FactorisationReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import (
    EvaluationError,
    FactorisationError,
    InvalidLawError,
    NotAScaledFactorError,
    PrecisionError,
    PreconditionError,
)
from .lattice import DefectiveLaw, StepLaw, SubordinatorExponent, char_function
from .renewal import RenewalSequence, renewal_limit_check, renewal_sequence
from .spectral import spectral_factorise
from .spitzer import spitzer_ascending_factor, spitzer_descending_factor

Factor = Union[DefectiveLaw, SubordinatorExponent]

F_EXCLUSION = 0.1
DEFAULT_GRID = 1024


def as_exponent(factor: Factor) -> SubordinatorExponent:
    if isinstance(factor, SubordinatorExponent):
        return factor
    return factor.to_exponent()


def z_grid(size: int = DEFAULT_GRID) -> np.ndarray:
    """``size`` equispaced points of ``[-pi, pi]``."""
    return np.linspace(-np.pi, np.pi, size)


def f_grid(size: int = DEFAULT_GRID, span: int = 1, radius: float = F_EXCLUSION) -> np.ndarray:
    """Real grid with every point within ``radius`` of ``(2 pi / span) Z`` removed."""
    z = z_grid(size)
    period = 2 * np.pi / span
    dist = np.abs(z - period * np.round(z / period))
    return z[dist >= radius]


def killed_exponent(law: StepLaw, r: float, z):
    """``1 - r phi(z)``."""
    return 1.0 - r * char_function(law, z)


# ---------------------------------------------------------------------------
# Factor identity and the ratio F
# ---------------------------------------------------------------------------


@dataclass
class RatioStats:
    grid: np.ndarray
    values: np.ndarray
    values_minus: np.ndarray
    mean: complex
    deviation: float
    cross: float


@dataclass
class LemmaOutcome:
    passed: bool | None
    value: float | None
    detail: str = ""

    def to_json(self) -> dict:
        return {"pass": self.passed, "value": self.value, "detail": self.detail}


@dataclass
class FactorisationReport:
    """Residuals of ``psi - kappa_+ kappa_-(-.)`` plus everything derived from them."""

    grid: np.ndarray
    residuals: np.ndarray
    killing: float = 1.0
    span: int = 1
    F_grid: np.ndarray | None = None
    F_values: np.ndarray | None = None
    F_mean: complex | None = None
    F_dev: float | None = None
    F_cross: float | None = None
    c: float | None = None
    lemmas: dict[str, LemmaOutcome] = field(default_factory=dict)

    @property
    def residual_max(self) -> float:
        return float(np.max(self.residuals))

    @property
    def passed(self) -> bool:
        return all(o.passed is not False for o in self.lemmas.values())

    def to_json(self) -> dict:
        mean = self.F_mean
        return {
            "residual_max": self.residual_max,
            "F_mean": None if mean is None else float(np.real(mean)),
            "F_mean_imag": None if mean is None else float(np.imag(mean)),
            "F_dev": self.F_dev,
            "F_cross": self.F_cross,
            "c": self.c,
            "killing": self.killing,
            "span": self.span,
            "lemmas": {k: v.to_json() for k, v in self.lemmas.items()},
            "pass": self.passed,
        }


def factor_product(ascending: Factor, descending: Factor, z) -> np.ndarray:
    """``kappa_+(z) kappa_-(-z)`` on a real grid."""
    z = np.asarray(z, dtype=float)
    return as_exponent(ascending).evaluate(z) * as_exponent(descending).evaluate(-z)


def verify_factorisation(
    law: StepLaw,
    ascending: Factor,
    descending: Factor,
    r: float = 1.0,
    grid_size: int = DEFAULT_GRID,
) -> FactorisationReport:
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    z = z_grid(grid_size)
    res = np.abs(killed_exponent(law, r, z) - factor_product(ascending, descending, z))
    return FactorisationReport(grid=z, residuals=res, killing=r, span=law.span)


def ratio_F(
    k_plus: Factor,
    k_plus_alt: Factor,
    k_minus: Factor,
    k_minus_alt: Factor,
    grid: np.ndarray,
) -> RatioStats:
    """``F = kappa_+ / kappa'_+`` and its mirror ``kappa'_-(-z) / kappa_-(-z)`` on ``grid``."""
    z = np.asarray(grid, dtype=float)
    kp, kpa = as_exponent(k_plus).evaluate(z), as_exponent(k_plus_alt).evaluate(z)
    km, kma = as_exponent(k_minus).evaluate(-z), as_exponent(k_minus_alt).evaluate(-z)
    for name, den in (("kappa'_+", kpa), ("kappa_-", km)):
        if np.min(np.abs(den)) < 1e-14:
            raise EvaluationError(f"{name} vanishes on the grid")
    f_plus = kp / kpa
    f_minus = kma / km
    mean = complex(np.mean(f_plus))
    return RatioStats(
        grid=z,
        values=f_plus,
        values_minus=f_minus,
        mean=mean,
        deviation=float(np.max(np.abs(f_plus - mean))),
        cross=float(np.max(np.abs(f_plus - f_minus))),
    )


def normalise_factor_pair(
    k_plus_scaled: Factor,
    k_minus_scaled: Factor,
    law: StepLaw | None = None,
    r: float = 1.0,
    tol: float = 1e-6,
    grid_size: int = DEFAULT_GRID,
) -> tuple[float, DefectiveLaw, DefectiveLaw]:
    """Recover ``c`` from ``(c kappa_+, kappa_- / c)`` and the canonical ladder laws.

    The ascending law has no atom at 0, so ``1 - kappa_+ / c`` is a
    sub-probability transform only when ``c`` equals the total rate of the
    scaled exponent.  The descending atom at 0 is whatever mass the
    rescaled partner leaves over.  When ``law`` is given the canonical pair
    must also reproduce ``1 - r phi`` to within ``tol``.
    """
    kp, km = as_exponent(k_plus_scaled), as_exponent(k_minus_scaled)
    if kp.drift != 0 or km.drift != 0:
        raise NotAScaledFactorError("lattice factors carry no drift")
    c = kp.total_rate
    if not c > 0:
        raise NotAScaledFactorError("ascending exponent vanishes identically")
    try:
        asc = DefectiveLaw.from_masses(kp.levy / c, strict=True, clip=tol)
        desc_masses = c * km.levy
        desc_masses[0] = 1.0 - c * km.total_rate
        desc = DefectiveLaw.from_masses(desc_masses, strict=False, clip=tol)
    except InvalidLawError as exc:
        raise NotAScaledFactorError(f"no admissible c: {exc}") from None
    if law is not None:
        res = verify_factorisation(law, asc, desc, r, grid_size).residual_max
        if res > tol:
            raise NotAScaledFactorError(
                f"canonical pair misses the walk exponent by {res:.3e} > {tol:.1e}"
            )
    return c, asc, desc


def perturb_law(law: DefectiveLaw, k: int, delta: float) -> DefectiveLaw:
    """Move the mass at ``k`` by exactly ``delta`` and stay a sub-probability.

    A removed amount goes to the cemetery.  An added amount is taken from
    the defect first and then proportionally from the other atoms.
    """
    if law.strict and k == 0:
        raise InvalidLawError("cannot put mass at 0 in a strict law")
    masses = law.padded(k + 1)
    if masses[k] + delta < 0:
        raise InvalidLawError("perturbation makes a mass negative")
    excess = max(0.0, delta - law.defect)
    if excess > 0:
        others = masses.sum() - masses[k]
        if others < excess:
            raise InvalidLawError("not enough mass elsewhere to absorb the perturbation")
        scale = 1.0 - excess / others
        masses[:k] *= scale
        masses[k + 1 :] *= scale
    masses[k] += delta
    return DefectiveLaw.from_masses(masses, strict=law.strict)


def law_distance(a: DefectiveLaw, b: DefectiveLaw) -> float:
    """L-infinity distance between two defective laws, cemetery included."""
    size = max(a.masses.size, b.masses.size)
    return float(max(np.max(np.abs(a.padded(size) - b.padded(size))), abs(a.defect - b.defect)))


# ---------------------------------------------------------------------------
# The lattice functions h and h~
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LatticeH:
    """Lattice values of ``h`` (or of ``h~`` when ``reflected``).

    ``values[j]`` is ``h(j)``, respectively ``h~(-j)``.  ``increments[j]``
    is ``h(j) - h(j-1)``, respectively ``h~(-j) - h~(-j+1)``, using
    ``h(-1) = 0 = h~(1)``.
    """

    values: np.ndarray
    increments: np.ndarray
    killing: float
    tail: np.ndarray
    renewal: np.ndarray
    reflected: bool = False


def _levy_tail(levy: np.ndarray) -> np.ndarray:
    # mubar(x) = mu((x, inf)) for x = 0, 1, ...; mubar(0) is the total mass
    return np.concatenate([np.cumsum(levy[::-1])[::-1][1:], [0.0]])


def _h_values(exponent: SubordinatorExponent, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    tail = _levy_tail(exponent.levy)
    h = exponent.killing * np.cumsum(u) + np.convolve(u, tail)[: u.size]
    return h, tail


def _same_support(a: Factor, b: DefectiveLaw) -> bool:
    sa = set(np.flatnonzero(as_exponent(a).levy))
    sb = set(np.flatnonzero(as_exponent(b).levy))
    return sa == sb and (as_exponent(a).killing > 0) == (as_exponent(b).killing > 0)


def h_sequence(ascending: Factor, u_prime: RenewalSequence, K: int | None = None) -> LatticeH:
    """``h(k) = sum_{l<=k} u'_l (q_+ + mubar_+(k - l))`` for ``k = 0..K``."""
    if not _same_support(ascending, u_prime.source):
        raise ValueError("mismatched supports: h needs both inputs from one ascending ladder")
    K = u_prime.truncation if K is None else K
    if K > u_prime.truncation:
        raise PrecisionError(f"renewal sequence only reaches {u_prime.truncation} < {K}")
    exp = as_exponent(ascending)
    u = u_prime.values[: K + 1]
    h, tail = _h_values(exp, u)
    v = np.diff(h, prepend=0.0)
    return LatticeH(h, v, exp.killing, tail, u)


def h_tilde_sequence(descending: Factor, u_minus: RenewalSequence, K: int | None = None) -> LatticeH:
    """``h~(-j) = -sum_{k<=j} u_k (q'_- + mubar'_-(j - k))`` for ``j = 0..K``."""
    if not _same_support(descending, u_minus.source):
        raise ValueError("mismatched supports: h~ needs both inputs from one descending ladder")
    K = u_minus.truncation if K is None else K
    if K > u_minus.truncation:
        raise PrecisionError(f"renewal sequence only reaches {u_minus.truncation} < {K}")
    exp = as_exponent(descending)
    u = u_minus.values[: K + 1]
    h, tail = _h_values(exp, u)
    h = -h
    v = np.diff(h, prepend=0.0)
    return LatticeH(h, v, exp.killing, tail, u, reflected=True)


def increments_by_decomposition(h: LatticeH, levy: np.ndarray) -> np.ndarray:
    """``v_k = -sum_{l<k} u'_l a_{k-l} + u'_k (q + mubar(0))``, computed without ``h`` itself."""
    u = h.renewal
    a = np.zeros(u.size)
    a[1 : min(levy.size, u.size)] = levy[1 : u.size]
    v = -np.convolve(u, a)[: u.size] + u * (h.killing + h.tail[0])
    return -v if h.reflected else v


def tail_lemma_check(h: LatticeH, epsilon: float = 0.5, tol: float = 1e-3) -> dict:
    """Cauchy surrogate for ``sum_{k>=1} k^-(2+eps) h(k) < infinity``.

    Reports the partial sums at ``K/2`` and ``K``, their difference, and
    ``h(K)/K`` as a sublinearity indicator.  This is a consistency check;
    a finite computation cannot prove integrability.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    K = h.values.size - 1
    k = np.arange(1, K + 1)
    terms = k ** -(2.0 + epsilon) * np.abs(h.values[1:])
    partial = np.cumsum(terms)
    half = float(partial[K // 2 - 1])
    full = float(partial[-1])
    diff = full - half
    return {
        "partial_half": half,
        "partial_full": full,
        "difference": diff,
        "sublinearity": float(abs(h.values[-1]) / K),
        "pass": bool(diff < tol),
    }


def increment_limit_check(h: LatticeH, window: int = 50, tol: float = 1e-4) -> tuple[bool, float]:
    """``max |v_k|`` over the last ``window + 1`` lattice points."""
    tail = np.abs(h.increments[-(window + 1) :])
    dev = float(np.max(tail))
    return dev < tol, dev


# ---------------------------------------------------------------------------
# Probabilistic identities
# ---------------------------------------------------------------------------


def amicales_check(
    walk: StepLaw, u_plus_strict: RenewalSequence, descending: DefectiveLaw, r: float = 1.0
) -> float:
    """``max_j |b_j - r sum_k u+_k p_{-j-k}|`` over ``j = 0..m``.

    Only ``u+_0..u+_m`` enter because the step law has bounded support.
    """
    m = walk.support_min
    if u_plus_strict.truncation < m:
        raise PrecisionError(f"need u+ up to {m}, have {u_plus_strict.truncation}")
    u = u_plus_strict.values
    residual = 0.0
    for j in range(m + 1):
        pred = r * sum(u[k] * walk.prob(-j - k) for k in range(m - j + 1))
        residual = max(residual, abs(descending.mass(j) - pred))
    return residual


def descending_from_amicales(walk: StepLaw, ascending: DefectiveLaw, r: float = 1.0) -> DefectiveLaw:
    """Weak descending law rebuilt from the strict ascending renewal masses."""
    m = walk.support_min
    u = renewal_sequence(ascending, max(m, 1)).values
    masses = [r * sum(u[k] * walk.prob(-j - k) for k in range(m - j + 1)) for j in range(m + 1)]
    return DefectiveLaw.from_masses(masses, clip=1e-12)


def killing_exclusivity_check(ascending: Factor, descending: Factor, tol: float = 1e-9) -> tuple[bool, float]:
    """At ``r = 1`` at most one ladder process is killed."""
    qa = as_exponent(ascending).killing
    qd = as_exponent(descending).killing
    worst = min(qa, qd)
    return worst < tol, worst


def expectation_identity_check(
    walk: StepLaw,
    ascending: Factor,
    descending: Factor,
    step: float = 1e-5,
    tol: float = 1e-6,
) -> dict:
    """Compare ``i psi'(0)`` (central difference) with ``m_+ q_-`` or ``-q_+ m_-``."""
    z = np.array([step, -step])
    psi = 1.0 - char_function(walk, z)
    lhs = float(np.real(1j * (psi[0] - psi[1]) / (2 * step)))
    ka, kd = as_exponent(ascending), as_exponent(descending)
    proper_a = ka.killing <= 1e-12
    proper_d = kd.killing <= 1e-12
    if proper_a and proper_d:
        regime, rhs = "zero drift", 0.0
    elif proper_a:
        regime, rhs = "upward drift", ka.mean * kd.killing
    elif proper_d:
        regime, rhs = "downward drift", -ka.killing * kd.mean
    else:
        raise PreconditionError("both ladder processes are killed; no drift regime applies")
    return {"lhs": lhs, "rhs": rhs, "regime": regime, "pass": bool(abs(lhs - rhs) <= tol)}


def periodicity_residual(law: StepLaw, grid_size: int = DEFAULT_GRID) -> float:
    """``max |psi(z + 2 pi / span) - psi(z)|`` on the standard grid."""
    z = z_grid(grid_size)
    shift = 2 * np.pi / law.span
    return float(np.max(np.abs(char_function(law, z + shift) - char_function(law, z))))


# ---------------------------------------------------------------------------
# Full report
# ---------------------------------------------------------------------------


def _compress(law: DefectiveLaw, eta: int) -> DefectiveLaw:
    if eta == 1:
        return law
    if np.any(np.delete(law.masses, np.s_[::eta])):
        raise ValueError(f"factor charges points outside {eta}Z")
    return DefectiveLaw(law.masses[::eta], law.defect, law.strict)


def _outcome(passed, value, detail="") -> LemmaOutcome:
    return LemmaOutcome(None if passed is None else bool(passed), None if value is None else float(value), detail)


def run_lab(
    law: StepLaw,
    r: float = 1.0,
    candidate: tuple[DefectiveLaw, DefectiveLaw] | None = None,
    grid_size: int = DEFAULT_GRID,
    K: int = 10_000,
    tol: float = 1e-9,
    epsilon: float = 0.5,
) -> tuple[FactorisationReport, dict]:
    """Factorise ``law`` and run every check on the resulting pair.

    Without ``candidate`` the second construction path is the Spitzer
    series for ``r < 1`` and the amicales reconstruction of the descending
    law for ``r = 1``.  With ``candidate`` that pair plays the alternative
    role and is also the pair the lemma checks run on.  Returns the report
    and a table of ``k, u, h, v`` columns for plotting.
    """
    fac = spectral_factorise(law, r)
    base, eta = law.rescaled()
    asc = _compress(fac.ascending, eta)
    desc = _compress(fac.descending, eta)

    if candidate is not None:
        alt_asc, alt_desc = (_compress(x, eta) for x in candidate)
    elif r < 1.0:
        alt_asc = spitzer_ascending_factor(base, r)[0]
        alt_desc = spitzer_descending_factor(base, r)[0]
    else:
        alt_asc = asc
        alt_desc = descending_from_amicales(base, asc, r)

    report = verify_factorisation(base, alt_asc, alt_desc, r, grid_size)
    report.span = eta
    lemmas = report.lemmas
    lemmas["identity"] = _outcome(report.residual_max < tol, report.residual_max)
    lemmas["uniqueness"] = _outcome(
        law_distance(asc, alt_asc) < 1e-6 and law_distance(desc, alt_desc) < 1e-6,
        max(law_distance(asc, alt_asc), law_distance(desc, alt_desc)),
        "distance to the spectral ladder pair",
    )

    grid = f_grid(grid_size)
    try:
        stats = ratio_F(asc, alt_asc, desc, alt_desc, grid)
        report.F_grid, report.F_values = grid, stats.values
        report.F_mean, report.F_dev, report.F_cross = stats.mean, stats.deviation, stats.cross
    except EvaluationError as exc:
        lemmas["ratio"] = _outcome(False, None, str(exc))
    try:
        report.c = normalise_factor_pair(alt_asc, alt_desc, base, r, tol=1e-6, grid_size=grid_size)[0]
    except NotAScaledFactorError as exc:
        lemmas["scaling"] = _outcome(False, None, str(exc))

    # lemma suite on the pair under test
    u_plus = renewal_sequence(alt_asc, K)
    h = h_sequence(alt_asc, u_plus)
    tail = tail_lemma_check(h, epsilon)
    lemmas["tail"] = _outcome(tail["pass"], tail["difference"], f"h(K)/K = {tail['sublinearity']:.3e}")
    ok, dev = increment_limit_check(h)
    u_minus = renewal_sequence(alt_desc, K)
    h_t = h_tilde_sequence(alt_desc, u_minus)
    ok_t, dev_t = increment_limit_check(h_t)
    lemmas["increments"] = _outcome(ok and ok_t, max(dev, dev_t), "max |v_k| over the last 51 points of h and h~")

    worst = 0.0
    details = []
    for name, seq in (("ascending", u_plus), ("descending", u_minus)):
        try:
            _, d = renewal_limit_check(seq, window=20, tol=1e-6)
            worst = max(worst, d)
        except PreconditionError as exc:
            details.append(f"{name}: {exc}")
    lemmas["renewal"] = _outcome(worst <= 1e-6, worst, "; ".join(details))

    amic = amicales_check(base, u_plus, alt_desc, r)
    lemmas["amicales"] = _outcome(amic < 1e-8, amic)

    if r == 1.0:
        ok, worst = killing_exclusivity_check(alt_asc, alt_desc)
        lemmas["killing"] = _outcome(ok, worst)
        try:
            e = expectation_identity_check(base, alt_asc, alt_desc)
            lemmas["expectation"] = _outcome(e["pass"], abs(e["lhs"] - e["rhs"]), e["regime"])
        except PreconditionError as exc:
            lemmas["expectation"] = _outcome(False, None, str(exc))
    else:
        lemmas["killing"] = _outcome(None, None, "killed walk: both ladder processes are killed")
        lemmas["expectation"] = _outcome(None, None, "needs r = 1")

    per = periodicity_residual(law, grid_size)
    lemmas["periodicity"] = _outcome(per < 1e-10, per)

    table = {"k": np.arange(K + 1), "u": u_plus.values, "h": h.values, "v": h.increments}
    return report, table

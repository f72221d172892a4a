"""Exact Wiener-Hopf factors of lattice walks by splitting polynomial roots.

With ``s = exp(iz)`` the killed exponent ``1 - r phi(s)`` is a Laurent
polynomial.  Multiplying by ``s^m`` gives an ordinary polynomial of degree
``m + n`` whose roots outside the unit disc are the zeros of the ascending
factor ``A(s) = 1 - E[s^{H+} r^{tau+}]`` and whose roots inside the disc,
inverted, are the zeros of the descending factor
``B(t) = 1 - E[t^{|H-,w|} r^{tau-,w}]`` in ``t = 1/s``.  At ``r = 1`` the
root ``s = 1`` is removed analytically and handed to whichever ladder
process is proper.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import FactorisationError, InvalidLawError, ParameterError
from .lattice import DefectiveLaw, StepLaw

MEAN_TOL = 1e-12
COEF_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LaurentPolynomial:
    """``sum_{k=low}^{high} coefficients[k - low] * s^k``."""

    low: int
    high: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients)
        if c.size != self.high - self.low + 1:
            raise ValueError("coefficient vector does not match the index range")
        if c[0] == 0 or c[-1] == 0:
            raise ValueError("extreme coefficients must be nonzero")

    @property
    def degree(self) -> int:
        """Degree of the ordinary polynomial ``s^(-low) * self``."""
        return self.high - self.low

    def ordinary(self) -> np.ndarray:
        """Coefficients of ``s^(-low) * self``, lowest power first."""
        return np.asarray(self.coefficients)

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        return P.polyval(s, self.ordinary()) * s**self.low


@dataclass(frozen=True, eq=False)
class RootSplit:
    inside: np.ndarray
    outside: np.ndarray
    on_circle: np.ndarray
    killing: float
    mean_sign: int
    # multiplicity of s = 1 handed to each factor
    unit_root_ascending: int = 0
    unit_root_descending: int = 0

    @property
    def roots(self) -> np.ndarray:
        return np.concatenate([self.inside, self.on_circle, self.outside])


@dataclass(frozen=True, eq=False)
class Factorisation:
    """Result of :func:`spectral_factorise`, in the original lattice units."""

    law: StepLaw
    killing: float
    span: int
    ascending: DefectiveLaw
    descending: DefectiveLaw
    split: RootSplit


def _check_killing(r: float) -> float:
    r = float(r)
    if not (0.0 < r <= 1.0):
        raise ParameterError(f"killing parameter r={r} outside (0, 1]")
    return r


def to_polynomial(law: StepLaw, r: float = 1.0) -> LaurentPolynomial:
    """Laurent polynomial ``1 - r phi(s)`` of a span-1 step law."""
    r = _check_killing(r)
    coef = -r * np.asarray(law.probs, dtype=float)
    coef[law.support_min] += 1.0
    return LaurentPolynomial(-law.support_min, law.support_max, coef)


def _deflate_unit_root(law: StepLaw) -> np.ndarray:
    # s^m (1 - phi(s)) / (s - 1), from the tail sums of the law: the s^(m+j)
    # coefficient is -P(X > j) for 0 <= j < n and P(X <= j) for -m <= j < 0.
    probs = np.asarray(law.probs)
    below = np.cumsum(probs)[: law.support_min]
    above = np.cumsum(probs[::-1])[::-1][law.support_min + 1 :]
    return np.concatenate([below, -above])


def _deflate_again(coef: np.ndarray) -> np.ndarray:
    # synthetic division by (s - 1) from the low end; the dropped remainder is
    # the (vanishing) coefficient sum
    return -np.cumsum(coef)[:-1]


def _polish(coef: np.ndarray, roots: np.ndarray) -> np.ndarray:
    if roots.size == 0:
        return roots
    deriv = P.polyder(coef)
    val = P.polyval(roots, coef)
    dval = P.polyval(roots, deriv)
    ok = np.abs(dval) > 1e-14 * np.maximum(1.0, np.abs(val))
    step = np.zeros_like(roots)
    step[ok] = val[ok] / dval[ok]
    return roots - step


def _roots(coef: np.ndarray) -> np.ndarray:
    coef = np.trim_zeros(np.asarray(coef, dtype=float), "b")
    if coef.size <= 1:
        return np.zeros(0, dtype=complex)
    # companion-matrix eigenvalues, then one Newton step per root
    roots = np.roots(coef[::-1]).astype(complex)
    return _polish(coef, roots)


def circle_tolerance(degree: int) -> float:
    return 1e-8 * (1 + degree)


def find_and_classify_roots(
    poly: LaurentPolynomial, mean: float, r: float, law: StepLaw | None = None
) -> RootSplit:
    """Find all roots of ``s^m (1 - r phi(s))`` and sort them against the unit circle.

    For ``r = 1`` the root ``s = 1`` (double when the mean vanishes) is
    divided out exactly before the companion-matrix solve; this needs the
    step law itself, which is recovered from ``poly`` when not supplied.
    """
    r = _check_killing(r)
    m = -poly.low
    n = poly.high
    deg = poly.degree
    if deg < 1:
        raise FactorisationError("polynomial has degree 0")
    mean_sign = 0 if abs(mean) <= MEAN_TOL * max(m, n, 1) else int(np.sign(mean))
    coef = poly.ordinary().real.astype(float)

    unit_asc = unit_desc = 0
    on_circle = np.zeros(0, dtype=complex)
    if r == 1.0:
        if law is None:
            probs = -coef.copy()
            probs[m] += 1.0
            law = StepLaw(m, n, np.maximum(probs, 0.0))
        work = _deflate_unit_root(law)
        if mean_sign == 0:
            work = _deflate_again(work)
            unit_asc = unit_desc = 1
            on_circle = np.ones(2, dtype=complex)
        else:
            if mean_sign > 0:
                unit_asc = 1
            else:
                unit_desc = 1
            on_circle = np.ones(1, dtype=complex)
    else:
        work = coef

    roots = _roots(work)
    mod = np.abs(roots)
    tol = circle_tolerance(deg)
    bad = np.abs(mod - 1.0) <= tol
    if np.any(bad):
        raise FactorisationError(
            f"unexpected root on the unit circle: {complex(roots[bad][0])!r} "
            "(span > 1, unnormalised law, or a near-zero drift)"
        )
    inside = roots[mod < 1.0]
    outside = roots[mod > 1.0]

    want_inside = m - unit_desc
    want_outside = n - unit_asc
    if inside.size != want_inside or outside.size != want_outside:
        raise FactorisationError(
            f"root count mismatch: {inside.size} inside / {outside.size} outside, "
            f"expected {want_inside} / {want_outside}"
        )
    return RootSplit(
        inside=inside,
        outside=outside,
        on_circle=on_circle,
        killing=r,
        mean_sign=mean_sign,
        unit_root_ascending=unit_asc,
        unit_root_descending=unit_desc,
    )


def _product_coefficients(zeros: np.ndarray, n_unit: int) -> np.ndarray:
    # coefficients (lowest first) of prod (1 - x / zero) * (1 - x)^n_unit
    c = np.ones(1, dtype=complex)
    for z in zeros:
        c = np.convolve(c, [1.0, -1.0 / z])
    for _ in range(n_unit):
        c = np.convolve(c, [1.0, -1.0])
    return c


def _real(c: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(c))))
    if np.max(np.abs(c.imag), initial=0.0) > COEF_TOL * scale:
        raise FactorisationError(f"{what} factor has non-real coefficients")
    return c.real.copy()


def assemble_factors(
    split: RootSplit, poly: LaurentPolynomial
) -> tuple[DefectiveLaw, DefectiveLaw]:
    """Build the strict ascending and weak descending laws from a root split.

    ``A(s)`` is the product over the outside roots with ``A(0) = 1``.
    ``B(t)`` is a constant times the product over the inverted inside
    roots; the constant is fixed by matching the top coefficient of
    ``A(s) B(1/s)`` with that of ``1 - r phi(s)`` and then cross-checked at
    ``s = -1``.
    """
    n = poly.high
    coef = poly.ordinary().real
    alpha = _real(_product_coefficients(split.outside, split.unit_root_ascending), "ascending")
    # zeros of B in t are 1/rho for the inside roots rho
    inv_inside = 1.0 / split.inside if split.inside.size else split.inside
    beta = _real(_product_coefficients(inv_inside, split.unit_root_descending), "descending")
    if alpha.size != n + 1:
        raise FactorisationError("ascending factor has the wrong degree")
    beta *= coef[-1] / alpha[-1]

    target = poly(-1.0)
    got = P.polyval(-1.0, alpha) * P.polyval(-1.0, beta)
    if abs(got - target) > 1e-9 * max(1.0, abs(target)):
        raise FactorisationError(
            f"normalisation check at s=-1 failed: {got!r} vs {target!r}"
        )
    try:
        asc = DefectiveLaw.from_masses(
            np.concatenate([[0.0], -alpha[1:]]), strict=True, clip=COEF_TOL
        )
        desc_masses = -beta
        desc_masses[0] += 1.0
        desc = DefectiveLaw.from_masses(desc_masses, strict=False, clip=COEF_TOL)
    except InvalidLawError as exc:
        raise FactorisationError(f"assembled factor is not a defective law: {exc}") from None
    return asc, desc


def _unscale(law: DefectiveLaw, eta: int) -> DefectiveLaw:
    if eta == 1:
        return law
    masses = np.zeros((law.masses.size - 1) * eta + 1)
    masses[::eta] = law.masses
    return DefectiveLaw(masses, law.defect, law.strict)


def spectral_factorise(law: StepLaw, r: float = 1.0) -> Factorisation:
    """Strict ascending and weak descending ladder laws of a lattice walk.

    The law is carried to span 1 before the root split and the resulting
    ladder laws are mapped back to the original lattice.
    """
    r = _check_killing(r)
    base, eta = law.rescaled()
    poly = to_polynomial(base, r)
    split = find_and_classify_roots(poly, base.mean, r, law=base)
    asc, desc = assemble_factors(split, poly)
    return Factorisation(
        law=law,
        killing=r,
        span=eta,
        ascending=_unscale(asc, eta),
        descending=_unscale(desc, eta),
        split=split,
    )

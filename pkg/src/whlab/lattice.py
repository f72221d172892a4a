"""Lattice step laws, defective ladder laws and subordinator exponents.

All objects here are immutable: the backing numpy arrays are flagged
read-only at construction so that laws can be shared freely between
threads and cached by the higher level modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Mapping

import numpy as np

from .errors import DomainError, InvalidLawError

PROB_TOL = 1e-12
MAX_LATTICE_POINT = 2**20


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _parse_pmf(pmf: Mapping) -> dict[int, float]:
    out: dict[int, float] = {}
    for key, value in pmf.items():
        try:
            k = int(key)
        except (TypeError, ValueError):
            raise InvalidLawError(f"lattice point {key!r} is not an integer") from None
        if isinstance(key, str) and str(k) != key.strip().lstrip("+"):
            raise InvalidLawError(f"lattice point {key!r} is not a decimal integer")
        if abs(k) > MAX_LATTICE_POINT:
            raise InvalidLawError(f"lattice point {k} exceeds the bound 2**20")
        p = float(value)
        if not math.isfinite(p):
            raise InvalidLawError(f"mass at {k} is not finite")
        out[k] = out.get(k, 0.0) + p
    return out


# ---------------------------------------------------------------------------
# Step laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StepLaw:
    """Finite-support law of the increment of a lattice random walk.

    The masses live on ``{-support_min, ..., support_max}``; ``probs[i]`` is
    the probability of the lattice point ``i - support_min``.
    """

    support_min: int
    support_max: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size != self.support_min + self.support_max + 1:
            raise InvalidLawError("probability vector does not match the support bounds")
        if self.support_min < 0 or self.support_max < 0:
            raise InvalidLawError("support bounds must be non-negative")
        if np.any(probs < 0):
            raise InvalidLawError("probabilities must be non-negative")
        total = probs.sum()
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidLawError(f"probabilities sum to {float(total)!r}, not 1")
        if (self.support_min > 0 and probs[0] <= 0) or (self.support_max > 0 and probs[-1] <= 0):
            raise InvalidLawError("support bounds are not tight")
        if self.support_min == 0 and self.support_max == 0:
            raise InvalidLawError("the step law is identically zero")
        object.__setattr__(self, "probs", _frozen(probs / total))

    @classmethod
    def from_pmf(cls, pmf: Mapping) -> "StepLaw":
        """Build a law from a ``{lattice point: probability}`` mapping."""
        masses = {k: p for k, p in _parse_pmf(pmf).items() if p != 0.0}
        if not masses:
            raise InvalidLawError("empty probability mass function")
        if any(p < 0 for p in masses.values()):
            raise InvalidLawError("probabilities must be non-negative")
        lo, hi = min(masses), max(masses)
        m, n = max(-lo, 0), max(hi, 0)
        probs = np.zeros(m + n + 1)
        for k, p in masses.items():
            probs[k + m] = p
        return cls(m, n, probs)

    @property
    def points(self) -> np.ndarray:
        return np.arange(-self.support_min, self.support_max + 1)

    def pmf(self) -> dict[int, float]:
        return {int(k): float(p) for k, p in zip(self.points, self.probs) if p > 0}

    def prob(self, k: int) -> float:
        i = k + self.support_min
        return float(self.probs[i]) if 0 <= i < self.probs.size else 0.0

    @property
    def mean(self) -> float:
        return float(np.dot(self.points, self.probs))

    @property
    def variance(self) -> float:
        return float(np.dot(self.points**2, self.probs) - self.mean**2)

    @property
    def span(self) -> int:
        return minimal_span(self)

    def rescaled(self) -> tuple["StepLaw", int]:
        """Return the law carried to span 1 together with the original span."""
        eta = self.span
        if eta == 1:
            return self, 1
        return StepLaw.from_pmf({k // eta: p for k, p in self.pmf().items()}), eta

    def reflected(self) -> "StepLaw":
        return StepLaw(self.support_max, self.support_min, self.probs[::-1].copy())

    def to_json(self) -> dict:
        return {"pmf": {str(k): p for k, p in self.pmf().items()}}

    @classmethod
    def from_json(cls, obj: Mapping) -> "StepLaw":
        if "pmf" not in obj:
            raise InvalidLawError("missing 'pmf' field")
        law = cls.from_pmf(obj["pmf"])
        if obj.get("span_check", False) and law.span != 1:
            raise InvalidLawError(f"span check failed: minimal span is {law.span}")
        return law


def minimal_span(law: StepLaw) -> int:
    """Largest integer eta such that the support of the law lies in eta*Z."""
    nonzero = [abs(k) for k, p in law.pmf().items() if k != 0]
    if not nonzero:
        raise InvalidLawError("the support is {0}; no span is defined")
    return reduce(math.gcd, nonzero)


def char_function(law: StepLaw, z):
    """Characteristic function ``phi(z) = E[exp(i z X_1)]``.

    Two-sided laws are only admissible on the real line; a law without
    negative steps extends to ``Im z >= 0`` and one without positive steps
    to ``Im z <= 0``.  Accepts scalars or arrays.
    """
    z = np.asarray(z, dtype=complex)
    imag = z.imag
    if law.support_min > 0 and np.any(imag > 0):
        raise DomainError("law has negative steps; Im z > 0 is not admissible")
    if law.support_max > 0 and np.any(imag < 0):
        raise DomainError("law has positive steps; Im z < 0 is not admissible")
    phases = np.exp(1j * np.multiply.outer(z, law.points))
    out = phases @ law.probs
    return out[()] if out.ndim == 0 else out


def char_exponent(law: StepLaw, z):
    """``psi(z) = 1 - phi(z)``, the exponent of the compound Poisson embedding."""
    return 1.0 - char_function(law, z)


def embed_compound_poisson(law: StepLaw) -> tuple[float, StepLaw]:
    """Split the walk into a jump rate ``P(X_1 != 0)`` and the conditioned jump law."""
    p0 = law.prob(0)
    rate = 1.0 - p0
    if rate <= 0:
        raise InvalidLawError("P(X_1 != 0) = 0")
    if p0 == 0:
        return rate, law
    jumps = {k: p / rate for k, p in law.pmf().items() if k != 0}
    return rate, StepLaw.from_pmf(jumps)


# ---------------------------------------------------------------------------
# Defective laws and subordinator exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DefectiveLaw:
    """Sub-probability law on ``{0, 1, 2, ...}`` plus a cemetery mass.

    ``masses[k]`` is the probability of the lattice point ``k`` and
    ``defect`` the probability of the cemetery state.  Descending ladder
    heights are stored as magnitudes.  A ``strict`` law carries no atom at 0.
    """

    masses: np.ndarray
    defect: float
    strict: bool = False

    def __post_init__(self):
        masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if masses.ndim != 1:
            raise InvalidLawError("masses must be one-dimensional")
        if np.any(masses < 0) or self.defect < 0:
            raise InvalidLawError("masses and defect must be non-negative")
        total = masses.sum() + self.defect
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidLawError(f"masses plus defect sum to {float(total)!r}, not 1")
        if self.strict and masses[0] != 0:
            raise InvalidLawError("strict law carries an atom at 0")
        nz = np.flatnonzero(masses)
        masses = masses[: nz[-1] + 1] if nz.size else masses[:1]
        object.__setattr__(self, "masses", _frozen(masses))
        object.__setattr__(self, "defect", float(self.defect))

    @classmethod
    def from_masses(cls, masses, strict: bool = False, clip: float = PROB_TOL) -> "DefectiveLaw":
        """Build a law whose defect is whatever mass is missing.

        Entries in ``[-clip, 0)`` and a defect in ``[-clip, 0)`` are rounded
        to zero; anything more negative is rejected.
        """
        masses = np.array(masses, dtype=float)
        if np.any(masses < -clip):
            raise InvalidLawError(f"negative mass {masses.min():.3e}")
        masses = np.maximum(masses, 0.0)
        if strict:
            if masses[0] > clip:
                raise InvalidLawError(f"strict law with mass {masses[0]:.3e} at 0")
            masses[0] = 0.0
        defect = 1.0 - masses.sum()
        if defect < -clip:
            raise InvalidLawError(f"masses exceed total probability by {-defect:.3e}")
        if defect < 0:
            masses /= masses.sum()
            defect = 0.0
        return cls(masses, defect, strict)

    @classmethod
    def from_pmf(cls, pmf: Mapping, defect: float | None = None, strict: bool = False):
        masses = _parse_pmf(pmf)
        if any(k < 0 for k in masses):
            raise InvalidLawError("defective laws live on non-negative lattice points")
        arr = np.zeros(max(masses, default=0) + 1)
        for k, p in masses.items():
            arr[k] = p
        if defect is None:
            return cls.from_masses(arr, strict=strict)
        return cls(arr, float(defect), strict)

    @property
    def atom_at_zero(self) -> float:
        return float(self.masses[0])

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def is_proper(self) -> bool:
        return self.defect <= PROB_TOL

    @property
    def mean(self) -> float:
        """Mean on the event of survival; infinite for a defective law."""
        if not self.is_proper:
            return math.inf
        return float(np.dot(np.arange(self.masses.size), self.masses))

    def mass(self, k: int) -> float:
        return float(self.masses[k]) if 0 <= k < self.masses.size else 0.0

    def padded(self, size: int) -> np.ndarray:
        out = np.zeros(max(size, self.masses.size))
        out[: self.masses.size] = self.masses
        return out

    def generating_function(self, s):
        """``E[s^H]`` with the cemetery contributing 0."""
        s = np.asarray(s, dtype=complex)
        out = np.polynomial.polynomial.polyval(s, self.masses)
        return out[()] if np.ndim(out) == 0 else out

    def factor(self, s):
        """``1 - E[s^H]``: the Wiener-Hopf factor in the variable ``s``."""
        return 1.0 - self.generating_function(s)

    def to_exponent(self) -> "SubordinatorExponent":
        """Compound Poisson subordinator exponent ``kappa(z) = 1 - E[exp(i z H)]``.

        The atom at 0 is absorbed into a lower jump rate, matching the
        descending factor of the random-walk embedding.
        """
        levy = self.masses.copy()
        levy[0] = 0.0
        return SubordinatorExponent(self.defect, 0.0, levy)

    def pmf(self) -> dict[int, float]:
        return {int(k): float(p) for k, p in enumerate(self.masses) if p > 0}

    def to_json(self) -> dict:
        return {
            "pmf": {str(k): p for k, p in self.pmf().items()},
            "defect": self.defect,
            "strict": self.strict,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "DefectiveLaw":
        if "pmf" not in obj:
            raise InvalidLawError("missing 'pmf' field")
        return cls.from_pmf(obj["pmf"], obj.get("defect"), bool(obj.get("strict", False)))

    def __repr__(self):
        return f"DefectiveLaw({self.pmf()}, defect={self.defect:.6g}, strict={self.strict})"


@dataclass(frozen=True, eq=False)
class SubordinatorExponent:
    """Exponent ``kappa(z) = q - i d z + sum_k mu_k (1 - e^{izk})`` of a lattice subordinator.

    ``levy[k]`` holds the Levy measure of the atom ``k``; ``levy[0]`` is
    always zero.
    """

    killing: float
    drift: float
    levy: np.ndarray

    def __post_init__(self):
        levy = np.atleast_1d(np.array(self.levy, dtype=float))
        if self.killing < 0 or self.drift < 0 or np.any(levy < 0):
            raise InvalidLawError("killing, drift and Levy atoms must be non-negative")
        if levy[0] != 0:
            raise InvalidLawError("a Levy measure has no atom at 0")
        object.__setattr__(self, "levy", _frozen(levy))

    @classmethod
    def from_atoms(cls, killing: float, atoms: Mapping[int, float], drift: float = 0.0):
        size = max(atoms, default=0) + 1
        levy = np.zeros(size)
        for k, v in atoms.items():
            if k < 1:
                raise InvalidLawError("Levy atoms live on k >= 1")
            levy[k] = v
        return cls(killing, drift, levy)

    @property
    def total_levy_mass(self) -> float:
        return float(self.levy.sum())

    @property
    def total_rate(self) -> float:
        """Rate of leaving the current state (jumps plus killing)."""
        return self.killing + self.total_levy_mass

    @property
    def mean(self) -> float:
        """``E[H_1]`` of the unkilled subordinator."""
        return self.drift + float(np.dot(np.arange(self.levy.size), self.levy))

    def scaled(self, c: float) -> "SubordinatorExponent":
        return SubordinatorExponent(c * self.killing, c * self.drift, c * self.levy)

    def evaluate(self, z):
        return evaluate_exponent(self, z)

    __call__ = evaluate


def evaluate_exponent(exponent: SubordinatorExponent, z):
    """Evaluate ``kappa(z)`` on the closed upper half plane."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag < 0):
        raise DomainError("subordinator exponents are defined for Im z >= 0 only")
    ks = np.arange(exponent.levy.size)
    jumps = (1.0 - np.exp(1j * np.multiply.outer(z, ks))) @ exponent.levy
    out = exponent.killing - 1j * exponent.drift * z + jumps
    return out[()] if out.ndim == 0 else out

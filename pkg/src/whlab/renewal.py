"""Renewal sequences of lattice ladder laws and potential measures of subordinators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidLawError, PreconditionError
from .lattice import DefectiveLaw, SubordinatorExponent

DEFAULT_TRUNCATION = 512


@dataclass(frozen=True, eq=False)
class RenewalSequence:
    """``u_k = sum_i b^{*i}({k})`` for ``k = 0..K``.

    ``mean`` is infinite for defective sources, in which case ``limit`` is 0.
    """

    values: np.ndarray
    mean: float
    limit: float
    source: DefectiveLaw

    @property
    def truncation(self) -> int:
        return self.values.size - 1

    def generating_residual(self) -> float:
        """Max coefficient of ``(1 - B(s)) U(s) - 1`` up to degree K."""
        b = self.source.padded(self.values.size)[: self.values.size]
        prod = np.convolve(np.concatenate([[1.0], np.zeros(self.values.size - 1)]) - b, self.values)
        prod = prod[: self.values.size]
        prod[0] -= 1.0
        return float(np.max(np.abs(prod)))


def renewal_sequence(ladder: DefectiveLaw, K: int = DEFAULT_TRUNCATION) -> RenewalSequence:
    """Renewal masses of ``ladder`` up to lattice point ``K``.

    The atom at 0 is resummed: ``1 - B(s) = (1 - b0)(1 - B~(s))`` so
    ``u_k (1 - b0) = [k == 0] + sum_{j>=1} b_j u_{k-j}``, which is a
    linear recursive filter driven by an impulse.
    """
    if K < 1:
        raise ValueError("truncation K must be at least 1")
    b = ladder.masses
    b0 = float(b[0])
    if b0 >= 1.0 - 1e-15:
        raise InvalidLawError("ladder law is (close to) the point mass at 0")
    denom = np.concatenate([[1.0 - b0], -b[1 : K + 1]])
    impulse = np.zeros(K + 1)
    impulse[0] = 1.0
    u = lfilter([1.0], denom, impulse)
    neg = u.min()
    if neg < -1e-14:
        raise ArithmeticError(f"renewal recursion produced a negative mass {neg:.3e}")
    u = np.maximum(u, 0.0)
    u.setflags(write=False)
    mean = ladder.mean
    limit = 0.0 if math.isinf(mean) else 1.0 / mean
    return RenewalSequence(u, mean, limit, ladder)


def _support_span(ladder: DefectiveLaw) -> int:
    ks = [k for k in np.flatnonzero(ladder.masses) if k > 0]
    return math.gcd(*map(int, ks)) if ks else 0


def renewal_limit_check(
    seq: RenewalSequence, window: int = 20, tol: float = 1e-6
) -> tuple[bool, float]:
    """Compare the last ``window`` renewal masses against ``1/mean``."""
    if seq.source.is_proper and _support_span(seq.source) != 1:
        raise PreconditionError(
            f"ladder support has span {_support_span(seq.source)}; the renewal limit "
            "only holds along the span"
        )
    tail = seq.values[-window:]
    deviation = float(np.max(np.abs(tail - seq.limit)))
    return deviation <= tol, deviation


def subordinator_potential(exponent: SubordinatorExponent, K: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """Atoms ``U({k})`` of the 0-resolvent of a compound Poisson lattice subordinator.

    Each visit to a state lasts an exponential time with rate
    ``q + mu(total)``, so the expected occupation is the renewal mass of
    the jump chain divided by that rate.
    """
    if exponent.drift != 0:
        raise PreconditionError("lattice potential needs zero drift")
    rate = exponent.total_rate
    if rate <= 0:
        raise InvalidLawError("subordinator never moves; potential is infinite")
    chain = DefectiveLaw.from_masses(exponent.levy / rate, strict=True, clip=1e-15)
    return renewal_sequence(chain, K).values / rate

"""Killed ladder laws from the truncated Spitzer series.

For ``0 < r < 1``::

    1 - E[s^{H+} r^{tau+}]       = exp(-sum_n r^n/n E[s^{X_n}; X_n > 0])
    1 - E[t^{|H-,w|} r^{tau-,w}] = exp(-sum_n r^n/n E[t^{-X_n}; X_n <= 0])

The series is cut at a horizon ``N`` and the exponential is expanded with
the usual coefficient recursion for ``exp`` of a power series.  Nothing
here touches polynomial roots, so the result is an independent check on
:mod:`whlab.spectral`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ParameterError
from .lattice import MAX_LATTICE_POINT, DefectiveLaw, StepLaw

DEFAULT_TARGET = 1e-10


@dataclass(frozen=True)
class ConvolutionPowerTable:
    """Laws of ``X_1, ..., X_N``; ``rows[n-1][i]`` is ``P(X_n = i - n*m)``."""

    law: StepLaw
    horizon: int
    rows: tuple

    def pmf(self, n: int) -> dict[int, float]:
        row = self.rows[n - 1]
        low = -n * self.law.support_min
        return {low + i: float(p) for i, p in enumerate(row) if p > 0}

    def positive_part(self, n: int) -> dict[int, float]:
        return {k: p for k, p in self.pmf(n).items() if k > 0}


def _check_horizon(law: StepLaw, N: int) -> None:
    if N < 1:
        raise ParameterError("horizon must be at least 1")
    if N * max(law.support_min, law.support_max) > MAX_LATTICE_POINT:
        raise ParameterError(f"horizon {N} overflows the lattice bound 2**20")


def iter_convolution_powers(law: StepLaw, N: int) -> Iterator[np.ndarray]:
    """Yield the probability vectors of ``X_1, ..., X_N`` one at a time."""
    _check_horizon(law, N)
    step = np.asarray(law.probs)
    row = step.copy()
    yield row
    for _ in range(N - 1):
        row = np.convolve(row, step)
        yield row


def convolution_powers(law: StepLaw, N: int) -> ConvolutionPowerTable:
    return ConvolutionPowerTable(law, N, tuple(iter_convolution_powers(law, N)))


def truncation_bound(r: float, N: int) -> float:
    """``e * r^(N+1) / ((N+1)(1-r))``, dominating the neglected series tail after ``exp``."""
    return math.e * r ** (N + 1) / ((N + 1) * (1.0 - r))


def choose_horizon(r: float, target: float = DEFAULT_TARGET) -> int:
    N = 1
    while truncation_bound(r, N) > target:
        N += 1
    return N


def _exp_series(g: np.ndarray) -> np.ndarray:
    # e = exp(g) as power series; k e_k = sum_{j=1}^k j g_j e_{k-j}
    e = np.zeros_like(g)
    e[0] = math.exp(g[0])
    jg = np.arange(g.size) * g
    for k in range(1, g.size):
        e[k] = np.dot(jg[1 : k + 1], e[k - 1 :: -1][:k]) / k
    return e


def _check_killing(r: float) -> float:
    r = float(r)
    if not (0.0 < r < 1.0):
        raise ParameterError("the Spitzer series needs 0 < r < 1; use the spectral path at r = 1")
    return r


def _log_series(law: StepLaw, r: float, N: int, side: str, size: int) -> np.ndarray:
    # accumulate sum_n r^n/n P(X_n = k) for k > 0 (ascending) or P(X_n = -k)
    # for k >= 0 (descending), k < size
    g = np.zeros(size)
    m = law.support_min
    weight = 1.0
    for n, row in enumerate(iter_convolution_powers(law, N), start=1):
        weight *= r
        zero = n * m  # index of the lattice point 0 in this row
        if side == "ascending":
            part = row[zero + 1 : zero + size]
            g[1 : 1 + part.size] += (weight / n) * part
        else:
            part = row[max(zero - size + 1, 0) : zero + 1][::-1]
            g[: part.size] += (weight / n) * part
    return g


def spitzer_ascending_factor(
    law: StepLaw, r: float, N: int | None = None, max_height: int | None = None
) -> tuple[DefectiveLaw, float]:
    """Killed strict ascending ladder law and its truncation error bound.

    ``max_height`` defaults to the largest upward step, beyond which the
    exact law has no mass.
    """
    r = _check_killing(r)
    N = choose_horizon(r) if N is None else int(N)
    _check_horizon(law, N)
    size = (law.support_max if max_height is None else max_height) + 1
    g = _log_series(law, r, N, "ascending", size)
    e = _exp_series(-g)
    masses = -e
    masses[0] = 0.0
    return DefectiveLaw.from_masses(masses, strict=True, clip=1e-12), truncation_bound(r, N)


def spitzer_descending_factor(
    law: StepLaw, r: float, N: int | None = None, max_depth: int | None = None
) -> tuple[DefectiveLaw, float]:
    """Killed weak descending ladder law (magnitudes) and its error bound."""
    r = _check_killing(r)
    N = choose_horizon(r) if N is None else int(N)
    _check_horizon(law, N)
    size = (law.support_min if max_depth is None else max_depth) + 1
    g = _log_series(law, r, N, "descending", size)
    e = _exp_series(-g)
    masses = -e
    masses[0] += 1.0
    return DefectiveLaw.from_masses(masses, strict=False, clip=1e-12), truncation_bound(r, N)

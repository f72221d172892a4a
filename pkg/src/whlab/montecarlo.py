"""Monte Carlo ground truth for the first ladder heights.

Each path is walked step by step in a compiled loop until it crosses the
level (strictly above 0, or at or below 0 for the weak descending kind).
Geometric killing is drawn up front as a step budget, which has the same
law as an independent Bernoulli(1 - r) kill before each step.

Randomness comes from numpy's PCG64 bit generator.  The sample is split
into fixed-size chunks whose streams are spawned from one
``SeedSequence(seed)``, so results depend on ``seed`` only, never on the
number of worker threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit
from scipy import stats

from .errors import ParameterError
from .lattice import DefectiveLaw, StepLaw

GENERATOR = "numpy.random.PCG64/SeedSequence"
CHUNK = 1 << 16
DEFAULT_T_MAX = 10**6
Z99 = 2.576

STRICT = "strict-ascending"
WEAK = "weak-descending"
_KINDS = {"strict": STRICT, "weak": WEAK, STRICT: STRICT, WEAK: WEAK}

# per-sample outcome codes
HIT, KILLED, CENSORED = 0, 1, 2


@dataclass(frozen=True)
class LadderSample:
    value: int | None  # None for the cemetery or a censored path
    epoch: int
    kind: str
    killed: bool = False
    censored: bool = False


@dataclass(frozen=True, eq=False)
class LadderSamples:
    """Column store of simulated ladder samples.

    ``values`` holds the ladder height (magnitude for the weak descending
    kind) and is only meaningful where ``status == HIT``.  ``epochs`` is
    the ladder epoch, the step before which the path was killed, or
    ``t_max`` for censored paths.
    """

    kind: str
    killing: float
    values: np.ndarray
    epochs: np.ndarray
    status: np.ndarray
    seed: int
    t_max: int

    def __len__(self):
        return self.values.size

    def __iter__(self) -> Iterator[LadderSample]:
        for v, e, s in zip(self.values, self.epochs, self.status):
            yield LadderSample(
                int(v) if s == HIT else None, int(e), self.kind, s == KILLED, s == CENSORED
            )

    def to_empirical(self) -> "EmpiricalLaw":
        hits = self.values[self.status == HIT]
        size = int(hits.max()) + 1 if hits.size else 1
        counts = np.bincount(hits, minlength=size)
        return EmpiricalLaw(
            kind=self.kind,
            killing=self.killing,
            counts=counts,
            killed=int(np.sum(self.status == KILLED)),
            censored=int(np.sum(self.status == CENSORED)),
            seed=self.seed,
        )


@njit(nogil=True, cache=True)
def _walk_kernel(rng, cdf, points, budget, strict, values, epochs, hit):
    for i in range(budget.size):
        pos = 0
        for t in range(1, budget[i] + 1):
            u = rng.random()
            j = 0
            while u >= cdf[j]:
                j += 1
            pos += points[j]
            if (strict and pos > 0) or (not strict and pos <= 0):
                values[i] = pos if strict else -pos
                epochs[i] = t
                hit[i] = True
                break


def _simulate_chunk(law, kind, r, n, t_max, seed_seq):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    points = law.points.astype(np.int64)
    cdf = np.cumsum(law.probs)
    cdf[-1] = np.inf

    if r < 1.0:
        # the kill happens just before step G, so G - 1 steps are allowed
        allowed = rng.geometric(1.0 - r, size=n).astype(np.int64) - 1
    else:
        allowed = np.full(n, np.iinfo(np.int64).max)
    budget = np.minimum(allowed, t_max)

    values = np.zeros(n, dtype=np.int64)
    epochs = np.zeros(n, dtype=np.int64)
    hit = np.zeros(n, dtype=np.bool_)
    _walk_kernel(rng, cdf, points, budget, kind == STRICT, values, epochs, hit)

    status = np.full(n, HIT, dtype=np.int8)
    _close_exhausted(np.flatnonzero(~hit), allowed, t_max, status, epochs)
    return values, epochs, status


def _close_exhausted(idx, allowed, t_max, status, epochs):
    killed = allowed[idx] < t_max
    status[idx[killed]] = KILLED
    epochs[idx[killed]] = allowed[idx[killed]] + 1
    status[idx[~killed]] = CENSORED
    epochs[idx[~killed]] = t_max


def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("WHLAB_THREADS", "1") or 1)
    return max(1, threads)


def simulate_ladder_samples(
    law: StepLaw,
    kind: str,
    r: float,
    n: int,
    seed: int,
    t_max: int | None = None,
    threads: int | None = None,
) -> LadderSamples:
    """Simulate ``n`` first strict-ascending or weak-descending ladder heights.

    With ``r < 1`` paths are killed geometrically and end in the cemetery.
    With ``r = 1`` a finite ``t_max`` is required; paths that have not
    crossed by then are marked censored.  ``t_max`` also guards ``r < 1``
    runs (default ``10**6``), where censoring is essentially impossible.
    """
    kind = _KINDS.get(kind)
    if kind is None:
        raise ParameterError("kind must be 'strict' or 'weak'")
    r = float(r)
    if not 0.0 < r <= 1.0:
        raise ParameterError(f"killing parameter r={r} outside (0, 1]")
    if r == 1.0 and t_max is None:
        raise ParameterError("r = 1 needs an explicit t_max (censoring horizon)")
    t_max = DEFAULT_T_MAX if t_max is None else int(t_max)
    if n < 1 or t_max < 1:
        raise ParameterError("n and t_max must be positive")

    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(law, kind, r, size, t_max, ss) for size, ss in zip(sizes, children)]
    workers = _threads(threads)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _simulate_chunk(*a), jobs))
    else:
        parts = [_simulate_chunk(*a) for a in jobs]
    values, epochs, status = (np.concatenate(col) for col in zip(*parts))
    for arr in (values, epochs, status):
        arr.setflags(write=False)
    return LadderSamples(kind, r, values, epochs, status, int(seed), t_max)


# ---------------------------------------------------------------------------
# Empirical laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmpiricalLaw:
    kind: str
    killing: float
    counts: np.ndarray
    killed: int
    censored: int
    seed: int
    generator: str = GENERATOR

    @property
    def n_samples(self) -> int:
        return int(self.counts.sum()) + self.killed + self.censored

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.n_samples

    @property
    def defect(self) -> float:
        return self.killed / self.n_samples

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.n_samples

    @staticmethod
    def half_width(p, n):
        p = np.asarray(p, dtype=float)
        return Z99 * np.sqrt(p * (1.0 - p) / n)

    @property
    def half_widths(self) -> np.ndarray:
        return self.half_width(self.probabilities, self.n_samples)

    @property
    def defect_half_width(self) -> float:
        return float(self.half_width(self.defect, self.n_samples))

    def merge(self, other: "EmpiricalLaw") -> "EmpiricalLaw":
        size = max(self.counts.size, other.counts.size)
        counts = np.zeros(size, dtype=np.int64)
        counts[: self.counts.size] += self.counts
        counts[: other.counts.size] += other.counts
        return EmpiricalLaw(
            self.kind, self.killing, counts, self.killed + other.killed,
            self.censored + other.censored, self.seed, self.generator,
        )

    def to_json(self) -> dict:
        probs = self.probabilities
        return {
            "pmf": {str(k): float(p) for k, p in enumerate(probs) if self.counts[k] > 0},
            "defect": self.defect,
            "strict": self.kind == STRICT,
            "kind": self.kind,
            "killing": self.killing,
            "n": self.n_samples,
            "seed": self.seed,
            "generator": self.generator,
            "censored": self.censored,
            "counts": {str(k): int(c) for k, c in enumerate(self.counts) if c > 0},
            "killed": self.killed,
            "half_widths": {str(k): float(h) for k, h in enumerate(self.half_widths) if self.counts[k] > 0},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EmpiricalLaw":
        counts_map = {int(k): int(v) for k, v in obj["counts"].items()}
        size = max(counts_map, default=0) + 1
        counts = np.zeros(size, dtype=np.int64)
        for k, c in counts_map.items():
            if k < 0 or c < 0:
                raise ValueError("counts must be non-negative on non-negative lattice points")
            counts[k] = c
        law = cls(
            obj["kind"], float(obj["killing"]), counts, int(obj["killed"]),
            int(obj["censored"]), int(obj["seed"]), obj.get("generator", GENERATOR),
        )
        if law.n_samples != int(obj["n"]):
            raise ValueError("counts do not add up to n")
        return law


@dataclass
class Comparison:
    passed: bool
    z_scores: dict
    chi2: float
    threshold: float
    offending: list


def compare_laws(empirical: EmpiricalLaw, exact: DefectiveLaw) -> Comparison:
    """Per-atom 99% interval test plus a chi-square aggregate.

    Censored paths may belong to any atom or to the cemetery, so each cell
    is compared with the interval ``[count, count + censored] / n`` rather
    than a point estimate.  When the sample puts no mass on a cell the
    half-width is computed from the exact mass instead of collapsing to 0.
    """
    n = empirical.n_samples
    c = empirical.censored_fraction
    size = max(empirical.counts.size, exact.masses.size)
    p_hat = np.zeros(size)
    p_hat[: empirical.counts.size] = empirical.probabilities
    cells = [(str(k), p_hat[k], exact.mass(k)) for k in range(size)]
    cells.append(("defect", empirical.defect, exact.defect))

    z_scores, offending = {}, []
    chi2 = 0.0
    dof = -1
    for name, ph, p in cells:
        if ph == 0 and p == 0:
            continue
        gap = max(p - (ph + c), ph - p, 0.0)
        base = ph if 0 < ph < 1 else p
        hw = float(EmpiricalLaw.half_width(base, n))
        se = hw / Z99
        z = gap / se if se > 0 else (0.0 if gap == 0 else np.inf)
        z_scores[name] = float(z)
        if gap > hw:
            offending.append(name)
        if p > 0:
            chi2 += n * gap**2 / p
            dof += 1
        elif ph > 0:
            offending.append(name)
    threshold = float(stats.chi2.ppf(0.99, dof)) if dof >= 1 else np.inf
    passed = bool(not offending and chi2 <= threshold)
    return Comparison(passed, z_scores, float(chi2), threshold, offending)

"""Reproducible Monte Carlo sampling of measurement outcomes.

Generator contract (part of the external interface):

* Trials are split into consecutive chunks of ``CHUNK_SIZE``.
* Chunk ``c`` draws raw 64-bit words from Philox-4x64-10 keyed with
  ``(seed, c)``, counter starting at zero (``numpy.random.Philox``).
* Each word ``w`` becomes a uniform ``u = (w >> 11) * 2**-53`` in [0, 1).
* The outcome is the first label ``k`` (POVM element order) with
  ``u < P(0) + ... + P(k)``; the last cumulative value is pinned to 1.

Counts therefore do not depend on how many workers process the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .hilbert import Ket
from .measurement import Povm, outcome_probabilities

CHUNK_SIZE = 1 << 14
_SEED_MAX = 1 << 64


@dataclass(frozen=True)
class SampleReport:
    labels: tuple[str, ...]
    counts: tuple[int, ...]
    n: int
    seed: int
    probabilities: tuple[float, ...]

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(c / self.n for c in self.counts)

    @property
    def bounds(self) -> tuple[float, ...]:
        """Three binomial standard deviations of each frequency."""
        return tuple(3 * np.sqrt(p * (1 - p) / self.n) for p in self.probabilities)

    @property
    def within_bounds(self) -> tuple[bool, ...]:
        # the slack absorbs rounding when the bound is exactly zero
        return tuple(abs(f - p) <= b + 1e-12
                     for f, p, b in zip(self.frequencies, self.probabilities, self.bounds))


def uniforms(seed: int, chunk: int, size: int) -> np.ndarray:
    bitgen = np.random.Philox(key=np.array([seed, chunk], dtype=np.uint64))
    raw = bitgen.random_raw(size)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _chunk_counts(cdf: np.ndarray, seed: int, chunk: int, size: int) -> np.ndarray:
    idx = np.searchsorted(cdf, uniforms(seed, chunk, size), side="right")
    return np.bincount(idx, minlength=len(cdf))


def sample_outcomes(povm: Povm, psi: Ket, n: int, seed: int, workers: int = 1) -> SampleReport:
    """Draw ``n`` i.i.d. outcomes of measuring ``povm`` on ``psi``.

    ``workers > 1`` spreads chunks over threads; the result is identical.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not 0 <= seed < _SEED_MAX:
        raise ValueError("seed must be an unsigned 64-bit integer")
    probs = outcome_probabilities(povm, psi)
    p = np.array([v for _, v in probs])
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    sizes = [min(CHUNK_SIZE, n - start) for start in range(0, n, CHUNK_SIZE)]
    jobs = [(cdf, seed, c, size) for c, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _chunk_counts(*job), jobs))
    else:
        parts = [_chunk_counts(*job) for job in jobs]
    counts = np.sum(parts, axis=0)
    return SampleReport(
        labels=tuple(lab for lab, _ in probs),
        counts=tuple(int(c) for c in counts),
        n=n,
        seed=seed,
        probabilities=tuple(float(v) for v in p),
    )

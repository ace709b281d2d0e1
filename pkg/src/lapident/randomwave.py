"""Gaussian random-wave surrogate for eigenvector coordinates and its unsigned features."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import min_pairwise_distance, unsigned_features


@dataclass(frozen=True)
class WaveEnsemble:
    n: int
    M: int
    g: np.ndarray
    seed: int

    def sanity_ok(self) -> bool:
        """Per-coordinate mean within 4/sqrt(n) of 0 and variance within 4 sqrt(2/n) of 1."""
        mean = self.g.mean(axis=0)
        var = self.g.var(axis=0)
        return bool(np.all(np.abs(mean) <= 4 / math.sqrt(self.n)) and np.all(np.abs(var - 1) <= 4 * math.sqrt(2 / self.n)))


def sample_ensemble(n: int, M: int, seed: int) -> WaveEnsemble:
    if n < 1 or M < 1:
        raise ValueError("n and M must be >= 1")
    rng = np.random.default_rng(seed)
    return WaveEnsemble(n, M, rng.standard_normal((n, M)), seed)


def chi(ensemble: WaveEnsemble | np.ndarray) -> np.ndarray:
    """Per-node squares then absolute pairwise products, width M + M(M-1)/2."""
    g = ensemble.g if isinstance(ensemble, WaveEnsemble) else np.asarray(ensemble, dtype=float)
    return unsigned_features(g)


@dataclass(frozen=True)
class SmallBallPoint:
    M: int
    eps: float
    trials: int
    collision_prob: float
    stderr: float


def smallball_estimate(M: int, eps_grid, pair_trials: int, seed: int, chunk: int = 200_000) -> list[SmallBallPoint]:
    """Estimate P(|chi(u) - chi(v)| <= eps) over independent pairs of wave vectors.

    Chunk c draws from the stream seeded by (seed, M, c), so the answer does
    not depend on how the pairs are batched beyond ``chunk`` itself.
    """
    eps = np.asarray(list(eps_grid), dtype=float)
    hits = np.zeros(eps.size, dtype=np.int64)
    done = 0
    c = 0
    while done < pair_trials:
        size = min(chunk, pair_trials - done)
        rng = np.random.default_rng([seed, M, c])
        gu = rng.standard_normal((size, M))
        gv = rng.standard_normal((size, M))
        dist = np.linalg.norm(chi(gu) - chi(gv), axis=1)
        hits += (dist[:, None] <= eps[None, :]).sum(axis=0)
        done += size
        c += 1
    out = []
    for e, h in zip(eps, hits):
        p = h / pair_trials
        out.append(SmallBallPoint(M, float(e), pair_trials, float(p), math.sqrt(p * (1 - p) / pair_trials)))
    return out


@dataclass(frozen=True)
class SeparationSample:
    n: int
    M: int
    trial: int
    min_sep: float
    collisions: int


def _collisions(X: np.ndarray) -> int:
    _, counts = np.unique(X, axis=0, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def min_separation_scaling(n_grid, C: float, trials: int, seed: int) -> list[SeparationSample]:
    """Exhaustive min pairwise chi-separation with M = ceil(C log2 n), per n and trial."""
    out = []
    for n in n_grid:
        M = max(1, math.ceil(C * math.log2(n)))
        for trial in range(trials):
            ens = sample_ensemble(n, M, np.random.SeedSequence([seed, n, trial]).generate_state(1)[0])
            X = chi(ens)
            out.append(SeparationSample(n, M, trial, min_pairwise_distance(X), _collisions(X)))
    return out


def fitted_alpha(samples: list[SeparationSample]) -> float:
    """Slope alpha in median min-sep ~ n^-alpha, by least squares on log-log medians."""
    ns = sorted({s.n for s in samples})
    if len(ns) < 2:
        return math.nan
    med = [np.median([s.min_sep for s in samples if s.n == n]) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(med), 1)[0]
    return float(-slope)

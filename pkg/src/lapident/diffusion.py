"""Heat kernels, diffusion distances and the radial heat kernel of the r-regular tree."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

from .graph import Graph, distances_from
from .spectral import SpectralDecomposition


class DiffusionError(ValueError):
    pass


def _check_time(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise DiffusionError(f"diffusion time must be positive, got {t}")
    return t


def _require_full(dec: SpectralDecomposition) -> None:
    if not dec.is_full:
        raise DiffusionError(f"needs all {dec.n} eigenpairs, decomposition holds {dec.count}")


@dataclass(frozen=True)
class HeatKernel:
    t: float
    values: np.ndarray


def heat_kernel(dec: SpectralDecomposition, t: float) -> HeatKernel:
    """K_t = sum_j exp(-t lambda_j) phi_j phi_j^T over the full spectrum."""
    t = _check_time(t)
    _require_full(dec)
    V = dec.vectors
    K = (V * np.exp(-t * dec.values)) @ V.T
    return HeatKernel(t, 0.5 * (K + K.T))


def _diffusion_sq_spectral(dec: SpectralDecomposition, t: float, U, W) -> np.ndarray:
    # nonzero modes only: index 0 is the constant mode of a connected graph
    w = np.exp(-2.0 * t * dec.values[1:])
    diff = dec.vectors[U, 1:] - dec.vectors[W, 1:]
    return (diff**2) @ w


def diffusion_distance(dec: SpectralDecomposition, t: float, u: int, v: int) -> float:
    t = _check_time(t)
    _require_full(dec)
    return float(math.sqrt(max(_diffusion_sq_spectral(dec, t, [u], [v])[0], 0.0)))


def diffusion_distances(dec: SpectralDecomposition, t: float, sources, targets=None) -> np.ndarray:
    """Matrix of full diffusion distances, rows ``sources`` and columns ``targets``."""
    t = _check_time(t)
    _require_full(dec)
    sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
    targets = np.arange(dec.n) if targets is None else np.atleast_1d(np.asarray(targets, dtype=np.int64))
    F = dec.vectors[:, 1:] * np.exp(-t * dec.values[1:])
    S, T = F[sources], F[targets]
    sq = (S**2).sum(1)[:, None] + (T**2).sum(1)[None, :] - 2.0 * S @ T.T
    return np.sqrt(np.maximum(sq, 0.0))


def kernel_identity_sq(K2t: HeatKernel, u: int, v: int) -> float:
    """k_2t(u,u) + k_2t(v,v) - 2 k_2t(u,v), given the kernel at time 2t."""
    K = K2t.values
    return float(K[u, u] + K[v, v] - 2.0 * K[u, v])


@dataclass(frozen=True)
class DiffusionEmbedding:
    t: float
    m: int
    coords: np.ndarray

    def distance(self, u: int, v: int) -> float:
        return float(np.linalg.norm(self.coords[u] - self.coords[v]))


def diffusion_embedding(dec: SpectralDecomposition, t: float, m: int) -> DiffusionEmbedding:
    """Coordinates exp(-t lambda_j) phi_j(v) for the first m nonzero modes."""
    t = _check_time(t)
    if not 1 <= m <= dec.n - 1:
        raise DiffusionError(f"m must be in [1, {dec.n - 1}], got {m}")
    if dec.count < m + 1:
        raise DiffusionError(f"need {m + 1} eigenpairs, decomposition holds {dec.count}")
    coords = dec.vectors[:, 1 : m + 1] * np.exp(-t * dec.values[1 : m + 1])
    return DiffusionEmbedding(t, m, coords)


# --- radial kernel of the infinite r-regular tree ---------------------------

def shell_sizes(r: int, d_max: int) -> np.ndarray:
    d = np.arange(d_max + 1)
    sizes = r * (r - 1.0) ** np.maximum(d - 1, 0)
    sizes[0] = 1.0
    return sizes


def radial_walk_laws(r: int, steps: int) -> np.ndarray:
    """Row s holds the law of the distance from the root after s steps of simple random walk.

    Row length is ``steps + 1``; the walk cannot get further than that.
    """
    q = np.zeros((steps + 1, steps + 2))
    q[0, 0] = 1.0
    up, down = (r - 1) / r, 1.0 / r
    for s in range(steps):
        prev, nxt = q[s], q[s + 1]
        nxt[0] = down * prev[1]
        # the root sends all of its mass outward
        nxt[1] = prev[0] + down * prev[2]
        nxt[2:-1] = up * prev[1:-2] + down * prev[3:]
        nxt[-1] = up * prev[-2]
    return q[:, : steps + 1]


def poisson_terms(t: float, tail_eps: float) -> int:
    """Smallest s with P(Poisson(t) > s) < tail_eps."""
    s = int(poisson.ppf(1.0 - tail_eps, t))
    while poisson.sf(s, t) >= tail_eps:
        s += 1
    return s


def _poissonized_vertex_kernel(r: int, t: float, d_max: int, tail_eps: float) -> tuple[np.ndarray, float]:
    steps = max(poisson_terms(t, tail_eps), d_max + 2)
    q = radial_walk_laws(r, steps)
    weights = poisson.pmf(np.arange(steps + 1), t)
    shell_law = weights @ q
    per_vertex = shell_law[: d_max + 1] / shell_sizes(r, d_max)
    return per_vertex, float(poisson.sf(steps, t))


@dataclass(frozen=True)
class TreeKernelTable:
    r: int
    t: float
    d_max: int
    tail_eps: float
    p: np.ndarray
    p2t: np.ndarray
    kappa: float
    psi: np.ndarray
    series_tail: float

    def shell_mass(self) -> float:
        return float(self.p @ shell_sizes(self.r, self.d_max))

    def monotone_horizon(self) -> int:
        """Largest d such that psi[0..d] is strictly increasing in float64."""
        steps = np.diff(self.psi) > 0
        bad = np.flatnonzero(~steps)
        return int(bad[0]) if bad.size else self.d_max


def tree_radial_kernel(r: int, t: float, d_max: int, tail_eps: float = 1e-12) -> TreeKernelTable:
    """Heat kernel k_t(o, x) on the infinite r-regular tree as a function of d(o, x).

    The continuous-time walk is the discrete radial walk subordinated to a
    Poisson(t) clock; the Poisson sum is cut where the remaining mass drops
    below ``tail_eps`` (and never before ``d_max + 2`` terms so every
    tabulated distance gets its leading term). The same is done at time 2t
    to get kappa and psi.
    """
    if int(r) != r or r < 3:
        raise DiffusionError(f"degree must be an integer >= 3, got {r}")
    t = _check_time(t)
    if int(d_max) != d_max or d_max < 1:
        raise DiffusionError(f"d_max must be an integer >= 1, got {d_max}")
    if not 0 < tail_eps <= 1e-3:
        raise DiffusionError(f"tail_eps must be in (0, 1e-3], got {tail_eps}")
    p, tail = _poissonized_vertex_kernel(r, t, d_max, tail_eps)
    p2t, tail2 = _poissonized_vertex_kernel(r, 2 * t, d_max, tail_eps)
    kappa = float(p2t[0])
    psi = np.sqrt(np.maximum(2.0 * (kappa - p2t), 0.0))
    return TreeKernelTable(int(r), t, int(d_max), tail_eps, p, p2t, kappa, psi, max(tail, tail2))


def psi_link(table: TreeKernelTable, d: int) -> float:
    if int(d) != d or not 0 <= d <= table.d_max:
        raise DiffusionError(f"d must be an integer in [0, {table.d_max}], got {d}")
    return float(table.psi[int(d)])


def default_d_max(n: int, r: int) -> int:
    return 2 * math.ceil(math.log(n) / math.log(r - 1))


def tree_stability_check(
    g: Graph,
    dec: SpectralDecomposition,
    t: float,
    R: int,
    samples: int,
    seed: int,
    table: TreeKernelTable | None = None,
) -> float:
    """Max |d_t(u, v) - psi(d(u, v))| over sampled pairs at hop distance <= R.

    u is uniform; v is uniform over the radius-R ball around u.
    """
    r = g.regular_degree()
    if r is None:
        raise DiffusionError("stability check needs a regular graph")
    if table is None:
        table = tree_radial_kernel(r, t, max(R, 1))
    if R > table.d_max:
        raise DiffusionError(f"R={R} beyond tabulated d_max={table.d_max}")
    rng = np.random.default_rng(seed)
    us = rng.integers(g.n, size=samples)
    D = distances_from(g, us)
    worst = 0.0
    for row, u in zip(D, us):
        near = np.flatnonzero((row >= 0) & (row <= R))
        v = int(near[rng.integers(near.size)])
        dt = diffusion_distance(dec, t, int(u), v)
        worst = max(worst, abs(dt - table.psi[row[v]]))
    return worst

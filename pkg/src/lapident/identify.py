"""Source identification from hop-distance observations.

Two decoders are compared on the same random contexts:

* ``WL``: the best any 1-WL-bounded encoder can do. Nodes with equal
  hop-distance keys to the context anchors are indistinguishable, so the
  optimal rule guesses uniformly inside the bucket of the observed key.
* ``LAP``: map each hop count through the tree link psi, trilaterate the
  source in the truncated diffusion embedding from the first m+1 anchors,
  and decode to the nearest node.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .diffusion import DiffusionEmbedding, TreeKernelTable, diffusion_distances, diffusion_embedding, tree_radial_kernel
from .graph import Graph, all_pairs_distances, bfs_distances, distances_from, generate_random_regular
from .spectral import SpectralDecomposition, graph_spectrum
from .trilateration import AffineDependenceError, anchors_from_embedding, decode_nearest, trilaterate

MAX_RESAMPLES = 20


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class ContextSet:
    anchors: tuple[int, ...]
    observations: tuple[int, ...]
    # kept for scoring only; decoders never read it
    hidden: int

    @property
    def k(self) -> int:
        return len(self.anchors)


def sample_context(g: Graph, k: int, seed, distances: np.ndarray | None = None) -> ContextSet:
    """Hidden source and k anchors drawn i.i.d. uniform (with replacement)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    rng = _rng(seed)
    v0 = int(rng.integers(g.n))
    anchors = rng.integers(g.n, size=k)
    row = distances[v0] if distances is not None else bfs_distances(g, v0)
    return ContextSet(tuple(anchors.tolist()), tuple(row[anchors].tolist()), v0)


def resample_anchors(g: Graph, ctx: ContextSet, rng, distances: np.ndarray | None = None) -> ContextSet:
    anchors = _rng(rng).integers(g.n, size=ctx.k)
    row = distances[ctx.hidden] if distances is not None else bfs_distances(g, ctx.hidden)
    return ContextSet(tuple(anchors.tolist()), tuple(row[anchors].tolist()), ctx.hidden)


@dataclass(frozen=True)
class BucketPartition:
    """Nodes grouped by their vector of hop distances to the anchors."""

    keys: np.ndarray
    labels: np.ndarray
    sizes: np.ndarray

    @property
    def n(self) -> int:
        return self.keys.shape[0]

    @property
    def n_buckets(self) -> int:
        return self.sizes.size

    @property
    def singletons(self) -> int:
        return int(np.sum(self.sizes == 1))

    @property
    def exp_inv_bucket(self) -> float:
        """E[1/|bucket(v0)|] for uniform v0, which equals #buckets / n."""
        return self.n_buckets / self.n

    @property
    def singleton_fraction(self) -> float:
        return self.singletons / self.n

    @cached_property
    def buckets(self) -> dict[tuple[int, ...], tuple[int, ...]]:
        out: dict[tuple[int, ...], list[int]] = {}
        for u, key in enumerate(map(tuple, self.keys.tolist())):
            out.setdefault(key, []).append(u)
        return {key: tuple(v) for key, v in out.items()}

    def members(self, key) -> np.ndarray:
        key = np.asarray(key, dtype=self.keys.dtype)
        if self.keys.shape[1] == 0:
            return np.arange(self.n)
        return np.flatnonzero((self.keys == key).all(axis=1))


def build_buckets(g: Graph, anchors, distances: np.ndarray | None = None) -> BucketPartition:
    anchors = [int(a) for a in anchors]
    D = distances[anchors] if distances is not None else distances_from(g, anchors)
    keys = np.ascontiguousarray(D.T)
    if keys.shape[1] == 0:
        return BucketPartition(keys, np.zeros(g.n, dtype=np.int64), np.array([g.n]))
    _, labels, sizes = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    return BucketPartition(keys, labels.ravel(), sizes)


def wl_trial(g: Graph, ctx: ContextSet, rng, partition: BucketPartition | None = None) -> tuple[int, bool]:
    """Bayes-optimal WL-bounded guess: uniform over the bucket matching the observations."""
    if partition is None:
        partition = build_buckets(g, ctx.anchors)
    members = partition.members(ctx.observations)
    guess = int(members[_rng(rng).integers(members.size)])
    return guess, guess == ctx.hidden


@dataclass(frozen=True)
class LapOutcome:
    guess: int
    correct: bool
    margin: float
    sigma_min: float
    residuals: np.ndarray
    tail_energy: float
    clamped: bool
    anchors_used: tuple[int, ...]


def lap_trial(
    g: Graph,
    dec: SpectralDecomposition,
    table: TreeKernelTable,
    ctx: ContextSet,
    m: int,
    t: float,
    embedding: DiffusionEmbedding | None = None,
    radii: str = "proxy",
) -> LapOutcome:
    """Anchor trilateration decoder on the first m+1 context points.

    ``radii="proxy"`` feeds psi(hop count); ``radii="exact"`` feeds the true
    full diffusion distance to the hidden node (an oracle ablation that needs
    the full spectrum). Raises AffineDependenceError for degenerate anchors.
    """
    if ctx.k < m + 1:
        raise ValueError(f"need at least m+1={m + 1} context points, got {ctx.k}")
    if embedding is None:
        embedding = diffusion_embedding(dec, t, m)
    anchors = ctx.anchors[: m + 1]
    anchor_set = anchors_from_embedding(embedding, anchors)
    if radii == "proxy":
        obs = ctx.observations[: m + 1]
        if max(obs) > table.d_max:
            raise ValueError(f"observed distance {max(obs)} beyond tabulated d_max={table.d_max}")
        rad = table.psi[list(obs)]
    elif radii == "exact":
        rad = diffusion_distances(dec, t, list(anchors), [ctx.hidden])[:, 0]
    else:
        raise ValueError(f"unknown radii mode {radii!r}")
    sol = trilaterate(anchor_set, rad)
    guess, margin = decode_nearest(embedding, sol.z)
    return LapOutcome(
        guess, guess == ctx.hidden, margin, anchor_set.sigma_min, sol.residuals, sol.tail_energy, sol.clamped, anchors
    )


def singleton_probability(g: Graph, k: int, trials: int, seed, distances: np.ndarray | None = None) -> float:
    """Monte Carlo over anchor draws of the exact conditional probability S/n."""
    if k == 0:
        return 0.0 if g.n >= 2 else 1.0
    rng = _rng(seed)
    total = 0.0
    for _ in range(trials):
        anchors = rng.integers(g.n, size=k)
        total += build_buckets(g, anchors, distances).singleton_fraction
    return total / trials


# --- separation experiment ---------------------------------------------------

@dataclass(frozen=True)
class SeparationConfig:
    n_values: tuple[int, ...] = (512, 1024, 2048)
    r: int = 3
    k_values: tuple[int, ...] = tuple(range(13))
    trials: int = 500
    seed: int = 0
    m: int = 8
    t: float = 1.0
    tail_eps: float = 1e-12
    radii: str = "proxy"

    def validate(self) -> list[str]:
        errors = []
        if not self.n_values:
            errors.append("n_values must be nonempty")
        if not self.k_values:
            errors.append("k_values must be nonempty")
        if any(k < 0 for k in self.k_values):
            errors.append("k_values must be >= 0")
        if self.r < 3:
            errors.append("r must be >= 3")
        if any((n * self.r) % 2 or n <= self.r for n in self.n_values):
            errors.append("every n must satisfy n > r and n*r even")
        if self.trials < 1:
            errors.append("trials must be >= 1")
        if self.m < 1 or any(self.m > n - 1 for n in self.n_values):
            errors.append("m must be in [1, n-1]")
        if not self.t > 0:
            errors.append("t must be positive")
        if not 0 < self.tail_eps <= 1e-3:
            errors.append("tail_eps must be in (0, 1e-3]")
        if self.radii not in ("proxy", "exact"):
            errors.append("radii must be 'proxy' or 'exact'")
        return errors


@dataclass
class CurvePoint:
    k: int
    trials: int
    accuracy: float
    acc_stderr: float
    exp_inv_bucket: float
    singleton_prob: float
    mean_margin: float
    degenerate_count: int


@dataclass
class SeparationCurve:
    n: int
    r: int
    method: str
    seed: int
    points: list[CurvePoint] = field(default_factory=list)

    def accuracy_at(self, k: int) -> float:
        return next(p.accuracy for p in self.points if p.k == k)

    def rows(self) -> list[dict]:
        return [
            {"method": self.method, "n": self.n, "r": self.r, **vars(p), "seed": self.seed}
            for p in self.points
        ]


CSV_COLUMNS = (
    "method", "n", "r", "k", "trials", "accuracy", "acc_stderr", "exp_inv_bucket",
    "singleton_prob", "mean_margin", "degenerate_count", "seed",
)


def graph_seed(seed: int, n: int) -> int:
    return int(np.random.SeedSequence([seed, n]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SeparationInstance:
    graph: Graph
    dec: SpectralDecomposition
    embedding: DiffusionEmbedding
    table: TreeKernelTable
    distances: np.ndarray


def prepare_instance(n: int, cfg: SeparationConfig) -> SeparationInstance:
    g = generate_random_regular(n, cfg.r, graph_seed(cfg.seed, n))
    count = n if cfg.radii == "exact" else cfg.m + 1
    dec = graph_spectrum(g, count)
    D = all_pairs_distances(g)
    table = tree_radial_kernel(cfg.r, cfg.t, max(int(D.max()), 1), cfg.tail_eps)
    return SeparationInstance(g, dec, diffusion_embedding(dec, cfg.t, cfg.m), table, D)


def _point(k, correct, inv_bucket, singles, margins, degenerate) -> CurvePoint:
    used = len(correct)
    acc = float(np.mean(correct)) if used else math.nan
    se = math.sqrt(acc * (1 - acc) / used) if used else math.nan
    return CurvePoint(
        k, used, acc, se, float(np.mean(inv_bucket)), float(np.mean(singles)),
        float(np.mean(margins)) if margins else math.nan, degenerate,
    )


def run_separation(cfg: SeparationConfig, instances: dict[int, SeparationInstance] | None = None) -> list[SeparationCurve]:
    """Accuracy of both decoders over the (n, k) grid.

    Each (n, k, trial) has its own RNG stream seeded by (seed, n, k, trial),
    and both decoders see the same context. Below k = m+1 the LAP decoder
    has too few anchors and falls back to a uniform guess.
    """
    errors = cfg.validate()
    if errors:
        raise ValueError("; ".join(errors))
    curves = []
    for n in cfg.n_values:
        inst = instances[n] if instances and n in instances else prepare_instance(n, cfg)
        wl = SeparationCurve(n, cfg.r, "WL", cfg.seed)
        lap = SeparationCurve(n, cfg.r, "LAP", cfg.seed)
        for k in cfg.k_values:
            wl_correct, lap_correct, inv_bucket, singles, margins = [], [], [], [], []
            degenerate = 0
            for trial in range(cfg.trials):
                rng = np.random.default_rng([cfg.seed, n, k, trial])
                ctx = sample_context(inst.graph, k, rng, inst.distances)
                part = build_buckets(inst.graph, ctx.anchors, inst.distances)
                inv_bucket.append(part.exp_inv_bucket)
                singles.append(part.singleton_fraction)
                wl_correct.append(wl_trial(inst.graph, ctx, rng, part)[1])
                if k < cfg.m + 1:
                    lap_correct.append(int(rng.integers(n)) == ctx.hidden)
                    continue
                outcome = None
                for _ in range(MAX_RESAMPLES + 1):
                    try:
                        outcome = lap_trial(
                            inst.graph, inst.dec, inst.table, ctx, cfg.m, cfg.t, inst.embedding, cfg.radii
                        )
                        break
                    except AffineDependenceError:
                        ctx = resample_anchors(inst.graph, ctx, rng, inst.distances)
                if outcome is None:
                    degenerate += 1
                    continue
                lap_correct.append(outcome.correct)
                margins.append(outcome.margin)
            wl.points.append(_point(k, wl_correct, inv_bucket, singles, [], 0))
            lap.points.append(_point(k, lap_correct, inv_bucket, singles, margins, degenerate))
        curves += [wl, lap]
    return curves


def plateau_k(curve: SeparationCurve, level: float = 0.9) -> int | None:
    """Smallest k at which the curve reaches ``level``."""
    for p in sorted(curve.points, key=lambda p: p.k):
        if p.accuracy >= level:
            return p.k
    return None


def exhaustive_wl_accuracy(g: Graph, anchors, distances: np.ndarray | None = None):
    """Exact accuracy of the uniform-in-bucket rule, summed over every source and every guess.

    Returned as a Fraction so it can be compared with #buckets / n exactly.
    """
    part = build_buckets(g, anchors, distances)
    total = Fraction(0)
    for v0 in range(g.n):
        members = part.members(part.keys[v0])
        total += sum(Fraction(1, members.size) for w in members if w == v0)
    return total / g.n


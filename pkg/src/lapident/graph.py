"""Simple undirected graphs: generation, edge-list I/O and hop-distance queries."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

UNREACHABLE = -1


class GraphError(ValueError):
    """Raised for malformed graphs or violated graph preconditions."""


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    r_hint: int | None = None

    def __post_init__(self):
        if self.n < 1 or len(self.adjacency) != self.n:
            raise GraphError("adjacency length must equal n >= 1")
        for u, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError(f"node {u}: neighbor list must be sorted and duplicate-free")
            for v in nbrs:
                if v == u:
                    raise GraphError(f"self-loop at node {u}")
                if not 0 <= v < self.n:
                    raise GraphError(f"node {u}: neighbor {v} out of range")
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u not in self.adjacency[v]:
                    raise GraphError(f"asymmetric adjacency between {u} and {v}")
        if self.r_hint is not None and any(len(a) != self.r_hint for a in self.adjacency):
            raise GraphError(f"r_hint={self.r_hint} but degrees differ")

    @classmethod
    def from_edges(cls, n: int, edges, r_hint: int | None = None) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if v in nbrs[u]:
                raise GraphError(f"parallel edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs), r_hint)

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as (u, v) with u < v, in lexicographic order."""
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for u, nbrs in enumerate(self.adjacency):
            A[u, list(nbrs)] = 1.0
        return A

    def regular_degree(self) -> int | None:
        """The common degree if the graph is regular, else None."""
        if self.r_hint is not None:
            return self.r_hint
        deg = self.degrees()
        return int(deg[0]) if np.all(deg == deg[0]) else None


def _pairing_attempt(n: int, r: int, rng: np.random.Generator):
    stubs = rng.permutation(np.repeat(np.arange(n), r)).reshape(-1, 2)
    u = stubs.min(axis=1)
    v = stubs.max(axis=1)
    if np.any(u == v):
        return None
    codes = u.astype(np.int64) * n + v
    if np.unique(codes).size != codes.size:
        return None
    return list(zip(u.tolist(), v.tolist()))


def generate_random_regular(n: int, r: int, seed: int, max_restarts: int | None = None) -> Graph:
    """Sample a connected simple r-regular graph with the pairing model.

    Any pairing with a self-loop, a repeated edge or more than one component
    is thrown away and the whole pairing is redrawn. The result depends only
    on ``(n, r, seed)``.
    """
    if n < 1:
        raise GraphError("n must be positive")
    if r < 3:
        raise GraphError(f"degree must be >= 3, got {r}")
    if (n * r) % 2:
        raise GraphError(f"n*r must be even (n={n}, r={r})")
    if r >= n:
        raise GraphError(f"need r < n (n={n}, r={r})")
    if max_restarts is None:
        # simple pairings are rare for dense small cases, e.g. (6, 5) accepts ~5e-4
        max_restarts = 100_000
    rng = np.random.default_rng(np.random.SeedSequence(int(seed) & (2**64 - 1)))
    for _ in range(max_restarts + 1):
        edges = _pairing_attempt(n, r, rng)
        if edges is None:
            continue
        g = Graph.from_edges(n, edges, r_hint=r)
        if is_connected(g):
            return g
    raise GraphError(f"no simple connected {r}-regular graph on {n} nodes after {max_restarts} restarts")


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes get ``UNREACHABLE``."""
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} out of range")
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in adj[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = du
                queue.append(v)
    return dist


def distances_from(g: Graph, sources) -> np.ndarray:
    """Stack of BFS distance rows, one per source (duplicates allowed)."""
    sources = [int(s) for s in sources]
    rows = {s: bfs_distances(g, s) for s in set(sources)}
    if not sources:
        return np.zeros((0, g.n), dtype=np.int64)
    return np.stack([rows[s] for s in sources])


def all_pairs_distances(g: Graph) -> np.ndarray:
    return distances_from(g, range(g.n))


def is_connected(g: Graph) -> bool:
    return bool(np.all(bfs_distances(g, 0) != UNREACHABLE))


def diameter(g: Graph) -> int:
    best = 0
    for s in range(g.n):
        d = bfs_distances(g, s)
        if np.any(d == UNREACHABLE):
            raise GraphError("diameter undefined: graph is disconnected")
        best = max(best, int(d.max()))
    return best


def ball(g: Graph, v: int, radius: int) -> np.ndarray:
    d = bfs_distances(g, v)
    return np.flatnonzero((d != UNREACHABLE) & (d <= radius))


def ball_is_tree(g: Graph, v: int, radius: int) -> bool:
    """Whether the subgraph induced on the radius ball around ``v`` is acyclic."""
    if radius < 0:
        raise GraphError("radius must be >= 0")
    nodes = ball(g, v, radius)
    inside = np.zeros(g.n, dtype=bool)
    inside[nodes] = True
    # each internal edge is seen from both endpoints
    twice_edges = sum(int(inside[list(g.adjacency[u])].sum()) for u in nodes)
    return twice_edges // 2 == nodes.size - 1


def treelike_radius(n: int, r: int, slack: float = 0.1) -> int:
    """floor((1/2 - slack) * log n / log(r - 1)), the locally-treelike window."""
    return int(math.floor((0.5 - slack) * math.log(n) / math.log(r - 1)))


# --- edge-list files -------------------------------------------------------

def format_edgelist(g: Graph) -> str:
    r = g.regular_degree() or 0
    lines = [f"{g.n} {r}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def write_edgelist(g: Graph, path) -> None:
    Path(path).write_bytes(format_edgelist(g).encode("ascii"))


def parse_edgelist(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphError("empty edge-list")
    try:
        n, r = (int(x) for x in lines[0].split())
        edges = []
        for ln in lines[1:]:
            u, v = (int(x) for x in ln.split())
            edges.append((u, v))
    except ValueError as exc:
        raise GraphError(f"malformed edge-list: {exc}") from None
    return Graph.from_edges(n, edges, r_hint=r or None)


def read_edgelist(path) -> Graph:
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise GraphError(f"cannot read {path}: {exc}") from None
    return parse_edgelist(text)


# --- small named graphs used across tests and examples ----------------------

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], r_hint=2)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], r_hint=n - 1)

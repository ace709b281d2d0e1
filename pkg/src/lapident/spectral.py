"""Normalized Laplacian spectra and the unsigned Laplacian positional encoding."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
from scipy.spatial.distance import pdist

from .graph import Graph, GraphError

log = logging.getLogger(__name__)

GROUP_TOL = 1e-8


class SpectralError(ValueError):
    pass


def normalized_laplacian(g: Graph) -> np.ndarray:
    """I - D^{-1/2} A D^{-1/2}; exactly I - A/r when the graph is r-regular."""
    deg = g.degrees()
    if np.any(deg == 0):
        raise GraphError("normalized Laplacian needs every node to have a neighbor")
    A = g.adjacency_matrix()
    r = g.regular_degree()
    if r is not None:
        return np.eye(g.n) - A / r
    inv_sqrt = 1.0 / np.sqrt(deg.astype(float))
    return np.eye(g.n) - inv_sqrt[:, None] * A * inv_sqrt[None, :]


def _eigen_groups(values: np.ndarray, tol: float) -> tuple[tuple[int, int], ...]:
    groups = []
    start = 0
    for i in range(1, values.size):
        if values[i] - values[i - 1] > tol:
            groups.append((start, i))
            start = i
    groups.append((start, values.size))
    return tuple(groups)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Smallest eigenpairs of a symmetric matrix, ascending.

    ``vectors[:, j]`` is the eigenvector of ``values[j]``. ``groups`` holds
    half-open index ranges of numerically equal eigenvalues; the order of
    vectors inside a group carries no meaning. ``n`` is the matrix size, so
    ``is_full`` tells whether every eigenpair was retained.
    """

    values: np.ndarray
    vectors: np.ndarray
    groups: tuple[tuple[int, int], ...]
    group_tol: float = GROUP_TOL
    matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def is_full(self) -> bool:
        return self.count == self.n

    def group_of(self, index: int) -> tuple[int, int]:
        for lo, hi in self.groups:
            if lo <= index < hi:
                return lo, hi
        raise IndexError(index)

    def residuals(self, L: np.ndarray | None = None) -> np.ndarray:
        L = self.matrix if L is None else L
        if L is None:
            raise SpectralError("no matrix attached to compute residuals against")
        R = L @ self.vectors - self.vectors * self.values
        return np.linalg.norm(R, axis=0)

    def orthonormality_error(self) -> float:
        G = self.vectors.T @ self.vectors
        return float(np.abs(G - np.eye(self.count)).max())


def eigendecompose(L: np.ndarray, count: int | None = None, group_tol: float = GROUP_TOL) -> SpectralDecomposition:
    """The ``count`` smallest eigenpairs of symmetric ``L`` via a dense solver.

    Eigenvalues closer than ``group_tol * max(1, spectral range)`` are placed
    in one group.
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    if L.ndim != 2 or L.shape[1] != n:
        raise SpectralError("matrix must be square")
    if count is None:
        count = n
    if not 1 <= count <= n:
        raise SpectralError(f"count must be in [1, {n}], got {count}")
    if np.abs(L - L.T).max() > 1e-12:
        raise SpectralError("matrix is not symmetric within 1e-12")
    try:
        if count == n:
            values, vectors = scipy.linalg.eigh(L)
        else:
            values, vectors = scipy.linalg.eigh(L, subset_by_index=[0, count - 1])
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigensolver failed to converge: {exc}") from None
    spread = max(1.0, float(values[-1] - values[0]))
    groups = _eigen_groups(values, group_tol * spread)
    return SpectralDecomposition(values, vectors, groups, group_tol, L)


def graph_spectrum(g: Graph, count: int | None = None) -> SpectralDecomposition:
    return eigendecompose(normalized_laplacian(g), count)


def apply_sign_flips(dec: SpectralDecomposition, signs) -> SpectralDecomposition:
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (dec.count,) or not np.all(np.abs(signs) == 1):
        raise SpectralError("signs must hold one +1/-1 per eigenvector")
    return replace(dec, vectors=dec.vectors * signs)


def apply_subspace_rotation(dec: SpectralDecomposition, group: tuple[int, int], Q) -> SpectralDecomposition:
    """Replace the eigenvectors in index range ``group`` by their image under ``Q``."""
    lo, hi = group
    Q = np.asarray(Q, dtype=float)
    if not 0 <= lo < hi <= dec.count:
        raise SpectralError(f"bad group range {group}")
    if Q.shape != (hi - lo, hi - lo):
        raise SpectralError(f"Q must be {hi - lo}x{hi - lo}")
    if np.abs(Q.T @ Q - np.eye(hi - lo)).max() > 1e-10:
        raise SpectralError("Q is not orthogonal within 1e-10")
    glo, ghi = dec.group_of(lo)
    if hi > ghi:
        raise SpectralError(f"range {group} spans distinct eigenvalues")
    vectors = dec.vectors.copy()
    vectors[:, lo:hi] = dec.vectors[:, lo:hi] @ Q
    return replace(dec, vectors=vectors)


def random_orthogonal(size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix)."""
    Z = rng.standard_normal((size, size))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


@dataclass(frozen=True)
class PositionalEncoding:
    """Per-node rows ``(lambda_1..lambda_M, s_1..s_M, u_12..u_{M-1,M})``."""

    M: int
    values: np.ndarray

    @property
    def eigenvalue_block(self) -> np.ndarray:
        return self.values[:, : self.M]

    @property
    def s_block(self) -> np.ndarray:
        return self.values[:, self.M : 2 * self.M]

    @property
    def u_block(self) -> np.ndarray:
        return self.values[:, 2 * self.M :]

    def column_names(self) -> list[str]:
        return pe_column_names(self.M)


def pe_dimension(M: int) -> int:
    return 2 * M + M * (M - 1) // 2


def pe_column_names(M: int) -> list[str]:
    names = [f"lambda_{i}" for i in range(1, M + 1)]
    names += [f"s_{i}" for i in range(1, M + 1)]
    names += [f"u_{j}_{k}" for j in range(1, M + 1) for k in range(j + 1, M + 1)]
    return names


def unsigned_features(phi: np.ndarray) -> np.ndarray:
    """Squares then absolute pairwise products (j < j') of each row of ``phi``."""
    phi = np.atleast_2d(phi)
    M = phi.shape[1]
    j, k = np.triu_indices(M, 1)
    return np.hstack([phi**2, np.abs(phi[:, j] * phi[:, k])])


def build_psi(dec: SpectralDecomposition, M: int) -> PositionalEncoding:
    """Unsigned positional encoding from the M smallest nonzero eigenpairs.

    Index 0 (the constant mode) is skipped.
    """
    if M < 1:
        raise SpectralError("M must be >= 1")
    if M > dec.n - 1:
        log.warning("M=%d exceeds the %d nonzero eigenpairs; clamping", M, dec.n - 1)
        M = dec.n - 1
    if dec.count < M + 1:
        raise SpectralError(f"need {M + 1} eigenpairs, decomposition holds {dec.count}")
    phi = dec.vectors[:, 1 : M + 1]
    lam = np.broadcast_to(dec.values[1 : M + 1], (dec.n, M))
    return PositionalEncoding(M, np.hstack([lam, unsigned_features(phi)]))


def min_pairwise_separation(pe: PositionalEncoding | np.ndarray) -> float:
    X = pe.values if isinstance(pe, PositionalEncoding) else np.asarray(pe)
    if X.shape[0] < 2:
        raise SpectralError("need at least two nodes")
    return min_pairwise_distance(X)


def min_pairwise_distance(X: np.ndarray) -> float:
    """Exhaustive minimum Euclidean distance over unordered row pairs."""
    return float(pdist(np.asarray(X, dtype=float)).min())

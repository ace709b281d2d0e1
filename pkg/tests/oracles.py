"""Independent reference computations used by the tests."""

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.stats import poisson


def regular_tree(r: int, depth: int):
    """Depth-limited r-regular tree rooted at 0 as a sparse adjacency plus node depths."""
    parents, depths = [-1], [0]
    frontier = [0]
    for d in range(1, depth + 1):
        nxt = []
        for u in frontier:
            for _ in range(r if u == 0 else r - 1):
                parents.append(u)
                depths.append(d)
                nxt.append(len(parents) - 1)
        frontier = nxt
    child = np.arange(1, len(parents))
    par = np.array(parents[1:])
    n = len(parents)
    A = sp.coo_matrix((np.ones(2 * child.size), (np.r_[child, par], np.r_[par, child])), shape=(n, n)).tocsr()
    return A, np.array(depths)


def tree_depth_for(t: float, d_cmp: int, eps: float = 1e-10) -> int:
    """Smallest depth D such that leaving the tree and coming back to distance d_cmp costs < eps.

    A walk that exits past depth D and then lands at distance <= d_cmp needs
    at least 2(D+1) - d_cmp jumps.
    """
    D = d_cmp
    while poisson.sf(2 * (D + 1) - d_cmp - 1, t) >= eps:
        D += 1
    return D


def truncated_tree_kernel(r: int, t: float, d_cmp: int) -> tuple[np.ndarray, np.ndarray]:
    """Row of exp(-t (I - A/r)) at the root, on a tree deep enough for distances <= d_cmp.

    Leaves keep the 1/r normalization, so walks leaving the tree are killed.
    Returns (row, depths).
    """
    A, depths = regular_tree(r, tree_depth_for(t, d_cmp))
    e0 = np.zeros(A.shape[0])
    e0[0] = 1.0
    L = sp.identity(A.shape[0], format="csr") - A / r
    return expm_multiply(-t * L, e0), depths

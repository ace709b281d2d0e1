"""Recover a point from its distances to m+1 anchors by differencing sphere equations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .diffusion import DiffusionEmbedding

AFFINE_TOL = 1e-10
SOLVER_TOL = 1e-9


class AffineDependenceError(ValueError):
    def __init__(self, sigma_min: float, message: str | None = None):
        self.sigma_min = sigma_min
        super().__init__(message or f"anchors are affinely dependent (sigma_min={sigma_min:.3e})")


def build_system(points, radii) -> tuple[np.ndarray, np.ndarray]:
    """Rows 2(p_i - p_last) and b_i = |p_i|^2 - |p_last|^2 + r_last^2 - r_i^2."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    rad = np.asarray(radii, dtype=float).ravel()
    m = P.shape[1]
    if m < 1 or P.shape[0] != m + 1 or rad.size != m + 1:
        raise ValueError(f"need m+1 points in R^m and m+1 radii, got points {P.shape}, radii {rad.size}")
    sq = (P**2).sum(axis=1)
    A = 2.0 * (P[:-1] - P[-1])
    b = sq[:-1] - sq[-1] + rad[-1] ** 2 - rad[:-1] ** 2
    return A, b


def smallest_singular_value(A) -> float:
    return float(np.linalg.svd(np.atleast_2d(A), compute_uv=False).min())


def solve(A, b, affine_tol: float = AFFINE_TOL) -> np.ndarray:
    """Unique solution of A z = b by Householder QR."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    smin = smallest_singular_value(A)
    if not smin > affine_tol:
        raise AffineDependenceError(smin)
    Q, R = np.linalg.qr(A)
    return scipy.linalg.solve_triangular(R, Q.T @ b)


def tail_energy(z, point, radius: float) -> float:
    """radius^2 - |z - point|^2; may be negative under noisy radii."""
    z = np.asarray(z, dtype=float)
    point = np.asarray(point, dtype=float)
    return float(radius) ** 2 - float(np.sum((z - point) ** 2))


@dataclass(frozen=True)
class AnchorSet:
    anchors: tuple[int, ...]
    points: np.ndarray
    sigma_min: float

    @property
    def m(self) -> int:
        return self.points.shape[1]


def make_anchor_set(points, anchors=None, affine_tol: float = AFFINE_TOL) -> AnchorSet:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    anchors = tuple(range(P.shape[0])) if anchors is None else tuple(int(a) for a in anchors)
    if len(anchors) != P.shape[0] or P.shape[0] != P.shape[1] + 1:
        raise ValueError("need m+1 anchors with points in R^m")
    smin = smallest_singular_value(2.0 * (P[:-1] - P[-1]))
    if len(set(anchors)) != len(anchors) or not smin > affine_tol:
        raise AffineDependenceError(smin)
    return AnchorSet(anchors, P, smin)


def anchors_from_embedding(embedding: DiffusionEmbedding, anchors, affine_tol: float = AFFINE_TOL) -> AnchorSet:
    anchors = [int(a) for a in anchors]
    return make_anchor_set(embedding.coords[anchors], anchors, affine_tol)


@dataclass(frozen=True)
class TrilaterationSolution:
    z: np.ndarray
    tail_energy: float
    clamped: bool
    residuals: np.ndarray


def trilaterate(anchor_set: AnchorSet, radii) -> TrilaterationSolution:
    """Solve the linearized system, then read the common tail energy off the spheres.

    A zero radius pins the solution to that anchor.
    """
    A, b = build_system(anchor_set.points, radii)
    z = solve(A, b)
    rad = np.asarray(radii, dtype=float)
    zero = np.flatnonzero(rad == 0)
    if zero.size:
        # a radius-0 sphere is a single point
        z = anchor_set.points[zero[0]].copy()
    tails = np.array([tail_energy(z, p, ri) for p, ri in zip(anchor_set.points, rad)])
    tail = float(tails.mean())
    clamped = tail < 0
    if clamped:
        tail = 0.0
    head = ((anchor_set.points - z) ** 2).sum(axis=1)
    residuals = np.abs(head + tail - rad**2)
    return TrilaterationSolution(z, tail, clamped, residuals)


def decode_nearest(embedding: DiffusionEmbedding | np.ndarray, z) -> tuple[int, float]:
    """Nearest node to z and its lead over the runner-up; ties go to the smaller index."""
    X = embedding.coords if isinstance(embedding, DiffusionEmbedding) else np.asarray(embedding)
    d = np.linalg.norm(X - np.asarray(z, dtype=float), axis=1)
    best = int(np.argmin(d))
    if d.size == 1:
        return best, math.inf
    runner_up = np.partition(d, 1)[1]
    return best, float(runner_up - d[best])


@dataclass(frozen=True)
class PerturbationReport:
    max_error: float
    ratio: float
    bound: float


def perturbation_bound_check(
    anchor_set: AnchorSet, z_true, delta: float, trials: int, seed: int
) -> PerturbationReport:
    """Re-solve under radius noise uniform in [-delta, delta] and measure the damage.

    ``ratio`` is max |z_hat - z_true| / delta. ``bound`` is the a priori
    Lipschitz constant sqrt(m) (4 r_max + 2 delta) / sigma_min, obtained from
    |r_hat^2 - r^2| <= delta (2 r + delta) on each of the two radii entering b_i.
    """
    z_true = np.asarray(z_true, dtype=float)
    radii = np.linalg.norm(anchor_set.points - z_true, axis=1)
    m = anchor_set.m
    A, _ = build_system(anchor_set.points, radii)
    sigma = smallest_singular_value(A)
    bound = math.sqrt(m) * (4.0 * radii.max() + 2.0 * delta) / sigma
    if delta == 0:
        z = solve(*build_system(anchor_set.points, radii))
        return PerturbationReport(float(np.linalg.norm(z - z_true)), 0.0, bound)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        noisy = radii + rng.uniform(-delta, delta, size=radii.size)
        z = solve(*build_system(anchor_set.points, noisy))
        worst = max(worst, float(np.linalg.norm(z - z_true)))
    return PerturbationReport(worst, worst / delta, bound)

import math

import numpy as np
import pytest

from lapident.randomwave import (
    chi,
    fitted_alpha,
    min_separation_scaling,
    sample_ensemble,
    smallball_estimate,
)


def test_ensemble_reproducible_and_sane():
    a, b = sample_ensemble(2000, 5, 7), sample_ensemble(2000, 5, 7)
    assert np.array_equal(a.g, b.g)
    assert a.sanity_ok()


def test_chi_formulas():
    assert np.allclose(chi(np.array([[1.0, 2.0]])), [[1, 4, 2]])
    assert np.array_equal(chi(np.zeros((1, 3))), np.zeros((1, 6)))
    ens = sample_ensemble(10, 1, 0)
    assert np.allclose(chi(ens), ens.g**2)


def test_chi_sign_invariant(rng):
    g = rng.standard_normal((20, 4))
    flipped = g * rng.choice([-1, 1], size=4)
    assert np.array_equal(chi(g), chi(flipped))


def test_smallball_extremes():
    pts = smallball_estimate(3, [0.0, 10.0], 20000, 0)
    assert pts[0].collision_prob == 0
    assert pts[1].collision_prob > 0.9


def test_smallball_chunking_consistent():
    a = smallball_estimate(2, [0.3], 30000, 5, chunk=10000)
    b = smallball_estimate(2, [0.3], 30000, 5, chunk=10000)
    assert a == b


def test_smallball_decreasing_in_m():
    probs = [smallball_estimate(M, [0.5], 100_000, 1)[0] for M in (1, 2, 4)]
    for a, b in zip(probs, probs[1:]):
        assert a.collision_prob - b.collision_prob > 3 * math.hypot(a.stderr, b.stderr)


def test_min_separation_n2_positive():
    (s,) = min_separation_scaling([2], 1.0, 1, 0)
    assert s.M == 1 and s.min_sep > 0 and s.collisions == 0


def test_min_separation_shape():
    samples = min_separation_scaling([64, 128, 256], 1.0, 5, 0)
    assert {s.M for s in samples} == {6, 7, 8}
    assert all(s.min_sep > 0 for s in samples)
    assert math.isfinite(fitted_alpha(samples))

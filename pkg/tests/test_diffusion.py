import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lapident.diffusion import (
    DiffusionError,
    default_d_max,
    diffusion_distance,
    diffusion_distances,
    diffusion_embedding,
    heat_kernel,
    kernel_identity_sq,
    psi_link,
    radial_walk_laws,
    shell_sizes,
    tree_radial_kernel,
    tree_stability_check,
)
from lapident.graph import all_pairs_distances, complete_graph, cycle_graph, generate_random_regular, path_graph
from lapident.spectral import graph_spectrum
from oracles import truncated_tree_kernel


def test_two_node_heat_kernel():
    K = heat_kernel(graph_spectrum(path_graph(2)), 1.0).values
    assert K[0, 0] == pytest.approx((1 + math.exp(-2)) / 2, abs=1e-15)
    assert K[0, 1] == pytest.approx((1 - math.exp(-2)) / 2, abs=1e-15)


def test_heat_kernel_small_t_is_identity(corpus_graph):
    K = heat_kernel(graph_spectrum(corpus_graph), 1e-12).values
    assert np.allclose(K, np.eye(corpus_graph.n), atol=1e-10)


def test_heat_kernel_rows_sum_to_one_regular():
    g = generate_random_regular(30, 3, 1)
    K = heat_kernel(graph_spectrum(g), 0.7).values
    assert np.allclose(K.sum(axis=1), 1, atol=1e-12)


def test_heat_kernel_matches_expm():
    from scipy.linalg import expm

    from lapident.spectral import normalized_laplacian

    g = generate_random_regular(20, 4, 3)
    K = heat_kernel(graph_spectrum(g), 1.3).values
    assert np.allclose(K, expm(-1.3 * normalized_laplacian(g)), atol=1e-12)


@pytest.mark.parametrize("t", [0.0, -1.0, float("nan")])
def test_bad_time_rejected(t):
    with pytest.raises(DiffusionError):
        heat_kernel(graph_spectrum(complete_graph(4)), t)


def test_partial_spectrum_rejected():
    g = generate_random_regular(20, 3, 0)
    with pytest.raises(DiffusionError):
        heat_kernel(graph_spectrum(g, 5), 1.0)


@pytest.mark.parametrize("t", [0.1, 1.0, 3.0])
def test_k4_diffusion_distance(t):
    dec = graph_spectrum(complete_graph(4))
    for u in range(4):
        assert diffusion_distance(dec, t, u, u) == 0
        for v in range(u + 1, 4):
            assert diffusion_distance(dec, t, u, v) ** 2 == pytest.approx(2 * math.exp(-8 * t / 3), rel=1e-12)


def test_c6_distance_increasing_in_hops():
    dec = graph_spectrum(cycle_graph(6))
    d = [diffusion_distance(dec, 0.5, 0, v) for v in (1, 2, 3)]
    assert d[0] < d[1] < d[2]


def test_vectorized_distances_match_scalar():
    g = generate_random_regular(40, 3, 5)
    dec = graph_spectrum(g)
    D = diffusion_distances(dec, 0.8, [0, 3, 7], [1, 2, 39])
    for i, u in enumerate([0, 3, 7]):
        for j, v in enumerate([1, 2, 39]):
            assert D[i, j] == pytest.approx(diffusion_distance(dec, 0.8, u, v), rel=1e-12, abs=1e-15)


@given(seed=st.integers(0, 2**31), t=st.floats(0.05, 5.0))
@settings(max_examples=30, deadline=None)
def test_kernel_identity_property(seed, t):
    g = generate_random_regular(32, 3, seed % 20)
    dec = graph_spectrum(g)
    K2 = heat_kernel(dec, 2 * t)
    rng = np.random.default_rng(seed)
    u, v = rng.integers(32, size=2)
    assert abs(diffusion_distance(dec, t, u, v) ** 2 - kernel_identity_sq(K2, u, v)) < 1e-10


def test_embedding_full_equals_distance():
    g = generate_random_regular(24, 3, 2)
    dec = graph_spectrum(g)
    emb = diffusion_embedding(dec, 1.0, g.n - 1)
    for u, v in [(0, 1), (3, 17), (5, 23)]:
        assert emb.distance(u, v) == pytest.approx(diffusion_distance(dec, 1.0, u, v), rel=1e-12)


def test_embedding_m1_formula():
    g = generate_random_regular(24, 3, 2)
    dec = graph_spectrum(g)
    emb = diffusion_embedding(dec, 0.6, 1)
    expect = math.exp(-0.6 * dec.values[1]) * abs(dec.vectors[4, 1] - dec.vectors[9, 1])
    assert emb.distance(4, 9) == pytest.approx(expect, rel=1e-12)


def test_embedding_monotone_in_m():
    g = generate_random_regular(24, 3, 2)
    dec = graph_spectrum(g)
    ds = [diffusion_embedding(dec, 1.0, m).distance(2, 11) for m in range(1, 24)]
    assert all(b >= a - 1e-15 for a, b in zip(ds, ds[1:]))


def test_embedding_m_out_of_range():
    dec = graph_spectrum(complete_graph(4))
    with pytest.raises(DiffusionError):
        diffusion_embedding(dec, 1.0, 4)
    with pytest.raises(DiffusionError):
        diffusion_embedding(dec, 1.0, 0)


# --- tree kernel ---------------------------------------------------------------

def test_radial_laws_first_steps():
    q = radial_walk_laws(3, 4)
    assert q[1].tolist()[:3] == [0, 1, 0]
    assert q[2, 0] == pytest.approx(1 / 3)
    assert q[2, 1] == 0
    assert q[2, 2] == pytest.approx(2 / 3)


@pytest.mark.parametrize("r", [3, 4, 7])
def test_radial_laws_parity_and_mass(r):
    q = radial_walk_laws(r, 30)
    assert np.allclose(q.sum(axis=1), 1, atol=1e-14)
    s, d = np.indices(q.shape)
    assert np.all(q[(s - d) % 2 == 1] == 0)


@pytest.mark.parametrize("r", [3, 4, 5])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_tree_kernel_shape(r, t):
    table = tree_radial_kernel(r, t, 10)
    assert table.psi[0] == 0
    assert np.all(np.diff(table.p) < 0)
    assert np.all(np.diff(table.psi) > 0)
    assert np.allclose(table.psi**2 + 2 * table.p2t, 2 * table.kappa, atol=1e-12)
    assert table.shell_mass() <= 1 + 1e-12
    assert table.shell_mass() >= 1 - table.tail_eps - 1e-9 - table_tail_beyond(table)


def table_tail_beyond(table):
    # mass past d_max is not tabulated; bound it with a deeper table
    deep = tree_radial_kernel(table.r, table.t, table.d_max + 40, table.tail_eps)
    return float(deep.p[table.d_max + 1 :] @ shell_sizes(table.r, deep.d_max)[table.d_max + 1 :])


def test_shell_mass_conserved_when_deep():
    table = tree_radial_kernel(3, 1.0, 40)
    assert abs(table.shell_mass() - 1) <= table.tail_eps + 1e-9


@pytest.mark.parametrize("r", [3, 4])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_tree_kernel_matches_truncated_tree(r, t):
    d_cmp = 6
    row, depths = truncated_tree_kernel(r, t, d_cmp)
    table = tree_radial_kernel(r, t, d_cmp)
    for d in range(d_cmp + 1):
        vals = row[depths == d]
        assert np.ptp(vals) < 1e-14
        assert abs(vals[0] - table.p[d]) < 1e-8


def test_psi_link():
    table = tree_radial_kernel(3, 1.0, 6)
    assert psi_link(table, 0) == 0
    assert psi_link(table, 1) < psi_link(table, 2) < psi_link(table, 3)
    with pytest.raises(DiffusionError):
        psi_link(table, 7)


@pytest.mark.parametrize("kwargs", [dict(r=2), dict(t=0), dict(d_max=0), dict(tail_eps=0.1)])
def test_tree_kernel_bad_params(kwargs):
    args = dict(r=3, t=1.0, d_max=5, tail_eps=1e-12) | kwargs
    with pytest.raises(DiffusionError):
        tree_radial_kernel(**args)


def test_monotone_horizon_reported():
    table = tree_radial_kernel(3, 1.0, 60)
    h = table.monotone_horizon()
    assert 10 <= h < 60
    assert np.all(np.diff(table.psi[: h + 1]) > 0)


def test_default_d_max():
    assert default_d_max(1024, 3) == 20


def test_stability_zero_radius():
    g = generate_random_regular(64, 3, 0)
    assert tree_stability_check(g, graph_spectrum(g), 1.0, 0, 20, 0) == pytest.approx(0, abs=1e-12)


def test_stability_n4096():
    n = 4096
    g = generate_random_regular(n, 3, 0)
    R = int(0.4 * math.log(n) / math.log(2))
    dev = tree_stability_check(g, graph_spectrum(g), 1.0, R, 200, 0)
    print(f"tree stability n={n} R={R}: max deviation {dev:.3e}")
    assert dev < 0.05


def test_stability_median_nonincreasing():
    medians = []
    for n in (512, 1024, 2048):
        R = int(0.4 * math.log(n) / math.log(2))
        devs = []
        for seed in range(5):
            g = generate_random_regular(n, 3, seed)
            devs.append(tree_stability_check(g, graph_spectrum(g), 1.0, R, 200, seed))
        medians.append(float(np.median(devs)))
    assert all(b <= a for a, b in zip(medians, medians[1:])), medians

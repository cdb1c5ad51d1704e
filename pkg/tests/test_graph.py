import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subcrit_pa.errors import ParameterError
from subcrit_pa.graph import (bfs_components, connected_components, degree_stats, degrees,
                              edge_probability, expected_edges, from_edges, read_edge_list,
                              sample_graph_fast, sample_graph_naive, write_edge_list)
from subcrit_pa.params import ModelParams

P = ModelParams(0.25, 0.1)


def test_edge_probability_symmetric_and_capped():
    assert edge_probability(P, 1, 2) == pytest.approx(0.1 * 2 ** -0.75)
    assert edge_probability(P, 3, 7) == edge_probability(P, 7, 3)
    assert edge_probability(ModelParams(0.4, 5.0), 1, 2) == 1.0
    with pytest.raises(ParameterError):
        edge_probability(P, 2, 2)


def test_graph_is_simple_and_sorted():
    g = sample_graph_fast(P, 2000, 11)
    assert np.all(g.ei < g.ej)
    assert np.all(g.ei >= 1) and np.all(g.ej <= 2000)
    keys = g.ei * (g.n + 1) + g.ej
    assert np.all(np.diff(keys) > 0)


@pytest.mark.parametrize("sampler", [sample_graph_fast, sample_graph_naive])
def test_same_seed_same_graph(sampler):
    a = sampler(P, 300, 5)
    b = sampler(P, 300, 5)
    assert np.array_equal(a.ei, b.ei) and np.array_equal(a.ej, b.ej)
    c = sampler(P, 300, 6)
    assert not (np.array_equal(a.ei, c.ei) and np.array_equal(a.ej, c.ej))


def test_edge_count_near_expectation():
    n = 4000
    counts = [sample_graph_fast(P, n, s).num_edges for s in range(40)]
    mu = expected_edges(P, n)
    assert abs(np.mean(counts) - mu) < 4 * np.sqrt(mu / 40)


def test_fast_matches_naive_pair_frequencies():
    n, reps = 12, 20000
    params = ModelParams(0.3, 0.15)
    acc = {"fast": np.zeros((n + 1, n + 1)), "naive": np.zeros((n + 1, n + 1))}
    for s in range(reps):
        for name, fn in (("fast", sample_graph_fast), ("naive", sample_graph_naive)):
            g = fn(params, n, s)
            np.add.at(acc[name], (g.ei, g.ej), 1)
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            p = edge_probability(params, i, j)
            sd = np.sqrt(2 * p * (1 - p) / reps)
            assert abs(acc["fast"][i, j] - acc["naive"][i, j]) / reps <= 4.5 * sd + 1e-12


@given(st.integers(1, 40), st.lists(st.tuples(st.integers(1, 40), st.integers(1, 40)), max_size=60))
@settings(max_examples=200)
def test_union_find_equals_bfs(n, pairs):
    edges = sorted({(min(a, b), max(a, b)) for a, b in pairs if a != b and a <= n and b <= n})
    g = from_edges(n, edges)
    cs = connected_components(g)
    assert np.array_equal(cs.labels, bfs_components(g))
    assert cs.component_sizes.sum() == n


def test_component_stats():
    g = from_edges(6, [(1, 2), (2, 3), (5, 6)])
    cs = connected_components(g)
    assert cs.labels.tolist() == [0, 0, 0, 1, 2, 2]
    assert cs.largest == 3 and cs.count == 3
    assert cs.size_of(6) == 2 and cs.component_of(4) == 1
    assert cs.z_counts(2) == 5 and cs.z_counts(4) == 0
    assert cs.max_degree == 2


def test_from_edges_validation():
    with pytest.raises(ParameterError):
        from_edges(3, [(1, 1)])
    with pytest.raises(ParameterError):
        from_edges(3, [(1, 4)])
    with pytest.raises(ParameterError):
        from_edges(3, [(1, 2), (2, 1)])


def test_degrees_and_survival():
    g = from_edges(4, [(1, 2), (1, 3), (1, 4)])
    assert degrees(g).tolist() == [3, 1, 1, 1]
    ds = degree_stats(g)
    assert ds.max_degree == 3
    assert ds.tail(0) == 1.0 and ds.tail(1) == 0.25 and ds.tail(3) == 0.0


def test_neighbors():
    g = from_edges(5, [(1, 2), (2, 5), (3, 4)])
    assert sorted(g.neighbors(2).tolist()) == [1, 5]
    assert g.neighbors(4).tolist() == [3]


def test_edge_list_roundtrip(tmp_path):
    g = sample_graph_fast(P, 500, 9)
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    h, header = read_edge_list(path)
    assert h.n == 500 and header["seed"] == "9"
    assert np.array_equal(g.ei, h.ei) and np.array_equal(g.ej, h.ej)


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_bad_n(n):
    with pytest.raises(ParameterError):
        sample_graph_fast(P, n, 1)

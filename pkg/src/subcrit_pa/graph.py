"""Sampling the graph on {1..n}, components and degrees.

Each pair ``i < j`` is an edge independently with probability
``beta * j**(gamma - 1) * i**(-gamma)`` capped at one; the value does not
depend on ``n``.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .backend import core
from .errors import ParameterError
from .rng import make_rng, seed_record

# rows are drawn in blocks of at most this many pairs by the naive sampler
_NAIVE_BLOCK = 1 << 20


def edge_probability(params, i, j):
    """``beta * max(i,j)**(gamma-1) * min(i,j)**(-gamma)`` capped at one."""
    i = int(i)
    j = int(j)
    if i == j:
        raise ParameterError("j", "self-loops are not part of the model")
    if i < 1 or j < 1:
        raise ParameterError("i", "vertices are numbered from 1")
    lo, hi = min(i, j), max(i, j)
    return min(1.0, params.beta * hi ** (params.gamma - 1.0) * lo ** (-params.gamma))


def _edge_probability_array(params, i, j):
    p = params.beta * j.astype(np.float64) ** (params.gamma - 1.0) * i.astype(np.float64) ** (-params.gamma)
    return np.minimum(p, 1.0)


@dataclass(frozen=True)
class GraphSample:
    """Undirected simple graph on 1..n as a sorted edge list ``(ei[k], ej[k])``, ``ei < ej``."""

    n: int
    ei: np.ndarray
    ej: np.ndarray
    seed: object = None
    sampler_id: str = "naive"
    params: object = field(default=None, compare=False)

    @property
    def num_edges(self):
        return int(self.ei.size)

    @cached_property
    def csr(self):
        """``(indptr, indices)`` adjacency over 0-based vertex ids."""
        src = np.concatenate([self.ei, self.ej]) - 1
        dst = np.concatenate([self.ej, self.ei]) - 1
        order = np.lexsort((dst, src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return indptr, dst[order]

    def neighbors(self, v):
        indptr, indices = self.csr
        return indices[indptr[v - 1]:indptr[v]] + 1

    def edges(self):
        return np.column_stack([self.ei, self.ej])


def _sorted_graph(n, ei, ej, seed, sampler_id, params):
    order = np.lexsort((ej, ei))
    return GraphSample(int(n), np.ascontiguousarray(ei[order], dtype=np.int64),
                       np.ascontiguousarray(ej[order], dtype=np.int64),
                       seed_record(seed), sampler_id, params)


def from_edges(n, edges, seed=None, params=None):
    """Build a GraphSample from arbitrary ``(i, j)`` pairs; checks and normalizes them."""
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    if np.any(lo == hi):
        raise ParameterError("edges", "self-loop")
    if lo.size and (lo.min() < 1 or hi.max() > n):
        raise ParameterError("edges", f"vertex outside 1..{n}")
    pairs = np.unique(np.column_stack([lo, hi]), axis=0) if lo.size else arr
    if pairs.shape[0] != lo.size:
        raise ParameterError("edges", "duplicate edge")
    return GraphSample(int(n), pairs[:, 0].copy(), pairs[:, 1].copy(), seed, "manual", params)


def _check_n(n):
    if int(n) != n or n < 1:
        raise ParameterError("n", f"must be a positive integer, got {n!r}")
    return int(n)


def sample_graph_naive(params, n, seed):
    """Reference sampler: one uniform per pair in row-major order (j ascending, then i).

    O(n^2) time. Rows are drawn in blocks, which consumes the generator
    exactly as one ``rng.random(j - 1)`` call per row would.
    """
    n = _check_n(n)
    rng = make_rng(seed)
    out_i = []
    out_j = []
    j0 = 2
    while j0 <= n:
        j1 = j0
        pairs = 0
        while j1 <= n and (pairs == 0 or pairs + j1 - 1 <= _NAIVE_BLOCK):
            pairs += j1 - 1
            j1 += 1
        rows = np.arange(j0, j1, dtype=np.int64)
        jj = np.repeat(rows, rows - 1)
        starts = np.cumsum(rows - 1) - (rows - 1)
        ii = np.arange(jj.size, dtype=np.int64) - np.repeat(starts, rows - 1) + 1
        hit = rng.random(jj.size) < _edge_probability_array(params, ii, jj)
        out_i.append(ii[hit])
        out_j.append(jj[hit])
        j0 = j1
    ei = np.concatenate(out_i) if out_i else np.zeros(0, dtype=np.int64)
    ej = np.concatenate(out_j) if out_j else np.zeros(0, dtype=np.int64)
    return _sorted_graph(n, ei, ej, seed, "naive", params)


def sample_graph_fast(params, n, seed):
    """Same law as :func:`sample_graph_naive` in expected O(n + |E|) time.

    Within row ``j`` the probabilities decrease in ``i``. Starting from the
    current candidate ``i`` with ``q = p_ij``, the next candidate is found by
    a geometric skip with success probability ``q``; since every later
    ``p_i'j <= q`` the candidate is kept with probability ``p_i'j / q`` and
    ``q`` is lowered to ``p_i'j``. Each pair is thus accepted independently
    with probability exactly ``p_ij`` (thinning of a dominating Bernoulli
    sequence). Uses a different stream than the naive sampler.
    """
    n = _check_n(n)
    rng = make_rng(seed)
    ei, ej = core.sample_graph_fast(params.beta, params.gamma, n, rng)
    return _sorted_graph(n, ei, ej, seed, "fast", params)


def expected_edges(params, n):
    """Exact ``sum_{i<j} p_ij`` (vectorized per row)."""
    total = 0.0
    ivals = np.arange(1, n, dtype=np.float64) ** (-params.gamma)
    for j in range(2, n + 1):
        row = params.beta * j ** (params.gamma - 1.0) * ivals[: j - 1]
        total += float(np.minimum(row, 1.0).sum())
    return total


@dataclass(frozen=True)
class ComponentStats:
    """Connected components; labels are 0-based in order of the smallest vertex."""

    n: int
    labels: np.ndarray
    component_sizes: np.ndarray
    max_degree: int

    @property
    def largest(self):
        return int(self.component_sizes.max()) if self.component_sizes.size else 0

    @property
    def count(self):
        return int(self.component_sizes.size)

    def component_of(self, v):
        return int(self.labels[v - 1])

    def size_of(self, v):
        return int(self.component_sizes[self.labels[v - 1]])

    def z_counts(self, k):
        """Number of vertices lying in components of size at least ``k``."""
        s = self.component_sizes
        return int(s[s >= k].sum())


def connected_components(graph):
    labels = core.components(graph.n, graph.ei, graph.ej)
    sizes = np.bincount(labels)
    deg = degrees(graph)
    return ComponentStats(graph.n, labels, sizes, int(deg.max()) if deg.size else 0)


def bfs_components(graph):
    """Breadth-first labels, same convention as :func:`connected_components` (test oracle)."""
    indptr, indices = graph.csr
    labels = np.full(graph.n, -1, dtype=np.int64)
    nxt = 0
    for s in range(graph.n):
        if labels[s] >= 0:
            continue
        labels[s] = nxt
        queue = [s]
        while queue:
            v = queue.pop()
            for w in indices[indptr[v]:indptr[v + 1]]:
                if labels[w] < 0:
                    labels[w] = nxt
                    queue.append(w)
        nxt += 1
    return labels


def degrees(graph):
    """Degree of vertices 1..n (index v-1)."""
    return np.bincount(np.concatenate([graph.ei, graph.ej]) - 1, minlength=graph.n)


@dataclass(frozen=True)
class DegreeStats:
    degrees: np.ndarray
    max_degree: int
    # survival[k] = fraction of vertices with degree > k
    survival: np.ndarray

    def tail(self, k):
        if k >= self.survival.size:
            return 0.0
        return float(self.survival[k])


def degree_stats(graph):
    deg = degrees(graph)
    counts = np.bincount(deg, minlength=1)
    survival = 1.0 - np.cumsum(counts) / max(graph.n, 1)
    return DegreeStats(deg, int(deg.max()) if deg.size else 0, np.clip(survival, 0.0, 1.0))


def write_edge_list(graph, path):
    p = graph.params
    gamma = repr(p.gamma) if p is not None else "nan"
    beta = repr(p.beta) if p is not None else "nan"
    with open(path, "w") as fh:
        fh.write(f"# n={graph.n} gamma={gamma} beta={beta} seed={graph.seed}\n")
        for a, b in zip(graph.ei.tolist(), graph.ej.tolist()):
            fh.write(f"{a} {b}\n")


def read_edge_list(path):
    """Inverse of :func:`write_edge_list`. Returns ``(GraphSample, header dict)``."""
    header = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    key, _, val = tok.partition("=")
                    header[key] = val
                continue
            a, b = line.split()
            rows.append((int(a), int(b)))
    if "n" not in header:
        raise ParameterError("n", "edge list header is missing n=")
    n = int(header["n"])
    g = from_edges(n, rows, seed=header.get("seed"))
    return g, header

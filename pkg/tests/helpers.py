"""Shared generators for the exploration tests."""
import math

import numpy as np

from subcrit_pa.exploration import ExplorationConfig, VertexGraph
from subcrit_pa.params import critical_beta


def random_exploration_case(rng):
    """A random configuration satisfying every precondition of ``algorithm1``.

    Returns ``(cfg, U_prime, targets)``. ``u`` is kept small enough that
    ``u^rho (1 + 1/a) <= 1/2``, which is what makes the size cap on ``U``
    hold after the round.
    """
    while True:
        gamma = rng.uniform(0.05, 0.35)
        tilde_beta = rng.uniform(0.3, 0.95) * critical_beta(gamma)
        a = rng.uniform(2.0, 24.0)
        cfg = ExplorationConfig(u=2.0 ** -rng.uniform(3.0, 9.0), b=rng.uniform(0.15, 0.85),
                                epsilon=rng.uniform(0.01, 0.6), a=a, tilde_beta=tilde_beta,
                                gamma=gamma, m=1)
        if cfg.u ** cfg.rho * (1.0 + 1.0 / a) > 0.5:
            continue
        m = int(2.0 ** rng.uniform(math.log2(4.0 / (cfg.b * cfg.u)), 26.0))
        cfg = cfg.at_scale(m)
        um = cfg.u * m
        lo = math.ceil(cfg.b * um)
        hi = math.floor(um)
        if hi < lo:
            continue
        room = min(hi - lo + 1, int(m ** cfg.rho))
        d = int(rng.integers(1, max(room, 1) + 1))
        targets = sorted(int(t) for t in rng.choice(np.arange(lo, hi + 1), size=d, replace=False))
        cap = int(cfg.a * m ** cfg.rho) - d
        extra = int(rng.integers(0, max(min(cap, hi), 0) + 1)) if cap > 0 else 0
        pool = rng.integers(1, hi + 1, size=extra) if extra else []
        vertices = set(targets) | {int(v) for v in pool}
        while len(vertices) > cfg.a * m ** cfg.rho:
            vertices.discard(next(v for v in vertices if v not in targets))
        return cfg, VertexGraph(vertices, []), targets


class MarkovSets:
    """Sets whose chance of reaching size ``k`` depends on the previous thinned sizes.

    ``witness(i, past)`` is exact, which lets the thinning be tested for
    i.i.d. Bernoulli(epsilon) output.
    """

    def __init__(self, k, base=0.5, step=0.3):
        self.k = k
        self.base = base
        self.step = step

    def witness(self, i, past):
        hits = sum(1 for s in past if s > 0)
        return min(0.95, self.base + self.step * (hits % 2))

    def draw(self, count, epsilon, rng, decouple):
        """Generate the sets lazily alongside the thinning and return the thinned sizes."""
        sizes = []
        ys = []
        for i in range(count):
            w = self.witness(i, tuple(sizes))
            big = rng.random() < w
            size = self.k + int(rng.integers(0, 3)) if big else int(rng.integers(0, self.k))
            ys.append(list(range(1000 * i, 1000 * i + size)))
            x = decouple(ys[-1:], self.k, epsilon, [w], rng)[0]
            sizes.append(len(x))
        return sizes

"""Branching random walks with displacement intensity

    pi(dx) = beta * (exp(gamma x) 1{x > 0} + exp((1 - gamma) x) 1{x < 0}) dx,

killing barriers, the frozen/branching split and additive martingales.

Positions are absolute throughout: a child of a particle at ``y`` with
displacement ``x`` sits at ``y + x``.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _core_py
from .backend import core
from .errors import InfiniteMassError, ParameterError, UsageError
from .params import ModelParams, rho_pm
from .rng import make_rng

DEFAULT_BIAS_TARGET = 1e-6


@dataclass(frozen=True)
class Intensity:
    beta: float
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ParameterError("gamma", f"must lie in (0, 1), got {self.gamma!r}")
        if not self.beta > 0.0:
            raise ParameterError("beta", f"must be positive, got {self.beta!r}")

    @classmethod
    def of(cls, params, beta=None):
        """Intensity of ``params``, optionally with a different density ``beta``."""
        return cls(params.beta if beta is None else float(beta), params.gamma)

    @property
    def params(self):
        return ModelParams(self.gamma, self.beta)

    @property
    def rho(self):
        return rho_pm(self.params)


@dataclass(frozen=True)
class Caps:
    """Safety limits; hitting one marks the sample as truncated."""

    max_particles: int = 1_000_000
    max_generations: int = 1_000_000


DEFAULT_CAPS = Caps()


def window_mass(intensity, lo, hi):
    """``pi((lo, hi])`` in closed form; ``lo = -inf`` is allowed."""
    if hi == math.inf:
        raise InfiniteMassError("pi has infinite mass on every right-unbounded window")
    if lo > hi:
        raise ParameterError("lo", f"lo={lo} exceeds hi={hi}")
    left, right = _core_py._piece_masses(intensity.beta, intensity.gamma, lo, hi)
    return left + right


def sample_offspring(intensity, parent_pos, window_lo, window_hi, rng):
    """Sorted absolute positions of the children of ``parent_pos`` in ``(window_lo, window_hi]``."""
    if not math.isfinite(window_hi):
        raise InfiniteMassError("window_hi must be finite")
    return core.offspring(intensity.beta, intensity.gamma, float(parent_pos),
                          float(window_lo), float(window_hi), make_rng(rng))


@dataclass(frozen=True)
class KilledTree:
    """Particles in breadth-first birth order; particle 0 is the root."""

    positions: np.ndarray
    parents: np.ndarray
    generations: np.ndarray
    barrier_lo: float
    barrier_hi: float
    start: float
    truncated: bool
    # every particle of generation <= complete_through is present
    complete_through: float = math.inf

    @property
    def size(self):
        return int(self.positions.size)

    @property
    def depth(self):
        return int(self.generations.max())

    def generation(self, n):
        return self.positions[self.generations == n]

    def export_lines(self):
        for k in range(self.size):
            yield f"{k} {int(self.parents[k])} {int(self.generations[k])} {self.positions[k]!r}"

    def write(self, path):
        with open(path, "w") as fh:
            for line in self.export_lines():
                fh.write(line + "\n")


def _complete_through(gen, truncated, limit=math.inf):
    if not truncated:
        return limit
    return int(gen.max()) - 1


def sample_killed_tree(intensity, start, log_a, log_d, rng, caps=DEFAULT_CAPS):
    """``T_{a,d}(start)``: particles outside ``(log_a, log_d]`` die with their descendants."""
    if not log_a < start <= log_d:
        raise ParameterError("start", f"must lie in ({log_a}, {log_d}], got {start!r}")
    pos, par, gen, trunc = core.killed_tree(intensity.beta, intensity.gamma, float(start),
                                            float(log_a), float(log_d), int(caps.max_particles),
                                            int(caps.max_generations), make_rng(rng))
    return KilledTree(pos, par, gen, float(log_a), float(log_d), float(start), bool(trunc),
                      _complete_through(gen, trunc))


def count_I(tree, log_b):
    """Particles of a tree killed at 0 (root included) in ``(log_b, 0]``."""
    if tree.barrier_hi != 0.0:
        raise UsageError(f"count_I needs barrier_hi = 0, got {tree.barrier_hi}")
    if log_b > 0.0:
        raise UsageError(f"log_b must be <= 0, got {log_b}")
    p = tree.positions
    return int(np.count_nonzero((p > log_b) & (p <= 0.0)))


def sample_I(intensity, u, b, size, rng, a=0.0, caps=DEFAULT_CAPS):
    """``size`` draws of ``I(a, b)`` for trees started at ``log u`` and killed outside ``(log a, 0]``.

    Returns ``(counts, truncated_flags)``.
    """
    rng = make_rng(rng)
    log_a = math.log(a) if a > 0.0 else -math.inf
    log_b = math.log(b)
    start = math.log(u)
    counts = np.empty(size, dtype=np.int64)
    flags = np.zeros(size, dtype=bool)
    for k in range(size):
        _, window, _, trunc = core.killed_tree_stats(
            intensity.beta, intensity.gamma, start, log_a, 0.0, log_b,
            int(caps.max_particles), int(caps.max_generations), rng)
        counts[k] = window
        flags[k] = trunc
    return counts, flags


def right_cutoff_for_bias(intensity, bias_target=DEFAULT_BIAS_TARGET, rho=None):
    """``R`` with ``beta exp(-(rho-gamma) R) / (rho-gamma) = bias_target``."""
    if rho is None:
        rho = intensity.rho[0]
    gap = rho - intensity.gamma
    if not gap > 0.0:
        raise ParameterError("rho", "must exceed gamma")
    if not bias_target > 0.0:
        raise ParameterError("bias_target", "must be positive")
    return max(math.log(intensity.beta / (gap * bias_target)) / gap, 1e-12)


def truncated_laplace(intensity, rho, cutoff):
    """``int_{-inf}^{cutoff} exp(-rho x) pi(dx)`` for ``gamma < rho < 1 - gamma``, ``cutoff >= 0``."""
    g, b = intensity.gamma, intensity.beta
    gap = rho - g
    return b / (1.0 - g - rho) + b * (-math.expm1(-gap * cutoff)) / gap


def sample_brw_truncated(intensity, start, generations, right_cutoff, rng, caps=DEFAULT_CAPS):
    """Unkilled walk for ``generations`` steps with displacements restricted to ``(-inf, R]``."""
    if not right_cutoff > 0.0:
        raise ParameterError("right_cutoff", f"must be positive, got {right_cutoff!r}")
    if generations < 0:
        raise ParameterError("generations", "must be nonnegative")
    pos, par, gen, trunc = core.brw_truncated(intensity.beta, intensity.gamma, float(start),
                                              int(generations), float(right_cutoff),
                                              int(caps.max_particles), make_rng(rng))
    return KilledTree(pos, par, gen, -math.inf, math.inf, float(start), bool(trunc),
                      _complete_through(gen, trunc, int(generations)))


def martingale_W(tree, n, rho):
    """``sum over generation-n particles of exp(-rho V)``."""
    if n < 0 or n > tree.complete_through:
        raise UsageError(f"generation {n} is not fully materialized (complete through {tree.complete_through})")
    return float(np.exp(-rho * tree.generation(n)).sum())


@dataclass(frozen=True)
class FrozenDecomposition:
    xi: np.ndarray
    branching: np.ndarray
    right_cutoff: float
    truncated: bool

    @property
    def branching_count(self):
        return int(self.branching.size)

    def malthusian_sum(self, intensity, rho=None, compensate=True):
        """``sum_xi exp(-rho x)``, plus the expected weight of frozen points beyond the cutoff.

        A branching particle at ``y <= 0`` would have placed frozen children
        beyond the cutoff ``R`` with expected weight
        ``beta exp(-gamma y) exp(-(rho-gamma) R) / (rho-gamma)``; adding it
        makes the estimator unbiased for the untruncated sum.
        """
        if rho is None:
            rho = intensity.rho[0]
        total = float(np.exp(-rho * self.xi).sum())
        if compensate:
            gap = rho - intensity.gamma
            tail = intensity.beta * math.exp(-gap * self.right_cutoff) / gap
            total += tail * float(np.exp(-intensity.gamma * self.branching).sum())
        return total


def frozen_decompose(intensity, rng, caps=DEFAULT_CAPS, right_cutoff=None,
                     bias_target=DEFAULT_BIAS_TARGET):
    """Split the descendants of an ancestor at 0 into branching (<= 0) and frozen (> 0) particles.

    Branching particles reproduce; frozen ones are recorded in ``xi`` and
    not followed. Frozen displacements are cut at ``right_cutoff``.
    """
    if right_cutoff is None:
        right_cutoff = right_cutoff_for_bias(intensity, bias_target)
    xi, branching, trunc = core.frozen_decompose(intensity.beta, intensity.gamma,
                                                 float(right_cutoff), int(caps.max_particles),
                                                 make_rng(rng))
    return FrozenDecomposition(xi, branching, float(right_cutoff), bool(trunc))


@dataclass(frozen=True)
class CMJCount:
    count: int
    individuals: int
    truncated: bool


def cmj_count(intensity, t, log_b, rng, caps=DEFAULT_CAPS, details=False):
    """Branching particles in ``(t + log_b, t]`` of the general branching process built on frozen points.

    An individual born at ``sigma`` owns the branching particles of its
    cluster (descendants staying at or below ``sigma``); frozen points become
    new individuals. Particles beyond ``t`` are killed, so the count has the
    law of ``I(0, b)`` for a tree started at ``-t``.
    """
    if not t > 0.0:
        raise ParameterError("t", "must be positive")
    if not log_b < 0.0:
        raise ParameterError("log_b", "must be negative")
    count, individuals, trunc = core.cmj_count(intensity.beta, intensity.gamma, float(t),
                                               float(log_b), int(caps.max_particles),
                                               make_rng(rng))
    res = CMJCount(int(count), int(individuals), bool(trunc))
    return res if details else res.count

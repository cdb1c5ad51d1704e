"""Projected exploration of killed walks, decoupling and the Galton-Watson embedding.

A killed tree started at ``phi_m(u_i)`` is explored depth first and every
particle is projected to a vertex with ``pi_m``; the explored genealogy
becomes a graph on ``{1..m}``. Repeating this over geometrically growing
scales ``m`` embeds a Galton-Watson tree in the component of an early vertex.
"""
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from . import _core_py
from .backend import core
from .brw import Caps, Intensity, window_mass
from .errors import InfeasibleError, ParameterError, ProjectionRangeError, UsageError
from .params import rho_pm
from .projection import projection_context
from .rng import make_rng

SUCCESS = "none"
COLLISION = "collision"
OVERFLOW = "overflow"
UNDERFILL = "underfill"

_STATUS_NAMES = {
    _core_py.STATUS_SUCCESS: SUCCESS,
    _core_py.STATUS_COLLISION: COLLISION,
    _core_py.STATUS_OVERFLOW: OVERFLOW,
    _core_py.STATUS_UNDERFILL: UNDERFILL,
}


@dataclass(frozen=True)
class ExplorationConfig:
    u: float
    b: float
    epsilon: float
    a: float
    tilde_beta: float
    gamma: float
    m: int = 1
    # exponent in the set-size thresholds; defaults to rho_minus of tilde_beta
    rho: Optional[float] = None
    u0: Optional[float] = None

    def __post_init__(self):
        for name, lo, hi in (("u", 0.0, 1.0), ("b", 0.0, 1.0), ("epsilon", 0.0, 1.0)):
            v = getattr(self, name)
            if not lo < v < hi:
                raise ParameterError(name, f"must lie in ({lo}, {hi}), got {v!r}")
        if not self.a > 1.0:
            raise ParameterError("a", f"must exceed 1, got {self.a!r}")
        if not self.tilde_beta > 0.0:
            raise ParameterError("tilde_beta", "must be positive")
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError("m", f"must be a positive integer, got {self.m!r}")
        if self.rho is None:
            object.__setattr__(self, "rho", rho_pm(self.intensity.params)[0])

    @property
    def intensity(self):
        return Intensity(self.tilde_beta, self.gamma)

    @property
    def y_threshold(self):
        """``ceil(epsilon u^-rho)``, the size of a successful set."""
        return max(1, math.ceil(self.epsilon * self.u ** -self.rho))

    @property
    def overflow_threshold(self):
        """``ceil(a/2 u^-rho)``: exploring this many vertices aborts."""
        return max(1, math.ceil(0.5 * self.a * self.u ** -self.rho))

    def at_scale(self, m):
        return ExplorationConfig(self.u, self.b, self.epsilon, self.a, self.tilde_beta,
                                 self.gamma, int(m), self.rho, self.u0)

    def size_bound(self, m=None):
        m = self.m if m is None else m
        return self.a * (m / self.u) ** self.rho


@dataclass
class VertexGraph:
    """A graph on a vertex subset, stored as a vertex set and an edge list."""

    vertices: set = field(default_factory=set)
    edges: list = field(default_factory=list)

    def copy(self):
        return VertexGraph(set(self.vertices), list(self.edges))

    def __len__(self):
        return len(self.vertices)

    def component_of(self, v):
        adj = {}
        for a, b in self.edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen


@dataclass
class ExplorationResult:
    U: VertexGraph
    targets: list
    Y_sets: list
    success_flags: list
    failure_reasons: list
    explored: list
    X_sets: Optional[list] = None

    def check(self, cfg, U_prime_size):
        """Assert the structural guarantees; returns the list of violations."""
        bad = []
        k = cfg.y_threshold
        seen = set()
        ctx = projection_context(cfg.m)
        low = ctx.pi(math.log(cfg.b))
        for i, y in enumerate(self.Y_sets):
            if seen & set(y):
                bad.append(f"Y_{i} overlaps an earlier set")
            seen |= set(y)
            if y and len(y) != k:
                bad.append(f"|Y_{i}| = {len(y)} != {k}")
            if y and (min(y) < low or max(y) > cfg.m):
                bad.append(f"Y_{i} leaves {low}..{cfg.m}")
            if bool(y) != self.success_flags[i]:
                bad.append(f"flag {i} disagrees with Y_{i}")
            if (self.failure_reasons[i] == SUCCESS) != self.success_flags[i]:
                bad.append(f"reason {i} disagrees with flag")
            if not set(y) <= self.U.vertices:
                bad.append(f"Y_{i} not in U")
        added = len(self.U) - U_prime_size
        if added > sum(self.explored):
            bad.append("U grew by more than the explored vertices")
        for e in self.explored:
            if e > cfg.overflow_threshold:
                bad.append(f"explored {e} > overflow threshold")
        if len(self.U) > cfg.size_bound():
            bad.append(f"|U| = {len(self.U)} exceeds a (m/u)^rho = {cfg.size_bound():.6g}")
        if self.X_sets is not None:
            for i, (x, y) in enumerate(zip(self.X_sets, self.Y_sets)):
                if not set(x) <= set(y):
                    bad.append(f"X_{i} not inside Y_{i}")
                if len(x) not in (0, k):
                    bad.append(f"|X_{i}| = {len(x)}")
        return bad


def check_preconditions(cfg, U_prime, targets):
    m = cfg.m
    um = cfg.u * m
    bum = cfg.b * um
    if bum < 1.0:
        raise UsageError(f"b u m = {bum} < 1: scale m={m} is too small")
    if len(set(targets)) != len(targets):
        raise UsageError("targets must be distinct")
    for t in targets:
        if not bum <= t <= um:
            raise UsageError(f"target {t} outside [b u m, u m] = [{bum}, {um}]")
        if t not in U_prime.vertices:
            raise UsageError(f"target {t} is not a vertex of U'")
    if U_prime.vertices and max(U_prime.vertices) > um:
        raise UsageError(f"U' has vertex {max(U_prime.vertices)} > u m = {um}")
    if len(U_prime) > cfg.a * m ** cfg.rho:
        raise UsageError(f"|U'| = {len(U_prime)} exceeds a m^rho = {cfg.a * m ** cfg.rho:.6g}")
    if len(targets) > m ** cfg.rho:
        raise UsageError(f"d = {len(targets)} exceeds m^rho = {m ** cfg.rho:.6g}")


def algorithm1(cfg, U_prime, targets, rng, ctx=None):
    """Explore ``T_{ub,1}(phi_m(u_i))`` for each target in turn.

    Particles are visited depth first (children by increasing position).
    Each visited particle is projected to a vertex and stops the exploration
    of its target when that vertex is already in ``U`` (collision), when
    ``ceil(a/2 u^-rho)`` vertices have been added (overflow), or when
    ``ceil(epsilon u^-rho)`` of them lay in ``[log b, 0]`` (success). An
    exhausted tree is an underfill. Vertices added before a failure stay in
    ``U``.
    """
    rng = make_rng(rng)
    targets = [int(t) for t in targets]
    check_preconditions(cfg, U_prime, targets)
    ctx = ctx or projection_context(cfg.m)
    beta, gamma = cfg.tilde_beta, cfg.gamma
    log_a = math.log(cfg.u * cfg.b)
    log_b = math.log(cfg.b)
    k = cfg.y_threshold
    cap = cfg.overflow_threshold
    U = U_prime.copy()
    Y_sets, flags, reasons, explored = [], [], [], []
    for root in targets:
        start = ctx.phi(root)
        B = 0
        Y = []
        reason = UNDERFILL
        # stack of (position, parent vertex); children pushed in reverse
        stack = [(x, root) for x in core.offspring(beta, gamma, start, log_a, 0.0, rng).tolist()[::-1]]
        while stack:
            x, parent = stack.pop()
            try:
                v = ctx.pi(x)
            except ProjectionRangeError:
                raise UsageError(f"position {x} projects below vertex 1 at m={cfg.m}") from None
            if v in U.vertices:
                reason = COLLISION
                break
            U.vertices.add(v)
            U.edges.append((parent, v))
            B += 1
            if B >= cap:
                reason = OVERFLOW
                break
            if log_b <= x <= 0.0:
                Y.append(v)
            if len(Y) >= k:
                reason = SUCCESS
                break
            kids = core.offspring(beta, gamma, x, log_a, 0.0, rng).tolist()
            stack.extend((y, v) for y in kids[::-1])
        ok = reason == SUCCESS
        Y_sets.append(sorted(Y) if ok else [])
        flags.append(ok)
        reasons.append(reason)
        explored.append(B)
    return ExplorationResult(U, targets, Y_sets, flags, reasons, explored)


def decouple(Y_sets, k, epsilon, witnesses, rng):
    """Thin the sets so that their sizes are i.i.d. ``k * Bernoulli(epsilon)``.

    ``witnesses`` gives, for index ``i``, the conditional probability that
    ``|Y_i| >= k`` given the past: a sequence, or a callable
    ``(i, past_sizes) -> float`` where ``past_sizes`` are the earlier
    ``|X_j|``. With ``None`` the empirical frequency over ``Y_sets`` is used.
    A uniform is drawn for every index; ``X_i`` is a uniform ``k``-subset of
    ``Y_i`` when ``|Y_i| >= k`` and the uniform is at most
    ``epsilon / witness``.
    """
    rng = make_rng(rng)
    if not 0.0 < epsilon <= 1.0:
        raise ParameterError("epsilon", f"must lie in (0, 1], got {epsilon!r}")
    if witnesses is None:
        freq = sum(1 for y in Y_sets if len(y) >= k) / max(len(Y_sets), 1)
        witnesses = [freq] * len(Y_sets)
    out = []
    sizes = []
    for i, y in enumerate(Y_sets):
        w = witnesses(i, tuple(sizes)) if callable(witnesses) else witnesses[i]
        if epsilon > w:
            raise InfeasibleError(f"epsilon={epsilon} exceeds the witness {w} at index {i}")
        draw = rng.random()
        if len(y) >= k and draw * w <= epsilon:
            pick = rng.choice(len(y), size=k, replace=False)
            x = sorted(y[j] for j in pick)
        else:
            x = []
        out.append(x)
        sizes.append(len(x))
    return out


@dataclass
class SuccessTable:
    """Monte Carlo estimates of ``P(exploration succeeds)`` against the start ``u_i / (u m)``."""

    grid: np.ndarray
    prob: np.ndarray
    stderr: np.ndarray
    samples: int

    def __call__(self, rel):
        return float(np.interp(rel, self.grid, self.prob))


def estimate_success_table(cfg, samples, rng, points=9):
    """Estimate the success probability on a grid of starts in ``[b, 1]``, ignoring collisions."""
    rng = make_rng(rng)
    grid = np.linspace(cfg.b, 1.0, points)
    prob = np.empty(points)
    log_a = math.log(cfg.u * cfg.b)
    log_b = math.log(cfg.b)
    for j, s in enumerate(grid):
        start = math.log(s * cfg.u)
        hits = 0
        for _ in range(samples):
            status, _, _ = core.explore_free(cfg.tilde_beta, cfg.gamma, start, log_a, log_b,
                                             cfg.y_threshold, cfg.overflow_threshold, rng)
            hits += status == _core_py.STATUS_SUCCESS
        prob[j] = hits / samples
    stderr = np.sqrt(prob * (1.0 - prob) / samples)
    return SuccessTable(grid, prob, stderr, samples)


def gw_scales(n, u, b, o_n, rounds=None):
    """Scales ``m_1 < ... < m_K = n`` with ``m_{j-1} = floor(u m_j)`` and ``b u m_1 <= o_n <= u m_1``."""
    chain = [int(n)]
    while True:
        nxt = math.floor(u * chain[-1])
        if nxt < 1:
            break
        chain.append(nxt)
    for j, m in enumerate(chain):
        if b * u * m <= o_n <= u * m:
            scales = chain[: j + 1][::-1]
            if rounds is not None and len(scales) != rounds:
                raise UsageError(f"o_n={o_n} needs {len(scales)} rounds, {rounds} requested")
            return scales
    raise UsageError(f"o_n={o_n} lies in no window [b u m, u m] of the scale chain of n={n}")


@dataclass
class GWEmbedding:
    generation_sizes: list
    component_lower_bound: int
    trace: list

    @property
    def survived(self):
        return self.generation_sizes[-1] > 0

    def to_json(self):
        return json.dumps({"generation_sizes": self.generation_sizes,
                           "component_lower_bound": self.component_lower_bound,
                           "rounds": self.trace}, sort_keys=True)


def embed_gw(params, cfg, n, o_n, seed, witness=None, boost=1, rounds=None, check=True,
             witness_samples=2000):
    """Grow a Galton-Watson tree inside the component of ``o_n``.

    Round ``j`` runs :func:`algorithm1` at scale ``m_j`` on the previous
    round's surviving vertices and thins the result with :func:`decouple`.
    ``witness`` maps a relative start ``u_i / (u m)`` to the success
    probability (a :class:`SuccessTable`); without one, a table is estimated
    from ``witness_samples`` free explorations per grid point. ``boost``
    starts the first round from ``boost`` consecutive vertices
    ``o_n, o_n + 1, ...``.
    """
    if cfg.u0 is not None and not cfg.u < cfg.u0:
        raise UsageError(f"u={cfg.u} is not below u0={cfg.u0}")
    if not cfg.tilde_beta < params.beta:
        raise UsageError("tilde_beta must be below beta")
    scales = gw_scales(n, cfg.u, cfg.b, o_n, rounds)
    rng = make_rng(seed)
    if witness is None:
        witness = estimate_success_table(cfg, witness_samples, int(rng.integers(0, 2**63)))
    k = cfg.y_threshold
    targets = list(range(int(o_n), int(o_n) + int(boost)))
    U = VertexGraph(set(targets), [])
    sizes = [len(targets)]
    trace = []
    for m in scales:
        round_seed = int(rng.integers(0, 2**63))
        rrng = make_rng(round_seed)
        c = cfg.at_scale(m)
        ctx = projection_context(m)
        prior = len(U)
        res = algorithm1(c, U, targets, rrng, ctx)
        w = [witness(t / (c.u * m)) for t in targets]
        X = decouple(res.Y_sets, k, c.epsilon, w, rrng)
        res.X_sets = X
        if check:
            bad = res.check(c, prior)
            if bad:
                raise AssertionError("; ".join(bad))
        trace.append({
            "m": m,
            "seed": round_seed,
            "targets": list(targets),
            "success_flags": res.success_flags,
            "failure_reasons": res.failure_reasons,
            "Y_sizes": [len(y) for y in res.Y_sets],
            "X_sizes": [len(x) for x in X],
            "U_size": len(res.U),
        })
        U = res.U
        targets = sorted(v for x in X for v in x)
        sizes.append(len(targets))
        if not targets:
            sizes.extend([0] * (len(scales) - len(trace)))
            break
    return GWEmbedding(sizes, sizes[-1], trace)


# checks of the edge-probability comparisons between projected walks and the graph

def _cell_probability(intensity, lo, hi):
    return -math.expm1(-window_mass(intensity, lo, hi))


def coupling_bound_check(params, m, u, b, tilde_beta, r, s, ctx=None):
    """Upper comparison: a particle in the cell of ``r`` hits the cell of ``s`` with
    probability at most ``beta (r^s)^-gamma (r v s)^(gamma-1)``.

    The parent is put at the left end ``phi_m(r-1)`` of its cell, which
    maximizes the probability. Returns ``(lhs, rhs, ok)``.
    """
    if not (b * u * m <= r <= m and b * u * m <= s <= m and r != s):
        raise UsageError("need b u m <= r, s <= m and r != s")
    ctx = ctx or projection_context(m)
    it = Intensity(tilde_beta, params.gamma)
    # displacement window (phi(s-1) - phi(r-1), phi(s) - phi(r-1)]
    lo = _signed_gap(ctx, r - 1, s - 1)
    hi = _signed_gap(ctx, r - 1, s)
    lhs = _cell_probability(it, lo, hi)
    rhs = params.beta * min(r, s) ** -params.gamma * max(r, s) ** (params.gamma - 1.0)
    return lhs, rhs, lhs <= rhs


def _signed_gap(ctx, i, j):
    """``phi_m(j) - phi_m(i)`` for any ``0 <= i, j <= m``."""
    if j >= i:
        return ctx.harmonic_gap(i, j)
    return -ctx.harmonic_gap(j, i)


def lower_coupling_check(params, n, n0, r, tilde_beta, m=None, ctx=None):
    """Lower comparisons for the dominating walk at scale ``n``.

    With ``m`` given: a particle at the right end ``phi_n(r)`` of the cell of
    ``r`` hits the cell of ``m`` with probability at least the kernel value.
    Without ``m``: it has a child projected to ``1..n0`` with probability at
    least ``1 - prod_{l<=n0} (1 - beta l^-gamma r^(gamma-1))``.
    Returns ``(lhs, rhs, ok)``.
    """
    ctx = ctx or projection_context(n)
    it = Intensity(tilde_beta, params.gamma)
    g = params.gamma
    if m is None:
        if not n >= r > n0 >= 1:
            raise UsageError("need n >= r > n0 >= 1")
        hi = _signed_gap(ctx, r, n0)
        lhs = _cell_probability(it, -math.inf, hi)
        ls = np.arange(1, n0 + 1, dtype=np.float64)
        rhs = -math.expm1(np.log1p(-params.beta * ls ** -g * r ** (g - 1.0)).sum())
        return lhs, float(rhs), lhs >= rhs
    if not (n >= m >= n0 and n >= r >= n0 and m != r):
        raise UsageError("need n >= m, r >= n0 and m != r")
    lo = _signed_gap(ctx, r, m - 1)
    hi = _signed_gap(ctx, r, m)
    lhs = _cell_probability(it, lo, hi)
    rhs = params.beta * min(r, m) ** -g * max(r, m) ** (g - 1.0)
    return lhs, rhs, lhs >= rhs


@dataclass(frozen=True)
class DominatingSample:
    progeny: int
    min_position: float
    escape: bool
    truncated: bool
    start: float


def dominating_tree_sim(params, tilde_beta, n, epsilon, rng, caps=Caps(), x=None):
    """Sample ``T_{0,1}(-X)`` with density ``tilde_beta`` and standard exponential ``X``.

    ``escape`` flags a particle at or left of ``-(1 - epsilon) log n``.
    Pass ``x`` to fix the start at ``-x``.
    """
    if not params.beta < tilde_beta < params.beta_c:
        raise ParameterError("tilde_beta", f"need beta < tilde_beta < beta_c, got {tilde_beta!r}")
    rng = make_rng(rng)
    if x is None:
        x = -math.log1p(-rng.random())
    start = -x
    size, _, low, trunc = core.killed_tree_stats(tilde_beta, params.gamma, start, -math.inf, 0.0,
                                                 -math.inf, int(caps.max_particles),
                                                 int(caps.max_generations), rng)
    escape = low <= -(1.0 - epsilon) * math.log(n)
    return DominatingSample(int(size), float(low), bool(escape), bool(trunc), start)


def config_to_dict(cfg):
    return asdict(cfg)

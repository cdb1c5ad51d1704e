"""Pure-Python versions of the sampling kernels.

Every function here has a twin in ``_core.pyx`` with the same signature and
the same consumption of the generator's ``next_double`` stream, so both
backends return identical results for identical generator states.
"""
import math

import numpy as np

NAME = "python"

# Poisson draws are split into chunks of at most this mean so that the
# sequential inversion never underflows exp(-lam).
POISSON_CHUNK = 16.0

STATUS_SUCCESS = 0
STATUS_COLLISION = 1
STATUS_OVERFLOW = 2
STATUS_UNDERFILL = 3


def _poisson_small(rng, lam):
    u = rng.random()
    p = math.exp(-lam)
    f = p
    k = 0
    while u >= f:
        k += 1
        p *= lam / k
        f += p
        if k > 1000:
            break
    return k


def poisson(rng, lam):
    count = 0
    while lam > POISSON_CHUNK:
        count += _poisson_small(rng, POISSON_CHUNK)
        lam -= POISSON_CHUNK
    if lam > 0.0:
        count += _poisson_small(rng, lam)
    return count


def _piece_masses(beta, gamma, lo, hi):
    """Masses of the left (x<0) and right (x>0) pieces of pi on (lo, hi]."""
    left = 0.0
    right = 0.0
    c = 1.0 - gamma
    top = min(hi, 0.0)
    if lo < top:
        if lo == -math.inf:
            left = beta / c * math.exp(c * top)
        else:
            left = beta / c * (math.exp(c * top) - math.exp(c * lo))
    bot = max(lo, 0.0)
    if hi > bot:
        right = beta / gamma * (math.exp(gamma * hi) - math.exp(gamma * bot))
    return left, right


def _inverse_cdf(v, a, b, c):
    # density proportional to exp(c x) on (a, b]; v in (0, 1]
    if a == -math.inf:
        return b + math.log(v) / c
    return b + math.log(v + (1.0 - v) * math.exp(-c * (b - a))) / c


def _offspring_into(rng, beta, gamma, parent, lo, hi, out):
    """Append the sorted absolute offspring positions of ``parent`` in (lo, hi]."""
    rlo = lo - parent
    rhi = hi - parent
    if not rhi > rlo:
        return 0
    left, right = _piece_masses(beta, gamma, rlo, rhi)
    total = left + right
    n = poisson(rng, total)
    if n == 0:
        return 0
    kids = []
    for _ in range(n):
        pick = rng.random()
        v = 1.0 - rng.random()
        if pick * total < left:
            x = _inverse_cdf(v, rlo, min(rhi, 0.0), 1.0 - gamma)
        else:
            x = _inverse_cdf(v, max(rlo, 0.0), rhi, gamma)
        pos = parent + x
        if pos > hi:
            pos = hi
        if pos <= lo:
            pos = math.nextafter(lo, math.inf)
        kids.append(pos)
    kids.sort()
    out.extend(kids)
    return n


def offspring(beta, gamma, parent, lo, hi, rng):
    out = []
    _offspring_into(rng, beta, gamma, parent, lo, hi, out)
    return np.asarray(out, dtype=np.float64)


def killed_tree(beta, gamma, start, log_a, log_d, max_particles, max_generations, rng):
    pos = [start]
    par = [-1]
    gen = [0]
    truncated = False
    head = 0
    kids = []
    while head < len(pos):
        if gen[head] >= max_generations:
            truncated = True
            head += 1
            continue
        kids.clear()
        _offspring_into(rng, beta, gamma, pos[head], log_a, log_d, kids)
        if len(pos) + len(kids) > max_particles:
            truncated = True
            break
        g = gen[head] + 1
        for x in kids:
            pos.append(x)
            par.append(head)
            gen.append(g)
        head += 1
    return (np.asarray(pos, dtype=np.float64), np.asarray(par, dtype=np.int64),
            np.asarray(gen, dtype=np.int64), truncated)


def killed_tree_stats(beta, gamma, start, log_a, log_d, log_b, max_particles,
                      max_generations, rng):
    """Same walk as ``killed_tree`` but only returns summary counts.

    Returns (size, count in (log_b, log_d], minimum position, truncated).
    """
    pos = [start]
    gen = [0]
    truncated = False
    head = 0
    kids = []
    while head < len(pos):
        if gen[head] >= max_generations:
            truncated = True
            head += 1
            continue
        kids.clear()
        _offspring_into(rng, beta, gamma, pos[head], log_a, log_d, kids)
        if len(pos) + len(kids) > max_particles:
            truncated = True
            break
        g = gen[head] + 1
        pos.extend(kids)
        gen.extend([g] * len(kids))
        head += 1
    window = sum(1 for x in pos if log_b < x <= log_d)
    return len(pos), window, min(pos), truncated


def brw_truncated(beta, gamma, start, generations, cutoff, max_particles, rng):
    pos = [start]
    par = [-1]
    gen = [0]
    truncated = False
    head = 0
    kids = []
    while head < len(pos):
        if gen[head] >= generations:
            head += 1
            continue
        kids.clear()
        _offspring_into(rng, beta, gamma, pos[head], -math.inf, pos[head] + cutoff, kids)
        if len(pos) + len(kids) > max_particles:
            truncated = True
            break
        g = gen[head] + 1
        for x in kids:
            pos.append(x)
            par.append(head)
            gen.append(g)
        head += 1
    return (np.asarray(pos, dtype=np.float64), np.asarray(par, dtype=np.int64),
            np.asarray(gen, dtype=np.int64), truncated)


def frozen_decompose(beta, gamma, cutoff, max_particles, rng):
    branching = [0.0]
    xi = []
    truncated = False
    head = 0
    kids = []
    while head < len(branching):
        kids.clear()
        _offspring_into(rng, beta, gamma, branching[head], -math.inf, cutoff, kids)
        if len(branching) + len(xi) + len(kids) > max_particles:
            truncated = True
            break
        for x in kids:
            if x <= 0.0:
                branching.append(x)
            else:
                xi.append(x)
        head += 1
    return (np.asarray(xi, dtype=np.float64), np.asarray(branching, dtype=np.float64),
            truncated)


def cmj_count(beta, gamma, t, log_b, max_particles, rng):
    """Z_t for the frozen-particle general branching process started at time 0.

    Returns (count, number of individuals, truncated).
    """
    lower = t + log_b
    births = [0.0]
    count = 0
    total = 1
    truncated = False
    head = 0
    kids = []
    stack = []
    while head < len(births) and not truncated:
        sigma = births[head]
        head += 1
        stack.clear()
        stack.append(sigma)
        bhead = 0
        while bhead < len(stack):
            x = stack[bhead]
            bhead += 1
            if lower < x <= t:
                count += 1
            kids.clear()
            _offspring_into(rng, beta, gamma, x, -math.inf, t, kids)
            total += len(kids)
            if total > max_particles:
                truncated = True
                break
            for y in kids:
                if y <= sigma:
                    stack.append(y)
                else:
                    births.append(y)
    return count, len(births), truncated


def explore_free(beta, gamma, start, log_a, log_b, y_needed, overflow_at, rng):
    """Depth-first exploration of a killed tree on (log_a, 0] without projection.

    Visits non-root particles in pre-order with children in increasing
    position; stops on overflow (visited >= overflow_at), success
    (count in [log_b, 0] >= y_needed) or exhaustion.
    Returns (status, visited, y_count).
    """
    stack = []
    kids = []
    _offspring_into(rng, beta, gamma, start, log_a, 0.0, kids)
    stack.extend(reversed(kids))
    visited = 0
    y = 0
    while stack:
        x = stack.pop()
        visited += 1
        if visited >= overflow_at:
            return STATUS_OVERFLOW, visited, y
        if log_b <= x <= 0.0:
            y += 1
        if y >= y_needed:
            return STATUS_SUCCESS, visited, y
        kids.clear()
        _offspring_into(rng, beta, gamma, x, log_a, 0.0, kids)
        stack.extend(reversed(kids))
    return STATUS_UNDERFILL, visited, y


def sample_graph_fast(beta, gamma, n, rng):
    """Edges (i, j), i < j, in row-major order (j ascending, then i).

    Within row j the probabilities p_ij = beta i^-gamma j^(gamma-1) (capped at
    one) are nonincreasing in i, so candidates are proposed by geometric skips
    at the current (dominating) probability and thinned by p_ij / q.
    """
    ei = []
    ej = []
    for j in range(2, n + 1):
        scale = beta * j ** (gamma - 1.0)
        i = 1
        q = min(1.0, scale)
        while i < j:
            if q < 1.0:
                u = rng.random()
                skip = math.log(1.0 - u) / math.log1p(-q)
                if skip >= j - i:
                    break
                i += int(skip)
            p = min(1.0, scale * i ** (-gamma))
            if rng.random() * q < p:
                ei.append(i)
                ej.append(j)
            q = p
            i += 1
    return np.asarray(ei, dtype=np.int64), np.asarray(ej, dtype=np.int64)


def components(n, ei, ej):
    """Component label (0-based, in order of first vertex) for vertices 1..n."""
    parent = list(range(n + 1))
    size = [1] * (n + 1)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in zip(ei.tolist(), ej.tolist()):
        ra = find(a)
        rb = find(b)
        if ra == rb:
            continue
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        size[ra] += size[rb]
    labels = np.empty(n, dtype=np.int64)
    seen = {}
    for v in range(1, n + 1):
        r = find(v)
        lab = seen.get(r)
        if lab is None:
            lab = len(seen)
            seen[r] = lab
        labels[v - 1] = lab
    return labels

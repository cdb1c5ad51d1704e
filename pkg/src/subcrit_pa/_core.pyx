# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled sampling kernels.

Mirrors ``_core_py`` call for call: same signatures, same draws from the
generator's ``next_double`` in the same order, same floating-point
operations. Only the loop overhead differs.
"""
import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport exp, log, log1p, pow, nextafter, INFINITY
from libcpp.vector cimport vector
from libcpp.algorithm cimport sort
from numpy.random cimport bitgen_t

NAME = "cython"

cdef double POISSON_CHUNK = 16.0

cdef enum:
    _SUCCESS = 0
    _COLLISION = 1
    _OVERFLOW = 2
    _UNDERFILL = 3

STATUS_SUCCESS = _SUCCESS
STATUS_COLLISION = _COLLISION
STATUS_OVERFLOW = _OVERFLOW
STATUS_UNDERFILL = _UNDERFILL


cdef inline double _unif(bitgen_t *bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef long _poisson_small(bitgen_t *bg, double lam) noexcept nogil:
    cdef double u = _unif(bg)
    cdef double p = exp(-lam)
    cdef double f = p
    cdef long k = 0
    while u >= f:
        k += 1
        p *= lam / k
        f += p
        if k > 1000:
            break
    return k


cdef long _poisson(bitgen_t *bg, double lam) noexcept nogil:
    cdef long count = 0
    while lam > POISSON_CHUNK:
        count += _poisson_small(bg, POISSON_CHUNK)
        lam -= POISSON_CHUNK
    if lam > 0.0:
        count += _poisson_small(bg, lam)
    return count


cdef inline double _inverse_cdf(double v, double a, double b, double c) noexcept nogil:
    if a == -INFINITY:
        return b + log(v) / c
    return b + log(v + (1.0 - v) * exp(-c * (b - a))) / c


cdef long _offspring_into(bitgen_t *bg, double beta, double gamma, double parent,
                          double lo, double hi, vector[double] &out) noexcept nogil:
    cdef double rlo = lo - parent
    cdef double rhi = hi - parent
    cdef double left = 0.0, right = 0.0, c = 1.0 - gamma
    cdef double top, bot, total, pick, v, x, pos
    cdef long n, k
    cdef size_t first
    if not rhi > rlo:
        return 0
    top = rhi if rhi < 0.0 else 0.0
    if rlo < top:
        if rlo == -INFINITY:
            left = beta / c * exp(c * top)
        else:
            left = beta / c * (exp(c * top) - exp(c * rlo))
    bot = rlo if rlo > 0.0 else 0.0
    if rhi > bot:
        right = beta / gamma * (exp(gamma * rhi) - exp(gamma * bot))
    total = left + right
    n = _poisson(bg, total)
    if n == 0:
        return 0
    first = out.size()
    for k in range(n):
        pick = _unif(bg)
        v = 1.0 - _unif(bg)
        if pick * total < left:
            x = _inverse_cdf(v, rlo, top, c)
        else:
            x = _inverse_cdf(v, bot, rhi, gamma)
        pos = parent + x
        if pos > hi:
            pos = hi
        if pos <= lo:
            pos = nextafter(lo, INFINITY)
        out.push_back(pos)
    sort(out.begin() + first, out.end())
    return n


cdef bitgen_t *_bitgen(object capsule) except NULL:
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef object _to_array_d(vector[double] &v):
    arr = np.empty(v.size(), dtype=np.float64)
    cdef double[::1] view = arr
    cdef size_t i
    for i in range(v.size()):
        view[i] = v[i]
    return arr


cdef object _to_array_l(vector[long] &v):
    arr = np.empty(v.size(), dtype=np.int64)
    cdef long long[::1] view = arr
    cdef size_t i
    for i in range(v.size()):
        view[i] = v[i]
    return arr


def offspring(double beta, double gamma, double parent, double lo, double hi, rng):
    cdef vector[double] out
    bit = rng.bit_generator
    capsule = bit.capsule
    cdef bitgen_t *bg = _bitgen(capsule)
    with bit.lock:
        _offspring_into(bg, beta, gamma, parent, lo, hi, out)
    return _to_array_d(out)


def killed_tree(double beta, double gamma, double start, double log_a, double log_d,
                long max_particles, long max_generations, rng):
    cdef vector[double] pos, kids
    cdef vector[long] par, gen
    cdef bint truncated = False
    cdef size_t head = 0, k
    cdef long g
    bit = rng.bit_generator
    capsule = bit.capsule
    cdef bitgen_t *bg = _bitgen(capsule)
    pos.push_back(start)
    par.push_back(-1)
    gen.push_back(0)
    with bit.lock:
        with nogil:
            while head < pos.size():
                if gen[head] >= max_generations:
                    truncated = True
                    head += 1
                    continue
                kids.clear()
                _offspring_into(bg, beta, gamma, pos[head], log_a, log_d, kids)
                if <long>(pos.size() + kids.size()) > max_particles:
                    truncated = True
                    break
                g = gen[head] + 1
                for k in range(kids.size()):
                    pos.push_back(kids[k])
                    par.push_back(<long>head)
                    gen.push_back(g)
                head += 1
    return _to_array_d(pos), _to_array_l(par), _to_array_l(gen), bool(truncated)


def killed_tree_stats(double beta, double gamma, double start, double log_a, double log_d,
                      double log_b, long max_particles, long max_generations, rng):
    cdef vector[double] pos, kids
    cdef vector[long] gen
    cdef bint truncated = False
    cdef size_t head = 0, k
    cdef long g, window = 0
    cdef double lo = start, x
    bit = rng.bit_generator
    capsule = bit.capsule
    cdef bitgen_t *bg = _bitgen(capsule)
    pos.push_back(start)
    gen.push_back(0)
    with bit.lock:
        with nogil:
            while head < pos.size():
                if gen[head] >= max_generations:
                    truncated = True
                    head += 1
                    continue
                kids.clear()
                _offspring_into(bg, beta, gamma, pos[head], log_a, log_d, kids)
                if <long>(pos.size() + kids.size()) > max_particles:
                    truncated = True
                    break
                g = gen[head] + 1
                for k in range(kids.size()):
                    pos.push_back(kids[k])
                    gen.push_back(g)
                head += 1
            for k in range(pos.size()):
                x = pos[k]
                if x < lo:
                    lo = x
                if log_b < x and x <= log_d:
                    window += 1
    return <long>pos.size(), window, lo, bool(truncated)


def brw_truncated(double beta, double gamma, double start, long generations, double cutoff,
                  long max_particles, rng):
    cdef vector[double] pos, kids
    cdef vector[long] par, gen
    cdef bint truncated = False
    cdef size_t head = 0, k
    cdef long g
    bit = rng.bit_generator
    capsule = bit.capsule
    cdef bitgen_t *bg = _bitgen(capsule)
    pos.push_back(start)
    par.push_back(-1)
    gen.push_back(0)
    with bit.lock:
        with nogil:
            while head < pos.size():
                if gen[head] >= generations:
                    head += 1
                    continue
                kids.clear()
                _offspring_into(bg, beta, gamma, pos[head], -INFINITY, pos[head] + cutoff, kids)
                if <long>(pos.size() + kids.size()) > max_particles:
                    truncated = True
                    break
                g = gen[head] + 1
                for k in range(kids.size()):
                    pos.push_back(kids[k])
                    par.push_back(<long>head)
                    gen.push_back(g)
                head += 1
    return _to_array_d(pos), _to_array_l(par), _to_array_l(gen), bool(truncated)


def frozen_decompose(double beta, double gamma, double cutoff, long max_particles, rng):
    cdef vector[double] branching, xi, kids
    cdef bint truncated = False
    cdef size_t head = 0, k
    cdef double x
    bit = rng.bit_generator
    capsule = bit.capsule
    cdef bitgen_t *bg = _bitgen(capsule)
    branching.push_back(0.0)
    with bit.lock:
        with nogil:
            while head < branching.size():
                kids.clear()
                _offspring_into(bg, beta, gamma, branching[head], -INFINITY, cutoff, kids)
                if <long>(branching.size() + xi.size() + kids.size()) > max_particles:
                    truncated = True
                    break
                for k in range(kids.size()):
                    x = kids[k]
                    if x <= 0.0:
                        branching.push_back(x)
                    else:
                        xi.push_back(x)
                head += 1
    return _to_array_d(xi), _to_array_d(branching), bool(truncated)


def cmj_count(double beta, double gamma, double t, double log_b, long max_particles, rng):
    cdef vector[double] births, stack, kids
    cdef double lower = t + log_b, sigma, x, y
    cdef long count = 0, total = 1
    cdef bint truncated = False
    cdef size_t head = 0, bhead, k
    bit = rng.bit_generator
    capsule = bit.capsule
    cdef bitgen_t *bg = _bitgen(capsule)
    births.push_back(0.0)
    with bit.lock:
        with nogil:
            while head < births.size() and not truncated:
                sigma = births[head]
                head += 1
                stack.clear()
                stack.push_back(sigma)
                bhead = 0
                while bhead < stack.size():
                    x = stack[bhead]
                    bhead += 1
                    if lower < x and x <= t:
                        count += 1
                    kids.clear()
                    _offspring_into(bg, beta, gamma, x, -INFINITY, t, kids)
                    total += <long>kids.size()
                    if total > max_particles:
                        truncated = True
                        break
                    for k in range(kids.size()):
                        y = kids[k]
                        if y <= sigma:
                            stack.push_back(y)
                        else:
                            births.push_back(y)
    return count, <long>births.size(), bool(truncated)


def explore_free(double beta, double gamma, double start, double log_a, double log_b,
                 double y_needed, double overflow_at, rng):
    cdef vector[double] stack, kids
    cdef long visited = 0, y = 0, status = _UNDERFILL
    cdef long k
    cdef double x
    bit = rng.bit_generator
    capsule = bit.capsule
    cdef bitgen_t *bg = _bitgen(capsule)
    with bit.lock:
        with nogil:
            _offspring_into(bg, beta, gamma, start, log_a, 0.0, kids)
            for k in range(<long>kids.size() - 1, -1, -1):
                stack.push_back(kids[k])
            while stack.size() > 0:
                x = stack.back()
                stack.pop_back()
                visited += 1
                if visited >= overflow_at:
                    status = _OVERFLOW
                    break
                if log_b <= x and x <= 0.0:
                    y += 1
                if y >= y_needed:
                    status = _SUCCESS
                    break
                kids.clear()
                _offspring_into(bg, beta, gamma, x, log_a, 0.0, kids)
                for k in range(<long>kids.size() - 1, -1, -1):
                    stack.push_back(kids[k])
    return status, visited, y


def sample_graph_fast(double beta, double gamma, long n, rng):
    cdef vector[long] ei, ej
    cdef long i, j
    cdef double scale, q, p, u, skip
    bit = rng.bit_generator
    capsule = bit.capsule
    cdef bitgen_t *bg = _bitgen(capsule)
    with bit.lock:
        with nogil:
            for j in range(2, n + 1):
                scale = beta * pow(<double>j, gamma - 1.0)
                i = 1
                q = scale if scale < 1.0 else 1.0
                while i < j:
                    if q < 1.0:
                        u = _unif(bg)
                        skip = log(1.0 - u) / log1p(-q)
                        if skip >= <double>(j - i):
                            break
                        i += <long>skip
                    p = scale * pow(<double>i, -gamma)
                    if p > 1.0:
                        p = 1.0
                    if _unif(bg) * q < p:
                        ei.push_back(i)
                        ej.push_back(j)
                    q = p
                    i += 1
    return _to_array_l(ei), _to_array_l(ej)


cdef long _find(long[::1] parent, long x) noexcept nogil:
    cdef long root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def components(long n, ei, ej):
    cdef long[::1] parent = np.arange(n + 1, dtype=np.int_)
    cdef long[::1] size = np.ones(n + 1, dtype=np.int_)
    cdef long long[::1] a = np.ascontiguousarray(ei, dtype=np.int64)
    cdef long long[::1] b = np.ascontiguousarray(ej, dtype=np.int64)
    cdef long[::1] seen = np.full(n + 1, -1, dtype=np.int_)
    labels = np.empty(n, dtype=np.int64)
    cdef long long[::1] lab = labels
    cdef Py_ssize_t e, v
    cdef long ra, rb, tmp, nlab = 0
    with nogil:
        for e in range(a.shape[0]):
            ra = _find(parent, <long>a[e])
            rb = _find(parent, <long>b[e])
            if ra == rb:
                continue
            if size[ra] < size[rb]:
                tmp = ra
                ra = rb
                rb = tmp
            parent[rb] = ra
            size[ra] += size[rb]
        for v in range(1, n + 1):
            ra = _find(parent, v)
            if seen[ra] < 0:
                seen[ra] = nlab
                nlab += 1
            lab[v - 1] = seen[ra]
    return labels

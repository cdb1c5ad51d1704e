"""Maps between vertices 1..m and positions on the negative half-line.

``phi_m(i) = -sum_{j=i+1}^m 1/j`` and ``pi_m(x)`` is the vertex ``i`` whose
cell ``(phi_m(i-1), phi_m(i)]`` contains ``x`` (with ``phi_m(0) = -H(m)``).
Both are computed from the same table, so ``pi_m(phi_m(i)) == i`` exactly.
"""
import math
from functools import lru_cache

import numpy as np

from .errors import ParameterError, ProjectionRangeError

# exact suffix sums are tabulated up to this m; beyond it an asymptotic
# expansion of the harmonic numbers is used
TABLE_LIMIT = 1 << 22
# largest m for which consecutive phi values stay distinct in float64
MAX_M = 1 << 48

_EULER = 0.5772156649015329


def _harmonic_tail(m, i):
    """``H(m) - H(i)`` for large ``i`` from the Euler-Maclaurin expansion."""
    if i == m:
        return 0.0
    ii = float(i)
    mm = float(m)
    inv_i2 = 1.0 / (ii * ii)
    inv_m2 = 1.0 / (mm * mm)
    corr = (0.5 / mm - 0.5 / ii) - (inv_m2 - inv_i2) / 12.0 + (inv_m2 * inv_m2 - inv_i2 * inv_i2) / 120.0
    return math.log1p((mm - ii) / ii) + corr


def _harmonic_large(m):
    mm = float(m)
    inv2 = 1.0 / (mm * mm)
    return math.log(mm) + _EULER + 0.5 / mm - inv2 / 12.0 + inv2 * inv2 / 120.0


@lru_cache(maxsize=1)
def _small_harmonics():
    return np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, TABLE_LIMIT + 1))])


class ProjectionContext:
    """``phi_m`` and ``pi_m`` for a fixed ``m``; immutable and shareable."""

    def __init__(self, m):
        if int(m) != m or m < 1:
            raise ParameterError("m", f"must be a positive integer, got {m!r}")
        if m > MAX_M:
            raise ParameterError("m", f"must not exceed 2**48, got {m!r}")
        self.m = int(m)
        self.tabulated = self.m <= TABLE_LIMIT
        if self.tabulated:
            inv = 1.0 / np.arange(self.m, 0, -1, dtype=np.float64)
            # phi[i] for i = 0..m; phi[m] = 0
            suffix = np.concatenate([[0.0], np.cumsum(inv)])[::-1]
            self._phi = -suffix
            self._small = None
        else:
            self._phi = None
            self._small = _small_harmonics()
            self._hm = _harmonic_large(self.m)

    @property
    def lower_limit(self):
        """``phi_m(0) = -H(m)``; positions must exceed it."""
        return self._phi_at(0)

    def _phi_at(self, i):
        if self.tabulated:
            return float(self._phi[i])
        if i == 0:
            return -self._hm
        if i <= TABLE_LIMIT:
            return -(self._hm - self._small[i])
        return -_harmonic_tail(self.m, i)

    def phi(self, i):
        i = int(i)
        if not 1 <= i <= self.m:
            raise ParameterError("i", f"must lie in 1..{self.m}, got {i}")
        return self._phi_at(i)

    def phi_array(self):
        if not self.tabulated:
            raise ParameterError("m", "phi_array needs a tabulated context")
        return self._phi[1:].copy()

    def pi(self, x):
        """Smallest ``i`` with ``phi_m(i) >= x``."""
        if x > 0.0:
            raise ProjectionRangeError(f"position {x} is positive")
        if self.tabulated:
            if x <= self._phi[0]:
                raise ProjectionRangeError(f"position {x} lies left of vertex 1")
            return int(np.searchsorted(self._phi, x, side="left"))
        if x <= self._phi_at(0):
            raise ProjectionRangeError(f"position {x} lies left of vertex 1")
        i = min(max(int(math.ceil(self.m * math.exp(x))), 1), self.m)
        while i > 1 and self._phi_at(i - 1) >= x:
            i -= 1
        while self._phi_at(i) < x:
            i += 1
        return i

    def harmonic_gap(self, i, j):
        """``sum_{k=i+1}^{j} 1/k = phi_m(j) - phi_m(i)`` for ``0 <= i <= j <= m``."""
        return self._phi_at(j) - self._phi_at(i)


@lru_cache(maxsize=16)
def projection_context(m):
    """Shared context for ``m`` (contexts are immutable)."""
    return ProjectionContext(m)


def phi_m(ctx, i):
    return ctx.phi(i)


def pi_m(ctx, x):
    return ctx.pi(x)

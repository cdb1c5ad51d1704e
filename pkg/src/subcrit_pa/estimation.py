"""Exponent fits, tail-index estimates, seeded replicas and extinction probabilities."""
import math
import traceback
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from scipy import stats

from .errors import NumericError, ParameterError
from .rng import derive_seed


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    stderr: float
    points: list


def fit_exponent(points):
    """OLS slope of ``log value`` against ``log n`` for ``(n, value)`` pairs."""
    pts = list(points)
    if len(pts) < 3:
        raise ParameterError("points", f"need at least 3 points, got {len(pts)}")
    n = np.array([p[0] for p in pts], dtype=np.float64)
    v = np.array([p[1] for p in pts], dtype=np.float64)
    if np.any(n <= 0) or np.any(v <= 0):
        raise ParameterError("points", "n and value must be positive")
    x = np.log(n)
    y = np.log(v)
    if np.ptp(x) == 0.0:
        raise ParameterError("points", "all n are equal")
    res = stats.linregress(x, y)
    return ExponentFit(float(res.slope), float(res.intercept), float(res.stderr),
                       list(zip(x.tolist(), y.tolist())))


def default_hill_k(n):
    return int(math.floor(n ** (2.0 / 3.0)))


def hill_estimator(samples, k=None):
    """Hill estimate ``(mean_{i<=k} log(x_(i) / x_(k+1)))^-1`` from the ``k`` largest values."""
    x = np.sort(np.asarray(samples, dtype=np.float64))[::-1]
    if k is None:
        k = default_hill_k(x.size)
    k = int(k)
    if not 2 <= k < x.size:
        raise ParameterError("k", f"need 2 <= k < {x.size}, got {k}")
    ref = x[k]
    if not ref > 0.0:
        raise NumericError(f"order statistic x_(k+1) = {ref} is not positive")
    mean_log = float(np.mean(np.log(x[:k] / ref)))
    if not mean_log > 0.0:
        raise NumericError("the top order statistics are all equal")
    return 1.0 / mean_log


def hill_sweep(samples, ks):
    """``[(k, estimate or None)]``; failures are reported as ``None``."""
    out = []
    for k in ks:
        try:
            out.append((int(k), hill_estimator(samples, k)))
        except (ParameterError, NumericError):
            out.append((int(k), None))
    return out


def default_sweep_ks(n):
    ks = sorted({int(round(n ** e)) for e in (0.3, 0.4, 0.5, 0.6, 2.0 / 3.0, 0.75)})
    return [k for k in ks if 2 <= k < n]


def gw_extinction_prob(epsilon, k, tol=1e-14, max_iter=10_000_000):
    """Smallest root in [0, 1] of ``s = 1 - epsilon + epsilon s^k``."""
    if not 0.0 < epsilon <= 1.0:
        raise ParameterError("epsilon", f"must lie in (0, 1], got {epsilon!r}")
    if int(k) != k or k < 1:
        raise ParameterError("k", f"must be a positive integer, got {k!r}")
    if epsilon == 1.0:
        return 0.0
    if epsilon * k <= 1.0:
        return 1.0
    s = 0.0
    for _ in range(max_iter):
        nxt = 1.0 - epsilon + epsilon * s ** k
        slope = epsilon * k * nxt ** (k - 1)
        if abs(nxt - s) <= tol * max(1.0 - slope, tol):
            return nxt
        s = nxt
    raise NumericError("fixed-point iteration did not converge")


def gw_extinction_by(epsilon, k, generations):
    """``P(Z_generations = 0)`` for one ancestor: the ``generations``-fold iterate from 0."""
    s = 0.0
    for _ in range(int(generations)):
        s = 1.0 - epsilon + epsilon * s ** k
    return s


@dataclass(frozen=True)
class ReplicaPlan:
    master_seed: int
    replica_count: int
    task_id: str

    def seed(self, index):
        return derive_seed(self.master_seed, self.task_id, index)


@dataclass
class ReplicaRecord:
    index: int
    seed: int
    ok: bool
    value: Any = None
    error: Optional[str] = None


def _run_one(task, index, seed):
    try:
        return ReplicaRecord(index, seed, True, task(index, seed))
    except Exception:
        return ReplicaRecord(index, seed, False, None, traceback.format_exc(limit=3))


def run_replicas(plan, task, workers=1, executor="thread", on_error="record", order=None):
    """Run ``task(index, seed)`` for every replica; records come back ordered by index.

    ``order`` optionally permutes submission (results are still merged by
    index). With ``on_error="raise"`` the first failure is re-raised.
    """
    indices = list(range(plan.replica_count)) if order is None else list(order)
    if sorted(indices) != list(range(plan.replica_count)):
        raise ParameterError("order", "must be a permutation of the replica indices")
    jobs = [(i, plan.seed(i)) for i in indices]
    if workers <= 1:
        records = [_run_one(task, i, s) for i, s in jobs]
    else:
        pool_cls = ProcessPoolExecutor if executor == "process" else ThreadPoolExecutor
        with pool_cls(max_workers=workers) as pool:
            futures = [pool.submit(_run_one, task, i, s) for i, s in jobs]
            records = [f.result() for f in futures]
    records.sort(key=lambda r: r.index)
    if on_error == "raise":
        for r in records:
            if not r.ok:
                raise RuntimeError(f"replica {r.index} failed:\n{r.error}")
    return records


@dataclass
class ReplicaSummary:
    values: list
    failed: list = field(default_factory=list)

    @property
    def failure_count(self):
        return len(self.failed)


def summarize(records):
    """Split records into successful values (in index order) and failed indices."""
    return ReplicaSummary([r.value for r in records if r.ok], [r.index for r in records if not r.ok])

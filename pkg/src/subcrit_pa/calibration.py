"""Monte Carlo choice of the exploration constants (epsilon, a, u0).

The constants only need to exist; here they are picked from grids by
estimating the probabilities they must control:

* epsilon: largest grid value with ``P(min position of the walk from 0 > log b) >= epsilon``
  and ``P(Y >= epsilon) >= 5 epsilon``, where ``Y`` is approximated by
  ``u^rho I(0, b)`` at a small ``u``;
* a: smallest grid value with ``P_u(I(ub, 0) >= a/2 u^-rho) <= epsilon`` on the whole u grid;
* u0: largest grid value below ``b``, ``2^(-1/rho)`` and ``(a / (2 (a+1)))^(1/rho)``
  such that ``P_{u'}(I(ub, b) >= epsilon u^-rho) >= 3 epsilon`` for
  ``u' in {ub, u}`` and for every smaller grid ``u``.
"""
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from .backend import core
from .brw import Intensity
from .errors import CalibrationError
from .rng import make_rng

FIXTURE = "calibration_g0.25_b0.09_half.json"


@dataclass
class MonteCarloBudget:
    samples: int = 20000
    eps_grid: tuple = (0.2, 0.15, 0.12, 0.1, 0.08, 0.06, 0.05, 0.04, 0.03, 0.025, 0.02, 0.015, 0.01)
    a_grid: tuple = (2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0)
    u_grid: tuple = tuple(2.0 ** -j for j in range(3, 13))
    # Y is approximated by u^rho I(0, b) at this u
    y_u: float = 2.0 ** -12
    # right barrier standing in for an unkilled walk when estimating the minimum
    right_cutoff: float = 16.0
    max_particles: int = 1_000_000


@dataclass
class Calibration:
    gamma: float
    tilde_beta: float
    b: float
    rho: float
    epsilon: float
    a: float
    u0: float
    seed: int
    budget: dict
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def _sizes(intensity, start, log_a, log_d, log_b, samples, rng, max_particles):
    size = np.empty(samples, dtype=np.int64)
    window = np.empty(samples, dtype=np.int64)
    low = np.empty(samples)
    trunc = 0
    for k in range(samples):
        s, w, lo, t = core.killed_tree_stats(intensity.beta, intensity.gamma, start, log_a, log_d,
                                             log_b, max_particles, 1 << 40, rng)
        size[k] = s
        window[k] = w
        low[k] = lo
        trunc += t
    return size, window, low, trunc


def calibrate_constants(intensity, b, budget=None, seed=0):
    """Return a :class:`Calibration`; raises :class:`CalibrationError` with diagnostics on failure."""
    budget = budget or MonteCarloBudget()
    rng = make_rng(seed)
    rho = intensity.rho[0]
    n = budget.samples
    log_b = math.log(b)
    diag = {}

    # minimum position of the walk started at 0
    _, _, low, trunc = _sizes(intensity, 0.0, -math.inf, budget.right_cutoff, log_b, n, rng,
                              budget.max_particles)
    p_inf = float(np.mean(low > log_b))
    diag["p_min_above_log_b"] = p_inf
    diag["truncated_min_runs"] = int(trunc)

    # Y approximated at a small u
    u = budget.y_u
    _, window, _, trunc = _sizes(intensity, math.log(u), -math.inf, 0.0, log_b, n, rng,
                                 budget.max_particles)
    y = window * u ** rho
    diag["truncated_y_runs"] = int(trunc)
    eps = None
    eps_table = {}
    for e in budget.eps_grid:
        p_y = float(np.mean(y >= e))
        eps_table[repr(e)] = p_y
        if eps is None and p_inf >= e and p_y >= 5 * e:
            eps = e
    diag["p_y_at_least_eps"] = eps_table
    if eps is None:
        raise CalibrationError("no epsilon on the grid satisfies both conditions", diag)

    # exploration sizes and in-window counts on the u grid
    over = {}
    fill = {}
    for ug in budget.u_grid:
        log_a = math.log(ug * b)
        sizes_top, win_top, _, _ = _sizes(intensity, math.log(ug), log_a, 0.0, log_b, n, rng,
                                          budget.max_particles)
        _, win_bot, _, _ = _sizes(intensity, math.nextafter(log_a, 0.0), log_a, 0.0, log_b, n, rng,
                                  budget.max_particles)
        over[ug] = sizes_top - 1
        need = eps * ug ** -rho
        fill[ug] = min(float(np.mean(win_top >= need)), float(np.mean(win_bot >= need)))
    a = None
    for ag in budget.a_grid:
        worst = max(float(np.mean(over[ug] >= 0.5 * ag * ug ** -rho)) for ug in budget.u_grid)
        if worst <= eps:
            a = ag
            break
    diag["fill_prob"] = {repr(k): v for k, v in fill.items()}
    if a is None:
        raise CalibrationError(f"no a on the grid controls overflow at epsilon={eps}", diag)

    cap = min(b, 2.0 ** (-1.0 / rho), (a / (2.0 * (a + 1.0))) ** (1.0 / rho))
    u0 = None
    for ug in sorted(budget.u_grid):
        if ug >= cap or fill[ug] < 3 * eps:
            break
        u0 = ug
    diag["u0_cap"] = cap
    if u0 is None:
        raise CalibrationError("no u on the grid satisfies the fill condition", diag)
    budget_d = asdict(budget)
    budget_d["eps_grid"] = list(budget.eps_grid)
    budget_d["a_grid"] = list(budget.a_grid)
    budget_d["u_grid"] = list(budget.u_grid)
    return Calibration(intensity.gamma, intensity.beta, b, rho, eps, a, u0, int(seed), budget_d, diag)


def load_fixture(name=FIXTURE):
    text = resources.files("subcrit_pa").joinpath("data", name).read_text()
    return Calibration.from_dict(json.loads(text))


def default_intensity():
    return Intensity(0.09, 0.25)

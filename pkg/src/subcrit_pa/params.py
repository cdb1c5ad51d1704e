"""Model parameters and the closed-form constants of the model.

The kernel is ``kappa(x, y) = beta * max(x, y)**(gamma - 1) * min(x, y)**(-gamma)``.
The displacement intensity of the associated branching random walk has
Laplace transform

    psi(t) = beta / (t - gamma) + beta / (1 - gamma - t),   gamma < t < 1 - gamma,

and ``psi(t) = inf`` elsewhere. In the subcritical regime ``psi(t) = 1`` has
two roots ``rho_minus < 1/2 < rho_plus``,

    rho_pm = 1/2 -+ sqrt((gamma - 1/2)**2 + beta * (2 * gamma - 1)),

which is the same number as ``1/2 -+ sqrt((1/2 - gamma)**2 - beta * (1 - 2 * gamma))``.
"""
import math
from dataclasses import dataclass
from typing import Optional

from scipy.optimize import brentq

from .errors import NumericError, ParameterError, RegimeError

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "critical-or-supercritical"

DEFAULT_TOL = 1e-12
BRACKET_EPS = 1e-12

# psi(t) outside (gamma, 1 - gamma)
PSI_INFINITY = math.inf


def critical_beta(gamma):
    """``(1/4 - gamma/2) v 0``."""
    if not 0.0 < gamma < 1.0:
        raise ParameterError("gamma", f"must lie in (0, 1), got {gamma!r}")
    return max(0.25 - gamma / 2.0, 0.0)


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    beta: float

    @property
    def beta_c(self):
        return critical_beta(self.gamma)

    @property
    def regime(self):
        if self.gamma < 0.5 and self.beta < self.beta_c:
            return SUBCRITICAL
        return SUPERCRITICAL

    @property
    def subcritical(self):
        return self.regime == SUBCRITICAL

    def with_beta(self, beta):
        return validate_params(self.gamma, beta)


def validate_params(gamma, beta):
    """Check ranges and return :class:`ModelParams`.

    Raises :class:`ParameterError` naming the offending field.
    """
    try:
        gamma = float(gamma)
    except (TypeError, ValueError):
        raise ParameterError("gamma", f"not a number: {gamma!r}") from None
    try:
        beta = float(beta)
    except (TypeError, ValueError):
        raise ParameterError("beta", f"not a number: {beta!r}") from None
    if not 0.0 < gamma < 1.0:
        raise ParameterError("gamma", f"must lie in (0, 1), got {gamma!r}")
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ParameterError("beta", f"must be positive and finite, got {beta!r}")
    return ModelParams(gamma, beta)


def _require_subcritical(params):
    if not params.subcritical:
        raise RegimeError(
            f"parameters (gamma={params.gamma}, beta={params.beta}) are not subcritical "
            f"(beta_c={params.beta_c})"
        )


def psi(params, t):
    """Laplace transform of the displacement intensity; ``inf`` off its domain."""
    g, b = params.gamma, params.beta
    if g < t < 1.0 - g:
        return b / (t - g) + b / (1.0 - g - t)
    return PSI_INFINITY


def psi_prime(params, t):
    g, b = params.gamma, params.beta
    if g < t < 1.0 - g:
        return -b / (t - g) ** 2 + b / (1.0 - g - t) ** 2
    return math.nan


def rho_pm(params):
    """Roots ``(rho_minus, rho_plus)`` of ``psi(t) = 1`` in closed form."""
    g, b = params.gamma, params.beta
    half_gap = 0.5 - g
    disc = half_gap * half_gap - b * (1.0 - 2.0 * g)
    if not params.subcritical or disc < 0.0:
        raise RegimeError(f"psi(t) = 1 has no real roots for gamma={g}, beta={b}")
    root = math.sqrt(disc)
    # rho_minus - gamma = half_gap - root, rewritten to avoid cancellation
    rho_minus = g + b * (1.0 - 2.0 * g) / (half_gap + root)
    rho_plus = 0.5 + root
    return rho_minus, rho_plus


def _bisect(f, lo, hi, tol):
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NumericError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rho_pm_bisection(params, tol=1e-10):
    """Roots of ``psi(t) = 1`` by bracketed bisection (independent of :func:`rho_pm`)."""
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    g = params.gamma
    if not g < 0.5:
        raise NumericError("psi has an empty domain for gamma >= 1/2")

    def f(t):
        return psi(params, t) - 1.0

    if not f(0.5) < 0.0:
        raise NumericError("psi(1/2) >= 1: roots are not bracketed (parameters not subcritical)")
    lower = _bisect(f, g + BRACKET_EPS, 0.5, tol)
    upper = _bisect(f, 0.5, 1.0 - g - BRACKET_EPS, tol)
    return lower, upper


def _tstar_gap(params, t):
    p = psi(params, t)
    return math.log(p) / t - psi_prime(params, t) / p


def t_star(params, tol=DEFAULT_TOL):
    """Solution in ``(rho_minus, rho_plus)`` of ``log(psi(t)) / t = psi'(t) / psi(t)``."""
    _require_subcritical(params)
    lo, hi = rho_pm(params)
    if _tstar_gap(params, lo) <= 0.0 or _tstar_gap(params, hi) >= 0.0:
        raise NumericError("t* equation has no sign change on (rho_minus, rho_plus)")
    return brentq(lambda t: _tstar_gap(params, t), lo, hi, xtol=tol, rtol=4 * 2.0**-52)


def deviation_bound(params, tol=DEFAULT_TOL):
    """``-psi'(t*) / psi(t*)``, the upper end of the admissible deviation range."""
    ts = t_star(params, tol)
    return -psi_prime(params, ts) / psi(params, ts)


def deviation_rate(params, delta, tol=DEFAULT_TOL):
    """Large-deviation rate ``I(delta) = -delta - psi'(t*) / psi(t*)``.

    Defined for ``0 < delta <= -psi'(t*)/psi(t*)``; the rate is zero at the
    right end.
    """
    bound = deviation_bound(params, tol)
    if not 0.0 < delta <= bound:
        raise ParameterError("delta", f"must lie in (0, {bound}], got {delta!r}")
    return bound - delta


@dataclass(frozen=True)
class DerivedConstants:
    beta_c: float
    tau: float
    psi_domain: tuple
    rho_minus: Optional[float] = None
    rho_plus: Optional[float] = None
    t_star: Optional[float] = None


def derived_constants(params, tol=DEFAULT_TOL):
    g = params.gamma
    base = dict(beta_c=params.beta_c, tau=1.0 + 1.0 / g, psi_domain=(g, 1.0 - g))
    if not params.subcritical:
        return DerivedConstants(**base)
    rm, rp = rho_pm(params)
    return DerivedConstants(rho_minus=rm, rho_plus=rp, t_star=t_star(params, tol), **base)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from subcrit_pa.errors import NumericError, ParameterError, RegimeError
from subcrit_pa.params import (SUBCRITICAL, SUPERCRITICAL, ModelParams, critical_beta,
                               derived_constants, deviation_bound, deviation_rate, psi, psi_prime,
                               rho_pm, rho_pm_bisection, t_star, validate_params)

BASE = ModelParams(0.25, 0.1)


@st.composite
def subcritical(draw):
    g = draw(st.floats(0.01, 0.45))
    frac = draw(st.floats(0.02, 0.98))
    return ModelParams(g, frac * critical_beta(g))


def weighted_density(params, t, x):
    """``exp(-t x)`` times the displacement density, combined to avoid overflow."""
    g, b = params.gamma, params.beta
    return b * math.exp((g - t) * x) if x > 0 else b * math.exp((1.0 - g - t) * x)


def test_critical_beta():
    assert critical_beta(0.25) == 0.125
    assert critical_beta(0.5) == 0.0
    assert critical_beta(0.6) == 0.0


@pytest.mark.parametrize("g, b", [(0.0, 0.1), (1.0, 0.1), (0.3, 0.0), (0.3, -1.0),
                                  (math.nan, 0.1), (0.3, math.inf)])
def test_validate_rejects(g, b):
    with pytest.raises(ParameterError):
        validate_params(g, b)


def test_regime_labels():
    assert validate_params(0.25, 0.1).regime == SUBCRITICAL
    assert validate_params(0.25, 0.2).regime == SUPERCRITICAL
    assert validate_params(0.25, 0.125).regime == SUPERCRITICAL
    assert validate_params(0.6, 0.01).regime == SUPERCRITICAL


def test_psi_off_domain_is_infinite():
    assert psi(BASE, 0.25) == math.inf
    assert psi(BASE, 0.1) == math.inf
    assert psi(BASE, 0.8) == math.inf
    assert math.isnan(psi_prime(BASE, 0.9))


@pytest.mark.parametrize("t", [0.3, 0.45, 0.5, 0.62, 0.7])
def test_psi_matches_quadrature(t):
    f = lambda x: weighted_density(BASE, t, x)
    left, _ = integrate.quad(f, -np.inf, 0.0)
    right, _ = integrate.quad(f, 0.0, np.inf)
    assert psi(BASE, t) == pytest.approx(left + right, rel=1e-9)


@given(subcritical(), st.floats(0.05, 0.95))
def test_psi_prime_finite_difference(p, frac):
    t = p.gamma + frac * (1.0 - 2.0 * p.gamma)
    h = 1e-6 * (1.0 - 2.0 * p.gamma)
    fd = (psi(p, t + h) - psi(p, t - h)) / (2 * h)
    assert psi_prime(p, t) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_rho_reference_values():
    rm, rp = rho_pm(BASE)
    assert rm == pytest.approx(0.3881966011250105, abs=1e-15)
    assert rp == pytest.approx(0.6118033988749895, abs=1e-15)


@given(subcritical())
def test_rho_roots_and_bisection(p):
    rm, rp = rho_pm(p)
    assert p.gamma < rm < 0.5 < rp < 1.0 - p.gamma
    assert abs(psi(p, rm) - 1.0) < 1e-10
    assert abs(psi(p, rp) - 1.0) < 1e-10
    assert abs(rm + rp - 1.0) < 1e-14
    bm, bp = rho_pm_bisection(p, tol=1e-13)
    assert abs(bm - rm) < 1e-9 and abs(bp - rp) < 1e-9


def test_rho_near_critical_is_stable():
    p = ModelParams(0.25, critical_beta(0.25) * (1 - 1e-12))
    rm, rp = rho_pm(p)
    assert rm < 0.5 < rp
    assert abs(psi(p, rm) - 1.0) < 1e-6


def test_rho_rejects_supercritical():
    with pytest.raises(RegimeError):
        rho_pm(ModelParams(0.25, 0.2))
    with pytest.raises(NumericError):
        rho_pm_bisection(ModelParams(0.25, 0.2))
    with pytest.raises(ValueError):
        rho_pm_bisection(BASE, tol=0.0)


def test_t_star_against_grid_scan():
    ts = t_star(BASE)
    assert ts == pytest.approx(0.48589873688673807, abs=1e-12)
    rm, rp = rho_pm(BASE)
    grid = np.linspace(rm + 1e-9, rp - 1e-9, 200001)
    vals = [math.log(psi(BASE, t)) / t - psi_prime(BASE, t) / psi(BASE, t) for t in grid]
    i = int(np.argmin(np.abs(vals)))
    assert abs(grid[i] - ts) < 2 * (grid[1] - grid[0])


@given(subcritical())
@settings(max_examples=50)
def test_t_star_solves_its_equation(p):
    ts = t_star(p)
    rm, rp = rho_pm(p)
    assert rm < ts < rp
    gap = math.log(psi(p, ts)) / ts - psi_prime(p, ts) / psi(p, ts)
    assert abs(gap) < 1e-8


def test_deviation_rate():
    bound = deviation_bound(BASE)
    assert bound > 0
    assert deviation_rate(BASE, bound) == 0.0
    assert deviation_rate(BASE, bound / 2) == pytest.approx(bound / 2)
    for bad in (0.0, -0.1, bound * 1.01):
        with pytest.raises(ParameterError):
            deviation_rate(BASE, bad)


def test_derived_constants():
    dc = derived_constants(BASE)
    assert dc.tau == 5.0
    assert dc.beta_c == 0.125
    assert dc.rho_minus == pytest.approx(0.388196, abs=1e-6)
    sup = derived_constants(ModelParams(0.25, 0.2))
    assert sup.rho_minus is None and sup.rho_plus is None and sup.t_star is None
    assert derived_constants(ModelParams(0.6, 0.1)).beta_c == 0.0

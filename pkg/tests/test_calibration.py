import json
import math

import pytest

from subcrit_pa.brw import Intensity
from subcrit_pa.calibration import (Calibration, MonteCarloBudget, calibrate_constants,
                                    default_intensity, load_fixture)
from subcrit_pa.errors import CalibrationError


def test_fixture_is_consistent():
    cal = load_fixture()
    it = default_intensity()
    assert cal.gamma == it.gamma and cal.tilde_beta == it.beta
    assert cal.rho == pytest.approx(it.rho[0])
    assert 0 < cal.epsilon < 1 and cal.a > 1
    # the cap that keeps |U| below a (m/u)^rho after a round
    assert cal.u0 ** cal.rho * (1 + 1 / cal.a) <= 0.5
    assert cal.u0 < min(cal.b, 2.0 ** (-1 / cal.rho))
    assert Calibration.from_dict(json.loads(cal.to_json())) == cal


def test_small_budget_calibration_is_seeded():
    budget = MonteCarloBudget(samples=300, u_grid=(2.0 ** -4, 2.0 ** -6, 2.0 ** -8), y_u=2.0 ** -8)
    try:
        a = calibrate_constants(default_intensity(), 0.5, budget, seed=4)
    except CalibrationError as exc:
        assert exc.diagnostics
        return
    b = calibrate_constants(default_intensity(), 0.5, budget, seed=4)
    assert a == b
    assert a.epsilon in budget.eps_grid and a.a in budget.a_grid and a.u0 in budget.u_grid


def test_calibration_failure_carries_diagnostics():
    budget = MonteCarloBudget(samples=50, eps_grid=(0.99,), u_grid=(2.0 ** -4,), y_u=2.0 ** -4)
    with pytest.raises(CalibrationError) as info:
        calibrate_constants(Intensity(0.05, 0.25), 0.5, budget, seed=1)
    assert "p_y_at_least_eps" in info.value.diagnostics
    assert not math.isnan(info.value.diagnostics["p_min_above_log_b"])

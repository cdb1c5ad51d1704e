import math

import numpy as np
import pytest
from scipy import stats

from helpers import MarkovSets, random_exploration_case
from subcrit_pa.brw import Intensity, window_mass
from subcrit_pa.errors import InfeasibleError, ParameterError, UsageError
from subcrit_pa.estimation import gw_extinction_prob
from subcrit_pa.exploration import (COLLISION, OVERFLOW, SUCCESS, UNDERFILL, ExplorationConfig,
                                    VertexGraph, algorithm1, coupling_bound_check, decouple,
                                    dominating_tree_sim, embed_gw, estimate_success_table,
                                    gw_scales, lower_coupling_check)
from subcrit_pa.params import ModelParams
from subcrit_pa.projection import projection_context
from subcrit_pa.rng import make_rng

GW_PARAMS = ModelParams(0.1, 0.19)


def gw_cfg(**kw):
    base = dict(u=2.0 ** -19, b=0.5, epsilon=0.15, a=16.0, tilde_beta=0.18, gamma=0.1)
    base.update(kw)
    return ExplorationConfig(**base)


def test_config_thresholds():
    cfg = gw_cfg()
    assert cfg.y_threshold == math.ceil(0.15 * 2.0 ** (19 * cfg.rho))
    assert cfg.overflow_threshold == math.ceil(8.0 * 2.0 ** (19 * cfg.rho))
    assert cfg.rho == pytest.approx(Intensity(0.18, 0.1).rho[0])
    assert cfg.at_scale(1000).m == 1000


@pytest.mark.parametrize("kw", [dict(u=1.0), dict(b=0.0), dict(epsilon=1.5), dict(a=1.0),
                                dict(tilde_beta=-1.0), dict(m=0)])
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        gw_cfg(**kw)


def test_preconditions():
    cfg = gw_cfg(u=2.0 ** -4, m=1 << 12)
    with pytest.raises(UsageError):
        algorithm1(cfg, VertexGraph({300}, []), [300], 1)  # above u m = 256
    with pytest.raises(UsageError):
        algorithm1(cfg, VertexGraph({100}, []), [100], 1)  # below b u m = 128
    with pytest.raises(UsageError):
        algorithm1(cfg, VertexGraph({200}, []), [201], 1)  # target not in U'
    with pytest.raises(UsageError):
        algorithm1(cfg, VertexGraph({200}, []), [200, 200], 1)
    # the endpoints of [b u m, u m] are admissible
    algorithm1(cfg, VertexGraph({128, 256}, []), [128, 256], 1)


def test_structural_invariants_random_configs():
    rng = np.random.default_rng(2024)
    reasons = set()
    for trial in range(400):
        cfg, U0, targets = random_exploration_case(rng)
        res = algorithm1(cfg, U0, targets, trial)
        assert res.check(cfg, len(U0)) == [], (cfg, targets)
        assert U0.vertices <= res.U.vertices
        reasons.update(res.failure_reasons)
    assert {SUCCESS, COLLISION, UNDERFILL} <= reasons


def test_overflow_is_reached():
    cfg = ExplorationConfig(u=2.0 ** -6, b=0.5, epsilon=0.9, a=2.0, tilde_beta=0.12, gamma=0.25,
                            m=1 << 20)
    seen = set()
    for s in range(200):
        res = algorithm1(cfg, VertexGraph({12000}, []), [12000], s)
        seen.update(res.failure_reasons)
        assert all(e <= cfg.overflow_threshold for e in res.explored)
    assert OVERFLOW in seen


def test_failed_target_keeps_vertices():
    cfg = gw_cfg(m=1 << 30)
    t = int(0.75 * cfg.u * cfg.m)
    res = algorithm1(cfg, VertexGraph({t}, []), [t], 3)
    assert len(res.U) == 1 + res.explored[0]
    assert all(e[1] in res.U.vertices for e in res.U.edges)


def test_success_frequency_matches_free_exploration():
    cfg = gw_cfg(m=1 << 40)
    table = estimate_success_table(cfg, 3000, 5, points=3)
    t = int(0.75 * cfg.u * cfg.m)
    hits = [algorithm1(cfg, VertexGraph({t}, []), [t], s).success_flags[0] for s in range(3000)]
    p = table(0.75)
    assert abs(np.mean(hits) - p) < 4 * math.sqrt(p * (1 - p) * 2 / 3000)


def test_decouple_infeasible():
    with pytest.raises(InfeasibleError):
        decouple([[1, 2]], 2, 0.5, [0.4], 1)
    with pytest.raises(ParameterError):
        decouple([[1, 2]], 2, 0.0, [0.4], 1)


def test_decouple_subsets():
    ys = [list(range(10)), [1, 2], list(range(20, 40))]
    out = decouple(ys, 5, 1.0, [1.0, 1.0, 1.0], 4)
    assert len(out[0]) == 5 and set(out[0]) <= set(ys[0])
    assert out[1] == []
    assert len(out[2]) == 5 and out[2] == sorted(out[2])


def test_decouple_callable_witness_gets_past():
    calls = []

    def w(i, past):
        calls.append((i, past))
        return 1.0

    decouple([[1], [2], [3]], 1, 0.5, w, 9)
    assert [c[0] for c in calls] == [0, 1, 2]
    assert all(len(c[1]) == c[0] for c in calls)


def test_decouple_is_bernoulli_and_independent():
    k, eps, runs, d = 4, 0.3, 20000, 3
    gen = MarkovSets(k)
    rng = make_rng(77)
    out = np.array([gen.draw(d, eps, rng, decouple) for _ in range(runs)]) > 0
    for i in range(d):
        obs = [out[:, i].sum(), runs - out[:, i].sum()]
        assert stats.chisquare(obs, [eps * runs, (1 - eps) * runs]).pvalue > 0.01
    table = np.zeros((2, 2))
    np.add.at(table, (out[:, 0].astype(int), out[:, 1].astype(int)), 1)
    assert stats.chi2_contingency(table).pvalue > 0.01


def test_gw_scales():
    scales = gw_scales(2 ** 47, 2.0 ** -19, 0.5, 400)
    assert scales[-1] == 2 ** 47
    for lo, hi in zip(scales, scales[1:]):
        assert lo == math.floor(2.0 ** -19 * hi)
    assert 0.5 * 2.0 ** -19 * scales[0] <= 400 <= 2.0 ** -19 * scales[0]
    with pytest.raises(UsageError):
        gw_scales(2 ** 47, 2.0 ** -19, 0.5, 400, rounds=5)


def test_embed_gw_structure_and_seed():
    cfg = gw_cfg()
    a = embed_gw(GW_PARAMS, cfg, 2 ** 47, 400, 12)
    b = embed_gw(GW_PARAMS, cfg, 2 ** 47, 400, 12)
    assert a.to_json() == b.to_json()
    assert a.generation_sizes[0] == 1
    assert len(a.generation_sizes) == len(gw_scales(2 ** 47, cfg.u, cfg.b, 400)) + 1
    assert all(s % cfg.y_threshold == 0 for s in a.generation_sizes[1:])


def test_embed_gw_guards():
    with pytest.raises(UsageError):
        embed_gw(GW_PARAMS, gw_cfg(u0=2.0 ** -20), 2 ** 47, 400, 1)
    with pytest.raises(UsageError):
        embed_gw(ModelParams(0.1, 0.18), gw_cfg(), 2 ** 47, 400, 1)


def test_gw_survival_against_extinction_probability():
    cfg = gw_cfg()
    table = estimate_success_table(cfg, 4000, 3)
    assert table.prob.min() > cfg.epsilon
    runs = 300
    surv = [embed_gw(GW_PARAMS, cfg, 2 ** 47, 400, s, witness=table).survived for s in range(runs)]
    target = 1 - gw_extinction_prob(cfg.epsilon, cfg.y_threshold)
    assert abs(np.mean(surv) - target) < 4 * math.sqrt(target * (1 - target) / runs)


@pytest.mark.parametrize("r, s", [(40000, 50000), (50000, 40000), (33000, 65000), (65000, 33000)])
def test_upper_coupling(r, s):
    lhs, rhs, ok = coupling_bound_check(ModelParams(0.25, 0.1), 1 << 16, 2.0 ** -1, 1.0, 0.09, r, s)
    assert ok and 0 < lhs <= rhs


def test_lower_coupling():
    p = ModelParams(0.25, 0.1)
    n = 1 << 16
    for r, m in [(1000, 2000), (2000, 1000), (500, 60000)]:
        lhs, rhs, ok = lower_coupling_check(p, n, 100, r, 0.11, m=m)
        assert ok, (r, m, lhs, rhs)
    lhs, rhs, ok = lower_coupling_check(p, n, 64, 65, 0.11)
    assert ok and lhs >= rhs


def test_cell_probability_matches_mass():
    ctx = projection_context(1 << 12)
    it = Intensity(0.09, 0.25)
    lo = ctx.phi(2000) - ctx.phi(2999)
    hi = ctx.phi(2001) - ctx.phi(2999)
    lhs, _, _ = coupling_bound_check(ModelParams(0.25, 0.1), 1 << 12, 0.9, 0.5, 0.09, 3000, 2001, ctx)
    assert lhs == pytest.approx(-math.expm1(-window_mass(it, lo, hi)))


def test_dominating_tree():
    p = ModelParams(0.25, 0.1)
    s = dominating_tree_sim(p, 0.11, 1 << 16, 0.1, 5)
    assert s.start < 0 and s.progeny >= 1 and s.min_position <= s.start
    fixed = dominating_tree_sim(p, 0.11, 1 << 16, 0.1, 5, x=20.0)
    assert fixed.start == -20.0 and fixed.escape
    with pytest.raises(ParameterError):
        dominating_tree_sim(p, 0.2, 1 << 16, 0.1, 5)

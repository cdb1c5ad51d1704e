"""Named batch experiments.

Each experiment turns a validated :class:`~subcrit_pa.config.ExperimentConfig`
into per-replica rows plus a summary. Replicas are seeded from the master
seed, the experiment name and the replica index only, so results do not
depend on the number of workers.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import __version__
from .brw import (Caps, Intensity, frozen_decompose, martingale_W, sample_brw_truncated,
                  truncated_laplace)
from .backend import core
from .estimation import (ReplicaPlan, default_hill_k, default_sweep_ks, fit_exponent,
                         gw_extinction_by, gw_extinction_prob, hill_estimator, hill_sweep,
                         run_replicas)
from .exploration import ExplorationConfig, dominating_tree_sim, embed_gw, estimate_success_table
from .graph import connected_components, degrees, sample_graph_fast, sample_graph_naive
from .params import rho_pm
from .rng import derive_seed, make_rng


@dataclass
class ExperimentOutput:
    columns: list
    rows: list
    summary: dict
    meta: dict = field(default_factory=dict)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else repr(f)
    return v


def render(out, fmt):
    """Serialize an output; returns ``(data_text, summary_text or None)``."""
    if fmt == "json":
        doc = {"meta": out.meta, "columns": out.columns,
               "rows": [[_jsonable(x) for x in r] for r in out.rows], "summary": out.summary}
        return json.dumps(_jsonable(doc), sort_keys=True, indent=1) + "\n", None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(out.columns)
    for r in out.rows:
        w.writerow([_fmt(x) for x in r])
    summary = json.dumps(_jsonable({"meta": out.meta, "summary": out.summary}), sort_keys=True,
                         indent=1) + "\n"
    return buf.getvalue(), summary


def write_output(out, path, fmt):
    """Write the data file; CSV output gets a ``<path>.summary.json`` companion."""
    data, summary = render(out, fmt)
    with open(path, "w", newline="") as fh:
        fh.write(data)
    if summary is not None:
        with open(path + ".summary.json", "w") as fh:
            fh.write(summary)


def _mean_se(x):
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return None, None
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else None
    return float(x.mean()), se


def _z(mean, se, target):
    if mean is None or not se:
        return None
    return (mean - target) / se


def _failures(records):
    return {"failed_replicas": [r.index for r in records if not r.ok],
            "failure_count": sum(1 for r in records if not r.ok)}


# graph experiments

def _component_task(gamma, beta, n_grid, replicas, sampler, index, seed):
    from .params import ModelParams
    n = n_grid[index // replicas]
    params = ModelParams(gamma, beta)
    fn = sample_graph_fast if sampler == "fast" else sample_graph_naive
    g = fn(params, n, seed)
    cs = connected_components(g)
    return n, index % replicas, g.num_edges, cs.largest, cs.max_degree


def run_components(cfg, workers=1, executor="thread"):
    p = cfg.params
    n_grid = [int(n) for n in p.n_grid]
    plan = ReplicaPlan(cfg.master_seed, len(n_grid) * p.replicas, cfg.name)
    task = partial(_component_task, cfg.model.gamma, cfg.model.beta, n_grid, p.replicas, p.sampler)
    records = run_replicas(plan, task, workers, executor)
    cols = ["n", "replica", "seed", "edges", "largest", "max_degree"]
    rows = []
    by_n = {n: ([], []) for n in n_grid}
    for r in records:
        if not r.ok:
            continue
        n, rep, edges, largest, maxdeg = r.value
        rows.append([n, rep, r.seed, edges, largest, maxdeg])
        by_n[n][0].append(math.log(largest))
        by_n[n][1].append(math.log(max(maxdeg, 1)))
    per_n = []
    for n in n_grid:
        ls, ds = by_n[n]
        per_n.append({"n": n, "replicas": len(ls),
                      "mean_log_largest": float(np.mean(ls)) if ls else None,
                      "mean_log_max_degree": float(np.mean(ds)) if ds else None})
    summary = {"per_n": per_n, **_failures(records)}
    usable = [d for d in per_n if d["replicas"] > 0]
    if len(usable) >= 3:
        fl = fit_exponent([(d["n"], math.exp(d["mean_log_largest"])) for d in usable])
        fd = fit_exponent([(d["n"], math.exp(d["mean_log_max_degree"])) for d in usable])
        summary.update(slope_largest=fl.slope, stderr_largest=fl.stderr,
                       slope_max_degree=fd.slope, stderr_max_degree=fd.stderr,
                       slope_gap=fl.slope - fd.slope)
    if cfg.model.subcritical:
        summary["rho_minus"] = rho_pm(cfg.model)[0]
    summary["gamma"] = cfg.model.gamma
    return ExperimentOutput(cols, rows, summary)


def _degree_task(gamma, beta, n, index, seed):
    from .params import ModelParams
    g = sample_graph_fast(ModelParams(gamma, beta), n, seed)
    deg = degrees(g)
    return g.num_edges, np.bincount(deg)


def run_degree_tail(cfg, workers=1, executor="thread"):
    p = cfg.params
    plan = ReplicaPlan(cfg.master_seed, p.replicas, cfg.name)
    task = partial(_degree_task, cfg.model.gamma, cfg.model.beta, int(p.n))
    records = run_replicas(plan, task, workers, executor)
    cols = ["replica", "seed", "n", "edges", "max_degree"]
    rows = []
    pooled = np.zeros(1, dtype=np.int64)
    for r in records:
        if not r.ok:
            continue
        edges, counts = r.value
        rows.append([r.index, r.seed, int(p.n), edges, int(counts.size - 1)])
        if counts.size > pooled.size:
            pooled = np.pad(pooled, (0, counts.size - pooled.size))
        pooled[: counts.size] += counts
    summary = {"target_tail_index": 1.0 / cfg.model.gamma, "tau": 1.0 + 1.0 / cfg.model.gamma,
               **_failures(records)}
    if rows:
        samples = np.repeat(np.arange(pooled.size), pooled).astype(np.float64)
        k = p.hill_k or default_hill_k(samples.size)
        summary["pooled_vertices"] = int(samples.size)
        summary["degree_counts"] = pooled.tolist()
        summary["hill_k"] = k
        summary["hill"] = _safe_hill(samples, k)
        summary["hill_sweep"] = hill_sweep(samples, default_sweep_ks(samples.size) + [k])
    return ExperimentOutput(cols, rows, summary)


def _safe_hill(samples, k):
    try:
        return hill_estimator(samples, k)
    except (ValueError, ArithmeticError):
        return None


# killed walks

def _I_task(beta, gamma, u_values, replicas, b, max_particles, index, seed):
    u = u_values[index // replicas]
    rng = make_rng(seed)
    _, window, _, trunc = core.killed_tree_stats(beta, gamma, math.log(u), -math.inf, 0.0,
                                                 math.log(b), max_particles, 1 << 40, rng)
    return u, int(window), bool(trunc)


def run_killed_brw(cfg, workers=1, executor="thread"):
    p = cfg.params
    rho = rho_pm(cfg.model)[0]
    u_grid = [float(u) for u in p.u_grid]
    plan = ReplicaPlan(cfg.master_seed, len(u_grid) * p.replicas, cfg.name)
    task = partial(_I_task, cfg.model.beta, cfg.model.gamma, u_grid, p.replicas, p.b,
                   int(p.max_particles))
    records = run_replicas(plan, task, workers, executor)
    cols = ["u", "replica", "seed", "I", "scaled", "truncated"]
    rows = []
    by_u = {u: [] for u in u_grid}
    truncs = {u: 0 for u in u_grid}
    for r in records:
        if not r.ok:
            continue
        u, count, trunc = r.value
        scaled = u ** rho * count
        rows.append([u, r.index % p.replicas, r.seed, count, scaled, trunc])
        if trunc:
            truncs[u] += 1
        else:
            by_u[u].append(scaled)
    per_u = []
    for u in u_grid:
        x = np.asarray(by_u[u])
        per_u.append({"u": u, "replicas": int(x.size), "truncated": truncs[u],
                      "median": float(np.median(x)) if x.size else None,
                      "mean": float(x.mean()) if x.size else None,
                      "p_zero": float(np.mean(x == 0)) if x.size else None})
    tail = [d["median"] for d in per_u[-3:] if d["median"] is not None]
    ratio = None
    if len(tail) == 3:
        lo, hi = min(tail), max(tail)
        ratio = hi / lo if lo > 0 else (math.inf if hi > 0 else math.nan)
    summary = {"rho_minus": rho, "per_u": per_u, "median_ratio_last3": ratio, **_failures(records)}
    return ExperimentOutput(cols, rows, summary)


def run_y_tail(cfg, workers=1, executor="thread"):
    p = cfg.params
    rho_m, rho_p = rho_pm(cfg.model)
    plan = ReplicaPlan(cfg.master_seed, p.replicas, cfg.name)
    task = partial(_I_task, cfg.model.beta, cfg.model.gamma, [float(p.u)], p.replicas, p.b,
                   int(p.max_particles))
    records = run_replicas(plan, task, workers, executor)
    cols = ["replica", "seed", "I", "scaled", "truncated"]
    rows = []
    vals = []
    for r in records:
        if not r.ok:
            continue
        u, count, trunc = r.value
        scaled = u ** rho_m * count
        rows.append([r.index, r.seed, count, scaled, trunc])
        if not trunc:
            vals.append(scaled)
    summary = {"rho_minus": rho_m, "rho_plus": rho_p, "target_tail_index": rho_p / rho_m,
               **_failures(records)}
    if vals:
        x = np.asarray(vals)
        k = p.hill_k or default_hill_k(x.size)
        summary.update(hill_k=k, hill=_safe_hill(x, k),
                       hill_sweep=hill_sweep(x, default_sweep_ks(x.size) + [k]),
                       samples=int(x.size))
    return ExperimentOutput(cols, rows, summary)


def _malthusian_task(beta, gamma, right_cutoff, w1_cutoff, max_particles, index, seed):
    it = Intensity(beta, gamma)
    rng = make_rng(seed)
    caps = Caps(max_particles=max_particles)
    fd = frozen_decompose(it, rng, caps, right_cutoff=right_cutoff)
    total = fd.malthusian_sum(it)
    tree = sample_brw_truncated(it, 0.0, 1, w1_cutoff, rng, caps)
    w1 = martingale_W(tree, 1, it.rho[0]) if not tree.truncated else math.nan
    return total, fd.branching_count, int(fd.xi.size), w1, fd.truncated or tree.truncated


def run_malthusian(cfg, workers=1, executor="thread"):
    p = cfg.params
    it = Intensity.of(cfg.model)
    rho = it.rho[0]
    plan = ReplicaPlan(cfg.master_seed, p.replicas, cfg.name)
    task = partial(_malthusian_task, it.beta, it.gamma, float(p.right_cutoff), float(p.w1_cutoff),
                   int(p.max_particles))
    records = run_replicas(plan, task, workers, executor)
    cols = ["replica", "seed", "malthusian_sum", "branching_count", "frozen_count", "w1", "truncated"]
    rows = []
    sums, w1s, bcount = [], [], []
    for r in records:
        if not r.ok:
            continue
        total, nb, nf, w1, trunc = r.value
        rows.append([r.index, r.seed, total, nb, nf, w1, trunc])
        if not trunc:
            sums.append(total)
            w1s.append(w1)
            bcount.append(nb)
    m, se = _mean_se(sums)
    wm, wse = _mean_se(w1s)
    w_target = truncated_laplace(it, rho, float(p.w1_cutoff))
    summary = {"rho_minus": rho, "malthusian_mean": m, "malthusian_se": se,
               "malthusian_z": _z(m, se, 1.0), "w1_mean": wm, "w1_se": wse,
               "w1_expected": w_target, "w1_z": _z(wm, wse, w_target),
               "mean_branching": _mean_se(bcount)[0],
               "branching_bound_half": 1.0 / (1.0 - 2.0 * it.beta / (0.5 - it.gamma))
               if 2.0 * it.beta / (0.5 - it.gamma) < 1.0 else None,
               "excluded_truncated": len(records) - len(sums), **_failures(records)}
    return ExperimentOutput(cols, rows, summary)


# exploration experiments

def _gw_task(gamma, beta, ecfg, n, o_n, boost, witness, index, seed):
    from .params import ModelParams
    emb = embed_gw(ModelParams(gamma, beta), ecfg, n, o_n, seed, witness=witness, boost=boost)
    return emb.survived, emb.component_lower_bound, emb.generation_sizes


def gw_config(cfg):
    p = cfg.params
    return ExplorationConfig(u=p.u, b=p.b, epsilon=p.epsilon, a=p.a, tilde_beta=p.tilde_beta,
                             gamma=cfg.model.gamma, u0=p.u0)


def run_gw(cfg, workers=1, executor="thread"):
    p = cfg.params
    ecfg = gw_config(cfg)
    witness = estimate_success_table(ecfg, int(p.witness_samples),
                                     derive_seed(cfg.master_seed, cfg.name + ":witness", 0),
                                     points=int(p.witness_points))
    plan = ReplicaPlan(cfg.master_seed, p.replicas, cfg.name)
    task = partial(_gw_task, cfg.model.gamma, cfg.model.beta, ecfg, int(p.n), int(p.o_n),
                   int(p.boost), witness)
    records = run_replicas(plan, task, workers, executor)
    cols = ["replica", "seed", "survived", "final_size", "generation_sizes"]
    rows = []
    surv = []
    for r in records:
        if not r.ok:
            continue
        s, final, gens = r.value
        rows.append([r.index, r.seed, s, final, ";".join(str(g) for g in gens)])
        surv.append(1.0 if s else 0.0)
    k = ecfg.y_threshold
    q = gw_extinction_prob(ecfg.epsilon, k)
    rounds = len(rows[0][4].split(";")) - 1 if rows else None
    target = 1.0 - q ** p.boost
    freq, _ = _mean_se(surv)
    se = math.sqrt(target * (1.0 - target) / len(surv)) if surv else None
    summary = {"k": k, "epsilon": ecfg.epsilon, "rho": ecfg.rho, "mean_offspring": ecfg.epsilon * k,
               "q": q, "survival_target": target,
               "survival_target_finite_rounds": (1.0 - gw_extinction_by(ecfg.epsilon, k, rounds) ** p.boost)
               if rounds else None,
               "survival_freq": freq, "survival_se": se, "survival_z": _z(freq, se, target),
               "witness_grid": witness.grid.tolist(), "witness_prob": witness.prob.tolist(),
               "witness_min": float(witness.prob.min()), **_failures(records)}
    return ExperimentOutput(cols, rows, summary)


def _dominating_task(gamma, beta, tilde_beta, n, epsilon, max_particles, index, seed):
    from .params import ModelParams
    s = dominating_tree_sim(ModelParams(gamma, beta), tilde_beta, n, epsilon, seed,
                            Caps(max_particles=max_particles))
    return s.start, s.progeny, s.min_position, s.escape, s.truncated


def run_dominating(cfg, workers=1, executor="thread"):
    p = cfg.params
    it = Intensity(p.tilde_beta, cfg.model.gamma)
    rho_m, rho_p = it.rho
    n = int(p.n)
    big = n ** (rho_m + p.epsilon)
    plan = ReplicaPlan(cfg.master_seed, p.replicas, cfg.name)
    task = partial(_dominating_task, cfg.model.gamma, cfg.model.beta, float(p.tilde_beta), n,
                   float(p.epsilon), int(p.max_particles))
    records = run_replicas(plan, task, workers, executor)
    cols = ["replica", "seed", "start", "progeny", "min_position", "escape", "large", "truncated"]
    rows = []
    esc, lg = [], []
    for r in records:
        if not r.ok:
            continue
        start, prog, low, escape, trunc = r.value
        large = prog >= big
        rows.append([r.index, r.seed, start, prog, low, escape, large, trunc])
        esc.append(1.0 if escape else 0.0)
        lg.append(1.0 if large else 0.0)
    bound = n ** (-rho_p + p.epsilon)
    sigma = math.sqrt(bound * (1.0 - bound) / len(esc)) if esc else None
    summary = {"rho_minus": rho_m, "rho_plus": rho_p, "bound": bound, "sigma": sigma,
               "size_threshold": big, "escape_freq": _mean_se(esc)[0],
               "large_freq": _mean_se(lg)[0], **_failures(records)}
    return ExperimentOutput(cols, rows, summary)


RUNNERS = {
    "largest-component-exponent": run_components,
    "max-degree-exponent": run_components,
    "degree-tail": run_degree_tail,
    "killed-brw-scaling": run_killed_brw,
    "y-tail": run_y_tail,
    "malthusian": run_malthusian,
    "gw-embedding": run_gw,
    "dominating-tail": run_dominating,
}


def run_experiment(cfg, workers=1, executor="thread"):
    out = RUNNERS[cfg.name](cfg, workers, executor)
    doc = cfg.to_dict()
    doc.pop("output", None)
    out.meta = {"config": doc, "code_version": __version__, "rng": "numpy Philox, blake2b replica seeds"}
    return out

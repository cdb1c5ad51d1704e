"""Experiment configuration documents (JSON) and their validation.

A document has four sections::

    {"model": {"gamma": 0.25, "beta": 0.1},
     "experiment": {"name": "malthusian", "replicas": 1000},
     "seeds": {"master_seed": 1},
     "output": {"format": "csv", "path": "out.csv"}}

Every experiment has a parameter dataclass below; keys that are not fields
are rejected, missing ones take the defaults.
"""
import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParameterError
from .params import validate_params


@dataclass
class ComponentExperiment:
    n_grid: list = field(default_factory=lambda: [2 ** j for j in range(10, 17)])
    replicas: int = 50
    sampler: str = "fast"


@dataclass
class DegreeTailExperiment:
    n: int = 2 ** 17
    replicas: int = 20
    hill_k: Optional[int] = None


@dataclass
class KilledBrwExperiment:
    u_grid: list = field(default_factory=lambda: [2.0 ** -j for j in range(4, 10)])
    b: float = 0.5
    replicas: int = 10_000
    max_particles: int = 1_000_000


@dataclass
class YTailExperiment:
    u: float = 2.0 ** -9
    b: float = 0.5
    replicas: int = 100_000
    hill_k: Optional[int] = None
    max_particles: int = 1_000_000


@dataclass
class MalthusianExperiment:
    replicas: int = 100_000
    # frozen points beyond this cutoff are replaced by their expected weight
    right_cutoff: float = 10.0
    # right cutoff of the displacements in the W_1 check
    w1_cutoff: float = 10.0
    max_particles: int = 1_000_000


@dataclass
class GWEmbeddingExperiment:
    tilde_beta: float = 0.18
    u: float = 2.0 ** -19
    b: float = 0.5
    epsilon: float = 0.15
    a: float = 16.0
    n: int = 2 ** 47
    o_n: int = 400
    boost: int = 1
    replicas: int = 1000
    witness_samples: int = 20_000
    witness_points: int = 9
    u0: Optional[float] = None


@dataclass
class DominatingExperiment:
    tilde_beta: float = 0.11
    n: int = 2 ** 16
    epsilon: float = 0.1
    replicas: int = 100_000
    max_particles: int = 1_000_000


EXPERIMENTS = {
    "largest-component-exponent": ComponentExperiment,
    "max-degree-exponent": ComponentExperiment,
    "degree-tail": DegreeTailExperiment,
    "killed-brw-scaling": KilledBrwExperiment,
    "y-tail": YTailExperiment,
    "malthusian": MalthusianExperiment,
    "gw-embedding": GWEmbeddingExperiment,
    "dominating-tail": DominatingExperiment,
}

SECTIONS = ("model", "experiment", "seeds", "output")


@dataclass
class ExperimentConfig:
    name: str
    params: object
    model: object
    master_seed: int
    format: str = "csv"
    path: Optional[str] = None

    def to_dict(self):
        exp = {"name": self.name}
        exp.update(dataclasses.asdict(self.params))
        return {
            "model": {"gamma": self.model.gamma, "beta": self.model.beta},
            "experiment": exp,
            "seeds": {"master_seed": self.master_seed},
            "output": {"format": self.format, "path": self.path},
        }


def _reject_unknown(section, data, allowed):
    extra = sorted(set(data) - set(allowed))
    if extra:
        raise ParameterError(section, f"unknown keys {extra}")


def _coerce(section, name, value, default):
    """Light type check against the default's type."""
    if default is None or value is None:
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ParameterError(f"{section}.{name}", f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ParameterError(f"{section}.{name}", f"expected an integer, got {value!r}")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParameterError(f"{section}.{name}", f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ParameterError(f"{section}.{name}", f"expected a list, got {value!r}")
        return value
    if isinstance(default, str) and not isinstance(value, str):
        raise ParameterError(f"{section}.{name}", f"expected a string, got {value!r}")
    return value


def parse_config(doc):
    """Validate a config mapping and return :class:`ExperimentConfig`."""
    if not isinstance(doc, dict):
        raise ParameterError("config", "must be a JSON object")
    _reject_unknown("config", doc, SECTIONS)
    model = doc.get("model", {})
    _reject_unknown("model", model, ("gamma", "beta"))
    if "gamma" not in model or "beta" not in model:
        raise ParameterError("model", "needs gamma and beta")
    params = validate_params(model["gamma"], model["beta"])

    exp = dict(doc.get("experiment", {}))
    name = exp.pop("name", None)
    if name not in EXPERIMENTS:
        raise ParameterError("experiment.name", f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    cls = EXPERIMENTS[name]
    defaults = cls()
    fields = {f.name for f in dataclasses.fields(cls)}
    _reject_unknown("experiment", exp, fields)
    kwargs = {k: _coerce("experiment", k, v, getattr(defaults, k)) for k, v in exp.items()}
    exp_params = cls(**kwargs)
    if getattr(exp_params, "replicas", 0) < 0:
        raise ParameterError("experiment.replicas", "must be nonnegative")

    seeds = doc.get("seeds", {})
    _reject_unknown("seeds", seeds, ("master_seed",))
    seed = seeds.get("master_seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ParameterError("seeds.master_seed", f"must be an unsigned 64-bit integer, got {seed!r}")

    out = doc.get("output", {})
    _reject_unknown("output", out, ("format", "path"))
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ParameterError("output.format", f"must be csv or json, got {fmt!r}")
    return ExperimentConfig(name, exp_params, params, seed, fmt, out.get("path"))


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParameterError("config", f"invalid JSON: {exc}") from None
    return parse_config(doc)

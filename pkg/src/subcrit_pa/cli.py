"""Command line entry point ``subcrit-pa``.

Exit status: 0 on success, 2 for usage or configuration errors, 3 for
numeric or calibration failures.
"""
import argparse
import json
import math
import sys

from . import __version__
from .brw import Caps, Intensity, count_I, sample_killed_tree
from .config import load_config, parse_config
from .errors import (CalibrationError, InfeasibleError, NumericError, ParameterError,
                     ProjectionRangeError, RegimeError, UsageError)
from .experiments import ExperimentOutput, render, run_experiment, write_output
from .exploration import ExplorationConfig, VertexGraph, algorithm1
from .graph import (connected_components, read_edge_list, sample_graph_fast, sample_graph_naive,
                    write_edge_list)
from .params import derived_constants, validate_params

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="experiment config (JSON)")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--executor", choices=("thread", "process"), default="thread")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    return p


def _model_args(p):
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)


def build_parser():
    common = _common()
    parser = _Parser(prog="subcrit-pa", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", parents=[common], help="analytic constants")
    _model_args(p)

    p = sub.add_parser("graph", parents=[common], help="sample a graph and write its edge list")
    _model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sampler", choices=("fast", "naive"), default="fast")

    p = sub.add_parser("components", parents=[common], help="component summary of a graph")
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--edges", help="read an edge list instead of sampling")
    p.add_argument("--sampler", choices=("fast", "naive"), default="fast")

    p = sub.add_parser("brw", parents=[common], help="sample a killed branching random walk")
    _model_args(p)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--log-a", type=float, default=-math.inf)
    p.add_argument("--log-d", type=float, default=0.0)
    p.add_argument("--log-b", type=float, default=math.log(0.5))
    p.add_argument("--max-particles", type=int, default=1_000_000)
    p.add_argument("--tree", action="store_true", help="emit the particles instead of a summary")

    p = sub.add_parser("explore", parents=[common], help="run the projected exploration once")
    _model_args(p)
    p.add_argument("--tilde-beta", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--targets", type=int, nargs="+", required=True)

    sub.add_parser("experiment", parents=[common], help="run a configured experiment")
    return parser


def _emit(out, args, fmt):
    if args.out:
        write_output(out, args.out, fmt)
        return
    data, summary = render(out, fmt)
    sys.stdout.write(data)
    if summary is not None and out.summary:
        sys.stderr.write(summary)


def _seed(args):
    if args.seed is None:
        raise UsageError("--seed is required")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    return args.seed


def cmd_constants(args):
    params = validate_params(args.gamma, args.beta)
    dc = derived_constants(params)
    cols = ["gamma", "beta", "beta_c", "rho_minus", "rho_plus", "t_star", "tau", "regime"]
    row = [params.gamma, params.beta, dc.beta_c, dc.rho_minus, dc.rho_plus, dc.t_star, dc.tau,
           params.regime]
    return ExperimentOutput(cols, [row], {}, {"code_version": __version__})


def cmd_graph(args):
    params = validate_params(args.gamma, args.beta)
    fn = sample_graph_fast if args.sampler == "fast" else sample_graph_naive
    g = fn(params, args.n, _seed(args))
    if args.out:
        write_edge_list(g, args.out)
    else:
        sys.stdout.write(f"# n={g.n} gamma={params.gamma!r} beta={params.beta!r} seed={g.seed}\n")
        for a, b in zip(g.ei.tolist(), g.ej.tolist()):
            sys.stdout.write(f"{a} {b}\n")
    return None


def cmd_components(args):
    if args.edges:
        g, header = read_edge_list(args.edges)
    else:
        if args.gamma is None or args.beta is None or args.n is None:
            raise UsageError("give --edges or all of --gamma, --beta, --n")
        params = validate_params(args.gamma, args.beta)
        fn = sample_graph_fast if args.sampler == "fast" else sample_graph_naive
        g = fn(params, args.n, _seed(args))
    cs = connected_components(g)
    cols = ["n", "edges", "components", "largest", "max_degree", "seed"]
    return ExperimentOutput(cols, [[g.n, g.num_edges, cs.count, cs.largest, cs.max_degree, g.seed]],
                            {}, {"code_version": __version__})


def cmd_brw(args):
    params = validate_params(args.gamma, args.beta)
    tree = sample_killed_tree(Intensity.of(params), args.start, args.log_a, args.log_d, _seed(args),
                              Caps(max_particles=args.max_particles))
    if args.tree:
        cols = ["id", "parent", "generation", "position"]
        rows = [[k, int(tree.parents[k]), int(tree.generations[k]), float(tree.positions[k])]
                for k in range(tree.size)]
    else:
        cols = ["size", "depth", "min_position", "count_in_window", "truncated"]
        window = int(((tree.positions > args.log_b) & (tree.positions <= args.log_d)).sum())
        if args.log_d == 0.0:
            window = count_I(tree, args.log_b)
        rows = [[tree.size, tree.depth, float(tree.positions.min()), window, tree.truncated]]
    return ExperimentOutput(cols, rows, {}, {"code_version": __version__})


def cmd_explore(args):
    params = validate_params(args.gamma, args.beta)
    cfg = ExplorationConfig(u=args.u, b=args.b, epsilon=args.epsilon, a=args.a,
                            tilde_beta=args.tilde_beta, gamma=params.gamma, m=args.m)
    res = algorithm1(cfg, VertexGraph(set(args.targets), []), args.targets, _seed(args))
    cols = ["target", "success", "reason", "explored", "y_size", "y_set"]
    rows = [[t, f, r, e, len(y), " ".join(map(str, y))]
            for t, f, r, e, y in zip(res.targets, res.success_flags, res.failure_reasons,
                                     res.explored, res.Y_sets)]
    return ExperimentOutput(cols, rows, {"U_size": len(res.U), "k": cfg.y_threshold,
                                         "overflow_threshold": cfg.overflow_threshold},
                            {"code_version": __version__})


def cmd_experiment(args):
    if not args.config:
        raise UsageError("experiment needs --config")
    cfg = load_config(args.config)
    if args.seed is not None:
        doc = cfg.to_dict()
        doc["seeds"]["master_seed"] = args.seed
        cfg = parse_config(doc)
    if args.format:
        cfg.format = args.format
    if args.out:
        cfg.path = args.out
    out = run_experiment(cfg, args.workers, args.executor)
    args.out = cfg.path
    _emit(out, args, cfg.format)
    return None


COMMANDS = {
    "constants": cmd_constants,
    "graph": cmd_graph,
    "components": cmd_components,
    "brw": cmd_brw,
    "explore": cmd_explore,
    "experiment": cmd_experiment,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        out = COMMANDS[args.command](args)
        if out is not None:
            _emit(out, args, args.format or "csv")
    except (ParameterError, UsageError, InfeasibleError, RegimeError, ProjectionRangeError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, CalibrationError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Time the compiled and pure-Python kernels on the same workloads.

    python benchmarks/bench_backends.py [--repeat 3] [--scale 1.0]

Prints one line per kernel with the best wall time for each backend and
the speedup. Both backends consume the same seeds, so the workloads match.
"""
import argparse
import math
import time

from subcrit_pa import backend
from subcrit_pa.rng import make_rng

BETA, GAMMA = 0.1, 0.25


def _graph(core, scale):
    core.sample_graph_fast(BETA, GAMMA, int(2 ** 14 * scale), make_rng(1))


_EDGES = {}


def _components(core, scale):
    n = int(2 ** 15 * scale)
    if n not in _EDGES:
        # the input graph is built once, outside the timed region of later repeats
        _EDGES[n] = backend.get("python").sample_graph_fast(BETA, GAMMA, n, make_rng(2))
    core.components(n, *_EDGES[n])


def _killed_trees(core, scale):
    rng = make_rng(3)
    for _ in range(int(2000 * scale)):
        core.killed_tree_stats(BETA, GAMMA, math.log(2 ** -9), -math.inf, 0.0, math.log(0.5),
                               1_000_000, 1 << 40, rng)


def _frozen(core, scale):
    rng = make_rng(4)
    for _ in range(int(2000 * scale)):
        core.frozen_decompose(BETA, GAMMA, 10.0, 1_000_000, rng)


def _cmj(core, scale):
    rng = make_rng(5)
    for _ in range(int(2000 * scale)):
        core.cmj_count(BETA, GAMMA, math.log(16), math.log(0.5), 1_000_000, rng)


WORKLOADS = [
    ("sample_graph_fast", _graph),
    ("components", _components),
    ("killed_tree_stats", _killed_trees),
    ("frozen_decompose", _frozen),
    ("cmj_count", _cmj),
]


def best_of(fn, core, scale, repeat):
    fn(core, scale)  # warm-up
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(core, scale)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args(argv)

    names = backend.available()
    if "cython" not in names:
        print("compiled backend not built; only the Python kernels are available")
    cores = {name: backend.get(name) for name in names}
    print(f"{'kernel':<20}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, fn in WORKLOADS:
        t = {name: best_of(fn, core, args.scale, args.repeat) for name, core in cores.items()}
        row = f"{label:<20}" + "".join(f"{t[n]:>11.4f}s" for n in names)
        if "cython" in t:
            row += f"{t['python'] / t['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()

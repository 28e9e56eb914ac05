"""Benchmark the compiled evaluation kernels against the numpy fallback.

Times the three hot kernels (windowed correlation, bilinear sampling,
monotone-cubic sampling) and a full transmission-operator application
with each backend bound, and reports per-call times plus speedups.
Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --grid 60 --queries 100000
"""

import argparse
import time

import numpy as np

from sirfield import ExperimentConfig, TransmissionOperator, backend
from sirfield import _kernels as numpy_kernels

try:
    from sirfield import _accel as compiled_kernels
except ImportError:
    compiled_kernels = None


def best_time(fn, repeats):
    """Smallest wall-clock time of ``fn()`` over ``repeats`` calls."""
    fn()  # warm up caches and any lazy allocation
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def kernel_workloads(args, rng):
    """(name, keyword args) pairs exercising each kernel."""
    g = args.grid
    k = args.stencil
    padded = rng.uniform(0.0, 30.0, size=(g + k - 1, g + k - 1))
    kern = rng.uniform(0.0, 1.0, size=(k, k))
    values = np.ascontiguousarray(padded[:g, :g])
    u = rng.uniform(-1.0, float(g), size=args.queries)
    v = rng.uniform(-1.0, float(g), size=args.queries)
    return [
        ("correlate_valid", dict(padded=padded, kern=kern)),
        ("bilinear_many", dict(values=values, u=u, v=v)),
        ("makima_many", dict(values=values, u=u, v=v)),
    ]


def operator_timing(method, grid, repeats, rng):
    """Full operator application time per backend, as a dict."""
    config = ExperimentConfig(
        delta=0.1, p1=grid, p2=grid,
        rule_kind="product", n_radial=20, n_angular=20, method=method,
    )
    op = TransmissionOperator(
        config.grid(), config.rule(), config.kernel(), config.params(), config.interp()
    )
    intensity = rng.uniform(0.0, 15.0, size=(grid, grid))
    names = ("correlate_valid", "bilinear_many", "makima_many")
    saved = {name: getattr(backend, name) for name in names}
    out = {}
    try:
        for label, module in (("numpy", numpy_kernels), ("compiled", compiled_kernels)):
            if module is None:
                continue
            for name in names:
                setattr(backend, name, getattr(module, name))
            out[label] = best_time(lambda: op(intensity), repeats)
    finally:
        for name, fn in saved.items():
            setattr(backend, name, fn)
    return out


def report_row(name, timings):
    numpy_t = timings.get("numpy")
    compiled_t = timings.get("compiled")
    cells = [f"{name:<24}"]
    cells.append(f"{1e3 * numpy_t:>10.3f}" if numpy_t is not None else f"{'-':>10}")
    cells.append(f"{1e3 * compiled_t:>12.3f}" if compiled_t is not None else f"{'-':>12}")
    if numpy_t is not None and compiled_t is not None:
        cells.append(f"{numpy_t / compiled_t:>8.1f}x")
    print("  ".join(cells))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid", type=int, default=40, help="grid points per side")
    parser.add_argument("--stencil", type=int, default=21, help="correlation stencil side")
    parser.add_argument("--queries", type=int, default=50_000, help="sample-point count")
    parser.add_argument("--repeats", type=int, default=20, help="timed calls per kernel")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"active backend at import: {backend.which()}")
    if compiled_kernels is None:
        print("compiled extension not importable; numpy timings only")
    print(f"{'kernel':<24}  {'numpy ms':>10}  {'compiled ms':>12}  {'speedup':>8}")

    for name, kwargs in kernel_workloads(args, rng):
        timings = {"numpy": best_time(lambda: getattr(numpy_kernels, name)(**kwargs), args.repeats)}
        if compiled_kernels is not None:
            timings["compiled"] = best_time(
                lambda: getattr(compiled_kernels, name)(**kwargs), args.repeats
            )
        report_row(name, timings)

    for method in ("bilinear", "makima"):
        timings = operator_timing(method, args.grid, args.repeats, rng)
        report_row(f"operator apply ({method})", timings)


if __name__ == "__main__":
    main()

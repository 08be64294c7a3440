"""Benchmark the compiled monomial kernels against the NumPy fallback.

Times both backends on identical inputs across degrees and batch sizes,
then times an element-pipeline workload (projector construction on a
Voronoi cell bank) under the currently active backend.  Run twice with
``VEMLAB_KERNELS=python`` / ``VEMLAB_KERNELS=c`` to compare the pipeline
end to end:

    python3 benchmarks/bench_kernels.py
    VEMLAB_KERNELS=python python3 benchmarks/bench_kernels.py --skip-micro
"""

import argparse
import time

import numpy as np

from vemlab.basis import monomial_exponents
from vemlab.kernels import _fallback, backend_name

try:
    from vemlab.kernels import _speedups
except ImportError:
    _speedups = None


def best_of(fn, args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def micro(repeats):
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'degree':>6s} {'points':>8s} "
          f"{'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, pick in (("monomial_vandermonde", 0),
                       ("monomial_vandermonde_grad", 1)):
        for degree in (1, 2, 4):
            for n_pts in (64, 4096, 65536):
                pts = rng.uniform(0, 1, size=(n_pts, 2))
                center = np.array([0.5, 0.5])
                exps = monomial_exponents(degree)
                args = (pts, center, 0.7, exps)
                fns = (_fallback.monomial_vandermonde,
                       _fallback.monomial_vandermonde_grad)
                t_py = best_of(fns[pick], args, repeats)
                if _speedups is None:
                    print(f"{name:28s} {degree:6d} {n_pts:8d} "
                          f"{t_py * 1e6:9.1f}us {'-':>10s} {'-':>8s}")
                    continue
                cfns = (_speedups.monomial_vandermonde,
                        _speedups.monomial_vandermonde_grad)
                t_c = best_of(cfns[pick], args, repeats)
                print(f"{name:28s} {degree:6d} {n_pts:8d} "
                      f"{t_py * 1e6:9.1f}us {t_c * 1e6:9.1f}us "
                      f"{t_py / t_c:7.2f}x")


def pipeline(repeats):
    from vemlab.local import projector_set
    from vemlab.mesh import element_geometry
    from vemlab.meshgen import GeneratorSpec, generate

    mesh = generate(GeneratorSpec("lloyd0", 100, seed=1))
    geoms = [element_geometry(mesh, c) for c in range(mesh.num_cells)]

    def run(k):
        for geom in geoms:
            projector_set(geom, k)

    print(f"\nprojector pipeline on 100 Voronoi cells "
          f"(backend = {backend_name()}):")
    for k in (1, 2, 4):
        t = best_of(run, (k,), repeats)
        print(f"  k={k}: {t * 1e3:8.2f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions, best-of (default 5)")
    parser.add_argument("--skip-micro", action="store_true",
                        help="only run the pipeline timing")
    args = parser.parse_args()
    if not args.skip_micro:
        micro(args.repeats)
    pipeline(args.repeats)


if __name__ == "__main__":
    main()

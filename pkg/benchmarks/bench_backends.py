"""Compare the compiled SOM kernels against the pure-NumPy fallback.

Usage: python3 benchmarks/bench_backends.py [--records 5000] [--neurons 400]
"""

import argparse
import importlib
import time

import numpy as np


def bench(impl, data, protos, repeats=20):
    impl.assign_bmus(data, protos)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        bmus = impl.assign_bmus(data, protos)
        impl.accumulate_by_bmu(data, bmus, len(protos))
    return (time.perf_counter() - t0) / repeats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--records", type=int, default=5000)
    ap.add_argument("--neurons", type=int, default=400)
    ap.add_argument("--dims", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    data = rng.random((args.records, args.dims))
    protos = rng.random((args.neurons, args.dims))

    py = importlib.import_module("sonfis._somcore_py")
    results = {"numpy": bench(py, data, protos)}
    try:
        cy = importlib.import_module("sonfis._somcore")
        results["cython"] = bench(cy, data, protos)
        same = np.array_equal(py.assign_bmus(data, protos), cy.assign_bmus(data, protos))
        print(f"BMU agreement between backends: {same}")
    except ImportError:
        print("compiled extension not available; benchmarking fallback only")

    for name, t in results.items():
        print(f"{name:>7}: {t * 1e3:8.3f} ms per epoch kernel "
              f"({args.records} records x {args.neurons} neurons)")
    if len(results) == 2:
        print(f"speedup: {results['numpy'] / results['cython']:.2f}x")


if __name__ == "__main__":
    main()

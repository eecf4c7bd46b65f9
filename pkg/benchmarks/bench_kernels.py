"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall times per kernel and backend, the speed-up, and the
largest difference between the two results.
"""
import argparse
import timeit

import numpy as np

from ncmotive.numkernel import _backend, _pykernels

try:
    from ncmotive.numkernel import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    s = 0.5 + 1j * rng.uniform(0, 500, 400)
    n = rng.integers(50, 2000, 400)
    return {
        "power_sum (400 s-values)": lambda k: k.power_sum(s, 1.0, n),
        "residue_power_sums (1e6, mod 12)": lambda k: k.residue_power_sums(2.0, 10 ** 6, 12),
        "partial_zeta (1e6)": lambda k: k.partial_zeta(2.0, 10 ** 6),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    print(f"default backend: {_backend.BACKEND}")
    if _ckernels is None:
        print("compiled extension not available; timing the fallback only")
    header = f"{'kernel':36s} {'python s':>10s} {'cython s':>10s} {'speed-up':>9s} {'max diff':>10s}"
    print(header)
    for name, call in cases().items():
        t_py = min(timeit.repeat(lambda: call(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:36s} {t_py:10.4f}")
            continue
        t_c = min(timeit.repeat(lambda: call(_ckernels), number=1, repeat=args.repeat))
        diff = np.max(np.abs(np.asarray(call(_pykernels)) - np.asarray(call(_ckernels))))
        print(f"{name:36s} {t_py:10.4f} {t_c:10.4f} {t_py / t_c:8.1f}x {diff:10.2e}")


if __name__ == "__main__":
    main()

"""Compare the Cython kernels with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly, so the environment switch is not
needed. Prints best-of-``repeat`` wall times and the speedup.
"""

import argparse
import timeit

import numpy as np

from fracheat._kernels import _pykernels

try:
    from fracheat._kernels import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    stack = rng.random((40, 256 * 256))
    weights = rng.random(40)
    decay = rng.random(128 * 128)
    source = rng.normal(size=(129, 128 * 128)) + 1j * rng.normal(size=(129, 128 * 128))
    r = 3 * rng.random(512 * 512)
    return {
        "weighted_power_sum q=2": lambda m: m.weighted_power_sum(stack, weights, 2.0),
        "weighted_power_sum q=inf": lambda m: m.weighted_power_sum(stack, weights, np.inf),
        "duhamel_trapezoid": lambda m: m.duhamel_trapezoid(decay, source, 0.01),
        "smooth_transition": lambda m: m.smooth_transition(r, 1.0, 1.5),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:28s} {py:12.2f} {'n/a':>12s} {'n/a':>8s}")
            continue
        cy = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:28s} {py:12.2f} {cy:12.2f} {py / cy:8.2f}")


if __name__ == "__main__":
    main()

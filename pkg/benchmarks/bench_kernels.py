"""Compare the numba and numpy backends of the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from crange import _kernels as K
from crange.groups import FullUnitary, haar_batch


def cases(rng):
    us = haar_batch(FullUnitary(4), 20_000, 0)
    c = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    x, y = rng.uniform(-1, 1, 200_000), rng.uniform(-1, 1, 200_000)
    i, j = np.mgrid[:64, :64]
    occ = (i - 31.5) ** 2 + (j - 31.5) ** 2 <= 28**2
    t = np.linspace(0, 2 * np.pi, 20_000, endpoint=False)
    re, im = np.cos(3 * t), np.sin(3 * t)
    return {
        "trace_points": (us, c, a),
        "rasterize": (x, y, -1.0, -1.0, 2 / 256, 2 / 256, 256),
        "star_visible": (occ, occ, 32.0, 32.0),
        "winding_angle": (re, im, 0.1, 0.0),
        "min_segment_distance": (re, im, 0.1, 0.0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, inputs in cases(np.random.default_rng(0)).items():
        fast, slow = getattr(K, name + "_numba"), getattr(K, name + "_numpy")
        fast(*inputs)  # compile
        tf = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat))
        ts = min(timeit.repeat(lambda: slow(*inputs), number=1, repeat=args.repeat))
        print(f"{name:<22}{1e3 * ts:>12.2f}{1e3 * tf:>12.2f}{ts / tf:>10.1f}")


if __name__ == "__main__":
    main()

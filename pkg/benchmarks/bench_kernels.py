"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Each kernel runs once untimed (JIT warm-up) and then ``--repeat`` times;
the best wall-clock time is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from homolpn import _accel, kernels
from homolpn.gf2 import _pack


def _best(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(scale: float, rng: np.random.Generator):
    rows = max(8, int(512 * scale))
    cols = max(8, int(512 * scale))
    a = _pack(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))
    b = _pack(rng.integers(0, 2, size=(cols, cols), dtype=np.uint8))
    eye = _pack(np.eye(rows, dtype=np.uint8))
    target = np.arange(cols, dtype=np.int64)
    vec = a[0].copy()
    hist = rng.integers(-50, 50, size=1 << 20).astype(np.int64)
    n_keys = 14
    cints = rng.integers(0, 1 << n_keys, size=2000).astype(np.uint64)
    rhs = rng.integers(0, 2, size=2000).astype(np.uint8)

    def elim(fn):
        return lambda: fn(a.copy(), eye.copy(), target, True)

    return {
        f"eliminate_rows {rows}x{cols}": (elim(kernels.eliminate_rows_numba), elim(kernels.eliminate_rows_numpy)),
        f"matmul {rows}x{cols}x{cols}": (
            lambda: kernels.matmul_numba(a, cols, b),
            lambda: kernels.matmul_numpy(a, cols, b),
        ),
        f"row_parity {rows}x{cols}": (
            lambda: kernels.row_parity_numba(a, vec),
            lambda: kernels.row_parity_numpy(a, vec),
        ),
        "walsh_hadamard 2^20": (
            lambda: kernels.walsh_hadamard_numba(hist.copy()),
            lambda: kernels.walsh_hadamard_numpy(hist.copy()),
        ),
        f"score_keys 2^{n_keys} keys x 2000": (
            lambda: kernels.score_keys_numba(cints, rhs, n_keys),
            lambda: kernels.score_keys_numpy(cints, rhs, n_keys),
        ),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--scale", type=float, default=1.0, help="multiplies the matrix sizes")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if not _accel.NUMBA_INSTALLED:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':40s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, (fast, slow) in cases(args.scale, rng).items():
        t_fast, t_slow = _best(fast, args.repeat), _best(slow, args.repeat)
        print(f"{name:40s} {t_fast * 1e3:9.2f}ms {t_slow * 1e3:9.2f}ms {t_slow / t_fast:7.1f}x")


if __name__ == "__main__":
    main()

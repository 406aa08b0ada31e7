"""Hot inner loops on bit-packed GF(2) data.

Every kernel exists twice: a loop-style version compiled with numba and a
vectorised numpy version.  Both operate on the same packed layout (rows of
``uint64`` words, bit ``j`` of a row at word ``j >> 6``, position ``j & 63``)
and must return identical results; ``tests/test_kernels.py`` checks that.
The module-level names (``eliminate_rows``, ``matmul`` ...) are bound to one
implementation at import time according to :data:`homolpn._accel.USE_NUMBA`.
"""

import numpy as np

from ._accel import USE_NUMBA, optional_njit

_ONE = np.uint64(1)


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@optional_njit(cache=True)
def _parity64(x):
    x ^= x >> np.uint64(32)
    x ^= x >> np.uint64(16)
    x ^= x >> np.uint64(8)
    x ^= x >> np.uint64(4)
    x ^= x >> np.uint64(2)
    x ^= x >> np.uint64(1)
    return np.uint8(x & np.uint64(1))


@optional_njit(cache=True)
def eliminate_rows_numba(words, ops, cols, full):
    n_rows = words.shape[0]
    used = np.zeros(n_rows, dtype=np.bool_)
    pivots = np.full(cols.shape[0], -1, dtype=np.int64)
    for k in range(cols.shape[0]):
        c = cols[k]
        wi = c >> 6
        sh = np.uint64(c & 63)
        p = -1
        for r in range(n_rows):
            if not used[r] and ((words[r, wi] >> sh) & np.uint64(1)) != 0:
                p = r
                break
        if p < 0:
            continue
        used[p] = True
        pivots[k] = p
        for r in range(n_rows):
            if r == p or (used[r] and not full):
                continue
            if ((words[r, wi] >> sh) & np.uint64(1)) != 0:
                for j in range(words.shape[1]):
                    words[r, j] ^= words[p, j]
                for j in range(ops.shape[1]):
                    ops[r, j] ^= ops[p, j]
    return pivots


@optional_njit(cache=True)
def matmul_numba(a, a_cols, b):
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint64)
    for i in range(a.shape[0]):
        for t in range(a_cols):
            if ((a[i, t >> 6] >> np.uint64(t & 63)) & np.uint64(1)) != 0:
                for j in range(b.shape[1]):
                    out[i, j] ^= b[t, j]
    return out


@optional_njit(cache=True)
def row_parity_numba(words, vec):
    out = np.zeros(words.shape[0], dtype=np.uint8)
    for r in range(words.shape[0]):
        acc = np.uint64(0)
        for j in range(words.shape[1]):
            acc ^= words[r, j] & vec[j]
        out[r] = _parity64(acc)
    return out


@optional_njit(cache=True)
def walsh_hadamard_numba(f):
    n = f.shape[0]
    h = 1
    while h < n:
        for i in range(0, n, 2 * h):
            for j in range(i, i + h):
                x = f[j]
                y = f[j + h]
                f[j] = x + y
                f[j + h] = x - y
        h *= 2
    return f


@optional_njit(cache=True)
def score_keys_numba(cints, rhs, n):
    n_keys = 1 << n
    scores = np.zeros(n_keys, dtype=np.int64)
    for key in range(n_keys):
        k = np.uint64(key)
        s = 0
        for r in range(cints.shape[0]):
            if _parity64(cints[r] & k) == rhs[r]:
                s += 1
        scores[key] = s
    return scores


# ---------------------------------------------------------------------------
# numpy kernels
# ---------------------------------------------------------------------------


def _column_bits(words, c):
    return ((words[:, c >> 6] >> np.uint64(c & 63)) & _ONE).astype(bool)


def eliminate_rows_numpy(words, ops, cols, full):
    used = np.zeros(words.shape[0], dtype=bool)
    pivots = np.full(len(cols), -1, dtype=np.int64)
    for k, c in enumerate(cols):
        bit = _column_bits(words, int(c))
        cand = np.flatnonzero(bit & ~used)
        if cand.size == 0:
            continue
        p = cand[0]
        used[p] = True
        pivots[k] = p
        mask = bit.copy()
        mask[p] = False
        if not full:
            mask &= ~used
        words[mask] ^= words[p]
        ops[mask] ^= ops[p]
    return pivots


def matmul_numpy(a, a_cols, b):
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint64)
    for t in range(a_cols):
        mask = _column_bits(a, t)
        if mask.any():
            out[mask] ^= b[t]
    return out


def row_parity_numpy(words, vec):
    counts = np.bitwise_count(words & vec[None, :]).sum(axis=1)
    return (counts & 1).astype(np.uint8)


def walsh_hadamard_numpy(f):
    n = f.shape[0]
    h = 1
    while h < n:
        view = f.reshape(-1, 2, h)
        x = view[:, 0, :].copy()
        y = view[:, 1, :]
        view[:, 0, :] += y
        view[:, 1, :] = x - y
        h *= 2
    return f


def score_keys_numpy(cints, rhs, n, chunk=1 << 12):
    n_keys = 1 << n
    scores = np.empty(n_keys, dtype=np.int64)
    rhs = rhs.astype(np.uint8)
    for start in range(0, n_keys, chunk):
        keys = np.arange(start, min(start + chunk, n_keys), dtype=np.uint64)
        par = (np.bitwise_count(keys[:, None] & cints[None, :]) & 1).astype(np.uint8)
        scores[start : start + keys.size] = (par == rhs[None, :]).sum(axis=1)
    return scores


if USE_NUMBA:
    eliminate_rows = eliminate_rows_numba
    matmul = matmul_numba
    row_parity = row_parity_numba
    walsh_hadamard = walsh_hadamard_numba
    score_keys = score_keys_numba
    BACKEND = "numba"
else:
    eliminate_rows = eliminate_rows_numpy
    matmul = matmul_numpy
    row_parity = row_parity_numpy
    walsh_hadamard = walsh_hadamard_numpy
    score_keys = score_keys_numpy
    BACKEND = "numpy"

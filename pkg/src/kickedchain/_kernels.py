"""Low-level string-product kernels for the ladder algebra.

A product operator over L sites is packed into an int64, two bits per site
(site j occupies bits 2j and 2j+1):

    0 = identity, 1 = Sz, 2 = S+, 3 = S-

The kernels below expand products and commutators of sums of such strings.
They are written in a numba-compatible subset of Python; when numba is
available they are JIT compiled (cached on disk), otherwise the same source
runs as plain Python.

Large jobs are split over fixed-size chunks of the left operand and run on a
thread pool (the kernels release the GIL).  Chunk boundaries and the merge
order are independent of the thread count, so results are bit-identical for
any parallelism setting.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

try:
    from numba import njit, types
    from numba.typed import Dict

    HAVE_NUMBA = True

    def _new_map():
        return Dict.empty(types.int64, types.complex128)

except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

    def _new_map():
        return {}


# 1 at every even bit position; (k | k>>1) & _EVEN flags occupied sites.
_EVEN = 0x5555555555555555


@njit(cache=True, nogil=True)
def _occupation(k):
    return (k | (k >> 1)) & _EVEN


@njit(cache=True, nogil=True)
def _accumulate_product(out, ka, kb, c, shared, split_pos, split_sign):
    """Accumulate c * (string ka)(string kb) into the map `out`.

    `shared` must be the occupation overlap of ka and kb.  Sites occupied in
    only one factor pass through via bitwise OR; shared sites follow the 4x4
    single-site product table.  S+S- and S-S+ each split into two output
    strings (identity and Sz branches).
    """
    base = ka | kb
    coeff = c
    ns = 0
    sh = shared
    pos = 0
    while sh != 0:
        if sh & 1:
            p = pos
            ca = (ka >> p) & 3
            cb = (kb >> p) & 3
            base &= ~(3 << p)
            if ca == 1:
                if cb == 1:
                    coeff *= 0.25  # Sz Sz = I/4
                elif cb == 2:
                    coeff *= 0.5  # Sz S+ = S+/2
                    base |= 2 << p
                else:
                    coeff *= -0.5  # Sz S- = -S-/2
                    base |= 3 << p
            elif ca == 2:
                if cb == 1:
                    coeff *= -0.5  # S+ Sz = -S+/2
                    base |= 2 << p
                elif cb == 2:
                    return  # S+ S+ = 0
                else:
                    split_pos[ns] = p  # S+ S- = I/2 + Sz
                    split_sign[ns] = 1.0
                    ns += 1
            else:
                if cb == 1:
                    coeff *= 0.5  # S- Sz = S-/2
                    base |= 3 << p
                elif cb == 3:
                    return  # S- S- = 0
                else:
                    split_pos[ns] = p  # S- S+ = I/2 - Sz
                    split_sign[ns] = -1.0
                    ns += 1
        sh >>= 1
        pos += 1

    for m in range(1 << ns):
        k2 = base
        c2 = coeff
        for t in range(ns):
            if (m >> t) & 1:
                k2 |= 1 << split_pos[t]
                c2 *= split_sign[t]
            else:
                c2 *= 0.5
        if k2 in out:
            out[k2] = out[k2] + c2
        else:
            out[k2] = c2


@njit(cache=True, nogil=True)
def _pair_kernel(out, keys_x, coeffs_x, keys_y, coeffs_y, mode):
    """All-pairs expansion of X*Y (mode 0) or [X, Y] (mode 1) into `out`.

    In commutator mode, pairs with disjoint support are skipped (they commute
    exactly) and both orders are accumulated with opposite signs.
    """
    split_pos = np.empty(64, np.int64)
    split_sign = np.empty(64, np.float64)
    ny = keys_y.shape[0]
    occ_y = np.empty(ny, np.int64)
    for j in range(ny):
        occ_y[j] = _occupation(keys_y[j])
    for i in range(keys_x.shape[0]):
        ka = keys_x[i]
        ca = coeffs_x[i]
        oa = _occupation(ka)
        for j in range(ny):
            shared = oa & occ_y[j]
            if mode == 1 and shared == 0:
                continue
            kb = keys_y[j]
            c = ca * coeffs_y[j]
            _accumulate_product(out, ka, kb, c, shared, split_pos, split_sign)
            if mode == 1:
                _accumulate_product(out, kb, ka, -c, shared, split_pos, split_sign)
    return _dump_map(out)


@njit(cache=True, nogil=True)
def _merge_into(out, keys, vals):
    for i in range(keys.shape[0]):
        k = keys[i]
        if k in out:
            out[k] = out[k] + vals[i]
        else:
            out[k] = vals[i]


@njit(cache=True, nogil=True)
def _dump_map(out):
    n = len(out)
    keys = np.empty(n, np.int64)
    vals = np.empty(n, np.complex128)
    i = 0
    for k in out:
        keys[i] = k
        vals[i] = out[k]
        i += 1
    return keys, vals


def _thread_count() -> int:
    env = os.environ.get("KICKEDCHAIN_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


# Fixed chunking keeps results independent of the thread count.
_CHUNK_ROWS = 1024
_PARALLEL_MIN_PAIRS = 1 << 18

_pool = None


def _get_pool():
    global _pool
    if _pool is None:
        _pool = ThreadPoolExecutor(max_workers=_thread_count())
    return _pool


def _pair_dispatch(keys_x, coeffs_x, keys_y, coeffs_y, mode):
    nx = keys_x.shape[0]
    npairs = nx * keys_y.shape[0]
    if not HAVE_NUMBA or npairs < _PARALLEL_MIN_PAIRS or nx <= _CHUNK_ROWS:
        return _pair_kernel(_new_map(), keys_x, coeffs_x, keys_y, coeffs_y, mode)
    jobs = [
        _get_pool().submit(
            _pair_kernel,
            _new_map(),
            keys_x[lo : lo + _CHUNK_ROWS],
            coeffs_x[lo : lo + _CHUNK_ROWS],
            keys_y,
            coeffs_y,
            mode,
        )
        for lo in range(0, nx, _CHUNK_ROWS)
    ]
    out = _new_map()
    for job in jobs:  # in chunk order: merge is deterministic
        keys, vals = job.result()
        _merge_into(out, keys, vals)
    return _dump_map(out)


def pair_products(keys_x, coeffs_x, keys_y, coeffs_y):
    """Expansion of the operator product X*Y on packed arrays."""
    return _pair_dispatch(keys_x, coeffs_x, keys_y, coeffs_y, 0)


def pair_commutator(keys_x, coeffs_x, keys_y, coeffs_y):
    """Expansion of the commutator [X, Y] on packed arrays."""
    return _pair_dispatch(keys_x, coeffs_x, keys_y, coeffs_y, 1)

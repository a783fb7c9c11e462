"""Packed sparse polynomial multiplication modulo m.

Exponent vectors are packed into int64 keys with a mixed radix chosen so that
no digit can overflow during a product; multiplying two monomials is then an
addition of keys and the whole product is a scatter-add into a key table.

Two implementations share one contract:

* ``numba`` -- an ``@njit`` loop with per-step modular reduction;
* ``numpy`` -- broadcasting, a stable sort and ``np.add.reduceat``.

The numba path is used when numba imports and ``CHARPDIFF_NUMBA`` is not set
to a false value (``0``, ``false``, ``no``, ``off``).
"""

from __future__ import annotations

import os

import numpy as np

# Largest modulus / work sizes for which int64 accumulation is exact.
MAX_MODULUS = 1 << 31
_INT64_HEADROOM = 1 << 62
# Dense scatter table size limit for the numba kernel.
_DENSE_LIMIT = 1 << 22


def _numba_requested() -> bool:
    flag = os.environ.get("CHARPDIFF_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


try:
    if not _numba_requested():
        raise ImportError("numba disabled by CHARPDIFF_NUMBA")
    from numba import njit
except ImportError:
    njit = None

HAVE_NUMBA = njit is not None
BACKEND = "numba" if HAVE_NUMBA else "numpy"


def mul_packed_numpy(ka, ca, kb, cb, modulus):
    """Multiply packed polynomials; returns (keys, coeffs), keys ascending."""
    keys = (ka[:, None] + kb[None, :]).ravel()
    vals = ((ca[:, None] * cb[None, :]) % modulus).ravel()
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    vals = vals[order]
    starts = np.flatnonzero(np.concatenate(([True], keys[1:] != keys[:-1])))
    sums = np.add.reduceat(vals, starts) % modulus
    uniq = keys[starts]
    nz = sums != 0
    return uniq[nz], sums[nz]


if HAVE_NUMBA:

    @njit(cache=True)
    def _mul_dense_nb(ka, ca, kb, cb, modulus, span):
        table = np.zeros(span, dtype=np.int64)
        for i in range(ka.shape[0]):
            ki = ka[i]
            ci = ca[i]
            for j in range(kb.shape[0]):
                k = ki + kb[j]
                table[k] = (table[k] + ci * cb[j]) % modulus
        count = 0
        for k in range(span):
            if table[k] != 0:
                count += 1
        keys = np.empty(count, dtype=np.int64)
        vals = np.empty(count, dtype=np.int64)
        pos = 0
        for k in range(span):
            if table[k] != 0:
                keys[pos] = k
                vals[pos] = table[k]
                pos += 1
        return keys, vals

    def mul_packed_numba(ka, ca, kb, cb, modulus, span):
        if span > _DENSE_LIMIT:
            return mul_packed_numpy(ka, ca, kb, cb, modulus)
        return _mul_dense_nb(ka, ca, kb, cb, modulus, span)

else:
    mul_packed_numba = None


def kernel_applicable(len_a: int, len_b: int, modulus: int) -> bool:
    """Whether the int64 kernels are exact for operands of this size."""
    return modulus < MAX_MODULUS and len_a * len_b * modulus < _INT64_HEADROOM


def radix_for(max_a, max_b):
    """Per-variable radix so that digit sums never carry; None if too wide."""
    radix = [x + y + 1 for x, y in zip(max_a, max_b)]
    span = 1
    for r in radix:
        span *= r
    if span >= _INT64_HEADROOM:
        return None, 0
    return radix, span


def pack(exps: np.ndarray, radix) -> np.ndarray:
    strides = np.ones(len(radix), dtype=np.int64)
    for i in range(len(radix) - 2, -1, -1):
        strides[i] = strides[i + 1] * radix[i + 1]
    return exps @ strides


def unpack(keys: np.ndarray, radix) -> np.ndarray:
    out = np.empty((keys.shape[0], len(radix)), dtype=np.int64)
    rest = keys.copy()
    for i in range(len(radix) - 1, -1, -1):
        out[:, i] = rest % radix[i]
        rest //= radix[i]
    return out


def mul_sparse(a_exps, a_coeffs, b_exps, b_coeffs, modulus, backend=None):
    """Product of two sparse polynomials given as exponent/coeff arrays.

    Returns ``(exps, coeffs)`` arrays, or ``None`` when the packed key space
    would not fit into int64 (the caller then uses the pure Python loop).
    """
    radix, span = radix_for(a_exps.max(axis=0), b_exps.max(axis=0))
    if radix is None:
        return None
    ka = pack(a_exps, radix)
    kb = pack(b_exps, radix)
    backend = backend or BACKEND
    if backend == "numba":
        if mul_packed_numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        keys, vals = mul_packed_numba(ka, a_coeffs, kb, b_coeffs, modulus, span)
    else:
        keys, vals = mul_packed_numpy(ka, a_coeffs, kb, b_coeffs, modulus)
    return unpack(keys, radix), vals

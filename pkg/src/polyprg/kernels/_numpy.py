"""Pure-numpy fallback kernels (blocked enumeration, no JIT).

Same contracts as the numba backend.  Cube points and rest-seeds are
processed in index order in blocks; every dot product is computed fresh,
so integer-weight results are exact and float results carry no cumulative
drift.
"""

from __future__ import annotations

import math

import numpy as np

_BLOCK_BITS = 14


def _sign_block(lo: int, hi: int, n: int) -> np.ndarray:
    """Signs u (hi-lo, n) for point indices [lo, hi); bit j set -> +1."""
    idx = np.arange(lo, hi, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1
    return (2 * bits - 1).astype(np.float64)


def cube_orthant_counts(A, thresholds, lo, hi):
    A = np.asarray(A, dtype=np.float64)
    th = np.atleast_2d(np.asarray(thresholds, dtype=np.float64))
    n = A.shape[1]
    counts = np.zeros(th.shape[0], dtype=np.int64)
    block = 1 << _BLOCK_BITS
    for start in range(lo, hi, block):
        stop = min(start + block, hi)
        dots = _sign_block(start, stop, n) @ A.T
        for t in range(th.shape[0]):
            counts[t] += int((dots <= th[t][None, :]).all(axis=1).sum())
    return counts


def cube_mollifier_sum(A, b, lam, lo, hi):
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[1]
    scale = 1.0 / (lam * math.sqrt(2.0))
    total = 0.0
    block = 1 << _BLOCK_BITS
    for start in range(lo, hi, block):
        stop = min(start + block, hi)
        dots = _sign_block(start, stop, n) @ A.T
        z = (dots - b[None, :]) * scale
        vals = np.empty(z.shape, dtype=np.float64)
        flat_in = z.ravel()
        flat_out = vals.ravel()
        for i in range(flat_in.size):
            flat_out[i] = 0.5 * math.erfc(flat_in[i])
        total += float(np.prod(vals, axis=1).sum())
    return total


def _seed_signs_block(base_bits, masks, lo, hi, n) -> np.ndarray:
    cs = np.arange(lo, hi, dtype=np.int64)
    zb = np.full(cs.shape, np.int64(base_bits), dtype=np.int64)
    for t in range(len(masks)):
        sel = ((cs >> t) & 1).astype(bool)
        zb[sel] ^= np.int64(masks[t])
    bits = (zb[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1
    return (2.0 * bits.astype(np.float64)) - 1.0


def linear_seed_orthant_counts(base_bits, masks, A, thresholds, lo, hi):
    A = np.asarray(A, dtype=np.float64)
    th = np.atleast_2d(np.asarray(thresholds, dtype=np.float64))
    n = A.shape[1]
    counts = np.zeros(th.shape[0], dtype=np.int64)
    block = 1 << _BLOCK_BITS
    for start in range(lo, hi, block):
        stop = min(start + block, hi)
        dots = _seed_signs_block(base_bits, masks, start, stop, n) @ A.T
        for t in range(th.shape[0]):
            counts[t] += int((dots <= th[t][None, :]).all(axis=1).sum())
    return counts


def _erfc_block(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.size, dtype=np.float64)
    flat = z.ravel()
    for i in range(flat.size):
        out[i] = math.erfc(flat[i])
    return out.reshape(z.shape)


def _max_defect_block(dots, b, b_in, b_out, scale, big_lambda) -> float:
    inside = (dots <= b[None, :]).all(axis=1)
    deep = (dots <= (b - big_lambda)[None, :]).all(axis=1)
    inside_outer = (dots <= (b + big_lambda)[None, :]).all(axis=1)
    ind = inside.astype(np.float64)
    vals_in = np.prod(0.5 * _erfc_block((dots - b_in[None, :]) * scale), axis=1)
    vals_out = np.prod(0.5 * _erfc_block((dots - b_out[None, :]) * scale), axis=1)
    check_in = ~(inside & ~deep)
    check_out = ~(inside_outer & ~inside)
    worst = 0.0
    if check_in.any():
        worst = max(worst, float(np.abs(vals_in - ind)[check_in].max()))
    if check_out.any():
        worst = max(worst, float(np.abs(vals_out - ind)[check_out].max()))
    return worst


def cube_max_defect(A, b, b_in, b_out, lam, big_lambda, lo, hi):
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    b_in = np.asarray(b_in, dtype=np.float64)
    b_out = np.asarray(b_out, dtype=np.float64)
    n = A.shape[1]
    scale = 1.0 / (lam * math.sqrt(2.0))
    worst = 0.0
    block = 1 << _BLOCK_BITS
    for start in range(lo, hi, block):
        stop = min(start + block, hi)
        dots = _sign_block(start, stop, n) @ A.T
        worst = max(worst, _max_defect_block(dots, b, b_in, b_out, scale, big_lambda))
    return worst


def linear_seed_max_defect(base_bits, masks, A, b, b_in, b_out, lam, big_lambda, lo, hi):
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    b_in = np.asarray(b_in, dtype=np.float64)
    b_out = np.asarray(b_out, dtype=np.float64)
    n = A.shape[1]
    scale = 1.0 / (lam * math.sqrt(2.0))
    worst = 0.0
    block = 1 << _BLOCK_BITS
    for start in range(lo, hi, block):
        stop = min(start + block, hi)
        dots = _seed_signs_block(base_bits, masks, start, stop, n) @ A.T
        worst = max(worst, _max_defect_block(dots, b, b_in, b_out, scale, big_lambda))
    return worst


def linear_seed_mollifier_sum(base_bits, masks, A, b, lam, lo, hi):
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[1]
    scale = 1.0 / (lam * math.sqrt(2.0))
    total = 0.0
    block = 1 << _BLOCK_BITS
    for start in range(lo, hi, block):
        stop = min(start + block, hi)
        dots = _seed_signs_block(base_bits, masks, start, stop, n) @ A.T
        z = (dots - b[None, :]) * scale
        vals = np.empty(z.shape, dtype=np.float64)
        flat_in = z.ravel()
        flat_out = vals.ravel()
        for i in range(flat_in.size):
            flat_out[i] = 0.5 * math.erfc(flat_in[i])
        total += float(np.prod(vals, axis=1).sum())
    return total

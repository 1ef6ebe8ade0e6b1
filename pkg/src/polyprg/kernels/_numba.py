"""Numba JIT kernels (the default backend).

Integer-weight cube kernels walk the cube in Gray-code order with
incremental int64 dot updates, turning 2^n * n * m work into 2^n * m.
Float-weight variants recompute each dot from scratch in index order, so
they sum in exactly the same order as the numpy fallback.  Seed kernels
step a rest-seed counter, XOR-ing per-bit flip masks into the current
output pattern and updating dots incrementally (int64) or recomputing
them (float64).  Bit patterns are int64: n is capped well below 63.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _cube_counts_gray_int(A, th, lo, hi):
    m, n = A.shape
    T = th.shape[0]
    counts = np.zeros(T, dtype=np.int64)
    dots = np.zeros(m, dtype=np.int64)
    g = lo ^ (lo >> 1)
    for i in range(m):
        s = 0
        for j in range(n):
            if (g >> j) & 1:
                s += A[i, j]
            else:
                s -= A[i, j]
        dots[i] = s
    for c in range(lo, hi):
        if c > lo:
            gg = c ^ (c >> 1)
            diff = g ^ gg
            j = 0
            while not (diff >> j) & 1:
                j += 1
            if (gg >> j) & 1:
                for i in range(m):
                    dots[i] += 2 * A[i, j]
            else:
                for i in range(m):
                    dots[i] -= 2 * A[i, j]
            g = gg
        for ti in range(T):
            ok = True
            for i in range(m):
                if dots[i] > th[ti, i]:
                    ok = False
                    break
            if ok:
                counts[ti] += 1
    return counts


@njit(cache=True)
def _cube_counts_float(A, th, lo, hi):
    m, n = A.shape
    T = th.shape[0]
    counts = np.zeros(T, dtype=np.int64)
    dots = np.zeros(m, dtype=np.float64)
    for c in range(lo, hi):
        for i in range(m):
            s = 0.0
            for j in range(n):
                if (c >> j) & 1:
                    s += A[i, j]
                else:
                    s -= A[i, j]
            dots[i] = s
        for ti in range(T):
            ok = True
            for i in range(m):
                if dots[i] > th[ti, i]:
                    ok = False
                    break
            if ok:
                counts[ti] += 1
    return counts


@njit(cache=True)
def _cube_mollifier_gray_int(A, b, inv_scale, lo, hi):
    m, n = A.shape
    dots = np.zeros(m, dtype=np.int64)
    g = lo ^ (lo >> 1)
    for i in range(m):
        s = 0
        for j in range(n):
            if (g >> j) & 1:
                s += A[i, j]
            else:
                s -= A[i, j]
        dots[i] = s
    total = 0.0
    for c in range(lo, hi):
        if c > lo:
            gg = c ^ (c >> 1)
            diff = g ^ gg
            j = 0
            while not (diff >> j) & 1:
                j += 1
            if (gg >> j) & 1:
                for i in range(m):
                    dots[i] += 2 * A[i, j]
            else:
                for i in range(m):
                    dots[i] -= 2 * A[i, j]
            g = gg
        val = 1.0
        for i in range(m):
            val *= 0.5 * math.erfc((dots[i] - b[i]) * inv_scale)
        total += val
    return total


@njit(cache=True)
def _cube_mollifier_float(A, b, inv_scale, lo, hi):
    m, n = A.shape
    total = 0.0
    for c in range(lo, hi):
        val = 1.0
        for i in range(m):
            s = 0.0
            for j in range(n):
                if (c >> j) & 1:
                    s += A[i, j]
                else:
                    s -= A[i, j]
            val *= 0.5 * math.erfc((s - b[i]) * inv_scale)
        total += val
    return total


@njit(cache=True)
def _fold_masks(base_bits, masks, counter):
    bits = base_bits
    r = counter
    t = 0
    while r:
        if r & 1:
            bits ^= masks[t]
        r >>= 1
        t += 1
    return bits


@njit(cache=True)
def _seed_counts_int(base_bits, masks, A, th, lo, hi):
    m, n = A.shape
    T = th.shape[0]
    counts = np.zeros(T, dtype=np.int64)
    bits = _fold_masks(base_bits, masks, lo)
    dots = np.zeros(m, dtype=np.int64)
    for i in range(m):
        s = 0
        for j in range(n):
            if (bits >> j) & 1:
                s += A[i, j]
            else:
                s -= A[i, j]
        dots[i] = s
    for c in range(lo, hi):
        if c > lo:
            pattern = (c - 1) ^ c
            fm = 0
            t = 0
            while pattern:
                if pattern & 1:
                    fm ^= masks[t]
                pattern >>= 1
                t += 1
            bits ^= fm
            while fm:
                j = 0
                while not (fm >> j) & 1:
                    j += 1
                fm &= fm - 1
                if (bits >> j) & 1:
                    for i in range(m):
                        dots[i] += 2 * A[i, j]
                else:
                    for i in range(m):
                        dots[i] -= 2 * A[i, j]
        for ti in range(T):
            ok = True
            for i in range(m):
                if dots[i] > th[ti, i]:
                    ok = False
                    break
            if ok:
                counts[ti] += 1
    return counts


@njit(cache=True)
def _seed_counts_float(base_bits, masks, A, th, lo, hi):
    m, n = A.shape
    T = th.shape[0]
    counts = np.zeros(T, dtype=np.int64)
    dots = np.zeros(m, dtype=np.float64)
    for c in range(lo, hi):
        bits = _fold_masks(base_bits, masks, c)
        for i in range(m):
            s = 0.0
            for j in range(n):
                if (bits >> j) & 1:
                    s += A[i, j]
                else:
                    s -= A[i, j]
            dots[i] = s
        for ti in range(T):
            ok = True
            for i in range(m):
                if dots[i] > th[ti, i]:
                    ok = False
                    break
            if ok:
                counts[ti] += 1
    return counts


@njit(cache=True)
def _seed_mollifier_int(base_bits, masks, A, b, inv_scale, lo, hi):
    m, n = A.shape
    bits = _fold_masks(base_bits, masks, lo)
    dots = np.zeros(m, dtype=np.int64)
    for i in range(m):
        s = 0
        for j in range(n):
            if (bits >> j) & 1:
                s += A[i, j]
            else:
                s -= A[i, j]
        dots[i] = s
    total = 0.0
    for c in range(lo, hi):
        if c > lo:
            pattern = (c - 1) ^ c
            fm = 0
            t = 0
            while pattern:
                if pattern & 1:
                    fm ^= masks[t]
                pattern >>= 1
                t += 1
            bits ^= fm
            while fm:
                j = 0
                while not (fm >> j) & 1:
                    j += 1
                fm &= fm - 1
                if (bits >> j) & 1:
                    for i in range(m):
                        dots[i] += 2 * A[i, j]
                else:
                    for i in range(m):
                        dots[i] -= 2 * A[i, j]
        val = 1.0
        for i in range(m):
            val *= 0.5 * math.erfc((dots[i] - b[i]) * inv_scale)
        total += val
    return total


@njit(cache=True)
def _seed_mollifier_float(base_bits, masks, A, b, inv_scale, lo, hi):
    m, n = A.shape
    total = 0.0
    for c in range(lo, hi):
        bits = _fold_masks(base_bits, masks, c)
        val = 1.0
        for i in range(m):
            s = 0.0
            for j in range(n):
                if (bits >> j) & 1:
                    s += A[i, j]
                else:
                    s -= A[i, j]
            val *= 0.5 * math.erfc((s - b[i]) * inv_scale)
        total += val
    return total


@njit(cache=True)
def _defect_update(dots, b, b_in, b_out, inv_scale, big_lambda, worst):
    m = b.shape[0]
    inside = True
    deep = True
    inside_outer = True
    for i in range(m):
        d = dots[i]
        if d > b[i]:
            inside = False
        if d > b[i] - big_lambda:
            deep = False
        if d > b[i] + big_lambda:
            inside_outer = False
    ind = 1.0 if inside else 0.0
    if not (inside and not deep):
        val = 1.0
        for i in range(m):
            val *= 0.5 * math.erfc((dots[i] - b_in[i]) * inv_scale)
        d = abs(val - ind)
        if d > worst:
            worst = d
    if not (inside_outer and not inside):
        val = 1.0
        for i in range(m):
            val *= 0.5 * math.erfc((dots[i] - b_out[i]) * inv_scale)
        d = abs(val - ind)
        if d > worst:
            worst = d
    return worst


@njit(cache=True)
def _cube_max_defect_float(A, b, b_in, b_out, inv_scale, big_lambda, lo, hi):
    m, n = A.shape
    dots = np.zeros(m, dtype=np.float64)
    worst = 0.0
    for c in range(lo, hi):
        for i in range(m):
            s = 0.0
            for j in range(n):
                if (c >> j) & 1:
                    s += A[i, j]
                else:
                    s -= A[i, j]
            dots[i] = s
        worst = _defect_update(dots, b, b_in, b_out, inv_scale, big_lambda, worst)
    return worst


@njit(cache=True)
def _seed_max_defect_float(base_bits, masks, A, b, b_in, b_out, inv_scale, big_lambda, lo, hi):
    m, n = A.shape
    dots = np.zeros(m, dtype=np.float64)
    worst = 0.0
    for c in range(lo, hi):
        bits = _fold_masks(base_bits, masks, c)
        for i in range(m):
            s = 0.0
            for j in range(n):
                if (bits >> j) & 1:
                    s += A[i, j]
                else:
                    s -= A[i, j]
            dots[i] = s
        worst = _defect_update(dots, b, b_in, b_out, inv_scale, big_lambda, worst)
    return worst


def cube_max_defect(A, b, b_in, b_out, lam, big_lambda, lo, hi):
    Af = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    inv_scale = 1.0 / (lam * math.sqrt(2.0))
    return _cube_max_defect_float(
        Af,
        np.ascontiguousarray(np.asarray(b, dtype=np.float64)),
        np.ascontiguousarray(np.asarray(b_in, dtype=np.float64)),
        np.ascontiguousarray(np.asarray(b_out, dtype=np.float64)),
        inv_scale,
        big_lambda,
        lo,
        hi,
    )


def linear_seed_max_defect(base_bits, masks, A, b, b_in, b_out, lam, big_lambda, lo, hi):
    Af = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    inv_scale = 1.0 / (lam * math.sqrt(2.0))
    return _seed_max_defect_float(
        int(base_bits),
        _prep_masks(masks),
        Af,
        np.ascontiguousarray(np.asarray(b, dtype=np.float64)),
        np.ascontiguousarray(np.asarray(b_in, dtype=np.float64)),
        np.ascontiguousarray(np.asarray(b_out, dtype=np.float64)),
        inv_scale,
        big_lambda,
        lo,
        hi,
    )


def _as_int_matrix(A) -> np.ndarray | None:
    A = np.asarray(A)
    if np.issubdtype(A.dtype, np.integer):
        return A.astype(np.int64)
    Af = A.astype(np.float64)
    Ai = np.rint(Af)
    if np.array_equal(Ai, Af) and np.abs(Ai).max(initial=0) < 2**31:
        return Ai.astype(np.int64)
    return None


def _prep_thresholds(thresholds) -> np.ndarray:
    return np.ascontiguousarray(np.atleast_2d(np.asarray(thresholds, dtype=np.float64)))


def cube_orthant_counts(A, thresholds, lo, hi):
    th = _prep_thresholds(thresholds)
    Ai = _as_int_matrix(A)
    if Ai is not None:
        return _cube_counts_gray_int(np.ascontiguousarray(Ai), th, lo, hi)
    Af = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    return _cube_counts_float(Af, th, lo, hi)


def cube_mollifier_sum(A, b, lam, lo, hi):
    b = np.ascontiguousarray(np.asarray(b, dtype=np.float64))
    inv_scale = 1.0 / (lam * math.sqrt(2.0))
    Ai = _as_int_matrix(A)
    if Ai is not None:
        return _cube_mollifier_gray_int(np.ascontiguousarray(Ai), b, inv_scale, lo, hi)
    Af = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    return _cube_mollifier_float(Af, b, inv_scale, lo, hi)


def _prep_masks(masks) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    return np.ascontiguousarray(masks)


def linear_seed_orthant_counts(base_bits, masks, A, thresholds, lo, hi):
    th = _prep_thresholds(thresholds)
    masks = _prep_masks(masks)
    base = int(base_bits)
    Ai = _as_int_matrix(A)
    if Ai is not None:
        return _seed_counts_int(base, masks, np.ascontiguousarray(Ai), th, lo, hi)
    Af = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    return _seed_counts_float(base, masks, Af, th, lo, hi)


def linear_seed_mollifier_sum(base_bits, masks, A, b, lam, lo, hi):
    b = np.ascontiguousarray(np.asarray(b, dtype=np.float64))
    masks = _prep_masks(masks)
    base = int(base_bits)
    inv_scale = 1.0 / (lam * math.sqrt(2.0))
    Ai = _as_int_matrix(A)
    if Ai is not None:
        return _seed_mollifier_int(base, masks, np.ascontiguousarray(Ai), b, inv_scale, lo, hi)
    Af = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    return _seed_mollifier_float(base, masks, Af, b, inv_scale, lo, hi)

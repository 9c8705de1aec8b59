"""Compiled loop kernels.

Plain triple loops on purpose: timings taken through these kernels follow
the operation counts (N^3 per dense product, N^2 per Gamma step) instead
of whatever blocking a BLAS library happens to do at a given size.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def matmul_into(a, b, out):
    # i-j-k with a scalar accumulator, the same dependent-add shape as the
    # Gamma recurrence below, so neither kernel gets SIMD the other lacks
    n, m = a.shape
    p = b.shape[1]
    for i in range(n):
        for j in range(p):
            s = 0.0
            for k in range(m):
                s += a[i, k] * b[k, j]
            out[i, j] = s
    return out


@njit(cache=True)
def power_brute(a, n):
    # n - 1 successive right-multiplications, no squaring
    acc = a.copy()
    tmp = np.empty_like(a)
    for _ in range(n - 1):
        matmul_into(acc, a, tmp)
        acc, tmp = tmp, acc
    return acc


@njit(cache=True)
def power_squaring(a, n):
    size = a.shape[0]
    result = np.eye(size)
    base = a.copy()
    tmp = np.empty_like(a)
    while n > 0:
        if n & 1:
            matmul_into(result, base, tmp)
            result, tmp = tmp, result
        n >>= 1
        if n:
            matmul_into(base, base, tmp)
            base, tmp = tmp, base
    return result


@njit(cache=True)
def gamma_power_ring(coeffs, n, out):
    """M^n from the N-term recurrence keeping only the last N terms per row.

    ``ring[i, t % N]`` holds Gamma_{i, t + 2 - N}; the seed window is row
    ``i`` of M read right to left.
    """
    size = coeffs.shape[0]
    ring = np.zeros((size, size))
    for i in range(size):
        # Gamma_{i,1} = M[i,0]; Gamma_{i,0} = M[i,1]; ...
        for jcol in range(size):
            t = size - 1 - jcol  # Gamma index 1 - jcol  ->  t = index - 2 + N
            if jcol == 0:
                ring[i, t % size] = coeffs[i]
            elif jcol == i + 1:
                ring[i, t % size] = 1.0
            else:
                ring[i, t % size] = 0.0
    # latest index stored is Gamma_1 (t = N - 1); extend to Gamma_n
    for t in range(size, n + size - 1):
        for i in range(size):
            s = 0.0
            for k in range(1, size + 1):
                s += coeffs[k - 1] * ring[i, (t - k) % size]
            ring[i, t % size] = s
    last = n + size - 2
    for i in range(size):
        for jcol in range(size):
            out[i, jcol] = ring[i, (last - jcol) % size]
    return out


@njit(cache=True)
def gamma_fill(seqs, coeffs, start, stop):
    """Fill storage columns ``start .. stop - 1`` of the dense Gamma table.

    Same summation order as ``gamma_power_ring``. Returns the first column
    holding a non-finite value, or -1.
    """
    size = coeffs.shape[0]
    for t in range(start, stop):
        bad = False
        for i in range(size):
            s = 0.0
            for k in range(1, size + 1):
                s += coeffs[k - 1] * seqs[i, t - k]
            seqs[i, t] = s
            if not np.isfinite(s):
                bad = True
        if bad:
            return t
    return -1


@njit(cache=True)
def gamma_batch(coeffs, n, out):
    for b in range(coeffs.shape[0]):
        gamma_power_ring(coeffs[b], n, out[b])
    return out


@njit(cache=True)
def brute_batch(mats, n, out):
    for b in range(mats.shape[0]):
        out[b] = power_brute(mats[b], n)
    return out


@njit(cache=True)
def squaring_batch(mats, n, out):
    for b in range(mats.shape[0]):
        out[b] = power_squaring(mats[b], n)
    return out

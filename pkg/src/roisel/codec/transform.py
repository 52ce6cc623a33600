"""Integer DCT, scalar quantisation and the diagonal coefficient scan."""

import numpy as np
from numba import njit

from .tables import SCAN4, SCAN8, T4, T8


@njit(cache=True)
def _matmul(a, b):
    n, m, k = a.shape[0], b.shape[1], a.shape[1]
    out = np.zeros((n, m), dtype=np.int64)
    for i in range(n):
        for j in range(m):
            s = 0
            for q in range(k):
                s += a[i, q] * b[q, j]
            out[i, j] = s
    return out


@njit(cache=True)
def qstep(qp):
    return 2.0 ** ((qp - 4) / 6.0)


@njit(cache=True)
def _round_half_away(v):
    return np.floor(v + 0.5) if v >= 0 else -np.floor(-v + 0.5)


@njit(cache=True)
def forward_quant(residual, qp):
    """Quantised levels of an ``n x n`` residual, in diagonal scan order."""
    n = residual.shape[0]
    t = T4 if n == 4 else T8
    scan = SCAN4 if n == 4 else SCAN8
    y = _matmul(_matmul(t, residual.astype(np.int64)), t.T.copy())
    scale = 4096.0 * n * qstep(qp)
    out = np.zeros(n * n, dtype=np.int64)
    for i in range(n * n):
        p = scan[i]
        v = y[p // n, p % n]
        mag = np.floor(abs(v) / scale + 0.5)
        out[i] = -mag if v < 0 else mag
    return out


@njit(cache=True)
def dequant_inverse(levels, qp, n):
    """Residual block reconstructed from scan-ordered levels."""
    t = T4 if n == 4 else T8
    scan = SCAN4 if n == 4 else SCAN8
    step = qstep(qp) * 64.0
    d = np.zeros((n, n), dtype=np.int64)
    nonzero = False
    for i in range(n * n):
        if levels[i] != 0:
            p = scan[i]
            d[p // n, p % n] = np.int64(_round_half_away(levels[i] * step))
            nonzero = True
    if not nonzero:
        return np.zeros((n, n), dtype=np.int64)
    shift = 20 if n == 4 else 21
    x = _matmul(_matmul(t.T.copy(), d), t)
    return (x + (1 << (shift - 1))) >> shift


def transform_quantize(residual: np.ndarray, qp: int) -> np.ndarray:
    residual = np.asarray(residual, dtype=np.int64)
    if residual.shape not in ((4, 4), (8, 8)):
        raise ValueError("TU must be 4x4 or 8x8")
    if not 0 <= qp <= 51:
        raise ValueError("qp outside [0, 51]")
    return forward_quant(residual, qp)


def inverse_transform(levels: np.ndarray, qp: int, n: int) -> np.ndarray:
    levels = np.asarray(levels, dtype=np.int64)
    if n not in (4, 8) or levels.shape != (n * n,):
        raise ValueError("levels must hold n*n values for n in {4, 8}")
    return dequant_inverse(levels, qp, n)

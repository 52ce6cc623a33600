"""Coefficient scrambling for the advanced level.

Pipeline per luma TU of an ROI coding unit:

1. Canny edge map of the source luma (computed once per frame at the encoder).
2. A TU is an edge TU when any edge pixel falls inside it.
3. Edge TUs with at least three non-zero coefficients get the values of all
   but the last non-zero coefficient permuted by a logistic-map argsort.
4. The TU class ``w`` is embedded in the last non-zero coefficient
   (``2L - w`` for positive ``L``, ``2L + w`` for negative), so the decoder
   reads the class back instead of recomputing edges.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from numba import njit
from scipy import ndimage

from .keystream import ChaoticParams

BURN_IN = 100


class CorruptCoefficientsError(ValueError):
    pass


# ---------------------------------------------------------------- Canny

def gaussian_kernel(sigma: float = 1.4, size: int = 5) -> np.ndarray:
    ax = np.arange(size) - size // 2
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sigma * sigma))
    return g / g.sum()


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


def canny(plane: np.ndarray, low: float = 50.0, high: float = 150.0,
          sigma: float = 1.4) -> np.ndarray:
    """Binary edge map (uint8, 0/1) of an 8-bit plane."""
    img = np.asarray(plane, dtype=np.float64)
    if img.ndim != 2 or min(img.shape) < 5:
        raise ValueError("canny needs a 2-D plane of at least 5x5")
    smooth = ndimage.correlate(img, gaussian_kernel(sigma), mode="nearest")
    # gradients are rounded to 1e-6 so exact ties (symmetric edges) do not
    # depend on summation order
    gx = np.round(ndimage.correlate(smooth, _SOBEL_X, mode="nearest"), 6)
    gy = np.round(ndimage.correlate(smooth, _SOBEL_Y, mode="nearest"), 6)
    mag = np.round(np.hypot(gx, gy), 6)

    # quantise gradient direction to 0/45/90/135 degrees
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (((angle + 22.5) // 45.0).astype(np.int64)) % 4
    # neighbour offsets (dy, dx) along the gradient for each sector
    offsets = ((0, 1), (1, 1), (1, 0), (1, -1))

    p = np.pad(mag, 1)
    h, w = mag.shape
    keep = np.zeros_like(mag, dtype=bool)
    for s, (dy, dx) in enumerate(offsets):
        fwd = p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
        bwd = p[1 - dy:1 - dy + h, 1 - dx:1 - dx + w]
        # strict on one side so plateaus of width two thin to one pixel
        keep |= (sector == s) & (mag > bwd) & (mag >= fwd)
    nms = np.where(keep, mag, 0.0)

    strong = nms >= high
    candidate = nms >= low
    labels, n = ndimage.label(candidate, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return np.zeros(mag.shape, dtype=np.uint8)
    has_strong = np.zeros(n + 1, dtype=bool)
    has_strong[labels[strong]] = True
    has_strong[0] = False
    return has_strong[labels].astype(np.uint8)


def classify_tus(edge_map: np.ndarray, tu_size: int) -> np.ndarray:
    """Boolean grid, True where the TU holds at least one edge pixel."""
    h, w = edge_map.shape
    rows, cols = -(-h // tu_size), -(-w // tu_size)
    padded = np.zeros((rows * tu_size, cols * tu_size), dtype=np.int64)
    padded[:h, :w] = edge_map
    return padded.reshape(rows, tu_size, cols, tu_size).sum(axis=(1, 3)) != 0


# ---------------------------------------------------------------- permutation

@njit(cache=True)
def logistic_sequence(x0, r, n, burn_in):
    x = x0
    for _ in range(burn_in):
        x = r * x * (1.0 - x)
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        x = r * x * (1.0 - x)
        out[i] = x
    return out


def chaotic_permutation(n_p: int, params: ChaoticParams, burn_in: int = BURN_IN) -> np.ndarray:
    """0-based permutation ``perm``; position ``k`` moves to ``perm[k]``."""
    if n_p <= 1:
        return np.arange(max(n_p, 0), dtype=np.int64)
    seq = logistic_sequence(params.x0, params.r, n_p, burn_in)
    return np.argsort(seq, kind="stable").astype(np.int64)


def invert_permutation(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size, dtype=perm.dtype)
    return inv


def permute_values(values: np.ndarray, perm: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    out[perm] = values
    return out


def unpermute_values(values: np.ndarray, perm: np.ndarray) -> np.ndarray:
    return values[perm]


# ---------------------------------------------------------------- TU transforms

def scramble(coeffs: np.ndarray, is_edge: bool, params: ChaoticParams) -> np.ndarray:
    """Permute the first ``N_nz - 1`` non-zero values of an edge TU (scan order)."""
    out = np.array(coeffs, dtype=np.int64, copy=True)
    if not is_edge:
        return out
    nz = np.flatnonzero(out)
    n_p = nz.size - 1
    if n_p <= 1:
        return out
    out[nz[:-1]] = permute_values(out[nz[:-1]], chaotic_permutation(n_p, params))
    return out


def embed_flag(last: int, w: int) -> int:
    if last == 0:
        raise ValueError("cannot embed a flag in a zero coefficient")
    if w not in (0, 1):
        raise ValueError("flag must be 0 or 1")
    return 2 * last - w if last > 0 else 2 * last + w


def extract_flag(value: int) -> tuple[int, int]:
    if value == 0:
        raise CorruptCoefficientsError("flag carrier is zero")
    w = abs(value) % 2
    return w, (value + w) // 2 if value > 0 else (value - w) // 2


def protect_tu(coeffs: np.ndarray, is_edge: bool, params: ChaoticParams | None) -> np.ndarray:
    """Scramble (edge TUs only) and embed the class flag; all-zero TUs pass through."""
    out = scramble(coeffs, is_edge, params) if is_edge else np.array(coeffs, dtype=np.int64)
    nz = np.flatnonzero(out)
    if nz.size:
        out[nz[-1]] = embed_flag(int(out[nz[-1]]), int(is_edge))
    return out


def unscramble(coeffs: np.ndarray,
               params: ChaoticParams | Callable[[], ChaoticParams]) -> np.ndarray:
    """Inverse of :func:`protect_tu`.

    ``params`` may be a zero-argument callable so callers only derive the
    chaotic seed for TUs that actually carry ``w = 1``.
    """
    out = np.array(coeffs, dtype=np.int64, copy=True)
    nz = np.flatnonzero(out)
    if nz.size == 0:
        return out
    w, out[nz[-1]] = extract_flag(int(out[nz[-1]]))
    n_p = nz.size - 1
    if w and n_p > 1:
        p = params() if callable(params) else params
        out[nz[:-1]] = unpermute_values(out[nz[:-1]], chaotic_permutation(n_p, p))
    return out

"""Integer-pel motion: compensation, full search, merge and AMVP candidate lists.

Reference blocks are fetched with coordinates clamped to the padded frame.
Coding units outside ROI tiles may only reference pixels that lie outside the
reference frame's ROI tiles ("dirty" pixels), which keeps keyless decoding
exact outside the protected region across frames.
"""

import numpy as np
from numba import njit

from .layout import F_MVX, F_MVY, F_PRED, F_REFI

N_MERGE = 5
N_AMVP = 2
CU = 16


@njit(cache=True)
def _clamp(v, lo, hi):
    return lo if v < lo else (hi if v > hi else v)


@njit(cache=True)
def mc_block(ref, x, y, n):
    h, w = ref.shape
    out = np.empty((n, n), dtype=np.int64)
    for j in range(n):
        yy = _clamp(y + j, 0, h - 1)
        for i in range(n):
            out[j, i] = ref[yy, _clamp(x + i, 0, w - 1)]
    return out


@njit(cache=True)
def integral(mask):
    h, w = mask.shape
    out = np.zeros((h + 1, w + 1), dtype=np.int32)
    for y in range(h):
        s = 0
        for x in range(w):
            s += mask[y, x]
            out[y + 1, x + 1] = out[y, x + 1] + s
    return out


@njit(cache=True)
def _rect_dirty(ii, x, y, n):
    h, w = ii.shape[0] - 1, ii.shape[1] - 1
    x0, x1 = _clamp(x, 0, w - 1), _clamp(x + n - 1, 0, w - 1) + 1
    y0, y1 = _clamp(y, 0, h - 1), _clamp(y + n - 1, 0, h - 1) + 1
    return ii[y1, x1] - ii[y0, x1] - ii[y1, x0] + ii[y0, x0] > 0


@njit(cache=True)
def footprint_dirty(dint_y, dint_c, r, x, y, mvx, mvy):
    """True if the luma or chroma reference block touches ROI-tile pixels."""
    if _rect_dirty(dint_y[r], x + mvx, y + mvy, CU):
        return True
    return _rect_dirty(dint_c[r], (x >> 1) + (mvx >> 1), (y >> 1) + (mvy >> 1), CU // 2)


@njit(cache=True)
def block_sad(src, x, y, ref, rx, ry, bound):
    """SAD of the 16x16 source block against a clamped reference block.

    Stops early once the partial sum exceeds ``bound``.
    """
    h, w = ref.shape
    s = 0
    for j in range(CU):
        yy = _clamp(ry + j, 0, h - 1)
        for i in range(CU):
            d = np.int64(src[y + j, x + i]) - ref[yy, _clamp(rx + i, 0, w - 1)]
            s += d if d >= 0 else -d
        if s > bound:
            return s
    return s


@njit(cache=True)
def motion_search(src, x, y, refs, rn, sr, constrained, dint_y, dint_c):
    """Full search over ``rn`` references; returns (sad, ref, mvx, mvy), sad < 0 if none valid.

    Ties: smaller SAD, then smaller reference index, then smaller |mv|_1,
    then earlier raster position in the search window.
    """
    best = np.int64(-1)
    br, bx, by = -1, 0, 0
    big = np.int64(1) << 60
    for r in range(rn):
        for mvy in range(-sr, sr + 1):
            for mvx in range(-sr, sr + 1):
                if constrained and footprint_dirty(dint_y, dint_c, r, x, y, mvx, mvy):
                    continue
                bound = big if best < 0 else best
                s = block_sad(src, x, y, refs[r], x + mvx, y + mvy, bound)
                if best < 0 or s < best:
                    best, br, bx, by = s, r, mvx, mvy
                elif s == best and r == br and abs(mvx) + abs(mvy) < abs(bx) + abs(by):
                    br, bx, by = r, mvx, mvy
    return best, br, bx, by


@njit(cache=True)
def merge_list(fields, nb_left, nb_above, nb_above_right, nb_above_left, rn):
    """Five (ref, mvx, mvy) candidates from A1, B1, B0, B2, then zero vectors.

    ``nb_*`` are coding indices of available neighbours, -1 otherwise.
    """
    out = np.zeros((N_MERGE, 3), dtype=np.int64)
    n = 0
    for nb in (nb_left, nb_above, nb_above_right, nb_above_left):
        if nb < 0 or fields[nb, F_PRED] != 1 or n >= 4:
            continue
        r, mx, my = fields[nb, F_REFI], fields[nb, F_MVX], fields[nb, F_MVY]
        dup = False
        for k in range(n):
            if out[k, 0] == r and out[k, 1] == mx and out[k, 2] == my:
                dup = True
                break
        if not dup:
            out[n, 0], out[n, 1], out[n, 2] = r, mx, my
            n += 1
    zero = 0
    while n < N_MERGE:
        out[n, 0] = zero if zero < rn else 0
        out[n, 1] = 0
        out[n, 2] = 0
        zero += 1
        n += 1
    return out


@njit(cache=True)
def amvp_list(fields, nb_left, nb_above, nb_above_right, nb_above_left):
    """Two MV predictors: left neighbour, then the first of above-right/above/above-left."""
    out = np.zeros((N_AMVP, 2), dtype=np.int64)
    n = 0
    if nb_left >= 0 and fields[nb_left, F_PRED] == 1:
        out[0, 0], out[0, 1] = fields[nb_left, F_MVX], fields[nb_left, F_MVY]
        n = 1
    for nb in (nb_above_right, nb_above, nb_above_left):
        if nb >= 0 and fields[nb, F_PRED] == 1:
            mx, my = fields[nb, F_MVX], fields[nb, F_MVY]
            if not (n == 1 and out[0, 0] == mx and out[0, 1] == my):
                out[n, 0], out[n, 1] = mx, my
                n += 1
            break
    return out


def inter_search(src: np.ndarray, x: int, y: int, refs: np.ndarray,
                 search_range: int = 8) -> dict:
    """Unconstrained full search for one 16x16 block (Python convenience wrapper)."""
    refs = np.ascontiguousarray(refs, dtype=np.uint8)
    if refs.ndim == 2:
        refs = refs[None]
    if refs.shape[0] < 1:
        raise ValueError("need at least one reference frame")
    dummy = np.zeros((refs.shape[0], 2, 2), dtype=np.int32)
    sad, r, mvx, mvy = motion_search(np.ascontiguousarray(src, dtype=np.uint8), x, y, refs,
                                     refs.shape[0], search_range, False, dummy, dummy)
    return {"sad": int(sad), "ref_idx": int(r), "mv": (int(mvx), int(mvy))}

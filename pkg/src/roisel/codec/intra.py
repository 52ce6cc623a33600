"""Intra prediction: reference sample construction, planar/DC/angular modes,
most-probable-mode list and chroma mode mapping.

Reference samples for an ``n x n`` block are kept in one array of length
``4n + 1`` ordered bottom-left -> top-left -> corner -> top -> top-right,
which is also the order of the substitution pass for unavailable samples.
No reference smoothing or boundary filters are applied.
"""

import numpy as np
from numba import njit

from .tables import DC, INTRA_ANGLE, INV_ANGLE, PLANAR, VER


@njit(cache=True)
def reference_samples(plane, x0, y0, n, avail_left, avail_above, avail_above_right,
                      avail_above_left):
    refs = np.empty(4 * n + 1, dtype=np.int64)
    ok = np.zeros(4 * n + 1, dtype=np.bool_)
    # left column, bottom to top; the lower half (below-left) is never coded yet
    if avail_left:
        for i in range(n):
            y = n - 1 - i
            refs[n + i] = plane[y0 + y, x0 - 1]
            ok[n + i] = True
    if avail_above_left:
        refs[2 * n] = plane[y0 - 1, x0 - 1]
        ok[2 * n] = True
    if avail_above:
        for i in range(n):
            refs[2 * n + 1 + i] = plane[y0 - 1, x0 + i]
            ok[2 * n + 1 + i] = True
    if avail_above_right:
        for i in range(n, 2 * n):
            refs[2 * n + 1 + i] = plane[y0 - 1, x0 + i]
            ok[2 * n + 1 + i] = True

    first = -1
    for i in range(4 * n + 1):
        if ok[i]:
            first = i
            break
    if first < 0:
        refs[:] = 128
        return refs
    if not ok[0]:
        refs[0] = refs[first]
    for i in range(1, 4 * n + 1):
        if not ok[i]:
            refs[i] = refs[i - 1]
    return refs


@njit(cache=True)
def _left(refs, n, i):
    # p[-1][i], i = -1 is the corner
    return refs[2 * n - 1 - i]


@njit(cache=True)
def _top(refs, n, i):
    # p[i][-1]
    return refs[2 * n + 1 + i]


@njit(cache=True)
def predict_block(refs, n, mode):
    """``n x n`` int64 prediction for luma/chroma ``mode`` in 0..34."""
    out = np.empty((n, n), dtype=np.int64)
    log2n = 0
    while (1 << log2n) < n:
        log2n += 1
    if mode == PLANAR:
        tr = _top(refs, n, n)
        bl = _left(refs, n, n)
        for y in range(n):
            for x in range(n):
                out[y, x] = ((n - 1 - x) * _left(refs, n, y) + (x + 1) * tr
                             + (n - 1 - y) * _top(refs, n, x) + (y + 1) * bl + n) >> (log2n + 1)
        return out
    if mode == DC:
        s = n
        for i in range(n):
            s += _top(refs, n, i) + _left(refs, n, i)
        out[:, :] = s >> (log2n + 1)
        return out

    angle = INTRA_ANGLE[mode]
    ref = np.empty(3 * n + 1, dtype=np.int64)  # ref[k] stored at k + n
    vertical = mode >= 18
    for k in range(2 * n + 1):
        ref[k + n] = _top(refs, n, k - 1) if vertical else _left(refs, n, k - 1)
    if angle < 0:
        lo = (n * angle) >> 5
        if lo < -1:
            inv = INV_ANGLE[mode - 11]
            for k in range(lo, 0):
                j = -1 + ((k * inv + 128) >> 8)
                ref[k + n] = _left(refs, n, j) if vertical else _top(refs, n, j)
    for y in range(n):
        for x in range(n):
            # "major" runs along the reference, "minor" is the projection distance
            major, minor = (x, y) if vertical else (y, x)
            pos = (minor + 1) * angle
            idx = pos >> 5
            fact = pos & 31
            a = ref[major + idx + 1 + n]
            if fact:
                a = ((32 - fact) * a + fact * ref[major + idx + 2 + n] + 16) >> 5
            out[y, x] = a
    return out


@njit(cache=True)
def build_mpm_list(left_mode, above_mode):
    """Three distinct candidate modes; pass -1 (or any non-intra value) for unavailable."""
    a = left_mode if 0 <= left_mode <= 34 else PLANAR
    b = above_mode if 0 <= above_mode <= 34 else PLANAR
    mpm = np.empty(3, dtype=np.int64)
    if a == b:
        if a < 2:
            mpm[0], mpm[1], mpm[2] = PLANAR, DC, VER
        else:
            mpm[0] = a
            mpm[1] = 2 + ((a + 29) % 32)
            mpm[2] = 2 + ((a - 2 + 1) % 32)
    else:
        mpm[0], mpm[1] = a, b
        if a != PLANAR and b != PLANAR:
            mpm[2] = PLANAR
        elif a != DC and b != DC:
            mpm[2] = DC
        else:
            mpm[2] = VER
    return mpm


@njit(cache=True)
def mode_to_rem(mode, mpm):
    s = np.sort(mpm)
    rem = mode
    for i in range(2, -1, -1):
        if mode > s[i]:
            rem -= 1
    return rem


@njit(cache=True)
def rem_to_mode(rem, mpm):
    s = np.sort(mpm)
    mode = rem
    for i in range(3):
        if mode >= s[i]:
            mode += 1
    return mode


@njit(cache=True)
def chroma_mode(idx, luma_mode):
    """Chroma candidate ``idx`` (0..4) to an actual prediction mode."""
    if idx == 4:
        return luma_mode
    m = PLANAR
    if idx == 1:
        m = VER
    elif idx == 2:
        m = 10
    elif idx == 3:
        m = DC
    if m == luma_mode:
        return 34
    return m


def intra_predict(mode: int, refs: np.ndarray, n: int) -> np.ndarray:
    """Predicted block for ``mode`` given ``4n + 1`` reference samples."""
    if not 0 <= mode <= 34:
        raise ValueError(f"intra mode {mode} outside 0..34")
    refs = np.asarray(refs, dtype=np.int64)
    if refs.shape != (4 * n + 1,):
        raise ValueError(f"need {4 * n + 1} reference samples")
    return predict_block(refs, n, mode)


def refs_from_neighbors(top: np.ndarray, left: np.ndarray, corner: int) -> np.ndarray:
    """Pack ``2n`` top, ``2n`` left samples and the corner into reference order."""
    top = np.asarray(top, dtype=np.int64)
    left = np.asarray(left, dtype=np.int64)
    return np.concatenate([left[::-1], [corner], top])

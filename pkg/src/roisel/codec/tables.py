"""Integer transform matrices, scan orders and angular prediction tables."""

import numpy as np

T4 = np.array([
    [64, 64, 64, 64],
    [83, 36, -36, -83],
    [64, -64, -64, 64],
    [36, -83, 83, -36],
], dtype=np.int64)

T8 = np.array([
    [64, 64, 64, 64, 64, 64, 64, 64],
    [89, 75, 50, 18, -18, -50, -75, -89],
    [83, 36, -36, -83, -83, -36, 36, 83],
    [75, -18, -89, -50, 50, 89, 18, -75],
    [64, -64, -64, 64, 64, -64, -64, 64],
    [50, -89, 18, 75, -75, -18, 89, -50],
    [36, -83, 83, -36, -36, 83, -83, 36],
    [18, -50, 75, -89, 89, -75, 50, -18],
], dtype=np.int64)


def diag_scan(n: int) -> np.ndarray:
    """Up-right diagonal scan: raster positions ``y*n + x`` in coding order."""
    order = []
    for d in range(2 * n - 1):
        for y in range(min(d, n - 1), -1, -1):
            x = d - y
            if x < n:
                order.append(y * n + x)
    return np.array(order, dtype=np.int64)


SCAN4 = diag_scan(4)
SCAN8 = diag_scan(8)

# intraPredAngle for modes 0..34 (entries 0 and 1 unused)
INTRA_ANGLE = np.array([
    0, 0, 32, 26, 21, 17, 13, 9, 5, 2, 0, -2, -5, -9, -13, -17, -21, -26,
    -32, -26, -21, -17, -13, -9, -5, -2, 0, 2, 5, 9, 13, 17, 21, 26, 32,
], dtype=np.int64)

# invAngle for modes 11..25 (indexed by mode - 11)
INV_ANGLE = np.array([
    -4096, -1638, -910, -630, -482, -390, -315, -256,
    -315, -390, -482, -630, -910, -1638, -4096,
], dtype=np.int64)

PLANAR = 0
DC = 1
HOR = 10
VER = 26
N_LUMA_MODES = 35

"""Naive reference implementations used as independent oracles in tests.

Written as plain loops over Python numbers on purpose; none of this shares
code with the library.
"""

import math


def psnr(a, b):
    n = len(a)
    s = 0.0
    for x, y in zip(a, b):
        d = float(x) - float(y)
        s += d * d
    m = s / n
    if m == 0:
        return math.inf
    return 10.0 * math.log10(255.0 * 255.0 / m)


def ssim(a, b):
    n = len(a)
    ma = sum(float(x) for x in a) / n
    mb = sum(float(y) for y in b) / n
    va = sum((float(x) - ma) ** 2 for x in a) / n
    vb = sum((float(y) - mb) ** 2 for y in b) / n
    cov = sum((float(x) - ma) * (float(y) - mb) for x, y in zip(a, b)) / n
    c1 = (0.01 * 255) ** 2
    c2 = (0.03 * 255) ** 2
    return ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))


def edge_difference(pe, ce, mask=None):
    num = den = 0
    for i in range(len(pe)):
        for j in range(len(pe[0])):
            if mask is not None and not mask[i][j]:
                continue
            p, c = int(pe[i][j]), int(ce[i][j])
            num += abs(p - c)
            den += p + c
    return (num / den, True) if den else (0.0, False)


def entropy(samples):
    counts = [0] * 256
    for s in samples:
        counts[int(s)] += 1
    n = len(samples)
    h = 0.0
    for c in counts:
        if c:
            p = c / n
            h -= p * math.log2(p)
    return h


def npcr(a, b):
    diff = 0
    for x, y in zip(a, b):
        if int(x) != int(y):
            diff += 1
    return 100.0 * diff / len(a)


def uaci(a, b):
    s = 0
    for x, y in zip(a, b):
        s += abs(int(x) - int(y))
    return 100.0 * s / (255.0 * len(a))


def iou(e, g):
    inter = union = 0
    for i in range(len(e)):
        for j in range(len(e[0])):
            a, b = bool(e[i][j]), bool(g[i][j])
            inter += a and b
            union += a or b
    return inter / union


def tile_mask(width, height, tile_w, tile_h, rects):
    """Per-pixel ROI-tile mask: a pixel is set iff its tile overlaps a rectangle pixel."""
    hit = set()
    for (x1, y1, x2, y2) in rects:
        for y in range(y1, y2):
            for x in range(x1, x2):
                hit.add((y // tile_h, x // tile_w))
    return [[(y // tile_h, x // tile_w) in hit for x in range(width)] for y in range(height)]


def rect_mask(width, height, rects):
    m = [[False] * width for _ in range(height)]
    for (x1, y1, x2, y2) in rects:
        for y in range(y1, y2):
            for x in range(x1, x2):
                m[y][x] = True
    return m


def canny(plane, low=50.0, high=150.0, sigma=1.4):
    """Loop Canny: 5x5 Gaussian, Sobel, 4-sector NMS, 8-connected hysteresis.

    Borders replicate the nearest pixel; NMS treats outside as zero magnitude.
    """
    h, w = len(plane), len(plane[0])

    def at(img, r, c):
        return img[min(max(r, 0), h - 1)][min(max(c, 0), w - 1)]

    g = [[math.exp(-(i * i + j * j) / (2.0 * sigma * sigma)) for j in range(-2, 3)]
         for i in range(-2, 3)]
    tot = sum(sum(row) for row in g)
    smooth = [[sum(g[i + 2][j + 2] * float(at(plane, r + i, c + j))
                   for i in range(-2, 3) for j in range(-2, 3)) / tot
               for c in range(w)] for r in range(h)]
    sx = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
    mag = [[0.0] * w for _ in range(h)]
    sector = [[0] * w for _ in range(h)]
    for r in range(h):
        for c in range(w):
            gx = sum(sx[i + 1][j + 1] * at(smooth, r + i, c + j)
                     for i in (-1, 0, 1) for j in (-1, 0, 1))
            gy = sum(sx[j + 1][i + 1] * at(smooth, r + i, c + j)
                     for i in (-1, 0, 1) for j in (-1, 0, 1))
            gx, gy = round(gx, 6), round(gy, 6)
            mag[r][c] = round(math.hypot(gx, gy), 6)
            ang = math.degrees(math.atan2(gy, gx)) % 180.0
            sector[r][c] = int((ang + 22.5) // 45.0) % 4

    def m(r, c):
        return mag[r][c] if 0 <= r < h and 0 <= c < w else 0.0

    steps = ((0, 1), (1, 1), (1, 0), (1, -1))
    nms = [[0.0] * w for _ in range(h)]
    for r in range(h):
        for c in range(w):
            dy, dx = steps[sector[r][c]]
            if mag[r][c] > m(r - dy, c - dx) and mag[r][c] >= m(r + dy, c + dx):
                nms[r][c] = mag[r][c]
    out = [[0] * w for _ in range(h)]
    stack = [(r, c) for r in range(h) for c in range(w) if nms[r][c] >= high]
    for r, c in stack:
        out[r][c] = 1
    while stack:
        r, c = stack.pop()
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                rr, cc = r + i, c + j
                if 0 <= rr < h and 0 <= cc < w and not out[rr][cc] and nms[rr][cc] >= low:
                    out[rr][cc] = 1
                    stack.append((rr, cc))
    return out

"""Coding order and neighbour availability for a padded frame."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..roi_map import TileClassification, TileGrid

CU = 16


def pad_plane(plane: np.ndarray, h: int, w: int) -> np.ndarray:
    ph, pw = h - plane.shape[0], w - plane.shape[1]
    if ph == 0 and pw == 0:
        return np.ascontiguousarray(plane, dtype=np.uint8)
    return np.pad(plane, ((0, ph), (0, pw)), mode="edge").astype(np.uint8)


@dataclass(frozen=True)
class FrameGeometry:
    """CUs listed in coding order: tiles in raster order, CUs in raster order per tile."""

    width: int
    height: int
    grid: TileGrid
    cu_x: np.ndarray
    cu_y: np.ndarray
    cu_tile: np.ndarray
    nb: np.ndarray  # (n_cu, 4): left, above, above-right, above-left; -1 if unavailable

    @property
    def padded_width(self) -> int:
        return math.ceil(self.width / CU) * CU

    @property
    def padded_height(self) -> int:
        return math.ceil(self.height / CU) * CU

    @property
    def n_cu(self) -> int:
        return int(self.cu_x.size)

    def cu_roi(self, cls: TileClassification) -> np.ndarray:
        return cls.mask.reshape(-1)[self.cu_tile].astype(np.int64)

    def padded_tile_mask(self, cls: TileClassification) -> np.ndarray:
        g = self.grid
        m = np.repeat(np.repeat(cls.mask, g.tile_h, axis=0), g.tile_w, axis=1)
        out = np.zeros((self.padded_height, self.padded_width), dtype=np.uint8)
        hh, ww = min(m.shape[0], out.shape[0]), min(m.shape[1], out.shape[1])
        out[:hh, :ww] = m[:hh, :ww]
        return out

    @classmethod
    def build(cls, width: int, height: int, tile_w: int, tile_h: int) -> "FrameGeometry":
        grid = TileGrid(width, height, tile_w, tile_h)
        pw, ph = math.ceil(width / CU) * CU, math.ceil(height / CU) * CU
        cols, rows = pw // CU, ph // CU
        xs, ys, tiles = [], [], []
        for tr in range(grid.rows):
            for tc in range(grid.cols):
                for cy in range(tr * tile_h // CU, min((tr + 1) * tile_h // CU, rows)):
                    for cx in range(tc * tile_w // CU, min((tc + 1) * tile_w // CU, cols)):
                        xs.append(cx)
                        ys.append(cy)
                        tiles.append(tr * grid.cols + tc)
        xs, ys, tiles = np.array(xs), np.array(ys), np.array(tiles)
        order = np.full((rows, cols), -1, dtype=np.int64)
        order[ys, xs] = np.arange(xs.size)
        tile_of = np.full((rows, cols), -1, dtype=np.int64)
        tile_of[ys, xs] = tiles
        nb = np.full((xs.size, 4), -1, dtype=np.int64)
        for k, (dx, dy) in enumerate(((-1, 0), (0, -1), (1, -1), (-1, -1))):
            nx, ny = xs + dx, ys + dy
            inside = (nx >= 0) & (nx < cols) & (ny >= 0)
            idx = np.where(inside, order[np.clip(ny, 0, rows - 1), np.clip(nx, 0, cols - 1)], -1)
            same = inside & (tile_of[np.clip(ny, 0, rows - 1), np.clip(nx, 0, cols - 1)] == tiles)
            ok = same & (idx >= 0) & (idx < np.arange(xs.size))
            nb[:, k] = np.where(ok, idx, -1)
        return cls(width, height, grid, (xs * CU).astype(np.int64), (ys * CU).astype(np.int64),
                   tiles.astype(np.int64), nb)

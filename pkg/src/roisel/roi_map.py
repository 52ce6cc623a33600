"""ROI coordinate files, tile grids and tile/CU classification.

ROI files hold one record per line::

    frame:[idx,(x1,y1,x2,y2)]

Coordinates are 0-based with an inclusive top-left and exclusive
bottom-right corner.  Lines starting with ``#`` are comments.  A frame may
have several records; frames without records are left unencrypted.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .yuv_io import PixelRegion


class RoiParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


class DegenerateRegionError(RoiParseError):
    pass


_LINE = re.compile(
    r"^\s*(\d+)\s*:\s*\[\s*(\d+)\s*,\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*\]\s*$"
)


@dataclass(frozen=True, order=True)
class RoiRecord:
    frame_idx: int
    region: PixelRegion


def parse_roi_lines(lines: Iterable[str]) -> list[RoiRecord]:
    records = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(line)
        if m is None:
            raise RoiParseError(lineno, line, "malformed ROI record")
        # the bracketed index is not used: files in the wild put either the
        # frame number or a per-frame object counter there
        frame, _idx, x1, y1, x2, y2 = (int(g) for g in m.groups())
        if x2 <= x1 or y2 <= y1:
            raise DegenerateRegionError(lineno, line, "degenerate region")
        records.append(RoiRecord(frame, PixelRegion(x1, y1, x2, y2)))
    records.sort(key=lambda r: (r.frame_idx, r.region.as_tuple()))
    return records


def parse_roi_file(path: str | os.PathLike) -> list[RoiRecord]:
    return parse_roi_lines(Path(path).read_text(encoding="utf-8").splitlines())


def format_roi_records(records: Iterable[RoiRecord]) -> str:
    return "".join(f"{r.frame_idx}:[{r.frame_idx},({r.region.x1},{r.region.y1},"
                   f"{r.region.x2},{r.region.y2})]\n" for r in records)


def rois_for_frame(records: Sequence[RoiRecord], frame_idx: int) -> list[PixelRegion]:
    return [r.region for r in records if r.frame_idx == frame_idx]


def validate_records(records: Sequence[RoiRecord], width: int, height: int,
                     frame_count: int) -> None:
    for r in records:
        if not r.region.within(width, height):
            raise ValueError(f"ROI {r.region.as_tuple()} of frame {r.frame_idx} "
                             f"exceeds the {width}x{height} frame")
        if r.frame_idx >= frame_count:
            raise ValueError(f"ROI refers to frame {r.frame_idx}, sequence has {frame_count}")


@dataclass(frozen=True)
class TileGrid:
    width: int
    height: int
    tile_w: int = 32
    tile_h: int = 32

    def __post_init__(self):
        if self.tile_w < 16 or self.tile_h < 16 or self.tile_w % 16 or self.tile_h % 16:
            raise ValueError("tile dimensions must be multiples of 16 and at least 16")

    @property
    def cols(self) -> int:
        return math.ceil(self.width / self.tile_w)

    @property
    def rows(self) -> int:
        return math.ceil(self.height / self.tile_h)

    def tile_region(self, row: int, col: int) -> PixelRegion:
        x1, y1 = col * self.tile_w, row * self.tile_h
        return PixelRegion(x1, y1, min(x1 + self.tile_w, self.width),
                           min(y1 + self.tile_h, self.height))


def mark_tile(tile_region: PixelRegion, rois: Iterable[PixelRegion]) -> bool:
    return any(tile_region.intersects(r) for r in rois)


@dataclass(frozen=True)
class TileClassification:
    grid: TileGrid
    mask: np.ndarray  # (rows, cols) bool, True = ROI tile

    @property
    def any(self) -> bool:
        return bool(self.mask.any())

    @classmethod
    def empty(cls, grid: TileGrid) -> "TileClassification":
        return cls(grid, np.zeros((grid.rows, grid.cols), dtype=bool))


def classify_tiles(grid: TileGrid, rois: Sequence[RoiRecord] | Sequence[PixelRegion],
                   frame_idx: int | None = None) -> TileClassification:
    """Mark every tile that intersects an ROI rectangle of ``frame_idx``.

    ``rois`` may be full records (filtered by ``frame_idx``) or plain regions.
    """
    regions = [r.region if isinstance(r, RoiRecord) else r for r in rois
               if not isinstance(r, RoiRecord) or frame_idx is None or r.frame_idx == frame_idx]
    mask = np.zeros((grid.rows, grid.cols), dtype=bool)
    for reg in regions:
        # rows/cols of tiles overlapping [x1,x2) x [y1,y2)
        c0, c1 = reg.x1 // grid.tile_w, (reg.x2 - 1) // grid.tile_w
        r0, r1 = reg.y1 // grid.tile_h, (reg.y2 - 1) // grid.tile_h
        mask[max(r0, 0):min(r1, grid.rows - 1) + 1, max(c0, 0):min(c1, grid.cols - 1) + 1] = True
    return TileClassification(grid, mask)


def classify_sequence(grid: TileGrid, records: Sequence[RoiRecord],
                      frame_count: int) -> list[TileClassification]:
    return [classify_tiles(grid, records, i) for i in range(frame_count)]


def pixel_mask(classification: TileClassification) -> np.ndarray:
    """Per-pixel mask of ROI tiles (the encrypted pixel set), clipped to the frame."""
    g = classification.grid
    m = np.repeat(np.repeat(classification.mask, g.tile_h, axis=0), g.tile_w, axis=1)
    return np.ascontiguousarray(m[:g.height, :g.width])


def rect_mask(rois: Iterable[PixelRegion], width: int, height: int) -> np.ndarray:
    m = np.zeros((height, width), dtype=bool)
    for r in rois:
        m[max(r.y1, 0):min(r.y2, height), max(r.x1, 0):min(r.x2, width)] = True
    return m


@dataclass(frozen=True)
class RoiUnitSet:
    """Indices (raster order over the frame's CU grid) of coding units in ROI tiles."""

    cu_size: int
    width: int
    height: int
    units: tuple[int, ...]

    @property
    def cu_cols(self) -> int:
        return math.ceil(self.width / self.cu_size)

    def regions(self) -> list[PixelRegion]:
        out = []
        for j in self.units:
            r, c = divmod(j, self.cu_cols)
            x1, y1 = c * self.cu_size, r * self.cu_size
            out.append(PixelRegion(x1, y1, min(x1 + self.cu_size, self.width),
                                   min(y1 + self.cu_size, self.height)))
        return out

    def __len__(self) -> int:
        return len(self.units)


def roi_unit_set(classification: TileClassification, cu_size: int = 16) -> RoiUnitSet:
    g = classification.grid
    if g.tile_w % cu_size or g.tile_h % cu_size:
        raise ValueError(f"cu_size {cu_size} must divide the tile size")
    cu_cols = math.ceil(g.width / cu_size)
    cu_rows = math.ceil(g.height / cu_size)
    rr, cc = np.mgrid[0:cu_rows, 0:cu_cols]
    in_roi = classification.mask[(rr * cu_size) // g.tile_h, (cc * cu_size) // g.tile_w]
    units = tuple(int(i) for i in np.flatnonzero(in_roi.reshape(-1)))
    return RoiUnitSet(cu_size, g.width, g.height, units)


def unit_mask(units: RoiUnitSet) -> np.ndarray:
    m = np.zeros((units.height, units.width), dtype=bool)
    for r in units.regions():
        m[r.y1:r.y2, r.x1:r.x2] = True
    return m

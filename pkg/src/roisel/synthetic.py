"""Deterministic synthetic test clips with a moving textured object as ROI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .roi_map import RoiRecord
from .yuv_io import PixelRegion, VideoSequence


@dataclass(frozen=True)
class ClipSpec:
    width: int
    height: int
    frames: int = 16
    seed: int = 0
    object_size: int | None = None   # side of the square, default ~ 40% of the short side
    noise: float = 1.0
    speed: tuple[int, int] = (2, 1)


def _background(h: int, w: int, t: int, rng_phase: float) -> np.ndarray:
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    xs = xx + 1.0 * t  # slow pan
    v = (110 + 0.25 * yy + 30 * np.sin(xs / 11.0 + rng_phase)
         + 20 * np.cos(yy / 7.0 - xs / 17.0))
    return v


def _object_texture(size: int, rng: np.random.Generator) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    checker = ((xx // 4 + yy // 4) % 2) * 70
    rings = 40 * np.sin(np.hypot(xx - size / 2, yy - size / 2) / 2.0)
    blobs = ndimage.gaussian_filter(rng.normal(0, 40, (size, size)), 1.5)
    return 90 + checker + rings + blobs


def make_clip(spec: ClipSpec) -> tuple[VideoSequence, list[RoiRecord]]:
    """Clip plus one ROI record per frame covering the moving object."""
    rng = np.random.default_rng(spec.seed)
    w, h = spec.width, spec.height
    size = spec.object_size or max(8, int(0.4 * min(w, h)))
    tex = _object_texture(size, rng)
    tex_u = 0.5 * tex[::2, ::2] + 60
    tex_v = 150 + 0.3 * (np.roll(tex[::2, ::2], 3, axis=(0, 1)) - 128)
    phase = rng.uniform(0, 2 * np.pi)
    x, y = int(rng.integers(0, w - size + 1)), int(rng.integers(0, h - size + 1))
    dx, dy = spec.speed
    ys, us, vs, rois = [], [], [], []
    for t in range(spec.frames):
        if not 0 <= x + dx <= w - size:
            dx = -dx
        if not 0 <= y + dy <= h - size:
            dy = -dy
        if t:
            x, y = x + dx, y + dy
        luma = _background(h, w, t, phase)
        luma[y:y + size, x:x + size] = tex
        hh, ww = h // 2, w // 2
        cyy, cxx = np.mgrid[0:hh, 0:ww].astype(np.float64)
        cxs = 2 * cxx + t  # same pan as the luma
        cb = 128 + 18 * np.sin(cxs / 9.0 + cyy / 5.0) + 8 * np.cos(cyy / 3.0 - cxs / 13.0)
        cr = 120 + 15 * np.cos(cyy / 6.0 + cxs / 11.0 + phase) + 8 * np.sin(cxs / 5.0)
        cy, cx = slice(y // 2, (y + size) // 2), slice(x // 2, (x + size) // 2)
        ch, cw = cy.stop - cy.start, cx.stop - cx.start
        cb[cy, cx] = tex_u[:ch, :cw]
        cr[cy, cx] = tex_v[:ch, :cw]
        luma, cb, cr = (p + rng.normal(0, spec.noise, p.shape) for p in (luma, cb, cr))
        ys.append(np.clip(np.rint(luma), 0, 255).astype(np.uint8))
        us.append(np.clip(np.rint(cb), 0, 255).astype(np.uint8))
        vs.append(np.clip(np.rint(cr), 0, 255).astype(np.uint8))
        rois.append(RoiRecord(t, PixelRegion(x, y, x + size, y + size)))
    return VideoSequence.from_planes(ys, us, vs), rois


STANDARD_SIZES = ((64, 64), (176, 144), (352, 288))


def standard_clips(frames: int = 16) -> list[tuple[VideoSequence, list[RoiRecord]]]:
    return [make_clip(ClipSpec(w, h, frames, seed=i)) for i, (w, h) in enumerate(STANDARD_SIZES)]

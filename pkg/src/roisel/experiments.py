"""Scaled-down experiment runners shared by scripts/ and the acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .benchmark import bitrate_change, evaluate_all, iou, iou_avg
from .codec import CodecConfig, Container, SequenceAnalysis, analyze_sequence, decode_container
from .codec import serialise
from .encryptor import EncryptionLevel
from .keystream import StreamKey
from .roi_map import (RoiRecord, TileClassification, TileGrid, classify_sequence, pixel_mask,
                      rect_mask, rois_for_frame)
from .synthetic import ClipSpec, make_clip
from .yuv_io import PixelRegion, VideoSequence

LEVELS = (EncryptionLevel.BASIC, EncryptionLevel.ENHANCED, EncryptionLevel.ADVANCED)


@dataclass
class PreparedClip:
    """A clip analysed once at one QP, plus its identity container and decode."""
    name: str
    source: VideoSequence
    rois: list[RoiRecord]
    qp: int
    classifications: list[TileClassification]
    analysis: SequenceAnalysis
    plain: Container
    plain_decode: VideoSequence
    truth: list[list[PixelRegion]] = field(default_factory=list)

    def encrypt(self, level: EncryptionLevel, key: StreamKey) -> Container:
        return serialise(self.analysis, level, key)

    def roi_pixel_masks(self) -> list[np.ndarray]:
        return [pixel_mask(c) for c in self.classifications]


def prepare(source: VideoSequence, rois: list[RoiRecord], qp: int, tile: int = 32,
            name: str = "", **codec) -> PreparedClip:
    cfg = CodecConfig(qp=qp, tile_w=tile, tile_h=tile, **codec)
    w, h = source.spec.width, source.spec.height
    cls = classify_sequence(TileGrid(w, h, tile, tile), rois, len(source))
    analysis = analyze_sequence(source, cfg, cls)
    plain = serialise(analysis)
    truth = [rois_for_frame(rois, i) for i in range(len(source))]
    return PreparedClip(name or f"{w}x{h}", source, rois, qp, cls, analysis, plain,
                        decode_container(plain).sequence, truth)


def bitrate_rows(clip: PreparedClip, key: StreamKey) -> dict[str, float]:
    """Payload growth per level against the identity container."""
    return {lv.name.lower(): bitrate_change(clip.plain, clip.encrypt(lv, key)) for lv in LEVELS}


PERTURBATION_FIELDS = ("psnr_db", "ssim", "edr", "entropy_bits", "entropy_ori_bits", "npcr_pct",
                       "uaci_pct")


def perturbation(clip: PreparedClip, level: EncryptionLevel, key: StreamKey,
                 alt_key: StreamKey | None = None) -> dict[str, float]:
    """Sequence-average ROI metrics of the keyless decode."""
    enc = clip.encrypt(level, key)
    dec = decode_container(enc).sequence
    alt = decode_container(clip.encrypt(level, alt_key)).sequence if alt_key else None
    rep = evaluate_all(clip.source, clip.plain_decode, dec, clip.classifications, clip.truth,
                       16, clip.plain, enc, enc_decode_alt=alt)
    out = {k: rep.average[k] for k in PERTURBATION_FIELDS}
    out["bitrate_change_pct"] = rep.bitrate_change_pct
    return out


def face_proxy(seed: int, frames: int = 16) -> tuple[VideoSequence, list[RoiRecord]]:
    """176x144 clip whose ROI is a textured moving square."""
    return make_clip(ClipSpec(176, 144, frames, seed=seed))


def fixed_keys(n: int, base: int = 0) -> list[StreamKey]:
    return [StreamKey(bytes([base + i]) * 16, 1000 + base + i) for i in range(n)]


# ---------------------------------------------------------------- fineness

def random_rect(rng: np.random.Generator, width: int, height: int,
                min_side: int = 8) -> PixelRegion:
    w = int(rng.integers(min_side, width // 2 + 1))
    h = int(rng.integers(min_side, height // 2 + 1))
    x = int(rng.integers(0, width - w + 1))
    y = int(rng.integers(0, height - h + 1))
    return PixelRegion(x, y, x + w, y + h)


def fineness_trial(rng: np.random.Generator, width: int = 352, height: int = 288,
                   frames: int = 10, tiles=(16, 32), max_rois: int = 3) -> dict[int, float]:
    """IoU_avg per tile size for one random multi-rectangle ROI track."""
    records = []
    for f in range(frames):
        for _ in range(int(rng.integers(1, max_rois + 1))):
            records.append(RoiRecord(f, random_rect(rng, width, height)))
    out = {}
    for t in tiles:
        cls = classify_sequence(TileGrid(width, height, t, t), records, frames)
        vals = [iou(pixel_mask(c), rect_mask(rois_for_frame(records, i), width, height))
                for i, c in enumerate(cls)]
        out[t] = iou_avg(vals)
    return out

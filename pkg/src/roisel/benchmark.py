"""ROI encryption quality metrics and report assembly.

Perturbation metrics are computed over the pixels of the coding units that
were actually encrypted (all CUs of ROI tiles), never over the raw ROI
rectangles.  Fineness (IoU) compares the encrypted pixel set with the
ground-truth rectangles.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .edge_scrambler import canny
from .roi_map import (RoiUnitSet, TileClassification, pixel_mask, rect_mask, roi_unit_set,
                      unit_mask)
from .yuv_io import Frame, PixelRegion, Plane, VideoSequence, extract_region

C1 = (0.01 * 255) ** 2
C2 = (0.03 * 255) ** 2


class MetricError(ValueError):
    pass


class UndefinedIoUError(MetricError):
    pass


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.size != b.size:
        raise MetricError(f"sample sets differ in size ({a.size} vs {b.size})")
    if a.size == 0:
        raise MetricError("empty sample set")
    return a, b


# ---------------------------------------------------------------- fineness

def iou(encrypted: np.ndarray, truth: np.ndarray) -> float:
    e = np.asarray(encrypted, dtype=bool)
    g = np.asarray(truth, dtype=bool)
    if e.shape != g.shape:
        raise MetricError("masks must cover the same frame")
    union = np.count_nonzero(e | g)
    if union == 0:
        raise UndefinedIoUError("neither an encrypted nor a ground-truth pixel in this frame")
    return np.count_nonzero(e & g) / union


def iou_avg(values: Sequence[float | None]) -> float:
    """Mean over frames with a defined IoU (``None`` marks undefined frames)."""
    vals = [v for v in values if v is not None]
    if not vals:
        raise UndefinedIoUError("no frame has a defined IoU")
    return float(np.mean(vals))


def frame_iou(classification: TileClassification, truth: Sequence[PixelRegion]) -> float | None:
    g = classification.grid
    try:
        return iou(pixel_mask(classification), rect_mask(truth, g.width, g.height))
    except UndefinedIoUError:
        return None


# ---------------------------------------------------------------- region extraction

@dataclass
class RoiPixelSets:
    """Per-frame Y, U, V samples of every ROI unit, concatenated in unit order."""

    p_ori: list[np.ndarray]
    p_enc: list[np.ndarray]
    luma_ori: list[np.ndarray]
    luma_enc: list[np.ndarray]


def unit_samples(frame: Frame, units: RoiUnitSet) -> tuple[np.ndarray, np.ndarray]:
    """(all-plane samples, luma samples) of ``units`` in ``frame``."""
    parts, luma = [], []
    for r in units.regions():
        y = extract_region(frame, r, Plane.Y)
        luma.append(y)
        parts.extend((y, extract_region(frame, r, Plane.U), extract_region(frame, r, Plane.V)))
    if not parts:
        empty = np.zeros(0, dtype=np.uint8)
        return empty, empty
    return np.concatenate(parts), np.concatenate(luma)


def extract_roi_pixels(original: VideoSequence, encrypted: VideoSequence,
                       units: Sequence[RoiUnitSet]) -> RoiPixelSets:
    if original.spec.width != encrypted.spec.width or original.spec.height != encrypted.spec.height:
        raise MetricError("sequences have different dimensions")
    if len(original) != len(encrypted) or len(units) != len(original):
        raise MetricError("frame counts differ")
    out = RoiPixelSets([], [], [], [])
    for fo, fe, u in zip(original, encrypted, units):
        a, la = unit_samples(fo, u)
        b, lb = unit_samples(fe, u)
        out.p_ori.append(a)
        out.p_enc.append(b)
        out.luma_ori.append(la)
        out.luma_enc.append(lb)
    return out


# ---------------------------------------------------------------- perturbation

def mse(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b) -> float:
    m = mse(a, b)
    if m == 0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / m)


def ssim(a, b) -> float:
    """SSIM from global statistics of the two sample sets."""
    a, b = _pair(a, b)
    mu1, mu2 = a.mean(), b.mean()
    v1, v2 = a.var(), b.var()
    cov = np.mean((a - mu1) * (b - mu2))
    return float(((2 * mu1 * mu2 + C1) * (2 * cov + C2))
                 / ((mu1 ** 2 + mu2 ** 2 + C1) * (v1 + v2 + C2)))


def edge_difference(pe: np.ndarray, ce: np.ndarray,
                    mask: np.ndarray | None = None) -> tuple[float, bool]:
    """(EDR, has_edges) for two binary edge maps, optionally restricted to ``mask``."""
    pe = np.asarray(pe, dtype=np.int64)
    ce = np.asarray(ce, dtype=np.int64)
    if pe.shape != ce.shape:
        raise MetricError("edge maps differ in shape")
    if mask is not None:
        pe, ce = pe[mask], ce[mask]
    den = int(np.sum(pe + ce))
    if den == 0:
        return 0.0, False
    return float(np.sum(np.abs(pe - ce))) / den, True


def edr(orig_luma: np.ndarray, enc_luma: np.ndarray, mask: np.ndarray | None = None,
        low: float = 50.0, high: float = 150.0) -> float:
    """Edge difference ratio of two luma regions (0 when neither has edges)."""
    o = np.asarray(orig_luma)
    e = np.asarray(enc_luma)
    if o.shape != e.shape:
        raise MetricError("regions differ in shape")
    return edge_difference(canny(o, low, high), canny(e, low, high), mask)[0]


def entropy(samples) -> float:
    s = np.asarray(samples).reshape(-1)
    if s.size == 0:
        raise MetricError("empty sample set")
    p = np.bincount(s.astype(np.int64), minlength=256) / s.size
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum()) + 0.0


def npcr(a, b) -> float:
    a, b = _pair(a, b)
    return 100.0 * np.count_nonzero(a != b) / a.size


def uaci(a, b) -> float:
    a, b = _pair(a, b)
    return 100.0 * float(np.mean(np.abs(a - b))) / 255.0


def bitrate_change(original, encrypted) -> float:
    """Relative payload growth in percent (headers excluded)."""
    same = (original.width == encrypted.width and original.height == encrypted.height
            and original.config == encrypted.config
            and original.frame_count == encrypted.frame_count)
    if not same:
        raise MetricError("containers were produced with different configurations")
    base = original.payload_bytes
    if base == 0:
        raise MetricError("reference container has no payload")
    return 100.0 * (encrypted.payload_bytes - base) / base


# ---------------------------------------------------------------- report

FRAME_FIELDS = ("frame", "iou", "psnr_db", "ssim", "edr", "edr_has_edges", "entropy_ori_bits",
                "entropy_bits", "npcr_pct", "uaci_pct", "roi_samples")
AVERAGED = ("iou", "psnr_db", "ssim", "edr", "entropy_ori_bits", "entropy_bits", "npcr_pct",
            "uaci_pct")


@dataclass
class FrameMetrics:
    frame: int
    iou: float | None = None
    psnr_db: float | None = None
    ssim: float | None = None
    edr: float | None = None
    edr_has_edges: bool = False
    entropy_ori_bits: float | None = None
    entropy_bits: float | None = None
    npcr_pct: float | None = None
    uaci_pct: float | None = None
    roi_samples: int = 0


@dataclass
class MetricReport:
    frames: list[FrameMetrics]
    average: dict[str, float | None]
    bitrate_change_pct: float | None
    reference: dict[str, float | None] = field(default_factory=dict)
    npcr_mode: str = "plain-vs-cipher"

    def to_dict(self) -> dict:
        return {"npcr_mode": self.npcr_mode, "bitrate_change_pct": self.bitrate_change_pct,
                "average": self.average, "reference": self.reference,
                "frames": [asdict(f) for f in self.frames]}

    def to_json(self) -> str:
        return json.dumps(_finite(self.to_dict()), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FRAME_FIELDS)
        for f in self.frames:
            w.writerow(["" if getattr(f, k) is None else getattr(f, k) for k in FRAME_FIELDS])
        return buf.getvalue()

    def summary(self) -> str:
        lines = []
        if self.bitrate_change_pct is not None:
            lines.append(f"bitrate_change: {self.bitrate_change_pct:.2f}%")
        for k in AVERAGED:
            v = self.average.get(k)
            lines.append(f"{k}: {'n/a' if v is None else f'{v:.4f}'}")
        return "\n".join(lines)


def _finite(obj):
    """JSON has no infinity; write it as the string "inf"."""
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def _mean(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def _bbox(units: RoiUnitSet) -> PixelRegion:
    regs = units.regions()
    return PixelRegion(min(r.x1 for r in regs), min(r.y1 for r in regs),
                       max(r.x2 for r in regs), max(r.y2 for r in regs))


def evaluate_all(original: VideoSequence, plain_decode: VideoSequence,
                 enc_decode: VideoSequence, classifications: Sequence[TileClassification],
                 truth: Sequence[Sequence[PixelRegion]], cu_size: int = 16,
                 container_plain=None, container_enc=None,
                 enc_decode_alt: VideoSequence | None = None,
                 canny_low: float = 50.0, canny_high: float = 150.0,
                 canny_sigma: float = 1.4) -> MetricReport:
    """Every indicator per frame plus sequence averages.

    Perturbation metrics compare the plain (identity cipher) decode with the
    keyless decode of the encrypted stream, so an identity cipher scores
    PSNR inf, SSIM 1, NPCR 0.  ``reference`` holds the source against the
    plain decode, i.e. what compression alone does.
    With ``enc_decode_alt`` (a decode of the same content under a second
    key), NPCR and UACI compare the two cipher decodes instead.
    """
    n = len(original)
    if not (len(plain_decode) == len(enc_decode) == len(classifications) == len(truth) == n):
        raise MetricError("inputs disagree on the frame count")
    units = [roi_unit_set(c, cu_size) for c in classifications]
    sets = extract_roi_pixels(plain_decode, enc_decode, units)
    alt = extract_roi_pixels(plain_decode, enc_decode_alt, units) if enc_decode_alt else None
    ref_sets = extract_roi_pixels(original, plain_decode, units)
    frames, ref_frames = [], []
    for i in range(n):
        fm = FrameMetrics(i, iou=frame_iou(classifications[i], truth[i]))
        rm = FrameMetrics(i)
        if len(units[i]):
            a, b = sets.p_ori[i], sets.p_enc[i]
            fm.roi_samples = int(a.size)
            fm.psnr_db = psnr(a, b)
            fm.ssim = ssim(sets.luma_ori[i], sets.luma_enc[i])
            fm.entropy_ori_bits = entropy(a)
            fm.entropy_bits = entropy(b)
            if alt is not None:
                fm.npcr_pct = npcr(alt.p_enc[i], b)
                fm.uaci_pct = uaci(alt.p_enc[i], b)
            else:
                fm.npcr_pct = npcr(a, b)
                fm.uaci_pct = uaci(a, b)
            box = _bbox(units[i])
            if box.x2 - box.x1 >= 5 and box.y2 - box.y1 >= 5:
                sl = (slice(box.y1, box.y2), slice(box.x1, box.x2))
                inside = unit_mask(units[i])[sl]
                fm.edr, fm.edr_has_edges = edge_difference(
                    canny(plain_decode[i].y[sl], canny_low, canny_high, canny_sigma),
                    canny(enc_decode[i].y[sl], canny_low, canny_high, canny_sigma), inside)
            ra, rb = ref_sets.p_ori[i], ref_sets.p_enc[i]
            rm.psnr_db = psnr(ra, rb)
            rm.ssim = ssim(ref_sets.luma_ori[i], ref_sets.luma_enc[i])
            rm.npcr_pct = npcr(ra, rb)
            rm.uaci_pct = uaci(ra, rb)
            rm.entropy_bits = entropy(rb)
        frames.append(fm)
        ref_frames.append(rm)
    avg = {k: _mean(getattr(f, k) for f in frames) for k in AVERAGED}
    defined = [f.iou for f in frames if f.iou is not None]
    avg["iou"] = iou_avg(defined) if defined else None
    reference = {k: _mean(getattr(f, k) for f in ref_frames)
                 for k in ("psnr_db", "ssim", "npcr_pct", "uaci_pct", "entropy_bits")}
    br = None
    if container_plain is not None and container_enc is not None:
        br = bitrate_change(container_plain, container_enc)
    return MetricReport(frames, avg, br, reference,
                        "two-keys" if enc_decode_alt is not None else "plain-vs-cipher")

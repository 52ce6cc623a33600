"""Sequence encoder: analysis, optional coefficient protection, serialisation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..edge_scrambler import canny, classify_tus, protect_tu
from ..encryptor import EncryptionLevel
from ..keystream import StreamKey, random_nonce, tu_chaotic_params
from ..roi_map import TileClassification
from ..yuv_io import VideoSequence
from .analysis import SequenceAnalysis, analyze_sequence
from .config import CodecConfig
from .container import Container
from .entropy import encode_frame
from .geometry import pad_plane
from .recon import luma_tus_per_cu

CU = 16


@dataclass(frozen=True)
class EdgeParams:
    """Canny settings for the advanced level (encoder only; the decoder reads flags)."""
    low: float = 50.0
    high: float = 150.0
    sigma: float = 1.4


def edge_tu_map(luma: np.ndarray, padded_h: int, padded_w: int, tu: int,
                edges: EdgeParams = EdgeParams()) -> np.ndarray:
    """Edge class of every luma TU of the padded frame, from the source luma."""
    plane = pad_plane(luma, padded_h, padded_w)
    return classify_tus(canny(plane, edges.low, edges.high, edges.sigma), tu)


def protect_frame(coefs: np.ndarray, cu_x, cu_y, cu_roi, edge_tus: np.ndarray, tu: int,
                  chaotic_key: bytes, frame_idx: int) -> np.ndarray:
    """Scramble edge TUs and embed class flags in every non-empty ROI luma TU."""
    out = coefs.copy()
    per_row = CU // tu
    nl = per_row * per_row
    nn = tu * tu
    for i in np.flatnonzero(cu_roi):
        for t in range(nl):
            c = out[i, t, :nn]
            if not c.any():
                continue
            gy = cu_y[i] // tu + t // per_row
            gx = cu_x[i] // tu + t % per_row
            is_edge = bool(edge_tus[gy, gx])
            params = None
            if is_edge and np.count_nonzero(c) > 2:
                params = tu_chaotic_params(chaotic_key, frame_idx, int(i) * nl + t)
            out[i, t, :nn] = protect_tu(c, is_edge, params)
    return out


def serialise(analysis: SequenceAnalysis, level: EncryptionLevel = EncryptionLevel.NONE,
              key: StreamKey | None = None, trace: list | None = None,
              edges: EdgeParams = EdgeParams()) -> Container:
    """Entropy-code an analysed sequence under ``level``.

    One analysis can be serialised under many keys and levels; this is what
    makes identity and encrypted containers directly comparable.
    """
    level = EncryptionLevel(level)
    if level != EncryptionLevel.NONE and key is None:
        raise ValueError("an encryption level other than NONE needs a key")
    cfg, geo = analysis.config, analysis.geometry
    drawer = key.drawer() if level != EncryptionLevel.NONE else None
    nonce = key.nonce if key is not None else 0
    ck = key.chaotic_key() if level == EncryptionLevel.ADVANCED else None
    cont = Container(geo.width, geo.height, cfg, level, nonce)
    for fa, src in zip(analysis.frames, analysis.source_luma):
        cu_roi = fa.fields[:, 0].copy()
        coefs = fa.coefs
        if level == EncryptionLevel.ADVANCED and cu_roi.any():
            edge_tus = edge_tu_map(src, geo.padded_height, geo.padded_width, cfg.tu_size, edges)
            coefs = protect_frame(coefs, geo.cu_x, geo.cu_y, cu_roi, edge_tus, cfg.tu_size, ck,
                                  fa.index)
        body, tr = encode_frame(fa.fields, coefs, cu_roi, not fa.is_intra, fa.rn, cfg.tu_size,
                                cfg.max_dqp, level, cfg.qp, drawer, trace=trace is not None)
        if trace is not None:
            trace.append(tr)
        bitmap = np.packbits(fa.tile_mask.reshape(-1).astype(np.uint8)).tobytes()
        cont.payloads.append(bitmap + body)
    return cont


def encode_sequence(seq: VideoSequence, config: CodecConfig,
                    roi: list[TileClassification],
                    level: EncryptionLevel = EncryptionLevel.NONE,
                    key: StreamKey | bytes | None = None,
                    edges: EdgeParams = EdgeParams()) -> Container:
    """Encode ``seq``; ROI CUs are encrypted at ``level`` under ``key``.

    A raw 16-byte key gets a fresh random nonce.
    """
    if isinstance(key, (bytes, bytearray)):
        key = StreamKey(bytes(key), random_nonce())
    return serialise(analyze_sequence(seq, config, roi), level, key, edges=edges)

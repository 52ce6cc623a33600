"""Sequence decoder.

Without a key every frame still decodes: non-ROI tiles come out exactly as
in the unencrypted stream and ROI tiles come out garbled.  With the key the
inverse element transforms run in the same order the encoder applied them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..edge_scrambler import CorruptCoefficientsError, unscramble
from ..encryptor import EncryptionLevel
from ..keystream import StreamKey, tu_chaotic_params
from ..yuv_io import VideoSequence
from .analysis import ReferenceWindow
from .container import Container
from .entropy import FrameCorruptError, parse_frame
from .geometry import FrameGeometry
from .recon import luma_tus_per_cu, reconstruct_frame, tus_per_cu

log = logging.getLogger(__name__)
CU = 16


@dataclass
class DecodeResult:
    sequence: VideoSequence
    errors: list[tuple[int, str]] = field(default_factory=list)
    traces: list[np.ndarray] | None = None


def restore_frame(coefs: np.ndarray, cu_roi: np.ndarray, tu: int, chaotic_key: bytes,
                  frame_idx: int) -> None:
    """Undo coefficient protection in place for every non-empty ROI luma TU."""
    nl = luma_tus_per_cu(tu)
    nn = tu * tu
    for i in np.flatnonzero(cu_roi):
        for t in range(nl):
            c = coefs[i, t, :nn]
            if c.any():
                gidx = int(i) * nl + t
                coefs[i, t, :nn] = unscramble(
                    c, lambda: tu_chaotic_params(chaotic_key, frame_idx, gidx))


def _as_key(key, nonce: int) -> StreamKey | None:
    if key is None or isinstance(key, StreamKey):
        return key
    return StreamKey(bytes(key), nonce)


def decode_container(cont: Container, key: StreamKey | bytes | None = None,
                     trace: bool = False) -> DecodeResult:
    cfg = cont.config
    key = _as_key(key, cont.nonce)
    keyed = key is not None and cont.level != EncryptionLevel.NONE
    drawer = key.drawer() if keyed else None
    ck = key.chaotic_key() if keyed and cont.level == EncryptionLevel.ADVANCED else None
    level = cont.level if keyed else EncryptionLevel.NONE
    geo = FrameGeometry.build(cont.width, cont.height, cfg.tile_w, cfg.tile_h)
    ph, pw = geo.padded_height, geo.padded_width
    ntu = tus_per_cu(cfg.tu_size)
    n_tiles = geo.grid.rows * geo.grid.cols
    nmap = (n_tiles + 7) // 8
    window = ReferenceWindow(cfg.max_ref_frames)
    ys, us, vs = [], [], []
    errors: list[tuple[int, str]] = []
    traces: list[np.ndarray] | None = [] if trace else None

    for n, payload in enumerate(cont.payloads):
        is_intra = cfg.frame_is_intra(n) or window.occupancy == 0
        rn = 0 if is_intra else window.occupancy
        rec_y = np.zeros((ph, pw), np.uint8)
        rec_u = np.zeros((ph // 2, pw // 2), np.uint8)
        rec_v = np.zeros((ph // 2, pw // 2), np.uint8)
        tile_mask = np.zeros((geo.grid.rows, geo.grid.cols), bool)
        try:
            if len(payload) < nmap:
                raise FrameCorruptError("payload shorter than the tile bitmap")
            bits = np.unpackbits(np.frombuffer(payload[:nmap], np.uint8))[:n_tiles]
            tile_mask = bits.reshape(geo.grid.rows, geo.grid.cols).astype(bool)
            cu_roi = bits[geo.cu_tile].astype(np.int64)
            fields, coefs, tr = parse_frame(payload[nmap:], geo.n_cu, ntu, cu_roi, not is_intra,
                                            rn, cfg.tu_size, cfg.max_dqp, level, cfg.qp,
                                            drawer, trace=trace)
            if trace:
                traces.append(tr)
            if ck is not None:
                restore_frame(coefs, cu_roi, cfg.tu_size, ck, n)
            ry, ru, rv, _, _ = window.stacked(geo, with_dirty=False)
            reconstruct_frame(fields, coefs, geo.cu_x, geo.cu_y, geo.nb, cfg.qp, cfg.tu_size,
                              rn, ry, ru, rv, rec_y, rec_u, rec_v)
        except (FrameCorruptError, CorruptCoefficientsError) as e:
            log.warning("frame %d: %s", n, e)
            errors.append((n, str(e)))
            rec_y[:] = 128
            rec_u[:] = 128
            rec_v[:] = 128
        window.push((rec_y, rec_u, rec_v, tile_mask))
        ys.append(rec_y[:cont.height, :cont.width].copy())
        us.append(rec_u[:cont.height // 2, :cont.width // 2].copy())
        vs.append(rec_v[:cont.height // 2, :cont.width // 2].copy())
    return DecodeResult(VideoSequence.from_planes(ys, us, vs), errors, traces)


def decode_sequence(container: Container | bytes, key: StreamKey | bytes | None = None,
                    errors: list | None = None) -> VideoSequence:
    """Decode a container; corrupt frames come back mid-grey and are appended to ``errors``."""
    if isinstance(container, (bytes, bytearray)):
        container = Container.from_bytes(container)
    res = decode_container(container, key)
    if errors is not None:
        errors.extend(res.errors)
    return res.sequence

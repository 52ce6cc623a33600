"""Encoder-side mode decision, transform and reconstruction.

Everything here is independent of the key and the encryption level: the
cipher only touches the coded values at entropy-coding time, and coefficient
scrambling works on the quantised levels this stage produces.  One analysis
can therefore be serialised under any number of keys and levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..roi_map import TileClassification
from ..yuv_io import VideoSequence
from .config import CodecConfig
from .geometry import FrameGeometry, pad_plane
from .inter import block_sad, footprint_dirty, integral, merge_list, amvp_list, motion_search
from .intra import build_mpm_list, chroma_mode, mode_to_rem, predict_block
from .layout import (F_CHROMA, F_DQP, F_MERGEF, F_MERGEI, F_MPMF, F_MPMI, F_MVDX, F_MVDY,
                     F_MVP, F_PRED, F_REF, F_REM, F_ROI, N_FIELDS)
from .recon import (CH, CU, add_residual, cu_qp, derive_cu, intra_refs, neighbour_mode,
                    predict_cu, tus_per_cu)
from .transform import forward_quant


@njit(cache=True)
def _splitmix(v):
    z = v + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def dqp_perturbation(frame_idx, cu_index, max_dqp):
    """Deterministic stand-in for rate control: mostly 0, occasionally +-1..3."""
    h = _splitmix(np.uint64(frame_idx) * np.uint64(1 << 20) + np.uint64(cu_index))
    if h % np.uint64(8) < np.uint64(5):
        return 0
    mag = 1 + np.int64((h >> np.uint64(8)) % np.uint64(3))
    if mag > max_dqp:
        mag = max_dqp
    return -mag if (h >> np.uint64(16)) & np.uint64(1) else mag


@njit(cache=True)
def _sad(src, x, y, pred):
    n = pred.shape[0]
    s = 0
    for j in range(n):
        for i in range(n):
            d = np.int64(src[y + j, x + i]) - pred[j, i]
            s += d if d >= 0 else -d
    return s


@njit(cache=True)
def _quantise_plane(plane, pred, bx, by, size, qp, tu, out, t):
    n = size // tu
    for ty in range(n):
        for tx in range(n):
            res = np.empty((tu, tu), dtype=np.int64)
            for j in range(tu):
                for i in range(tu):
                    res[j, i] = (np.int64(plane[by + ty * tu + j, bx + tx * tu + i])
                                 - pred[ty * tu + j, tx * tu + i])
            out[t, :tu * tu] = forward_quant(res, qp)
            t += 1
    return t


@njit(cache=True)
def _quantise_cu(src_y, src_u, src_v, x, y, py, pu, pv, qp, tu, out):
    t = _quantise_plane(src_y, py, x, y, CU, qp, tu, out, 0)
    t = _quantise_plane(src_u, pu, x >> 1, y >> 1, CH, qp, tu, out, t)
    _quantise_plane(src_v, pv, x >> 1, y >> 1, CH, qp, tu, out, t)


@njit(cache=True)
def analyze_frame(src_y, src_u, src_v, rec_y, rec_u, rec_v, refs_y, refs_u, refs_v,
                  dint_y, dint_c, rn, is_intra, qp, tu, sr, max_dqp, frame_idx,
                  cu_x, cu_y, nb, cu_roi, fields, coefs):
    for i in range(fields.shape[0]):
        x, y = cu_x[i], cu_y[i]
        fields[i, :] = 0
        fields[i, F_ROI] = cu_roi[i]
        fields[i, F_DQP] = dqp_perturbation(frame_idx, i, max_dqp)

        # best intra candidate
        lrefs = intra_refs(rec_y, x, y, CU, nb[i])
        best_mode, intra_sad = 0, np.int64(1) << 60
        for m in range(35):
            s = _sad(src_y, x, y, predict_block(lrefs, CU, m))
            if s < intra_sad:
                best_mode, intra_sad = m, s

        use_inter = False
        if not is_intra and rn > 0:
            constrained = cu_roi[i] == 0
            me_sad, me_r, me_x, me_y = motion_search(src_y, x, y, refs_y, rn, sr, constrained,
                                                     dint_y, dint_c)
            cands = merge_list(fields, nb[i, 0], nb[i, 1], nb[i, 2], nb[i, 3], rn)
            m_sad, m_idx = np.int64(-1), -1
            for c in range(5):
                r, mx, my = cands[c, 0], cands[c, 1], cands[c, 2]
                if constrained and footprint_dirty(dint_y, dint_c, r, x, y, mx, my):
                    continue
                s = block_sad(src_y, x, y, refs_y[r], x + mx, y + my, np.int64(1) << 60)
                if m_idx < 0 or s < m_sad:
                    m_sad, m_idx = s, c
            inter_sad = np.int64(-1)
            merge = False
            if me_sad >= 0 and m_idx >= 0:
                merge = m_sad <= me_sad
                inter_sad = m_sad if merge else me_sad
            elif me_sad >= 0:
                inter_sad = me_sad
            elif m_idx >= 0:
                merge = True
                inter_sad = m_sad
            if inter_sad >= 0 and inter_sad <= 2 * intra_sad:
                use_inter = True
                fields[i, F_PRED] = 1
                if merge:
                    fields[i, F_MERGEF] = 1
                    fields[i, F_MERGEI] = m_idx
                else:
                    mvps = amvp_list(fields, nb[i, 0], nb[i, 1], nb[i, 2], nb[i, 3])
                    d0 = abs(me_x - mvps[0, 0]) + abs(me_y - mvps[0, 1])
                    d1 = abs(me_x - mvps[1, 0]) + abs(me_y - mvps[1, 1])
                    p = 1 if d1 < d0 else 0
                    fields[i, F_REF] = me_r
                    fields[i, F_MVP] = p
                    fields[i, F_MVDX] = me_x - mvps[p, 0]
                    fields[i, F_MVDY] = me_y - mvps[p, 1]

        if not use_inter:
            mpm = build_mpm_list(neighbour_mode(fields, nb[i, 0]), neighbour_mode(fields, nb[i, 1]))
            hit = -1
            for k in range(3):
                if mpm[k] == best_mode:
                    hit = k
            if hit >= 0:
                fields[i, F_MPMF] = 1
                fields[i, F_MPMI] = hit
            else:
                fields[i, F_REM] = mode_to_rem(best_mode, mpm)
            urefs = intra_refs(rec_u, x >> 1, y >> 1, CH, nb[i])
            vrefs = intra_refs(rec_v, x >> 1, y >> 1, CH, nb[i])
            best_c, best_cs = 0, np.int64(1) << 60
            for c in range(5):
                cm = chroma_mode(c, best_mode)
                s = (_sad(src_u, x >> 1, y >> 1, predict_block(urefs, CH, cm))
                     + _sad(src_v, x >> 1, y >> 1, predict_block(vrefs, CH, cm)))
                if s < best_cs:
                    best_c, best_cs = c, s
            fields[i, F_CHROMA] = best_c

        derive_cu(fields, i, nb, rn)
        py, pu, pv = predict_cu(fields, i, x, y, nb, rec_y, rec_u, rec_v,
                                refs_y, refs_u, refs_v, rn)
        q = cu_qp(qp, fields[i, F_DQP])
        _quantise_cu(src_y, src_u, src_v, x, y, py, pu, pv, q, tu, coefs[i])
        add_residual(coefs[i], q, tu, x, y, py, pu, pv, rec_y, rec_u, rec_v)


# ---------------------------------------------------------------- python driver

@dataclass
class FrameAnalysis:
    index: int
    is_intra: bool
    rn: int
    tile_mask: np.ndarray   # (tile rows, tile cols) bool
    fields: np.ndarray      # (n_cu, N_FIELDS)
    coefs: np.ndarray       # (n_cu, tus_per_cu, 64)


@dataclass
class SequenceAnalysis:
    config: CodecConfig
    geometry: FrameGeometry
    frames: list[FrameAnalysis] = field(default_factory=list)
    recon: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=list)
    source_luma: list[np.ndarray] = field(default_factory=list)

    @property
    def frame_count(self) -> int:
        return len(self.frames)


class ReferenceWindow:
    """Most recent decoded frames first, at most ``size`` of them."""

    def __init__(self, size: int):
        self.size = size
        self.items: list[tuple] = []

    def push(self, item: tuple) -> None:
        self.items.insert(0, item)
        del self.items[self.size:]

    @property
    def occupancy(self) -> int:
        return len(self.items)

    def stacked(self, geometry: FrameGeometry, with_dirty: bool):
        ph, pw = geometry.padded_height, geometry.padded_width
        if not self.items:
            ry = np.zeros((1, ph, pw), np.uint8)
            rc = np.zeros((1, ph // 2, pw // 2), np.uint8)
            di = np.zeros((1, 2, 2), np.int32)
            return ry, rc, rc.copy(), di, di.copy()
        ry = np.stack([it[0] for it in self.items])
        ru = np.stack([it[1] for it in self.items])
        rv = np.stack([it[2] for it in self.items])
        if not with_dirty:
            di = np.zeros((1, 2, 2), np.int32)
            return ry, ru, rv, di, di.copy()
        dy = np.stack([integral(it[3]) for it in self.items])
        dc = np.stack([integral(np.ascontiguousarray(it[3][::2, ::2])) for it in self.items])
        return ry, ru, rv, dy, dc


def analyze_sequence(seq: VideoSequence, config: CodecConfig,
                     classifications: list[TileClassification]) -> SequenceAnalysis:
    if len(classifications) != len(seq):
        raise ValueError("need one tile classification per frame")
    geo = FrameGeometry.build(seq.spec.width, seq.spec.height, config.tile_w, config.tile_h)
    for c in classifications:
        if c.grid != geo.grid:
            raise ValueError("tile classification grid does not match the codec configuration")
    ph, pw = geo.padded_height, geo.padded_width
    out = SequenceAnalysis(config, geo)
    window = ReferenceWindow(config.max_ref_frames)
    ntu = tus_per_cu(config.tu_size)
    for n, frame in enumerate(seq.frames):
        sy = pad_plane(frame.y, ph, pw)
        su = pad_plane(frame.u, ph // 2, pw // 2)
        sv = pad_plane(frame.v, ph // 2, pw // 2)
        is_intra = config.frame_is_intra(n) or window.occupancy == 0
        rn = 0 if is_intra else window.occupancy
        ry, ru, rv, dy, dc = window.stacked(geo, with_dirty=True)
        rec_y = np.zeros((ph, pw), np.uint8)
        rec_u = np.zeros((ph // 2, pw // 2), np.uint8)
        rec_v = np.zeros((ph // 2, pw // 2), np.uint8)
        fields = np.zeros((geo.n_cu, N_FIELDS), np.int64)
        coefs = np.zeros((geo.n_cu, ntu, 64), np.int64)
        cls = classifications[n]
        analyze_frame(sy, su, sv, rec_y, rec_u, rec_v, ry, ru, rv, dy, dc, rn, is_intra,
                      config.qp, config.tu_size, config.search_range, config.max_dqp, n,
                      geo.cu_x, geo.cu_y, geo.nb, geo.cu_roi(cls), fields, coefs)
        out.frames.append(FrameAnalysis(n, is_intra, rn, cls.mask.copy(), fields, coefs))
        out.recon.append((rec_y, rec_u, rec_v))
        out.source_luma.append(np.asarray(frame.y))
        window.push((rec_y, rec_u, rec_v, geo.padded_tile_mask(cls)))
    return out

"""Coding-unit reconstruction shared by the encoder and the decoder.

The encoder calls exactly these functions after choosing a CU's coded fields,
so decoder reconstruction matches encoder reconstruction by construction.
"""

import numpy as np
from numba import njit

from .inter import mc_block, merge_list, amvp_list
from .intra import build_mpm_list, chroma_mode, predict_block, reference_samples, rem_to_mode
from .layout import (F_CHROMA, F_DQP, F_MERGEF, F_MERGEI, F_MODE, F_MPMF, F_MPMI, F_MVDX,
                     F_MVDY, F_MVP, F_MVX, F_MVY, F_PRED, F_REF, F_REFI, F_REM)
from .transform import dequant_inverse

CU = 16
CH = 8


@njit(cache=True)
def cu_qp(base_qp, dqp):
    q = base_qp + dqp
    return 0 if q < 0 else (51 if q > 51 else q)


@njit(cache=True)
def neighbour_mode(fields, nb):
    if nb < 0 or fields[nb, F_PRED] != 0:
        return -1
    return fields[nb, F_MODE]


@njit(cache=True)
def derive_cu(fields, i, nb, rn):
    """Fill the derived columns (mode / motion) of CU ``i`` from its coded fields."""
    if fields[i, F_PRED] == 0:
        mpm = build_mpm_list(neighbour_mode(fields, nb[i, 0]), neighbour_mode(fields, nb[i, 1]))
        if fields[i, F_MPMF]:
            mode = mpm[fields[i, F_MPMI]]
        else:
            mode = rem_to_mode(fields[i, F_REM], mpm)
        fields[i, F_MODE] = mode
        fields[i, F_REFI] = -1
        fields[i, F_MVX] = 0
        fields[i, F_MVY] = 0
        return
    fields[i, F_MODE] = -1
    if fields[i, F_MERGEF]:
        cands = merge_list(fields, nb[i, 0], nb[i, 1], nb[i, 2], nb[i, 3], rn)
        c = fields[i, F_MERGEI]
        fields[i, F_REFI] = cands[c, 0]
        fields[i, F_MVX] = cands[c, 1]
        fields[i, F_MVY] = cands[c, 2]
    else:
        mvps = amvp_list(fields, nb[i, 0], nb[i, 1], nb[i, 2], nb[i, 3])
        p = fields[i, F_MVP]
        fields[i, F_REFI] = fields[i, F_REF]
        fields[i, F_MVX] = mvps[p, 0] + fields[i, F_MVDX]
        fields[i, F_MVY] = mvps[p, 1] + fields[i, F_MVDY]


@njit(cache=True)
def intra_refs(plane, x, y, n, nb_row):
    return reference_samples(plane, x, y, n, nb_row[0] >= 0, nb_row[1] >= 0,
                             nb_row[2] >= 0, nb_row[3] >= 0)


@njit(cache=True)
def predict_cu(fields, i, x, y, nb, rec_y, rec_u, rec_v, refs_y, refs_u, refs_v, rn):
    if fields[i, F_PRED] == 0:
        mode = fields[i, F_MODE]
        py = predict_block(intra_refs(rec_y, x, y, CU, nb[i]), CU, mode)
        cm = chroma_mode(fields[i, F_CHROMA], mode)
        pu = predict_block(intra_refs(rec_u, x >> 1, y >> 1, CH, nb[i]), CH, cm)
        pv = predict_block(intra_refs(rec_v, x >> 1, y >> 1, CH, nb[i]), CH, cm)
        return py, pu, pv
    r = fields[i, F_REFI]
    r = 0 if r < 0 else (rn - 1 if r >= rn else r)
    mvx, mvy = fields[i, F_MVX], fields[i, F_MVY]
    py = mc_block(refs_y[r], x + mvx, y + mvy, CU)
    pu = mc_block(refs_u[r], (x >> 1) + (mvx >> 1), (y >> 1) + (mvy >> 1), CH)
    pv = mc_block(refs_v[r], (x >> 1) + (mvx >> 1), (y >> 1) + (mvy >> 1), CH)
    return py, pu, pv


@njit(cache=True)
def _put(plane, x, y, pred, resid):
    n = pred.shape[0]
    for j in range(n):
        for k in range(n):
            v = pred[j, k] + resid[j, k]
            plane[y + j, x + k] = 0 if v < 0 else (255 if v > 255 else v)


@njit(cache=True)
def add_residual(coefs_cu, qp, tu, x, y, py, pu, pv, rec_y, rec_u, rec_v):
    """Dequantise every TU of the CU and write the clipped reconstruction."""
    t = 0
    nl = CU // tu
    for ty in range(nl):
        for tx in range(nl):
            res = dequant_inverse(coefs_cu[t, :tu * tu], qp, tu)
            _put(rec_y, x + tx * tu, y + ty * tu, py[ty * tu:(ty + 1) * tu, tx * tu:(tx + 1) * tu], res)
            t += 1
    nc = CH // tu
    for plane, pred in ((rec_u, pu), (rec_v, pv)):
        for ty in range(nc):
            for tx in range(nc):
                res = dequant_inverse(coefs_cu[t, :tu * tu], qp, tu)
                _put(plane, (x >> 1) + tx * tu, (y >> 1) + ty * tu,
                     pred[ty * tu:(ty + 1) * tu, tx * tu:(tx + 1) * tu], res)
                t += 1


@njit(cache=True)
def reconstruct_frame(fields, coefs, cu_x, cu_y, nb, base_qp, tu, rn,
                      refs_y, refs_u, refs_v, rec_y, rec_u, rec_v):
    for i in range(fields.shape[0]):
        derive_cu(fields, i, nb, rn)
        x, y = cu_x[i], cu_y[i]
        py, pu, pv = predict_cu(fields, i, x, y, nb, rec_y, rec_u, rec_v,
                                refs_y, refs_u, refs_v, rn)
        add_residual(coefs[i], cu_qp(base_qp, fields[i, F_DQP]), tu, x, y, py, pu, pv,
                     rec_y, rec_u, rec_v)


def tus_per_cu(tu: int) -> int:
    return (CU // tu) ** 2 + 2 * (CH // tu) ** 2


def luma_tus_per_cu(tu: int) -> int:
    return (CU // tu) ** 2

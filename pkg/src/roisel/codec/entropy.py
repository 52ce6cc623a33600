"""Frame serialiser: one walker for both directions.

``serialize_frame`` visits the syntax elements of every CU in the canonical
order below.  When encoding it turns field/coefficient values into bins;
when decoding it reads bins back into the same arrays.  Because both
directions run the same code path, the element order (and therefore the
keystream consumption order) cannot diverge.

Per CU::

    [PredMode]                         inter frames only, regular
    intra: MPMFlag, MPMIdx | Rem(5b), ChromaIPM
    inter: MergeFlag, MergeIdx(FL3 bypass)
           | RefFrmIdx(EG_k: regular "1" + k bypass bits, RN > 1),
             MVD g0 H/V, g1 H/V, [EG_1 H, sign H], [EG_1 V, sign V], MVPIdx
    DQP:   |v| TR(cMax 5) regular + EG_0 bypass escape, sign bypass
    TUs:   luma (raster), Cb, Cr; each: Cbf, last x/y, sig flags (reverse scan),
           gt1 (first 8), gt2 (first gt1), signs, remaining levels

Parsing never depends on decrypted values, so keyless and keyed decoders
parse identical element sequences.
"""

import numpy as np
from numba import njit

from ..bitstream.cabac import (CAP_ON, ERR, ERR_OVERFLOW, dec_bypass, dec_finish, dec_regular,
                               dec_start, enc_bypass, enc_finish, enc_regular, enc_start,
                               init_context, STATE_SIZE)
from ..encryptor import COVERAGE, cipher_value, dec_dqp_value
from ..keystream import ks_uniform
from ..syntax import Kind
from .layout import (BUF_OVERFLOW, C_CBF, C_CHROMA, C_DQP, C_GT1, C_GT2, C_LAST_X, C_LAST_Y,
                     C_MERGEF, C_MPMF, C_MPMI, C_MVD_G0, C_MVD_G1, C_MVP, C_PRED, C_REF, C_REM,
                     C_SIG, CORRUPT, F_CHROMA, F_DQP, F_MERGEF, F_MERGEI, F_MPMF, F_MPMI, F_MVDX,
                     F_MVDY, F_MVP, F_PRED, F_REF, F_REM, F_ROI, KS_OVERFLOW, N_CTX, OK)
from .tables import SCAN4, SCAN8

K_PRED, K_MPMF, K_MPMI, K_REM, K_CHROMA = 0, 1, 2, 3, 4
K_MERGEF, K_MERGEI, K_SIGN_H, K_SIGN_V, K_MVD_H, K_MVD_V = 5, 6, 7, 8, 9, 10
K_MVP, K_REF, K_CBF, K_LAST, K_SIG, K_GT1, K_GT2 = 11, 12, 13, 14, 15, 16, 17
K_CSIGN, K_CREM, K_DSIGN, K_DVAL = 18, 19, 20, 21
assert (K_CREM, K_DVAL, K_REF) == (Kind.COEF_REM, Kind.DQP_VALUE, Kind.REF_IDX)

EG_PREFIX_LIMIT = 24


# ---------------------------------------------------------------- bin level

@njit(cache=True)
def _reg(dec, st, buf, states, mps, cap, ctx, b):
    if dec:
        return dec_regular(st, buf, states, mps, ctx, cap)
    enc_regular(st, buf, states, mps, ctx, b, cap)
    return b


@njit(cache=True)
def _byp(dec, st, buf, cap, b):
    if dec:
        return dec_bypass(st, buf, cap)
    enc_bypass(st, buf, b, cap)
    return b


@njit(cache=True)
def _tr_reg(dec, st, buf, states, mps, cap, v, cmax, ctx0, nctx):
    """Truncated unary (TR_0) with one context per bin, the last reused."""
    n = 0
    while n < cmax:
        b = _reg(dec, st, buf, states, mps, cap, ctx0 + min(n, nctx - 1), 1 if v > n else 0)
        if b == 0:
            break
        n += 1
    return n


@njit(cache=True)
def _fl_byp(dec, st, buf, cap, v, nbits):
    out = 0
    for i in range(nbits - 1, -1, -1):
        out = (out << 1) | _byp(dec, st, buf, cap, (v >> i) & 1)
    return out


@njit(cache=True)
def _eg_byp(dec, st, buf, cap, v, k):
    """EG_k, all bins bypass: 0^m 1 followed by m+k suffix bits."""
    m = 0
    if not dec:
        while ((v >> k) + 1) >> (m + 1):
            m += 1
        for _ in range(m):
            enc_bypass(st, buf, 0, cap)
        enc_bypass(st, buf, 1, cap)
        _fl_byp(dec, st, buf, cap, v - (((1 << m) - 1) << k), m + k)
        return v
    while dec_bypass(st, buf, cap) == 0:
        m += 1
        if m > EG_PREFIX_LIMIT or st[ERR]:
            st[ERR] = CORRUPT
            return 0
    return (((1 << m) - 1) << k) + _fl_byp(dec, st, buf, cap, 0, m + k)


@njit(cache=True)
def _rem_byp(dec, st, buf, cap, v, k):
    """Remaining level: TR_k prefix (cap 4) then EG_{k+1} escape."""
    p = 0
    while p < 4:
        b = _byp(dec, st, buf, cap, 1 if (v >> k) > p else 0)
        if b == 0:
            break
        p += 1
    if p < 4:
        return (p << k) + _fl_byp(dec, st, buf, cap, v & ((1 << k) - 1), k)
    return (4 << k) + _eg_byp(dec, st, buf, cap, v - (4 << k), k + 1)


# ---------------------------------------------------------------- helpers

@njit(cache=True)
def _trace(trace, trn, kind, plain, coded):
    n = trn[0]
    if n < trace.shape[0]:
        trace[n, 0] = kind
        trace[n, 1] = plain
        trace[n, 2] = coded
    trn[0] = n + 1


@njit(cache=True)
def _cv(kind, v, k, rn, max_dqp, lv, dec, ks, kst):
    if lv == 0:
        return v
    return cipher_value(kind, v, k, rn, max_dqp, lv, dec, ks, kst)


@njit(cache=True)
def _ref_bits(rn):
    k = 0
    while (1 << k) < rn:
        k += 1
    return k


# ---------------------------------------------------------------- residual

@njit(cache=True)
def _code_tu(dec, st, buf, states, mps, cap, c, n, luma, lv, max_dqp, ks, kst, trace, trn):
    scan = SCAN4 if n == 4 else SCAN8
    nn = n * n
    cset = 0 if luma else 1
    nz = 0
    last = -1
    if not dec:
        for i in range(nn):
            if c[i] != 0:
                last = i
                nz += 1
    cbf = _reg(dec, st, buf, states, mps, cap, C_CBF + cset, 1 if last >= 0 else 0)
    _trace(trace, trn, K_CBF, cbf, cbf)
    if cbf == 0:
        if dec:
            c[:nn] = 0
        return

    lx, ly = 0, 0
    if not dec:
        lx, ly = scan[last] % n, scan[last] // n
    lx = _tr_reg(dec, st, buf, states, mps, cap, lx, n - 1, C_LAST_X, 8)
    ly = _tr_reg(dec, st, buf, states, mps, cap, ly, n - 1, C_LAST_Y, 8)
    _trace(trace, trn, K_LAST, ly * n + lx, ly * n + lx)
    if dec:
        pos = ly * n + lx
        for i in range(nn):
            if scan[i] == pos:
                last = i
        c[:nn] = 0

    # nonzero scan indices in reverse scan order
    idx = np.empty(nn, dtype=np.int64)
    idx[0] = last
    cnt = 1
    sig_base = C_SIG + (0 if luma else 6)
    for i in range(last - 1, -1, -1):
        x, y = scan[i] % n, scan[i] // n
        s = _reg(dec, st, buf, states, mps, cap, sig_base + min(x + y, 5), 1 if c[i] != 0 else 0)
        _trace(trace, trn, K_SIG, s, s)
        if s:
            idx[cnt] = i
            cnt += 1

    absl = np.zeros(cnt, dtype=np.int64)
    if not dec:
        for j in range(cnt):
            absl[j] = abs(c[idx[j]])
    g1 = np.zeros(cnt, dtype=np.int64)
    g1_ctx = 1
    first_g1 = -1
    gt1_base = C_GT1 + (0 if luma else 4)
    for j in range(min(cnt, 8)):
        g = _reg(dec, st, buf, states, mps, cap, gt1_base + g1_ctx, 1 if absl[j] > 1 else 0)
        _trace(trace, trn, K_GT1, g, g)
        g1[j] = g
        if g:
            g1_ctx = 0
            if first_g1 < 0:
                first_g1 = j
        elif g1_ctx > 0:
            g1_ctx = min(g1_ctx + 1, 3)
    g2 = 0
    if first_g1 >= 0:
        g2 = _reg(dec, st, buf, states, mps, cap, C_GT2 + cset, 1 if absl[first_g1] > 2 else 0)
        _trace(trace, trn, K_GT2, g2, g2)

    signs = np.zeros(cnt, dtype=np.int64)
    for j in range(cnt):
        plain = 1 if (not dec and c[idx[j]] < 0) else 0
        if dec:
            coded = _byp(dec, st, buf, cap, 0)
            plain = _cv(K_CSIGN, coded, 0, 0, max_dqp, lv, dec, ks, kst)
        else:
            coded = _byp(dec, st, buf, cap, _cv(K_CSIGN, plain, 0, 0, max_dqp, lv, dec, ks, kst))
        _trace(trace, trn, K_CSIGN, plain, coded)
        signs[j] = plain

    k = 0
    for j in range(cnt):
        if j < 8:
            if g1[j] == 0:
                base, coded_rem = 1, False
            elif j == first_g1:
                base, coded_rem = 2 + g2, g2 == 1
            else:
                base, coded_rem = 2, True
        else:
            base, coded_rem = 1, True
        if coded_rem:
            if dec:
                coded = _rem_byp(dec, st, buf, cap, 0, k)
                rem = _cv(K_CREM, coded, k, 0, max_dqp, lv, dec, ks, kst)
            else:
                rem = absl[j] - base
                coded = _rem_byp(dec, st, buf, cap, _cv(K_CREM, rem, k, 0, max_dqp, lv, dec,
                                                        ks, kst), k)
            _trace(trace, trn, K_CREM, rem, coded)
            if coded >= (3 << k):
                k = min(k + 1, 4)
            a = base + rem
        else:
            a = base
        if dec:
            c[idx[j]] = -a if signs[j] else a


# ---------------------------------------------------------------- frame

@njit(cache=True)
def serialize_frame(dec, fields, coefs, cu_roi, is_inter, rn, tu, max_dqp, level, qp,
                    buf, nbits, ks, kst, trace, trn):
    """Encode (``dec=False``) or parse (``dec=True``) one frame.

    ``level`` > 0 encrypts (encode) or decrypts (parse) the elements of ROI CUs.
    Returns ``(status, bit_length)``.
    """
    st = np.zeros(STATE_SIZE, dtype=np.int64)
    states = np.zeros(N_CTX, dtype=np.int64)
    mps = np.zeros(N_CTX, dtype=np.int64)
    cap = np.zeros(2, dtype=np.int64)
    for c in range(N_CTX):
        init_context(154, qp, states, mps, c)
    if dec:
        dec_start(st, buf, nbits)
    else:
        enc_start(st)
    st[CAP_ON] = 0
    nl = (16 // tu) ** 2
    ntu = coefs.shape[1]
    refk = _ref_bits(rn)

    for i in range(fields.shape[0]):
        if dec:
            fields[i, :] = 0
        fields[i, F_ROI] = cu_roi[i]
        lv = level if cu_roi[i] else 0

        pred = 0
        if is_inter:
            pred = _reg(dec, st, buf, states, mps, cap, C_PRED, fields[i, F_PRED])
            _trace(trace, trn, K_PRED, pred, pred)
        fields[i, F_PRED] = pred

        if pred == 0:
            f = _reg(dec, st, buf, states, mps, cap, C_MPMF, fields[i, F_MPMF])
            _trace(trace, trn, K_MPMF, f, f)
            fields[i, F_MPMF] = f
            if f:
                if dec:
                    coded = _tr_reg(dec, st, buf, states, mps, cap, 0, 2, C_MPMI, 2)
                    plain = _cv(K_MPMI, coded, 0, rn, max_dqp, lv, dec, ks, kst)
                else:
                    plain = fields[i, F_MPMI]
                    coded = _tr_reg(dec, st, buf, states, mps, cap,
                                    _cv(K_MPMI, plain, 0, rn, max_dqp, lv, dec, ks, kst),
                                    2, C_MPMI, 2)
                _trace(trace, trn, K_MPMI, plain, coded)
                fields[i, F_MPMI] = plain
            else:
                plain = fields[i, F_REM]
                v = plain if dec else _cv(K_REM, plain, 0, rn, max_dqp, lv, dec, ks, kst)
                coded = 0
                for b in range(4, -1, -1):
                    coded = (coded << 1) | _reg(dec, st, buf, states, mps, cap, C_REM + 4 - b,
                                                (v >> b) & 1)
                if dec:
                    plain = _cv(K_REM, coded, 0, rn, max_dqp, lv, dec, ks, kst)
                _trace(trace, trn, K_REM, plain, coded)
                fields[i, F_REM] = plain
            if dec:
                coded = _tr_reg(dec, st, buf, states, mps, cap, 0, 4, C_CHROMA, 4)
                plain = _cv(K_CHROMA, coded, 0, rn, max_dqp, lv, dec, ks, kst)
            else:
                plain = fields[i, F_CHROMA]
                coded = _tr_reg(dec, st, buf, states, mps, cap,
                                _cv(K_CHROMA, plain, 0, rn, max_dqp, lv, dec, ks, kst),
                                4, C_CHROMA, 4)
            _trace(trace, trn, K_CHROMA, plain, coded)
            fields[i, F_CHROMA] = plain
        else:
            m = _reg(dec, st, buf, states, mps, cap, C_MERGEF, fields[i, F_MERGEF])
            _trace(trace, trn, K_MERGEF, m, m)
            fields[i, F_MERGEF] = m
            if m:
                if dec:
                    coded = _fl_byp(dec, st, buf, cap, 0, 3)
                    if coded > 4:
                        st[ERR] = CORRUPT
                        break
                    plain = _cv(K_MERGEI, coded, 0, rn, max_dqp, lv, dec, ks, kst)
                else:
                    plain = fields[i, F_MERGEI]
                    coded = _fl_byp(dec, st, buf, cap,
                                    _cv(K_MERGEI, plain, 0, rn, max_dqp, lv, dec, ks, kst), 3)
                _trace(trace, trn, K_MERGEI, plain, coded)
                fields[i, F_MERGEI] = plain
            else:
                if rn > 1:
                    pre = _reg(dec, st, buf, states, mps, cap, C_REF, 1)
                    if pre != 1:
                        st[ERR] = CORRUPT
                        break
                    if dec:
                        coded = _fl_byp(dec, st, buf, cap, 0, refk)
                        if coded >= rn:
                            st[ERR] = CORRUPT
                            break
                        plain = _cv(K_REF, coded, 0, rn, max_dqp, lv, dec, ks, kst)
                    else:
                        plain = fields[i, F_REF]
                        coded = _fl_byp(dec, st, buf, cap,
                                        _cv(K_REF, plain, 0, rn, max_dqp, lv, dec, ks, kst), refk)
                    _trace(trace, trn, K_REF, plain, coded)
                    fields[i, F_REF] = plain
                else:
                    fields[i, F_REF] = 0

                ax, ay = abs(fields[i, F_MVDX]), abs(fields[i, F_MVDY])
                g0x = _reg(dec, st, buf, states, mps, cap, C_MVD_G0, 1 if ax > 0 else 0)
                g0y = _reg(dec, st, buf, states, mps, cap, C_MVD_G0, 1 if ay > 0 else 0)
                g1x = 0
                g1y = 0
                if g0x:
                    g1x = _reg(dec, st, buf, states, mps, cap, C_MVD_G1, 1 if ax > 1 else 0)
                if g0y:
                    g1y = _reg(dec, st, buf, states, mps, cap, C_MVD_G1, 1 if ay > 1 else 0)
                for comp in range(2):
                    g0 = g0x if comp == 0 else g0y
                    g1 = g1x if comp == 0 else g1y
                    fidx = F_MVDX if comp == 0 else F_MVDY
                    kval = K_MVD_H if comp == 0 else K_MVD_V
                    ksign = K_SIGN_H if comp == 0 else K_SIGN_V
                    plain_mag = g0 + g1
                    coded_mag = plain_mag
                    if g1:
                        if dec:
                            coded_mag = 2 + _eg_byp(dec, st, buf, cap, 0, 1)
                            plain_mag = _cv(kval, coded_mag, 0, rn, max_dqp, lv, dec, ks, kst)
                        else:
                            plain_mag = abs(fields[i, fidx])
                            coded_mag = _cv(kval, plain_mag, 0, rn, max_dqp, lv, dec, ks, kst)
                            _eg_byp(dec, st, buf, cap, coded_mag - 2, 1)
                    _trace(trace, trn, kval, plain_mag, coded_mag)
                    sgn = 0
                    if g0:
                        if dec:
                            coded = _byp(dec, st, buf, cap, 0)
                            sgn = _cv(ksign, coded, 0, rn, max_dqp, lv, dec, ks, kst)
                        else:
                            sgn = 1 if fields[i, fidx] < 0 else 0
                            coded = _byp(dec, st, buf, cap,
                                         _cv(ksign, sgn, 0, rn, max_dqp, lv, dec, ks, kst))
                        _trace(trace, trn, ksign, sgn, coded)
                    fields[i, fidx] = -plain_mag if sgn else plain_mag

                if dec:
                    coded = _reg(dec, st, buf, states, mps, cap, C_MVP, 0)
                    plain = _cv(K_MVP, coded, 0, rn, max_dqp, lv, dec, ks, kst)
                else:
                    plain = fields[i, F_MVP]
                    coded = _reg(dec, st, buf, states, mps, cap, C_MVP,
                                 _cv(K_MVP, plain, 0, rn, max_dqp, lv, dec, ks, kst))
                _trace(trace, trn, K_MVP, plain, coded)
                fields[i, F_MVP] = plain

        # delta QP: value shift, then the sign of the shifted value
        if not dec:
            plain = fields[i, F_DQP]
            v = _cv(K_DVAL, plain, 0, rn, max_dqp, lv, dec, ks, kst)
            a = abs(v)
            _tr_reg(dec, st, buf, states, mps, cap, a, 5, C_DQP, 2)
            if a >= 5:
                _eg_byp(dec, st, buf, cap, a - 5, 0)
            _trace(trace, trn, K_DVAL, plain, v)
            if a:
                sb = 1 if v < 0 else 0
                sb2 = _cv(K_DSIGN, sb, 0, rn, max_dqp, lv, dec, ks, kst)
                _byp(dec, st, buf, cap, sb2)
                _trace(trace, trn, K_DSIGN, sb, sb2)
        else:
            a = _tr_reg(dec, st, buf, states, mps, cap, 0, 5, C_DQP, 2)
            if a >= 5:
                a += _eg_byp(dec, st, buf, cap, 0, 0)
            if a > max_dqp:
                st[ERR] = CORRUPT
                break
            sb2 = 0
            if a:
                sb2 = _byp(dec, st, buf, cap, 0)
            # the encoder drew the value shift first and the sign second
            s_val = 0
            if lv and COVERAGE[lv, K_DVAL]:
                s_val = ks_uniform(ks, kst, 2 * max_dqp + 1)
            sb = sb2
            if a:
                sb = _cv(K_DSIGN, sb2, 0, rn, max_dqp, lv, True, ks, kst)
            plain = -a if sb else a
            if lv and COVERAGE[lv, K_DVAL]:
                plain = dec_dqp_value(plain, max_dqp, s_val)
            _trace(trace, trn, K_DVAL, plain, -a if sb else a)
            if a:
                _trace(trace, trn, K_DSIGN, sb, sb2)
            fields[i, F_DQP] = plain

        for t in range(ntu):
            _code_tu(dec, st, buf, states, mps, cap, coefs[i, t], tu, t < nl, lv, max_dqp,
                     ks, kst, trace, trn)
            if st[ERR]:
                break
        if st[ERR]:
            break

    if st[ERR] == ERR_OVERFLOW and not dec:
        return BUF_OVERFLOW, 0
    if st[ERR]:
        return CORRUPT, 0
    if kst[2]:
        return KS_OVERFLOW, 0
    if dec:
        dec_finish(st, buf)
        if st[ERR]:
            return CORRUPT, 0
        return OK, nbits
    return OK, enc_finish(st, buf)


# ---------------------------------------------------------------- python drivers

_NO_TRACE = np.zeros((0, 3), dtype=np.int64)


class FrameCorruptError(ValueError):
    pass


def _ks_window(drawer, nbytes):
    if drawer is None:
        return np.zeros(1, dtype=np.uint8), np.array([0, 0, 0], dtype=np.int64)
    ks, off = drawer.export(nbytes)
    return ks, np.array([off, 8 * nbytes, 0], dtype=np.int64)


def _ks_estimate(n_cu, ntu, tu):
    return max(256, n_cu * (ntu * tu * tu + 64) // 4)


def _trace_array(want, n_cu, ntu, tu):
    if not want:
        return _NO_TRACE
    return np.zeros((n_cu * (ntu * (3 * tu * tu + 12) + 24), 3), dtype=np.int64)


def encode_frame(fields, coefs, cu_roi, is_inter, rn, tu, max_dqp, level, qp, drawer,
                 trace=False):
    """Serialise one analysed frame; returns ``(cabac bytes, trace or None)``.

    ``drawer`` is advanced by exactly the number of keystream bits consumed.
    """
    n_cu, ntu = coefs.shape[0], coefs.shape[1]
    nbuf = 1024 + n_cu * ntu * tu * tu * 2
    nks = _ks_estimate(n_cu, ntu, tu)
    tr = _trace_array(trace, n_cu, ntu, tu)
    lv = int(level) if drawer is not None else 0
    while True:
        buf = np.zeros(nbuf, dtype=np.uint8)
        ks, kst = _ks_window(drawer, nks)
        start = int(kst[0])
        trn = np.zeros(1, dtype=np.int64)
        status, nbits = serialize_frame(False, fields, coefs, cu_roi, is_inter, rn, tu, max_dqp,
                                        lv, qp, buf, 0, ks, kst, tr, trn)
        if status == BUF_OVERFLOW:
            nbuf *= 2
        elif status == KS_OVERFLOW:
            nks *= 2
        elif status == OK:
            break
        else:
            raise RuntimeError(f"encoder serialisation failed with status {status}")
    if drawer is not None:
        drawer.advance(int(kst[0]) - start)
    return buf[:(nbits + 7) // 8].tobytes(), (tr[:trn[0]].copy() if trace else None)


def parse_frame(data, n_cu, ntu, cu_roi, is_inter, rn, tu, max_dqp, level, qp, drawer,
                trace=False):
    """Inverse of :func:`encode_frame`; returns ``(fields, coefs, trace or None)``."""
    from .layout import N_FIELDS
    buf = np.frombuffer(data, dtype=np.uint8).copy()
    nks = _ks_estimate(n_cu, ntu, tu)
    tr = _trace_array(trace, n_cu, ntu, tu)
    lv = int(level) if drawer is not None else 0
    while True:
        fields = np.zeros((n_cu, N_FIELDS), dtype=np.int64)
        coefs = np.zeros((n_cu, ntu, 64), dtype=np.int64)
        ks, kst = _ks_window(drawer, nks)
        start = int(kst[0])
        trn = np.zeros(1, dtype=np.int64)
        status, _ = serialize_frame(True, fields, coefs, cu_roi, is_inter, rn, tu, max_dqp,
                                    lv, qp, buf, 8 * len(buf), ks, kst, tr, trn)
        if status == KS_OVERFLOW:
            nks *= 2
            continue
        if status != OK:
            raise FrameCorruptError("payload does not parse")
        break
    if drawer is not None:
        drawer.advance(int(kst[0]) - start)
    return fields, coefs, (tr[:trn[0]].copy() if trace else None)

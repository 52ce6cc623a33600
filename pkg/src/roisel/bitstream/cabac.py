"""Binary arithmetic coder with adaptive (regular) and equiprobable (bypass) bins.

This is the H.264/H.265 M-coder: 9-bit range register, 64-state probability
model with the standard LPS range and transition tables, bit-serial
renormalisation with outstanding-bit handling, and a terminating flush.

Every bypass bin doubles ``low`` and emits exactly one (possibly deferred)
bit, and bypass bins never touch ``range``.  The coded length is therefore::

    bits = (#renormalisation shifts of regular bins) + (#bypass bins) + 9

which does not depend on bypass bin *values* at all.

The low-level functions are numba kernels operating on a small state vector
so the codec can drive them from compiled loops; :func:`encode_bins` and
:func:`decode_bins` wrap them for plain Python use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .binarization import BitstreamCorruptError

# fmt: off
RANGE_TAB_LPS = np.array([
    [128, 176, 208, 240], [128, 167, 197, 227], [128, 158, 187, 216], [123, 150, 178, 205],
    [116, 142, 169, 195], [111, 135, 160, 185], [105, 128, 152, 175], [100, 122, 144, 166],
    [95, 116, 137, 158], [90, 110, 130, 150], [85, 104, 123, 142], [81, 99, 117, 135],
    [77, 94, 111, 128], [73, 89, 105, 122], [69, 85, 100, 116], [66, 80, 95, 110],
    [62, 76, 90, 104], [59, 72, 86, 99], [56, 69, 81, 94], [53, 65, 77, 89],
    [51, 62, 73, 85], [48, 59, 69, 80], [46, 56, 66, 76], [43, 53, 63, 72],
    [41, 50, 59, 69], [39, 48, 56, 65], [37, 45, 54, 62], [35, 43, 51, 59],
    [33, 41, 48, 56], [32, 39, 46, 53], [30, 37, 43, 50], [29, 35, 41, 48],
    [27, 33, 39, 45], [26, 31, 37, 43], [24, 30, 35, 41], [23, 28, 33, 39],
    [22, 27, 32, 37], [21, 26, 30, 35], [20, 24, 29, 33], [19, 23, 27, 31],
    [18, 22, 26, 30], [17, 21, 25, 28], [16, 20, 23, 27], [15, 19, 22, 25],
    [14, 18, 21, 24], [14, 17, 20, 23], [13, 16, 19, 22], [12, 15, 18, 21],
    [12, 14, 17, 20], [11, 14, 16, 19], [11, 13, 15, 18], [10, 12, 15, 17],
    [10, 12, 14, 16], [9, 11, 13, 15], [9, 11, 12, 14], [8, 10, 12, 14],
    [8, 9, 11, 13], [7, 9, 11, 12], [7, 9, 10, 12], [7, 8, 10, 11],
    [6, 8, 9, 11], [6, 7, 9, 10], [6, 7, 8, 9], [2, 2, 2, 2],
], dtype=np.int64)

TRANS_IDX_LPS = np.array([
    0, 0, 1, 2, 2, 4, 4, 5, 6, 7, 8, 9, 9, 11, 11, 12,
    13, 13, 15, 15, 16, 16, 18, 18, 19, 19, 21, 21, 22, 22, 23, 24,
    24, 25, 26, 26, 27, 27, 28, 29, 29, 30, 30, 30, 31, 32, 32, 33,
    33, 33, 34, 34, 35, 35, 35, 36, 36, 36, 37, 37, 37, 38, 38, 63,
], dtype=np.int64)
# fmt: on

# engine state vector layout
LOW, RANGE, OUTST, FIRST, BITPOS, OFFSET, READPOS, NBITS, ERR, CAP_ON, CAP_N, NREG = range(12)
STATE_SIZE = 12

ERR_NONE = 0
ERR_CORRUPT = 1
ERR_OVERFLOW = 2

READ_SLACK_BITS = 16

BYPASS = -1


def new_state() -> np.ndarray:
    return np.zeros(STATE_SIZE, dtype=np.int64)


# ---------------------------------------------------------------- contexts

@njit(cache=True)
def init_context(init_value, qp, states, mps, ctx):
    slope = init_value >> 4
    offset = init_value & 15
    m = slope * 5 - 45
    n = (offset << 3) - 16
    q = min(max(qp, 0), 51)
    pre = min(max(((m * q) >> 4) + n, 1), 126)
    if pre <= 63:
        states[ctx] = 63 - pre
        mps[ctx] = 0
    else:
        states[ctx] = pre - 64
        mps[ctx] = 1


@dataclass
class ContextModel:
    """Probability states (0..62) and MPS values for a set of context ids."""

    states: np.ndarray
    mps: np.ndarray

    @classmethod
    def from_qp(cls, init_values, qp: int) -> "ContextModel":
        init_values = np.asarray(init_values, dtype=np.int64)
        states = np.zeros(len(init_values), dtype=np.int64)
        mps = np.zeros(len(init_values), dtype=np.int64)
        for i, iv in enumerate(init_values):
            init_context(int(iv), qp, states, mps, i)
        return cls(states, mps)

    @classmethod
    def uniform(cls, n: int, qp: int = 26) -> "ContextModel":
        return cls.from_qp([154] * n, qp)

    def copy(self) -> "ContextModel":
        return ContextModel(self.states.copy(), self.mps.copy())

    def __len__(self) -> int:
        return len(self.states)


# ---------------------------------------------------------------- encoder

@njit(cache=True)
def _write_bit(st, buf, b):
    pos = st[BITPOS]
    if pos >= buf.shape[0] * 8:
        st[ERR] = ERR_OVERFLOW
        return
    if b:
        buf[pos >> 3] |= np.uint8(0x80 >> (pos & 7))
    st[BITPOS] = pos + 1


@njit(cache=True)
def _put_bit(st, buf, b):
    if st[FIRST]:
        st[FIRST] = 0
    else:
        _write_bit(st, buf, b)
    while st[OUTST] > 0:
        _write_bit(st, buf, 1 - b)
        st[OUTST] -= 1


@njit(cache=True)
def _capture(st, cap, b, ctx):
    if st[CAP_ON]:
        n = st[CAP_N]
        if 2 * n + 1 < cap.shape[0]:
            cap[2 * n] = b
            cap[2 * n + 1] = ctx
        st[CAP_N] = n + 1


@njit(cache=True)
def enc_start(st):
    st[LOW] = 0
    st[RANGE] = 510
    st[OUTST] = 0
    st[FIRST] = 1
    st[BITPOS] = 0
    st[ERR] = 0
    st[CAP_N] = 0
    st[NREG] = 0


@njit(cache=True)
def _renorm_enc(st, buf):
    while st[RANGE] < 256:
        low = st[LOW]
        if low < 256:
            _put_bit(st, buf, 0)
        elif low >= 512:
            st[LOW] = low - 512
            _put_bit(st, buf, 1)
        else:
            st[LOW] = low - 256
            st[OUTST] += 1
        st[RANGE] <<= 1
        st[LOW] <<= 1


@njit(cache=True)
def enc_regular(st, buf, states, mps, ctx, b, cap):
    _capture(st, cap, b, ctx)
    st[NREG] += 1
    s = states[ctx]
    r_lps = RANGE_TAB_LPS[s, (st[RANGE] >> 6) & 3]
    st[RANGE] -= r_lps
    if b != mps[ctx]:
        st[LOW] += st[RANGE]
        st[RANGE] = r_lps
        if s == 0:
            mps[ctx] = 1 - mps[ctx]
        states[ctx] = TRANS_IDX_LPS[s]
    elif s < 62:
        states[ctx] = s + 1
    _renorm_enc(st, buf)


@njit(cache=True)
def enc_bypass(st, buf, b, cap):
    _capture(st, cap, b, -1)
    st[LOW] <<= 1
    if b:
        st[LOW] += st[RANGE]
    low = st[LOW]
    if low >= 1024:
        _put_bit(st, buf, 1)
        st[LOW] = low - 1024
    elif low < 512:
        _put_bit(st, buf, 0)
    else:
        st[LOW] = low - 512
        st[OUTST] += 1


@njit(cache=True)
def enc_finish(st, buf):
    """Code the end-of-data terminating bin and flush; returns the bit length."""
    st[RANGE] -= 2
    st[LOW] += st[RANGE]
    st[RANGE] = 2
    _renorm_enc(st, buf)
    _put_bit(st, buf, (st[LOW] >> 9) & 1)
    v = ((st[LOW] >> 7) & 3) | 1
    _write_bit(st, buf, (v >> 1) & 1)
    _write_bit(st, buf, v & 1)
    return st[BITPOS]


# ---------------------------------------------------------------- decoder

@njit(cache=True)
def _read_bit(st, buf):
    pos = st[READPOS]
    st[READPOS] = pos + 1
    if pos < st[NBITS]:
        return (buf[pos >> 3] >> (7 - (pos & 7))) & 1
    if pos >= st[NBITS] + READ_SLACK_BITS:
        st[ERR] = ERR_CORRUPT
    return 0


@njit(cache=True)
def dec_start(st, buf, nbits):
    st[NBITS] = nbits
    st[READPOS] = 0
    st[ERR] = 0
    st[CAP_N] = 0
    st[NREG] = 0
    st[RANGE] = 510
    v = 0
    for _ in range(9):
        v = (v << 1) | _read_bit(st, buf)
    st[OFFSET] = v
    if v >= 510:
        st[ERR] = ERR_CORRUPT


@njit(cache=True)
def dec_regular(st, buf, states, mps, ctx, cap):
    st[NREG] += 1
    s = states[ctx]
    r_lps = RANGE_TAB_LPS[s, (st[RANGE] >> 6) & 3]
    st[RANGE] -= r_lps
    if st[OFFSET] >= st[RANGE]:
        b = 1 - mps[ctx]
        st[OFFSET] -= st[RANGE]
        st[RANGE] = r_lps
        if s == 0:
            mps[ctx] = 1 - mps[ctx]
        states[ctx] = TRANS_IDX_LPS[s]
    else:
        b = mps[ctx]
        if s < 62:
            states[ctx] = s + 1
    while st[RANGE] < 256:
        st[RANGE] <<= 1
        st[OFFSET] = (st[OFFSET] << 1) | _read_bit(st, buf)
    _capture(st, cap, b, ctx)
    return b


@njit(cache=True)
def dec_bypass(st, buf, cap):
    st[OFFSET] = (st[OFFSET] << 1) | _read_bit(st, buf)
    if st[OFFSET] >= st[RANGE]:
        st[OFFSET] -= st[RANGE]
        b = 1
    else:
        b = 0
    _capture(st, cap, b, -1)
    return b


@njit(cache=True)
def dec_finish(st, buf):
    """Decode the terminating bin; flags corruption unless it reads as 1."""
    st[RANGE] -= 2
    if st[OFFSET] < st[RANGE]:
        st[ERR] = ERR_CORRUPT
        return 0
    return 1


# ---------------------------------------------------------------- python API

@dataclass(frozen=True)
class Payload:
    data: bytes
    bit_length: int

    def __len__(self) -> int:
        return len(self.data)


_NO_CAPTURE = np.zeros(2, dtype=np.int64)


@njit(cache=True)
def _encode_bin_array(values, ctxs, states, mps, buf, st, cap):
    enc_start(st)
    for i in range(values.shape[0]):
        if ctxs[i] < 0:
            enc_bypass(st, buf, values[i], cap)
        else:
            enc_regular(st, buf, states, mps, ctxs[i], values[i], cap)
    return enc_finish(st, buf)


@njit(cache=True)
def _decode_bin_array(ctxs, states, mps, buf, nbits, st, out, cap):
    dec_start(st, buf, nbits)
    for i in range(ctxs.shape[0]):
        if ctxs[i] < 0:
            out[i] = dec_bypass(st, buf, cap)
        else:
            out[i] = dec_regular(st, buf, states, mps, ctxs[i], cap)
        if st[ERR]:
            return st[ERR]
    dec_finish(st, buf)
    return st[ERR]


def _as_arrays(bins):
    """Accept ``[(value, ctx), ...]`` with ``ctx = None/BYPASS`` for bypass bins."""
    values = np.fromiter((int(b) for b, _ in bins), dtype=np.int64, count=len(bins))
    ctxs = np.fromiter((BYPASS if c is None else int(c) for _, c in bins),
                       dtype=np.int64, count=len(bins))
    return values, ctxs


def encode_bins(bins, ctx: ContextModel) -> Payload:
    """Arithmetic-code a bin string.  ``ctx`` is updated in place."""
    if isinstance(bins, tuple) and len(bins) == 2 and isinstance(bins[0], np.ndarray):
        values, ctxs = (np.asarray(a, dtype=np.int64) for a in bins)
    else:
        values, ctxs = _as_arrays(list(bins))
    if ctxs.size and ctxs.max() >= len(ctx):
        raise KeyError(f"context id {int(ctxs.max())} unknown to a model of {len(ctx)}")
    buf = np.zeros(values.size // 8 + values.size // 2 + 64, dtype=np.uint8)
    st = new_state()
    nbits = _encode_bin_array(values, ctxs, ctx.states, ctx.mps, buf, st, _NO_CAPTURE)
    if st[ERR]:
        raise RuntimeError("bin buffer overflow")
    return Payload(buf[:(nbits + 7) // 8].tobytes(), int(nbits))


def decode_bins(payload: Payload, modes, ctx: ContextModel) -> list[int]:
    """Inverse of :func:`encode_bins`; ``modes`` gives the context id (or None) per bin."""
    ctxs = np.fromiter((BYPASS if c is None else int(c) for c in modes), dtype=np.int64)
    buf = np.frombuffer(payload.data, dtype=np.uint8).copy()
    out = np.zeros(ctxs.size, dtype=np.int64)
    err = _decode_bin_array(ctxs, ctx.states, ctx.mps, buf, payload.bit_length,
                            new_state(), out, _NO_CAPTURE)
    if err:
        raise BitstreamCorruptError("payload exhausted or terminated early")
    return out.tolist()

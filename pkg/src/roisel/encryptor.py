"""Three-level element cipher for syntax elements of ROI-tile coding units.

Level coverage (each level strictly contains the previous one's kinds)::

    basic     MVD sign + EG_1 suffix, coefficient sign, remaining-level suffix,
              DQP sign, merge index, reference index suffix
    enhanced  basic + MPM index, luma remaining mode, chroma mode, MVP index,
              DQP value
    advanced  enhanced + coefficient scrambling (see ``edge_scrambler``)

Every basic-level target lives in bypass bins whose count does not depend on
the value, so the basic level leaves the coded length unchanged.  Each covered
element consumes one draw from the keystream; elements with nothing to
encrypt (an empty suffix, a single-entry reference window) consume none.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numba import njit

from .keystream import KeystreamDrawer, ks_bits, ks_uniform, new_ks_state
from .syntax import N_KINDS, Kind, SyntaxElement


class EncryptionLevel(IntEnum):
    NONE = 0
    BASIC = 1
    ENHANCED = 2
    ADVANCED = 3

    @classmethod
    def parse(cls, name: str | None) -> "EncryptionLevel":
        if name is None:
            return cls.NONE
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown level {name!r}; use basic, enhanced or advanced") from None


BASIC_KINDS = frozenset({
    Kind.MVD_SIGN_H, Kind.MVD_SIGN_V, Kind.MVD_VAL_H, Kind.MVD_VAL_V,
    Kind.COEF_SIGN, Kind.COEF_REM, Kind.DQP_SIGN, Kind.MERGE_IDX, Kind.REF_IDX,
})
ENHANCED_KINDS = BASIC_KINDS | {
    Kind.MPM_IDX, Kind.LUMA_REM, Kind.CHROMA_IPM, Kind.MVP_IDX, Kind.DQP_VALUE,
}
ADVANCED_KINDS = ENHANCED_KINDS


def covered_kinds(level: EncryptionLevel) -> frozenset:
    return {EncryptionLevel.NONE: frozenset(), EncryptionLevel.BASIC: BASIC_KINDS,
            EncryptionLevel.ENHANCED: ENHANCED_KINDS,
            EncryptionLevel.ADVANCED: ADVANCED_KINDS}[EncryptionLevel(level)]


COVERAGE = np.zeros((4, N_KINDS), dtype=np.bool_)
for _lvl in EncryptionLevel:
    for _k in covered_kinds(_lvl):
        COVERAGE[_lvl, _k] = True


class InternalCipherError(RuntimeError):
    pass


# ------------------------------------------------------------ element ops

@njit(cache=True)
def enc_bit(bit, s):
    return bit ^ s


@njit(cache=True)
def enc_xor(value, s):
    return value ^ s


@njit(cache=True)
def enc_mod(value, s, m):
    return (value + s) % m


@njit(cache=True)
def dec_mod(value, s, m):
    return (value - s) % m


@njit(cache=True)
def enc_merge_idx(idx, s):
    return (idx + s) % 5


@njit(cache=True)
def dec_merge_idx(idx, s):
    return (idx - s) % 5


@njit(cache=True)
def enc_mpm_idx(idx, s):
    return (idx + s) % 3


@njit(cache=True)
def dec_mpm_idx(idx, s):
    return (idx - s) % 3


@njit(cache=True)
def enc_chroma_ipm(mode, s):
    return (mode + s) % 5


@njit(cache=True)
def dec_chroma_ipm(mode, s):
    return (mode - s) % 5


@njit(cache=True)
def enc_luma_ipm_rem(code, s):
    return (code ^ s) & 31


@njit(cache=True)
def enc_ref_idx(v, rn, s):
    if rn == 3:
        return (v + s) % 3
    if rn == 2 or rn == 4:
        return v ^ s
    return v


@njit(cache=True)
def dec_ref_idx(v, rn, s):
    if rn == 3:
        return (v - s) % 3
    return enc_ref_idx(v, rn, s)


@njit(cache=True)
def enc_dqp_value(dqp, max_dqp, s):
    return (dqp + max_dqp + s) % (2 * max_dqp + 1) - max_dqp


@njit(cache=True)
def dec_dqp_value(dqp, max_dqp, s):
    return (dqp + max_dqp - s) % (2 * max_dqp + 1) - max_dqp


@njit(cache=True)
def eg1_suffix_split(v):
    """(class base, suffix bit count) of EG_1(v)."""
    m = 0
    while ((v >> 1) + 1) >> (m + 1):
        m += 1
    return ((1 << m) - 1) << 1, m + 1


@njit(cache=True)
def enc_mvd_suffix(magnitude, s):
    """XOR the EG_1 suffix of ``|mvd| - 2``; magnitudes below 2 carry no suffix."""
    if magnitude < 2:
        return magnitude
    v = magnitude - 2
    base, _ = eg1_suffix_split(v)
    return 2 + base + ((v - base) ^ s)


@njit(cache=True)
def mvd_suffix_len(magnitude):
    if magnitude < 2:
        return 0
    return eg1_suffix_split(magnitude - 2)[1]


@njit(cache=True)
def enc_coef_suffix(rem, k, s):
    """XOR the k-bit suffix of a non-escaped remaining level."""
    if k == 0 or rem >= (4 << k):
        return rem
    return rem ^ s


@njit(cache=True)
def coef_suffix_len(rem, k):
    if k == 0 or rem >= (4 << k):
        return 0
    return k


# ------------------------------------------------------------ dispatch

@njit(cache=True)
def cipher_value(kind, value, k, rn, max_dqp, level, decrypt, ks, kst):
    """Encrypt (or decrypt) one element value, drawing from ``ks`` at ``kst``.

    Shared by the compiled codec and the Python :func:`apply_level`.
    """
    if not COVERAGE[level, kind]:
        return value
    if kind == 7 or kind == 8 or kind == 18 or kind == 20:  # signs
        return enc_bit(value, ks_bits(ks, kst, 1))
    if kind == 9 or kind == 10:  # MVD magnitude
        n = mvd_suffix_len(value)
        if n == 0:
            return value
        return enc_mvd_suffix(value, ks_bits(ks, kst, n))
    if kind == 19:  # remaining level
        n = coef_suffix_len(value, k)
        if n == 0:
            return value
        return enc_coef_suffix(value, k, ks_bits(ks, kst, n))
    if kind == 6:  # merge index
        s = ks_uniform(ks, kst, 5)
        return dec_merge_idx(value, s) if decrypt else enc_merge_idx(value, s)
    if kind == 12:  # reference index
        if rn == 2:
            return enc_ref_idx(value, rn, ks_bits(ks, kst, 1))
        if rn == 3:
            s = ks_uniform(ks, kst, 3)
            return dec_ref_idx(value, rn, s) if decrypt else enc_ref_idx(value, rn, s)
        if rn == 4:
            return enc_ref_idx(value, rn, ks_bits(ks, kst, 2))
        return value
    if kind == 2:
        s = ks_uniform(ks, kst, 3)
        return dec_mpm_idx(value, s) if decrypt else enc_mpm_idx(value, s)
    if kind == 3:
        return enc_luma_ipm_rem(value, ks_bits(ks, kst, 5))
    if kind == 4:
        s = ks_uniform(ks, kst, 5)
        return dec_chroma_ipm(value, s) if decrypt else enc_chroma_ipm(value, s)
    if kind == 11:
        return enc_bit(value, ks_bits(ks, kst, 1))
    if kind == 21:
        s = ks_uniform(ks, kst, 2 * max_dqp + 1)
        return dec_dqp_value(value, max_dqp, s) if decrypt else enc_dqp_value(value, max_dqp, s)
    return value


@njit(cache=True)
def cipher_dqp(dqp, max_dqp, level, decrypt, ks, kst):
    """CU-level DQP: value shift first, then the sign of the shifted value.

    Decryption draws in the same order and undoes the two steps in reverse.
    """
    if level == 0:
        return dqp
    if not decrypt:
        v = cipher_value(21, dqp, 0, 0, max_dqp, level, False, ks, kst)
        if v != 0:
            sign = cipher_value(20, 1 if v < 0 else 0, 0, 0, max_dqp, level, False, ks, kst)
            v = -abs(v) if sign else abs(v)
        return v
    s_val = 0
    if COVERAGE[level, 21]:
        s_val = ks_uniform(ks, kst, 2 * max_dqp + 1)
    v = dqp
    if v != 0:
        sign = (1 if v < 0 else 0) ^ ks_bits(ks, kst, 1)
        v = -abs(v) if sign else abs(v)
    if COVERAGE[level, 21]:
        v = dec_dqp_value(v, max_dqp, s_val)
    return v


# ------------------------------------------------------------ python API

@dataclass(frozen=True)
class CipherContext:
    rn: int = 1
    max_dqp: int = 12
    in_roi: bool = True
    decrypt: bool = False

    def __post_init__(self):
        if not 1 <= self.rn <= 4:
            raise ValueError("RN must be in [1, 4]")


def apply_level(element: SyntaxElement, ctx: CipherContext, level: EncryptionLevel,
                drawer: KeystreamDrawer) -> SyntaxElement:
    if not isinstance(element.kind, Kind):
        raise InternalCipherError(f"unknown element kind {element.kind!r}")
    if not ctx.in_roi or level == EncryptionLevel.NONE:
        return element
    nbytes = 64
    while True:
        ks, off = drawer.export(nbytes)
        kst = new_ks_state(off, nbytes)
        out = cipher_value(int(element.kind), element.value, element.k, ctx.rn, ctx.max_dqp,
                           int(level), ctx.decrypt, ks, kst)
        if not kst[2]:
            break
        nbytes *= 4
    drawer.advance(int(kst[0]) - off)
    return element.with_value(int(out))

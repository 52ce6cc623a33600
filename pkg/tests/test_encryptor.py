import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roisel.bitstream import eg_decode, eg_encode, tr_decode, tr_encode
from roisel.encryptor import (BASIC_KINDS, ENHANCED_KINDS, CipherContext, EncryptionLevel,
                              InternalCipherError, apply_level, cipher_dqp, covered_kinds,
                              dec_chroma_ipm, dec_dqp_value, dec_merge_idx, dec_mpm_idx,
                              dec_ref_idx, enc_bit, enc_chroma_ipm, enc_coef_suffix,
                              enc_dqp_value, enc_luma_ipm_rem, enc_merge_idx, enc_mpm_idx,
                              enc_mvd_suffix, enc_ref_idx)
from roisel.keystream import KeystreamDrawer
from roisel.syntax import Kind, SyntaxElement

KEY = bytes(range(16))
L = EncryptionLevel


def test_bit_ciphers():
    assert enc_bit(0, 1) == 1 and enc_bit(1, 1) == 0
    assert enc_bit(1, 0) == 1
    for b in (0, 1):
        for s in (0, 1):
            assert enc_bit(enc_bit(b, s), s) == b


def test_mvd_suffix_examples():
    # |mvd| = 5 codes v = 3 with EG_1 suffix "01"; s = 0b11 turns it into "10"
    assert eg_encode(3, 1).suffix == "01"
    assert enc_mvd_suffix(5, 0b11) == 6
    assert eg_encode(4, 1).suffix == "10"
    assert enc_mvd_suffix(0, 1) == 0 and enc_mvd_suffix(1, 1) == 1


def test_mvd_suffix_matches_eg1_table():
    for v in range(17):
        code = eg_encode(v, 1)
        n = len(code.suffix)
        for s in range(1 << n):
            flipped = format(int(code.suffix, 2) ^ s, f"0{n}b")
            want, _ = eg_decode(code.prefix + flipped, 1)
            got = enc_mvd_suffix(v + 2, s) - 2
            assert got == want
            assert (got != v) == (s != 0)


def test_coef_suffix_matches_tr_table():
    assert enc_coef_suffix(3, 0, 1) == 3
    assert tr_encode(1, 1, 8).suffix == "1" and enc_coef_suffix(1, 1, 1) == 0
    for k in range(1, 5):
        c_max = 4 << k
        for rem in range(c_max):
            code = tr_encode(rem, k, c_max)
            for s in range(1 << k):
                flipped = format(int(code.suffix, 2) ^ s, f"0{k}b")
                want, _ = tr_decode(code.prefix + flipped, k, c_max)
                got = enc_coef_suffix(rem, k, s)
                assert got == want
                assert got - rem == int(flipped, 2) - int(code.suffix, 2)
        # escaped values carry no cipherable suffix
        assert enc_coef_suffix(c_max + 3, k, 1) == c_max + 3


def test_modular_examples():
    assert enc_merge_idx(2, 3) == 0
    assert enc_mpm_idx(1, 2) == 0
    assert enc_chroma_ipm(4, 1) == 0
    assert enc_luma_ipm_rem(0, 31) == 31
    assert enc_ref_idx(1, 2, 1) == 0
    assert enc_ref_idx(2, 3, 2) == 1
    assert enc_ref_idx(0, 1, 1) == 0
    assert enc_dqp_value(12, 12, 1) == -12
    for f, v in ((enc_merge_idx, 3), (enc_mpm_idx, 2), (enc_chroma_ipm, 4)):
        assert f(v, 0) == v
    assert enc_dqp_value(-5, 12, 0) == -5


@pytest.mark.parametrize("enc,dec,m", [
    (enc_merge_idx, dec_merge_idx, 5), (enc_mpm_idx, dec_mpm_idx, 3),
    (enc_chroma_ipm, dec_chroma_ipm, 5),
])
def test_modular_inversion_exhaustive(enc, dec, m):
    for v in range(m):
        images = {enc(v, s) for s in range(m)}
        assert images == set(range(m))
        for s in range(m):
            assert dec(enc(v, s), s) == v


def test_luma_rem_stays_in_alphabet():
    for c in range(32):
        for s in range(32):
            e = enc_luma_ipm_rem(c, s)
            assert 0 <= e < 32 and enc_luma_ipm_rem(e, s) == c


@pytest.mark.parametrize("rn,alphabet", [(2, 2), (3, 3), (4, 4)])
def test_ref_idx_inversion(rn, alphabet):
    for v in range(alphabet):
        for s in range(alphabet):
            e = enc_ref_idx(v, rn, s)
            assert 0 <= e < alphabet and dec_ref_idx(e, rn, s) == v


def test_dqp_value_inversion_table():
    m = 12
    for d in range(-m, m + 1):
        for s in range(2 * m + 1):
            e = enc_dqp_value(d, m, s)
            assert -m <= e <= m and dec_dqp_value(e, m, s) == d


def _ks(bits: str):
    n = (len(bits) + 7) // 8
    raw = int(bits.ljust(8 * n, "0"), 2).to_bytes(n, "big")
    return np.frombuffer(raw, dtype=np.uint8), np.array([0, len(bits), 0], dtype=np.int64)


def test_dqp_sign_flip_and_zero():
    ks, kst = _ks("1")
    assert cipher_dqp(3, 12, int(L.BASIC), False, ks, kst) == -3
    ks, kst = _ks("1")
    assert cipher_dqp(0, 12, int(L.BASIC), False, ks, kst) == 0
    assert kst[0] == 0  # no sign coded, no draw


def new_state(off):
    return np.array([off, 8 * 64, 0], dtype=np.int64)


def test_dqp_round_trip_all_levels():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        lvl = int(rng.integers(0, 4))
        m = int(rng.integers(1, 27))
        d = int(rng.integers(-m, m + 1))
        key = rng.bytes(16)
        a, b = KeystreamDrawer(key, 0), KeystreamDrawer(key, 0)
        ka, oa = a.export(64)
        kb, ob = b.export(64)
        sa, sb = new_state(oa), new_state(ob)
        e = cipher_dqp(d, m, lvl, False, ka, sa)
        assert -m <= e <= m
        assert cipher_dqp(e, m, lvl, True, kb, sb) == d
        assert sa[0] == sb[0]


def test_coverage_nesting():
    assert covered_kinds(L.NONE) == frozenset()
    assert BASIC_KINDS < ENHANCED_KINDS
    assert covered_kinds(L.ENHANCED) <= covered_kinds(L.ADVANCED)
    assert Kind.LUMA_REM not in BASIC_KINDS
    for k in (Kind.SIG, Kind.GT1, Kind.GT2, Kind.LAST_POS, Kind.CBF, Kind.PRED_MODE):
        assert k not in covered_kinds(L.ADVANCED)


def test_level_names():
    assert L.parse(None) is L.NONE
    assert L.parse(" Enhanced ") is L.ENHANCED
    with pytest.raises(ValueError):
        L.parse("extreme")


def test_basic_leaves_luma_rem_alone():
    d = KeystreamDrawer(KEY, 0)
    el = SyntaxElement(Kind.LUMA_REM, 17)
    assert apply_level(el, CipherContext(), L.BASIC, d) == el
    assert d.bits_consumed == 0


def test_non_roi_elements_pass_through():
    d = KeystreamDrawer(KEY, 0)
    for lvl in L:
        for kind in Kind:
            el = SyntaxElement(kind, 1)
            assert apply_level(el, CipherContext(in_roi=False), lvl, d) == el
    assert d.bits_consumed == 0


def test_unknown_kind_is_internal_error():
    with pytest.raises(InternalCipherError):
        apply_level(SyntaxElement(99, 0), CipherContext(), L.BASIC, KeystreamDrawer(KEY, 0))


def test_rn_bounds():
    with pytest.raises(ValueError):
        CipherContext(rn=0)
    with pytest.raises(ValueError):
        CipherContext(rn=5)


@pytest.mark.parametrize("kind,value,k,bits", [
    (Kind.COEF_SIGN, 1, 0, 1), (Kind.MVD_SIGN_H, 0, 0, 1), (Kind.LUMA_REM, 9, 0, 5),
    (Kind.MVP_IDX, 1, 0, 1), (Kind.COEF_REM, 5, 2, 2), (Kind.COEF_REM, 40, 2, 0),
    (Kind.MVD_VAL_V, 1, 0, 0), (Kind.MVD_VAL_V, 9, 0, 3),
])
def test_draw_sizes(kind, value, k, bits):
    d = KeystreamDrawer(KEY, 0)
    apply_level(SyntaxElement(kind, value, k), CipherContext(), L.ENHANCED, d)
    assert d.bits_consumed == bits


def test_single_entry_reference_window_draws_nothing():
    d = KeystreamDrawer(KEY, 0)
    el = SyntaxElement(Kind.REF_IDX, 0)
    assert apply_level(el, CipherContext(rn=1), L.BASIC, d) == el
    assert d.bits_consumed == 0


_ALPHABET = {
    Kind.MVD_SIGN_H: 2, Kind.MVD_SIGN_V: 2, Kind.COEF_SIGN: 2, Kind.DQP_SIGN: 2,
    Kind.MVP_IDX: 2, Kind.MERGE_IDX: 5, Kind.MPM_IDX: 3, Kind.CHROMA_IPM: 5, Kind.LUMA_REM: 32,
    Kind.MVD_VAL_H: 5000, Kind.MVD_VAL_V: 5000, Kind.COEF_REM: 200, Kind.REF_IDX: 4,
    Kind.DQP_VALUE: 25,
}


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(sorted(_ALPHABET)), st.integers(0, 10 ** 6), st.integers(0, 4),
       st.integers(1, 4), st.sampled_from(list(L)), st.binary(min_size=16, max_size=16))
def test_encrypt_then_decrypt_restores(kind, raw, k, rn, lvl, key):
    if kind == Kind.REF_IDX:
        value = raw % rn
    elif kind == Kind.DQP_VALUE:
        value = raw % 25 - 12
    else:
        value = raw % _ALPHABET[kind]
    el = SyntaxElement(kind, value, k)
    enc_d, dec_d = KeystreamDrawer(key, 1), KeystreamDrawer(key, 1)
    e = apply_level(el, CipherContext(rn=rn), lvl, enc_d)
    back = apply_level(e, CipherContext(rn=rn, decrypt=True), lvl, dec_d)
    assert back == el
    assert enc_d.bits_consumed == dec_d.bits_consumed
    if kind not in covered_kinds(lvl):
        assert e == el and enc_d.bits_consumed == 0

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roisel.bitstream import (BYPASS, BitstreamCorruptError, ContextModel, Payload, decode_bins,
                              eg_decode, eg_encode, encode_bins, fl_decode, fl_encode, tr_decode,
                              tr_encode)


def _eg_table(v, k):
    """Exp-Golomb straight from the definition: group sizes 2^k, 2^(k+1), ..."""
    m, base = 0, 0
    while v >= base + (1 << (m + k)):
        base += 1 << (m + k)
        m += 1
    info = format(v - base, f"0{m + k}b") if m + k else ""
    return "0" * m + "1" + info


def _tr_table(v, k, c_max):
    p, p_max = v >> k, c_max >> k
    s = "1" * p + ("0" if p < p_max else "")
    if k and v < c_max:
        s += format(v & ((1 << k) - 1), f"0{k}b")
    return s


def test_eg_examples():
    assert eg_encode(0, 0) == "1"
    assert eg_encode(1, 0) == "010"
    assert eg_encode(0, 1) == "10"


@pytest.mark.parametrize("k", range(4))
def test_eg_matches_definition(k):
    for v in range(600):
        b = eg_encode(v, k)
        assert b.bits == _eg_table(v, k)
        assert b.prefix == b.bits[:b.bits.index("1") + 1]


def test_tr_examples():
    assert tr_encode(0, 0, 4) == "0"
    assert tr_encode(4, 0, 4) == "1111"
    b = tr_encode(3, 1, 8)
    assert (b.prefix, b.suffix) == ("10", "1")


@pytest.mark.parametrize("k", range(5))
def test_tr_matches_definition(k):
    for c_max in (1 << k, 4 << k, 256):
        for v in range(c_max + 1):
            assert tr_encode(v, k, c_max).bits == _tr_table(v, k, c_max)


@pytest.mark.parametrize("k", range(1, 5))
def test_tr_unaligned_cmax_stays_decodable(k):
    # the textbook rule would give cMax and cMax - 1 the same code here
    for c_max in (1, 3, 37, (4 << k) + 1):
        if c_max % (1 << k) == 0:
            continue
        codes = {tr_encode(v, k, c_max).bits for v in range(c_max + 1)}
        assert len(codes) == c_max + 1
        for v in range(c_max + 1):
            b = tr_encode(v, k, c_max)
            assert tr_decode(b.bits, k, c_max) == (v, len(b))


def test_fl_examples():
    assert fl_encode(5, 3) == "101"
    assert fl_encode(0, 1) == "0"
    assert fl_encode(31, 5) == "11111"
    with pytest.raises(ValueError):
        fl_encode(8, 3)


def test_decode_errors():
    with pytest.raises(BitstreamCorruptError):
        eg_decode("000", 0)
    with pytest.raises(BitstreamCorruptError):
        eg_decode("001", 1)
    with pytest.raises(BitstreamCorruptError):
        tr_decode("11", 0, 4)
    with pytest.raises(BitstreamCorruptError):
        fl_decode("10", 3)


def test_decoders_report_position():
    bits = eg_encode(9, 2).bits + tr_encode(5, 1, 8).bits + fl_encode(3, 4).bits
    v1, p = eg_decode(bits, 2)
    v2, p = tr_decode(bits, 1, 8, p)
    v3, p = fl_decode(bits, 4, p)
    assert (v1, v2, v3, p) == (9, 5, 3, len(bits))


def test_bypass_bins_cost_one_bit_each():
    ctx = ContextModel.uniform(4)
    base = encode_bins([(1, 0), (0, 1)], ctx)
    more = encode_bins([(1, 0), (0, 1)] + [(1, None)] * 8, ContextModel.uniform(4))
    assert more.bit_length - base.bit_length == 8


def test_flipping_bypass_values_keeps_length():
    bins = [(1, 2), (0, None), (1, None), (1, 3), (0, None)]
    a = encode_bins(bins, ContextModel.uniform(4))
    for mask in range(8):
        flipped = list(bins)
        for j, pos in enumerate((1, 2, 4)):
            if mask >> j & 1:
                flipped[pos] = (1 - bins[pos][0], None)
        assert encode_bins(flipped, ContextModel.uniform(4)).bit_length == a.bit_length


def test_skewed_regular_bins_compress():
    rng = np.random.default_rng(0)
    bins = [(int(b), 0) for b in rng.random(1000) < 0.05]
    assert encode_bins(bins, ContextModel.uniform(1)).bit_length < 1000


def test_unknown_context():
    with pytest.raises(KeyError):
        encode_bins([(1, 5)], ContextModel.uniform(2))


def test_truncated_payload_is_corrupt():
    rng = np.random.default_rng(1)
    bins = [(int(b), None) for b in rng.integers(0, 2, 200)]
    p = encode_bins(bins, ContextModel.uniform(1))
    short = Payload(p.data[:5], 40)
    with pytest.raises(BitstreamCorruptError):
        decode_bins(short, [None] * 200, ContextModel.uniform(1))


def test_round_trip_ten_thousand_sequences():
    rng = np.random.default_rng(2)
    for _ in range(10_000):
        n = int(rng.integers(1, 120))
        ctxs = np.where(rng.random(n) < 0.4, BYPASS, rng.integers(0, 8, n))
        values = (rng.random(n) < rng.random()).astype(np.int64)
        qp = int(rng.integers(0, 52))
        p = encode_bins((values, ctxs), ContextModel.uniform(8, qp))
        modes = [None if c == BYPASS else int(c) for c in ctxs]
        assert decode_bins(p, modes, ContextModel.uniform(8, qp)) == values.tolist()


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.one_of(st.none(), st.integers(0, 5))),
                min_size=1, max_size=300),
       st.integers(0, 51))
def test_round_trip_property(bins, qp):
    p = encode_bins(bins, ContextModel.uniform(6, qp))
    assert len(p.data) == (p.bit_length + 7) // 8
    assert decode_bins(p, [c for _, c in bins], ContextModel.uniform(6, qp)) == [b for b, _ in bins]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.one_of(st.none(), st.integers(0, 5))),
                min_size=1, max_size=300),
       st.data())
def test_bypass_length_invariance_property(bins, data):
    flips = data.draw(st.lists(st.booleans(), min_size=len(bins), max_size=len(bins)))
    other = [((1 - b) if (c is None and f) else b, c) for (b, c), f in zip(bins, flips)]
    a = encode_bins(bins, ContextModel.uniform(6))
    b = encode_bins(other, ContextModel.uniform(6))
    assert a.bit_length == b.bit_length


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(0, 3))
def test_eg_round_trip_property(v, k):
    b = eg_encode(v, k)
    assert eg_decode(b.bits, k) == (v, len(b))

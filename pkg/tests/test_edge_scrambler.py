import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from roisel import edge_scrambler
from roisel.edge_scrambler import (CorruptCoefficientsError, canny, chaotic_permutation,
                                   classify_tus, embed_flag, extract_flag, invert_permutation,
                                   permute_values, protect_tu, scramble, unpermute_values,
                                   unscramble)
from roisel.keystream import ChaoticParams, derive_chaotic_params

PARAMS = ChaoticParams(0.3141592, 3.99)


def test_constant_plane_has_no_edges():
    assert not canny(np.full((32, 32), 77, np.uint8)).any()


def test_vertical_step_edge():
    p = np.zeros((24, 32), np.uint8)
    p[:, 16:] = 255
    e = canny(p)
    cols = set(np.flatnonzero(e.any(axis=0)).tolist())
    assert cols and cols <= {15, 16}
    assert e[:, 15:17].any(axis=1).all()


def test_checkerboard_edges_on_boundaries_only():
    idx = np.arange(32) // 8
    board = ((idx[:, None] + idx[None, :]) % 2 * 255).astype(np.uint8)
    e = canny(board)
    assert e.any()
    near = np.zeros(32, bool)
    for b in (8, 16, 24):
        near[b - 2:b + 2] = True
    rr, cc = np.nonzero(e)
    assert (near[rr] | near[cc]).all()
    assert e.tolist() == oracles.canny(board.tolist())


def test_canny_matches_loop_oracle_on_random_planes():
    rng = np.random.default_rng(0)
    for t in range(12):
        h, w = int(rng.integers(6, 20)), int(rng.integers(6, 20))
        if t % 3 == 0:
            p = rng.integers(0, 256, (h, w))
        elif t % 3 == 1:
            p = np.add.outer(np.arange(h) * int(rng.integers(1, 30)), np.arange(w) * 7) % 256
        else:
            p = np.where(rng.random((h, w)) < 0.3, 255, 0)
        p = p.astype(np.uint8)
        assert canny(p).tolist() == oracles.canny(p.tolist())


def test_canny_thresholds_and_small_input():
    p = np.zeros((16, 16), np.uint8)
    p[:, 8:] = 40  # weak step: below the default high threshold
    assert not canny(p).any()
    assert canny(p, low=5, high=20).any()
    with pytest.raises(ValueError):
        canny(np.zeros((4, 8)))


def test_classify_examples():
    assert not classify_tus(np.zeros((16, 16), np.uint8), 4).any()
    m = np.zeros((16, 16), np.uint8)
    m[9, 6] = 1
    c = classify_tus(m, 4)
    assert c.sum() == 1 and c[2, 1]


def test_classify_matches_pixel_sums():
    rng = np.random.default_rng(1)
    for _ in range(50):
        h, w, tu = int(rng.integers(4, 40)), int(rng.integers(4, 40)), int(rng.choice([4, 8]))
        m = (rng.random((h, w)) < rng.random() * 0.05).astype(np.uint8)
        c = classify_tus(m, tu)
        for r in range(c.shape[0]):
            for q in range(c.shape[1]):
                s = sum(int(m[y, x]) for y in range(r * tu, min(h, (r + 1) * tu))
                        for x in range(q * tu, min(w, (q + 1) * tu)))
                assert c[r, q] == (s != 0)


def test_permutation_of_one_is_identity():
    assert chaotic_permutation(1, PARAMS).tolist() == [0]
    assert chaotic_permutation(0, PARAMS).tolist() == []


def test_two_value_permutation_follows_rank_order(monkeypatch):
    monkeypatch.setattr(edge_scrambler, "logistic_sequence",
                        lambda x0, r, n, burn_in: np.array([0.81, 0.62]))
    perm = chaotic_permutation(2, PARAMS)
    assert (perm + 1).tolist() == [2, 1]


@pytest.mark.parametrize("n", range(2, 9))
def test_small_permutations_invert(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        p = chaotic_permutation(n, ChaoticParams(float(rng.uniform(0.01, 0.99)),
                                                 float(rng.uniform(3.9, 3.9999))))
        assert sorted(p.tolist()) == list(range(n))
        inv = invert_permutation(p)
        assert (inv[p] == np.arange(n)).all()
        v = rng.integers(-50, 50, n)
        assert (unpermute_values(permute_values(v, p), p) == v).all()


def test_scramble_skip_rules():
    z = np.zeros(16, np.int64)
    assert (scramble(z, True, PARAMS) == z).all()
    one = z.copy()
    one[5] = 3
    assert (scramble(one, True, PARAMS) == one).all()
    two = one.copy()
    two[1] = -2
    assert (scramble(two, True, PARAMS) == two).all()  # one value cannot move
    many = np.arange(1, 17)
    assert (scramble(many, False, PARAMS) == many).all()


def test_scramble_four_nonzeros_against_direct_application():
    c = np.array([0, 7, 0, -3, 5, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0])
    perm = chaotic_permutation(3, PARAMS)
    want = c.copy()
    vals = [7, -3, 5]
    pos = [1, 3, 4]
    for k in range(3):
        want[pos[perm[k]]] = vals[k]
    assert scramble(c, True, PARAMS).tolist() == want.tolist()


def test_scramble_preserves_multiset_and_last():
    rng = np.random.default_rng(2)
    for _ in range(500):
        c = rng.integers(-9, 10, 16) * (rng.random(16) < 0.6)
        s = scramble(c, True, PARAMS)
        assert sorted(s.tolist()) == sorted(c.tolist())
        assert (np.flatnonzero(s) == np.flatnonzero(c)).all()
        nz = np.flatnonzero(c)
        if nz.size:
            assert s[nz[-1]] == c[nz[-1]]


def test_embed_examples():
    assert embed_flag(3, 1) == 5 and extract_flag(5) == (1, 3)
    assert embed_flag(-1, 1) == -1 and extract_flag(-1) == (1, -1)
    assert embed_flag(3, 0) == 6 and extract_flag(6) == (0, 3)
    with pytest.raises(ValueError):
        embed_flag(0, 1)
    with pytest.raises(ValueError):
        embed_flag(2, 2)
    with pytest.raises(CorruptCoefficientsError):
        extract_flag(0)


@settings(max_examples=300, deadline=None)
@given(st.integers(-2 ** 15, 2 ** 15).filter(bool), st.integers(0, 1))
def test_embed_properties(v, w):
    e = embed_flag(v, w)
    assert e != 0 and (e > 0) == (v > 0) and abs(e) % 2 == w
    assert extract_flag(e) == (w, v)


def test_zero_carrier_is_corrupt_and_empty_tu_passes():
    with pytest.raises(CorruptCoefficientsError):
        extract_flag(0)
    assert unscramble(np.zeros(16, np.int64), PARAMS).tolist() == [0] * 16


def test_non_edge_tu_only_halves():
    c = np.array([4, 0, -2, 6] + [0] * 12)
    p = protect_tu(c, False, None)
    assert p[3] == 12 and p[:3].tolist() == [4, 0, -2]
    assert unscramble(p, lambda: pytest.fail("non-edge TU must not derive a seed")).tolist() == \
        c.tolist()


def test_key_sensitivity():
    rng = np.random.default_rng(4)
    differ = 0
    c = np.arange(1, 17)
    for _ in range(1000):
        key = bytearray(rng.bytes(16))
        a = scramble(c, True, derive_chaotic_params(bytes(key)))
        key[int(rng.integers(16))] ^= 1 << int(rng.integers(8))
        b = scramble(c, True, derive_chaotic_params(bytes(key)))
        differ += not np.array_equal(a, b)
    assert differ >= 990


def test_ten_thousand_random_round_trips():
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        n = int(rng.choice([16, 64]))
        c = rng.integers(-300, 301, n) * (rng.random(n) < rng.random())
        edge = bool(rng.random() < 0.7)
        p = derive_chaotic_params(rng.bytes(16))
        assert (unscramble(protect_tu(c, edge, p), p) == c).all()

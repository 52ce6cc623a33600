import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roisel.yuv_io import (Frame, PixelRegion, Plane, TruncatedFileError, VideoSequence,
                           VideoSpec, extract_region, read_sequence, write_sequence)


def _seq(w, h, n, seed=0):
    rng = np.random.default_rng(seed)
    return VideoSequence.from_planes(
        [rng.integers(0, 256, (h, w), dtype=np.uint8) for _ in range(n)],
        [rng.integers(0, 256, (h // 2, w // 2), dtype=np.uint8) for _ in range(n)],
        [rng.integers(0, 256, (h // 2, w // 2), dtype=np.uint8) for _ in range(n)])


def test_two_frame_file_reads_two_frames(tmp_path):
    p = tmp_path / "a.yuv"
    p.write_bytes(bytes(range(256)) * 3)
    seq = read_sequence(p, VideoSpec(16, 16, 2))
    assert len(seq) == 2
    assert seq[1].y[0, 0] == (384 % 256)


def test_short_file_is_truncated(tmp_path):
    p = tmp_path / "a.yuv"
    p.write_bytes(bytes(767))
    with pytest.raises(TruncatedFileError) as e:
        read_sequence(p, VideoSpec(16, 16, 2))
    assert e.value.expected == 768 and e.value.actual == 767


def test_sixteen_bit_file_rejected(tmp_path):
    p = tmp_path / "a.yuv"
    p.write_bytes(bytes(768 * 2))
    with pytest.raises(ValueError, match="16-bit"):
        read_sequence(p, VideoSpec(16, 16, 2))


def test_write_sizes(tmp_path):
    assert write_sequence(_seq(16, 16, 1), tmp_path / "a.yuv") == 384
    assert VideoSpec(352, 288, 50).total_bytes == 7_603_200


def test_empty_sequence_rejected():
    with pytest.raises(ValueError, match="frame_count >= 1"):
        VideoSequence.from_planes([], [], [])


@pytest.mark.parametrize("w,h,n", [(15, 16, 1), (16, 14, 1), (17, 16, 1), (16, 16, 0)])
def test_spec_invariants(w, h, n):
    with pytest.raises(ValueError):
        VideoSpec(w, h, n)


def test_frame_plane_shapes_checked():
    with pytest.raises(ValueError):
        Frame(np.zeros((16, 16), np.uint8), np.zeros((8, 8), np.uint8), np.zeros((8, 7), np.uint8))
    with pytest.raises(ValueError):
        Frame(np.zeros((16, 16), np.uint16), np.zeros((8, 8), np.uint8), np.zeros((8, 8), np.uint8))


def test_file_round_trip(tmp_path):
    seq = _seq(32, 16, 3)
    p = tmp_path / "a.yuv"
    write_sequence(seq, p)
    data = p.read_bytes()
    back = read_sequence(p, seq.spec)
    assert back == seq
    write_sequence(back, tmp_path / "b.yuv")
    assert (tmp_path / "b.yuv").read_bytes() == data


def test_extract_region_examples():
    y = np.arange(16 * 16, dtype=np.uint8).reshape(16, 16)
    f = Frame(y, np.zeros((8, 8), np.uint8), np.ones((8, 8), np.uint8))
    assert np.array_equal(extract_region(f, PixelRegion(0, 0, 16, 16)), y.reshape(-1))
    assert extract_region(f, PixelRegion(0, 0, 1, 1)).tolist() == [0]
    ramp = extract_region(f, PixelRegion(2, 3, 5, 6), Plane.Y)
    assert ramp.tolist() == [int(y[r, c]) for r in range(3, 6) for c in range(2, 5)]


def test_chroma_mapping_floor_ceil():
    r = PixelRegion(3, 5, 9, 11)
    assert r.chroma().as_tuple() == (1, 2, 5, 6)


def test_region_out_of_bounds():
    f = _seq(16, 16, 1)[0]
    with pytest.raises(IndexError):
        extract_region(f, PixelRegion(8, 8, 17, 16))


def test_degenerate_region():
    with pytest.raises(ValueError):
        PixelRegion(4, 4, 4, 8)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_region_samples_stay_inside(data):
    w, h = 32, 24
    x1 = data.draw(st.integers(0, w - 1))
    y1 = data.draw(st.integers(0, h - 1))
    x2 = data.draw(st.integers(x1 + 1, w))
    y2 = data.draw(st.integers(y1 + 1, h))
    plane = data.draw(st.sampled_from(list(Plane)))
    f = _seq(w, h, 1, seed=x1 * 100 + y1)[0]
    r = PixelRegion(x1, y1, x2, y2)
    got = extract_region(f, r, plane)
    p = f.plane(plane)
    rr = r if plane is Plane.Y else r.chroma()
    want = [int(p[j, i]) for j in range(rr.y1, rr.y2) for i in range(rr.x1, rr.x2)]
    assert got.tolist() == want


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(8, 24), st.integers(8, 24), st.integers(0, 99))
def test_write_read_identity(n, hw, hh, seed):
    import tempfile
    from pathlib import Path

    seq = _seq(2 * hw, 2 * hh, n, seed)
    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / "x.yuv"
        assert write_sequence(seq, p) == seq.spec.total_bytes
        assert read_sequence(p, seq.spec) == seq

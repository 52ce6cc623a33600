import json

import pytest

from roisel import encryptor
from roisel.cli import KEY_ENV, main
from roisel.codec import Container
from roisel.encryptor import EncryptionLevel
from roisel.roi_map import format_roi_records
from roisel.synthetic import ClipSpec, make_clip
from roisel.yuv_io import VideoSpec, read_sequence, write_sequence

KEY = "000102030405060708090a0b0c0d0e0f"
W, H, N = 64, 64, 6


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    seq, rois = make_clip(ClipSpec(W, H, N, seed=4))
    write_sequence(seq, d / "src.yuv")
    (d / "roi.txt").write_text(format_roi_records(rois))
    # frame 2 has no record and must stay in the clear
    (d / "gap.txt").write_text(format_roi_records([r for r in rois if r.frame_idx != 2]))
    return d


def run(*args):
    try:
        return main([str(a) for a in args])
    except SystemExit as e:
        return e.code


def encode(files, out, *extra):
    return run("encode", files / "src.yuv", "--width", W, "--height", H, "--roi",
               files / "roi.txt", "--out", out, *extra)


def test_identity_encode_and_decode(files, tmp_path):
    assert encode(files, tmp_path / "p.rsc") == 0
    c = Container.load(tmp_path / "p.rsc")
    assert c.level == EncryptionLevel.NONE and c.frame_count == N
    assert run("decode", tmp_path / "p.rsc", "--out", tmp_path / "p.yuv") == 0
    assert (tmp_path / "p.yuv").stat().st_size == VideoSpec(W, H, N).total_bytes


def test_encrypted_round_trip(files, tmp_path):
    encode(files, tmp_path / "p.rsc")
    assert encode(files, tmp_path / "e.rsc", "--level", "basic", "--key", KEY, "--nonce", "7") == 0
    c = Container.load(tmp_path / "e.rsc")
    assert c.level == EncryptionLevel.BASIC and c.nonce == 7
    run("decode", tmp_path / "p.rsc", "--out", tmp_path / "p.yuv")
    assert run("decode", tmp_path / "e.rsc", "--out", tmp_path / "k.yuv", "--key", KEY) == 0
    assert run("decode", tmp_path / "e.rsc", "--out", tmp_path / "n.yuv") == 0
    plain = (tmp_path / "p.yuv").read_bytes()
    assert (tmp_path / "k.yuv").read_bytes() == plain
    assert (tmp_path / "n.yuv").read_bytes() != plain


def test_key_from_environment(files, tmp_path, monkeypatch):
    monkeypatch.setenv(KEY_ENV, KEY)
    assert encode(files, tmp_path / "e.rsc", "--level", "enhanced", "--nonce", "3") == 0
    monkeypatch.delenv(KEY_ENV)
    assert encode(files, tmp_path / "f.rsc", "--level", "enhanced", "--nonce", "3",
                  "--key", KEY) == 0
    assert (tmp_path / "e.rsc").read_bytes() == (tmp_path / "f.rsc").read_bytes()


def test_flag_key_wins_and_is_not_logged(files, tmp_path, monkeypatch, caplog):
    monkeypatch.setenv(KEY_ENV, "ff" * 16)
    with caplog.at_level("DEBUG"):
        encode(files, tmp_path / "e.rsc", "--level", "basic", "--key", KEY, "--nonce", "1")
    encode(files, tmp_path / "p.rsc")
    run("decode", tmp_path / "e.rsc", "--out", tmp_path / "k.yuv", "--key", KEY)
    run("decode", tmp_path / "p.rsc", "--out", tmp_path / "p.yuv")
    assert (tmp_path / "k.yuv").read_bytes() == (tmp_path / "p.yuv").read_bytes()
    assert KEY not in caplog.text and "ff" * 16 not in caplog.text


def test_missing_roi_record_leaves_frame_clear(files, tmp_path):
    run("encode", files / "src.yuv", "--width", W, "--height", H, "--roi", files / "gap.txt",
        "--out", tmp_path / "p.rsc")
    run("encode", files / "src.yuv", "--width", W, "--height", H, "--roi", files / "gap.txt",
        "--out", tmp_path / "e.rsc", "--level", "enhanced", "--key", KEY)
    run("decode", tmp_path / "p.rsc", "--out", tmp_path / "p.yuv")
    run("decode", tmp_path / "e.rsc", "--out", tmp_path / "n.yuv")
    spec = VideoSpec(W, H, N)
    p = read_sequence(tmp_path / "p.yuv", spec)
    n = read_sequence(tmp_path / "n.yuv", spec)
    assert n[2].y.tobytes() == p[2].y.tobytes()
    assert n[1].y.tobytes() != p[1].y.tobytes()


@pytest.mark.parametrize("args", [
    ("encode", "{src}", "--width", "64", "--height", "64", "--out", "{tmp}/x",
     "--level", "basic"),                                            # level without key
    ("encode", "{src}", "--width", "64", "--height", "64", "--out", "{tmp}/x",
     "--level", "basic", "--key", "abcd"),                           # short key
    ("encode", "{src}", "--width", "64", "--height", "64", "--out", "{tmp}/x",
     "--level", "mega", "--key", KEY),                               # unknown level
    ("encode", "{src}", "--width", "64", "--out", "{tmp}/x"),         # missing height
    ("encode", "{src}", "--width", "64", "--height", "64", "--out", "{tmp}/x",
     "--roi", "{tmp}/none.txt"),                                     # missing ROI file
    ("encode", "{src}", "--width", "64", "--height", "64", "--out", "{tmp}/x",
     "--tile-size", "24"),                                           # tile not a CU multiple
    ("encode", "{src}", "--width", "64", "--height", "64", "--out", "{tmp}/x",
     "--canny-low", "200"),                                          # low above high
    ("decode", "{tmp}/x", "--out", "{tmp}/y", "--key", "00"),        # wrong-length key
    ("evaluate", "{src}", "{tmp}/a", "{tmp}/b", "--width", "64", "--height", "64"),
])
def test_usage_errors_exit_2(files, tmp_path, args):
    fmt = [a.format(src=files / "src.yuv", tmp=tmp_path) for a in args]
    assert run(*fmt) == 2


def test_runtime_errors_exit_1(files, tmp_path):
    assert run("decode", tmp_path / "missing.rsc", "--out", tmp_path / "y") == 1
    (tmp_path / "junk.rsc").write_bytes(b"not a container")
    assert run("decode", tmp_path / "junk.rsc", "--out", tmp_path / "y") == 1
    assert run("encode", files / "src.yuv", "--width", 64, "--height", 64, "--frames", 99,
               "--out", tmp_path / "x") == 1


def test_corrupt_frame_exit_1(files, tmp_path):
    encode(files, tmp_path / "p.rsc")
    c = Container.load(tmp_path / "p.rsc")
    c.payloads[1] = c.payloads[1][:1]
    c.save(tmp_path / "bad.rsc")
    assert run("decode", tmp_path / "bad.rsc", "--out", tmp_path / "y.yuv") == 1
    assert (tmp_path / "y.yuv").stat().st_size == VideoSpec(W, H, N).total_bytes


def _evaluate(files, tmp, *extra):
    return run("evaluate", files / "src.yuv", tmp / "p.rsc", tmp / "e.rsc", "--width", W,
               "--height", H, "--roi", files / "roi.txt", "--report-json", tmp / "r.json",
               "--report-csv", tmp / "r.csv", *extra)


def test_evaluate_identity_is_degenerate(files, tmp_path, capsys):
    encode(files, tmp_path / "p.rsc")
    encode(files, tmp_path / "e.rsc")
    assert _evaluate(files, tmp_path) == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["average"]["psnr_db"] == "inf"
    assert rep["average"]["npcr_pct"] == 0.0
    assert "bitrate_change: 0.00%" in capsys.readouterr().out
    assert len((tmp_path / "r.csv").read_text().splitlines()) == N + 1


def test_evaluate_basic_prints_zero_rate(files, tmp_path, capsys):
    encode(files, tmp_path / "p.rsc")
    encode(files, tmp_path / "e.rsc", "--level", "basic", "--key", KEY)
    assert _evaluate(files, tmp_path) == 0
    out = capsys.readouterr().out
    assert "bitrate_change: 0.00%" in out
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["average"]["psnr_db"] < 30


def test_evaluate_two_keys(files, tmp_path):
    encode(files, tmp_path / "p.rsc")
    encode(files, tmp_path / "e.rsc", "--level", "enhanced", "--key", KEY)
    encode(files, tmp_path / "a.rsc", "--level", "enhanced", "--key", "ab" * 16)
    assert _evaluate(files, tmp_path, "--npcr-mode", "two-keys") == 2
    assert _evaluate(files, tmp_path, "--npcr-mode", "two-keys",
                     "--encrypted-alt", tmp_path / "a.rsc") == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["npcr_mode"] == "two-keys" and rep["average"]["npcr_pct"] > 50


def test_evaluate_dimension_mismatch_exit_1(files, tmp_path):
    encode(files, tmp_path / "p.rsc")
    seq, _ = make_clip(ClipSpec(32, 32, N, seed=1))
    write_sequence(seq, tmp_path / "small.yuv")
    run("encode", tmp_path / "small.yuv", "--width", 32, "--height", 32, "--out",
        tmp_path / "e.rsc")
    assert _evaluate(files, tmp_path) == 1


def test_canny_flags_change_advanced_stream(files, tmp_path):
    base = ("--level", "advanced", "--key", KEY, "--nonce", "9")
    encode(files, tmp_path / "a.rsc", *base)
    encode(files, tmp_path / "b.rsc", *base, "--canny-low", "1", "--canny-high", "2",
           "--canny-sigma", "0.8")
    assert (tmp_path / "a.rsc").read_bytes() != (tmp_path / "b.rsc").read_bytes()
    encode(files, tmp_path / "p.rsc")
    for name in ("a", "b"):
        run("decode", tmp_path / f"{name}.rsc", "--key", KEY, "--out", tmp_path / f"{name}.yuv")
    run("decode", tmp_path / "p.rsc", "--out", tmp_path / "p.yuv")
    plain = (tmp_path / "p.yuv").read_bytes()
    assert (tmp_path / "a.yuv").read_bytes() == plain == (tmp_path / "b.yuv").read_bytes()


def test_selftest_passes(capsys):
    assert run("selftest") == 0
    assert "FAIL" not in capsys.readouterr().out


def test_selftest_names_injected_fault(monkeypatch, capsys):
    monkeypatch.setattr(encryptor, "dec_merge_idx", lambda idx, s: (idx + s) % 5)
    assert run("selftest") == 1
    out = capsys.readouterr().out
    assert "failing oracles: element ciphers" in out

"""Command line front end: encode, decode, evaluate, selftest.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  The key comes
from ``--key`` or the ``ROISEL_KEY`` environment variable (the flag wins)
and is never written to the log.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .benchmark import MetricError, evaluate_all
from .codec import (CodecConfig, Container, ContainerError, EdgeParams, decode_container,
                    encode_sequence)
from .encryptor import EncryptionLevel
from .keystream import StreamKey, parse_key, random_nonce
from .roi_map import (RoiParseError, TileGrid, classify_sequence, parse_roi_file,
                      rois_for_frame, validate_records)
from .yuv_io import VideoSpec, read_sequence, write_sequence

log = logging.getLogger("roisel")

KEY_ENV = "ROISEL_KEY"
EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    subcommand: str
    inputs: list[Path] = field(default_factory=list)
    out: Path | None = None
    width: int | None = None
    height: int | None = None
    frames: int | None = None
    codec: CodecConfig = field(default_factory=CodecConfig)
    level: EncryptionLevel = EncryptionLevel.NONE
    key: bytes | None = field(default=None, repr=False)
    nonce: int | None = None
    roi: Path | None = None
    report_json: Path | None = None
    report_csv: Path | None = None
    npcr_mode: str = "plain-vs-cipher"
    canny_low: float = 50.0
    canny_high: float = 150.0
    canny_sigma: float = 1.4


def _tile_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        if len(parts) == 1:
            return int(parts[0]), int(parts[0])
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"tile size must be N or WxH, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="roisel", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def video_flags(sp, need_dims=True):
        sp.add_argument("--width", type=int, required=need_dims)
        sp.add_argument("--height", type=int, required=need_dims)
        sp.add_argument("--frames", type=int, help="default: all frames in the file")

    def canny_flags(sp):
        sp.add_argument("--canny-low", type=float, default=50.0, help="edge map low threshold")
        sp.add_argument("--canny-high", type=float, default=150.0, help="edge map high threshold")
        sp.add_argument("--canny-sigma", type=float, default=1.4, help="edge map blur sigma")

    enc = sub.add_parser("encode", help="encode (and optionally encrypt) a raw I420 file")
    enc.add_argument("input", type=Path)
    video_flags(enc)
    enc.add_argument("--qp", type=int, default=24)
    enc.add_argument("--tile-size", type=_tile_size, default=(32, 32))
    enc.add_argument("--cu-size", type=int, default=16)
    enc.add_argument("--tu-size", type=int, default=4, choices=(4, 8))
    enc.add_argument("--gop", default="IBBB")
    enc.add_argument("--level", choices=("none", "basic", "enhanced", "advanced"))
    enc.add_argument("--key", help=f"32 hex characters (or set {KEY_ENV})")
    enc.add_argument("--nonce", type=lambda s: int(s, 0), help="64-bit nonce (default random)")
    enc.add_argument("--roi", type=Path, help="ROI coordinate file")
    enc.add_argument("--out", type=Path, required=True)
    canny_flags(enc)

    dec = sub.add_parser("decode", help="decode a container to raw I420")
    dec.add_argument("input", type=Path)
    dec.add_argument("--key", help=f"32 hex characters (or set {KEY_ENV})")
    dec.add_argument("--out", type=Path, required=True)

    ev = sub.add_parser("evaluate", help="ROI perturbation report for a plain/encrypted pair")
    ev.add_argument("original", type=Path, help="source I420 file")
    ev.add_argument("plain", type=Path, help="identity-cipher container")
    ev.add_argument("encrypted", type=Path, help="encrypted container")
    ev.add_argument("--encrypted-alt", type=Path,
                    help="same content under a second key (two-keys NPCR mode)")
    video_flags(ev)
    ev.add_argument("--roi", type=Path, required=True, help="ROI ground-truth file")
    ev.add_argument("--cu-size", type=int, default=16)
    ev.add_argument("--report-json", type=Path)
    ev.add_argument("--report-csv", type=Path)
    ev.add_argument("--npcr-mode", choices=("plain-vs-cipher", "two-keys"),
                    default="plain-vs-cipher")
    canny_flags(ev)

    sub.add_parser("selftest", help="exhaustive inversion oracles")
    return p


def _resolve_key(flag: str | None) -> bytes | None:
    text = flag if flag is not None else os.environ.get(KEY_ENV)
    if text is None or text == "":
        return None
    try:
        return parse_key(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def job_from_args(ns: argparse.Namespace) -> JobConfig:
    """Validate flags for one subcommand before any work starts."""
    job = JobConfig(ns.subcommand)
    if ns.subcommand == "selftest":
        return job
    job.key = _resolve_key(getattr(ns, "key", None))
    job.out = getattr(ns, "out", None)
    if ns.subcommand == "decode":
        job.inputs = [ns.input]
        return job

    job.width, job.height, job.frames = ns.width, ns.height, ns.frames
    job.roi = ns.roi
    if job.roi is not None and not job.roi.is_file():
        raise UsageError(f"ROI file {job.roi} not found")
    job.canny_low, job.canny_high, job.canny_sigma = ns.canny_low, ns.canny_high, ns.canny_sigma
    if not 0 <= job.canny_low <= job.canny_high:
        raise UsageError("need 0 <= --canny-low <= --canny-high")
    if job.canny_sigma <= 0:
        raise UsageError("--canny-sigma must be positive")
    if ns.subcommand == "encode":
        job.inputs = [ns.input]
        try:
            job.codec = CodecConfig(qp=ns.qp, tile_w=ns.tile_size[0], tile_h=ns.tile_size[1],
                                    cu_size=ns.cu_size, tu_size=ns.tu_size, gop=ns.gop)
            job.level = EncryptionLevel.parse(ns.level)
        except ValueError as e:
            raise UsageError(str(e)) from None
        if job.level != EncryptionLevel.NONE and job.key is None:
            raise UsageError(f"--level {ns.level} needs --key or {KEY_ENV}")
        job.nonce = ns.nonce
        if job.nonce is not None and not 0 <= job.nonce < 1 << 64:
            raise UsageError("--nonce must fit in 64 bits")
        return job

    job.inputs = [ns.original, ns.plain, ns.encrypted]
    if ns.cu_size != 16:
        raise UsageError("only 16x16 coding units are supported")
    job.npcr_mode = ns.npcr_mode
    if job.npcr_mode == "two-keys":
        if ns.encrypted_alt is None:
            raise UsageError("--npcr-mode two-keys needs --encrypted-alt")
        job.inputs.append(ns.encrypted_alt)
    job.report_json, job.report_csv = ns.report_json, ns.report_csv
    return job


def _read_video(job: JobConfig, path: Path):
    if job.frames is None:
        frame_bytes = job.width * job.height * 3 // 2
        size = path.stat().st_size
        if size == 0 or size % frame_bytes:
            raise UsageError(f"{path}: {size} bytes is not a whole number of "
                             f"{job.width}x{job.height} frames; pass --frames")
        job.frames = size // frame_bytes
    try:
        spec = VideoSpec(job.width, job.height, job.frames)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return read_sequence(path, spec)


def _load_rois(job: JobConfig, frame_count: int):
    if job.roi is None:
        return []
    records = parse_roi_file(job.roi)
    validate_records(records, job.width, job.height, frame_count)
    return records


def cmd_encode(job: JobConfig) -> int:
    seq = _read_video(job, job.inputs[0])
    records = _load_rois(job, len(seq))
    cfg = job.codec
    grid = TileGrid(seq.spec.width, seq.spec.height, cfg.tile_w, cfg.tile_h)
    roi = classify_sequence(grid, records, len(seq))
    key = None
    if job.level != EncryptionLevel.NONE:
        key = StreamKey(job.key, job.nonce if job.nonce is not None else random_nonce())
    edges = EdgeParams(job.canny_low, job.canny_high, job.canny_sigma)
    cont = encode_sequence(seq, cfg, roi, job.level, key, edges)
    n = cont.save(job.out)
    log.info("encoded %d frames (%s level, %d ROI frames) into %s, %d bytes", len(seq),
             job.level.name.lower(), sum(c.any for c in roi), job.out, n)
    return EXIT_OK


def cmd_decode(job: JobConfig) -> int:
    cont = Container.load(job.inputs[0])
    key = StreamKey(job.key, cont.nonce) if job.key is not None else None
    res = decode_container(cont, key)
    write_sequence(res.sequence, job.out)
    for n, msg in res.errors:
        log.error("frame %d could not be decoded: %s", n, msg)
    log.info("decoded %d frames (%s) into %s", cont.frame_count,
             "keyed" if key and cont.level else "keyless", job.out)
    return EXIT_OK if not res.errors else EXIT_FAILURE


def cmd_evaluate(job: JobConfig) -> int:
    original = _read_video(job, job.inputs[0])
    conts = [Container.load(p) for p in job.inputs[1:]]
    for c, p in zip(conts, job.inputs[1:]):
        if (c.width, c.height, c.frame_count) != (job.width, job.height, len(original)):
            raise MetricError(f"{p} is {c.width}x{c.height}x{c.frame_count}, original is "
                              f"{job.width}x{job.height}x{len(original)}")
    if conts[0].level != EncryptionLevel.NONE:
        log.warning("%s is not an identity-cipher container", job.inputs[1])
    decodes = [decode_container(c).sequence for c in conts]
    records = _load_rois(job, len(original))
    cfg = conts[0].config
    grid = TileGrid(job.width, job.height, cfg.tile_w, cfg.tile_h)
    cls = classify_sequence(grid, records, len(original))
    truth = [rois_for_frame(records, i) for i in range(len(original))]
    report = evaluate_all(original, decodes[0], decodes[1], cls, truth, 16, conts[0], conts[1],
                          enc_decode_alt=decodes[2] if len(decodes) > 2 else None,
                          canny_low=job.canny_low, canny_high=job.canny_high,
                          canny_sigma=job.canny_sigma)
    if job.report_json:
        job.report_json.write_text(report.to_json())
    if job.report_csv:
        job.report_csv.write_text(report.to_csv())
    print(report.summary())
    return EXIT_OK


def cmd_selftest(job: JobConfig) -> int:
    from .selftest import format_matrix, run_selftest

    results = run_selftest()
    print(format_matrix(results))
    failed = [r.name for r in results if not r.ok]
    if failed:
        print("failing oracles: " + ", ".join(failed))
        return EXIT_FAILURE
    return EXIT_OK


COMMANDS = {"encode": cmd_encode, "decode": cmd_decode, "evaluate": cmd_evaluate,
            "selftest": cmd_selftest}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with 2 on malformed flags
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        job = job_from_args(ns)
        return COMMANDS[job.subcommand](job)
    except UsageError as e:
        parser.error(str(e))  # exit 2
    except (OSError, ContainerError, MetricError, RoiParseError, ValueError) as e:
        log.error("%s", e)
        return EXIT_FAILURE
    return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

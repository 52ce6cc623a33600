"""Payload growth per encryption level on the standard clips, one row per (clip, QP)."""

import argparse
import csv
import sys

from roisel.experiments import LEVELS, bitrate_rows, prepare
from roisel.keystream import StreamKey
from roisel.synthetic import standard_clips


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qps", type=int, nargs="+", default=[8, 24, 40])
    ap.add_argument("--frames", type=int, default=16)
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args()

    key = StreamKey(bytes(range(16)), 1)
    names = [lv.name.lower() for lv in LEVELS]
    rows = []
    for seq, rois in standard_clips(args.frames):
        per_qp = []
        for qp in args.qps:
            clip = prepare(seq, rois, qp)
            r = bitrate_rows(clip, key)
            per_qp.append(r)
            rows.append({"clip": clip.name, "qp": qp, **{n: round(r[n], 4) for n in names}})
        rows.append({"clip": clip.name, "qp": "mean",
                     **{n: round(sum(r[n] for r in per_qp) / len(per_qp), 4) for n in names}})

    f = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(f, fieldnames=["clip", "qp", *names])
    w.writeheader()
    w.writerows(rows)
    if args.out:
        f.close()


if __name__ == "__main__":
    main()

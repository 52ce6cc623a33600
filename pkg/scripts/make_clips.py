"""Write the synthetic test clips as raw I420 files plus ROI coordinate files."""

import argparse
from pathlib import Path

from roisel.experiments import face_proxy
from roisel.roi_map import format_roi_records
from roisel.synthetic import standard_clips
from roisel.yuv_io import write_sequence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--frames", type=int, default=16)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    clips = [(f"{s.spec.width}x{s.spec.height}", s, r) for s, r in standard_clips(args.frames)]
    clips += [(f"face{i}_176x144", *face_proxy(i, args.frames)) for i in range(3)]
    for name, seq, rois in clips:
        write_sequence(seq, args.outdir / f"{name}.yuv")
        (args.outdir / f"{name}.roi.txt").write_text(format_roi_records(rois))
        print(f"{name}: {len(seq)} frames, {len(rois)} ROI records")


if __name__ == "__main__":
    main()

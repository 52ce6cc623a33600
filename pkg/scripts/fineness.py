"""IoU_avg against tile size on random rectangle ROI tracks (finer tiles should win)."""

import argparse
import csv
import sys

import numpy as np

from roisel.experiments import fineness_trial


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--tiles", type=int, nargs="+", default=[16, 32, 48, 64])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    f = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(f)
    w.writerow(["trial", *[f"iou_{t}" for t in args.tiles]])
    totals = np.zeros(len(args.tiles))
    for i in range(args.trials):
        r = fineness_trial(rng, tiles=tuple(args.tiles))
        vals = [r[t] for t in args.tiles]
        totals += vals
        w.writerow([i, *[f"{v:.6f}" for v in vals]])
    w.writerow(["mean", *[f"{v:.6f}" for v in totals / args.trials]])
    if args.out:
        f.close()


if __name__ == "__main__":
    main()

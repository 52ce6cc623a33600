"""Keyless-decode ROI metrics on the 176x144 face-proxy clips, averaged over seeds and QPs."""

import argparse
import csv
import sys

from roisel.encryptor import EncryptionLevel
from roisel.experiments import PERTURBATION_FIELDS, face_proxy, fixed_keys, perturbation, prepare


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--qps", type=int, nargs="+", default=[8, 24, 40])
    ap.add_argument("--keys", type=int, default=3)
    ap.add_argument("--two-keys", action="store_true", help="NPCR/UACI between two cipher decodes")
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args()

    keys = fixed_keys(args.keys)
    alts = fixed_keys(args.keys, base=100) if args.two_keys else [None] * args.keys
    fields = [*PERTURBATION_FIELDS, "bitrate_change_pct"]
    rows = []
    for level in (EncryptionLevel.BASIC, EncryptionLevel.ENHANCED, EncryptionLevel.ADVANCED):
        runs = []
        for seed in args.seeds:
            seq, rois = face_proxy(seed)
            for qp in args.qps:
                clip = prepare(seq, rois, qp, name=f"face{seed}")
                for key, alt in zip(keys, alts):
                    r = perturbation(clip, level, key, alt)
                    runs.append(r)
                    rows.append({"level": level.name.lower(), "seed": seed, "qp": qp,
                                 "key": key.key[:1].hex(), **r})
        rows.append({"level": level.name.lower(), "seed": "mean", "qp": "mean", "key": "",
                     **{k: sum(r[k] for r in runs) / len(runs) for k in fields}})

    f = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(f, fieldnames=["level", "seed", "qp", "key", *fields])
    w.writeheader()
    w.writerows(rows)
    if args.out:
        f.close()


if __name__ == "__main__":
    main()

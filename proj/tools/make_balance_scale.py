"""Regenerate data/balance-scale.csv.

The Balance Scale table is fully determined by its definition: every
combination of left/right weight and distance in 1..5, labelled by which
side the torque favours.
"""
import csv
import itertools
import pathlib
import sys

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/balance-scale.csv")
out.parent.mkdir(parents=True, exist_ok=True)
with out.open("w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["class", "left_weight", "left_distance", "right_weight", "right_distance"])
    for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
        left, right = lw * ld, rw * rd
        w.writerow(["L" if left > right else "R" if right > left else "B", lw, ld, rw, rd])

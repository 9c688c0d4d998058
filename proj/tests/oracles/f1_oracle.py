# Copyright 2026 The geonace Authors
# SPDX-License-Identifier: Apache-2.0
"""Brute-force reference for the 40-record scoring fixture.

  python3 f1_oracle.py --generate   rewrites tests/fixtures/score40.tsv
  python3 f1_oracle.py              prints the metrics frozen into the tests

Metrics come from scikit-learn over the labels present in ground truth,
with UNK and VIOLATION kept as extra prediction values.
"""
import pathlib
import random
import sys

from sklearn.metrics import accuracy_score, precision_recall_fscore_support

FIXTURE = pathlib.Path(__file__).resolve().parents[1] / "fixtures" / "score40.tsv"
SECTIONS = [c for c in "ABCDEFGHIJKLMNOPQRSU"]


def generate():
    rng = random.Random(20260101)
    rows = []
    for i in range(40):
        truth = SECTIONS[i % 20] if i < 30 else rng.choice("GKC")
        r = rng.random()
        if r < 0.5:
            pred = truth
        elif r < 0.65:
            pred = "UNK"
        elif r < 0.72:
            pred = "VIOLATION"
        else:
            pred = rng.choice(SECTIONS + ["T"])
        rows.append((1000 + i, truth, pred))
    with FIXTURE.open("w") as f:
        f.write("# entry_id\ttruth\tprediction\n")
        for row in rows:
            f.write("%d\t%s\t%s\n" % row)


def load():
    rows = []
    for line in FIXTURE.read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        i, t, p = line.split("\t")
        rows.append((int(i), t, p))
    return rows


def main():
    if "--generate" in sys.argv:
        generate()
    rows = load()
    y_true = [t for _, t, _ in rows]
    y_pred = [p for _, _, p in rows]
    labels = sorted(set(y_true))
    n = len(rows)
    print("I", n)
    print("correct", sum(t == p for t, p in zip(y_true, y_pred)))
    print("U", y_pred.count("UNK"))
    print("violations", y_pred.count("VIOLATION"))
    print("accuracy %.17g" % accuracy_score(y_true, y_pred))
    for avg in ("macro", "weighted"):
        p, r, f, _ = precision_recall_fscore_support(y_true, y_pred, labels=labels, average=avg, zero_division=0)
        print("%s precision %.17g recall %.17g f1 %.17g" % (avg, p, r, f))


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerate field_sample_statuses.csv from the field sample fixture.

Spreadsheet-level evaluation with exact decimals: each teat is compared
against the breakpoints 33 / 34.5 / 36.5 one cell at a time, then the two
animal-level verdicts are read off the per-teat columns. Deliberately shares
no code with the Rust crate.
"""
import csv
import sys
from decimal import Decimal
from pathlib import Path

HERE = Path(__file__).resolve().parent
FIXTURE = HERE.parent.parent / "fixtures" / "field_sample.csv"
OUT = HERE / "field_sample_statuses.csv"

LOW, HEALTHY_HIGH, ATTENTION_HIGH = Decimal("33"), Decimal("34.5"), Decimal("36.5")
RANK = {"Indeterminate": 0, "Healthy": 1, "Attention": 2, "Sick": 3}


def teat_status(t):
    if t <= LOW:
        return "Indeterminate"
    if t <= HEALTHY_HIGH:
        return "Healthy"
    if t <= ATTENTION_HIGH:
        return "Attention"
    return "Sick"


def paper_faithful(teats):
    # if / else-if chain, each branch an OR over all four teats
    if any(LOW < t <= HEALTHY_HIGH for t in teats):
        return "Healthy"
    if any(HEALTHY_HIGH < t <= ATTENTION_HIGH for t in teats):
        return "Attention"
    if any(t > ATTENTION_HIGH for t in teats):
        return "Sick"
    return "Indeterminate"


def worst_teat(teats):
    cells = [teat_status(t) for t in teats]
    ranked = [c for c in cells if c != "Indeterminate"]
    if not ranked:
        return "Indeterminate"
    return max(ranked, key=RANK.__getitem__)


def main():
    rows = []
    with FIXTURE.open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for line_no, row in enumerate(reader, start=2):
            cow, date = row[0], row[1]
            teats = [Decimal(v) for v in row[2:6]]
            rows.append([line_no, cow, date, paper_faithful(teats), worst_teat(teats)])
    with OUT.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["line", "IdCow", "Date", "paper_faithful", "worst_teat"])
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {OUT}", file=sys.stderr)


if __name__ == "__main__":
    main()

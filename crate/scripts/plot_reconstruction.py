#!/usr/bin/env python3
"""Reconstruction error against truncation degree, from a `dhkit reconstruct` report.

    python3 scripts/plot_reconstruction.py recon_report.csv [-o out.png]
"""
import argparse
import csv

import matplotlib.pyplot as plt

ap = argparse.ArgumentParser()
ap.add_argument("report")
ap.add_argument("-o", "--out", default="reconstruction.png")
args = ap.parse_args()

with open(args.report, newline="") as f:
    rows = list(csv.DictReader(f))
k = [int(r["k"]) for r in rows]
err = [float(r["rmse"]) for r in rows]

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.semilogy(k, err, "o-")
ax.set_xlabel("k")
ax.set_ylabel("normalised Hausdorff RMSE")
ax.grid(True, which="both", lw=0.3)
fig.tight_layout()
fig.savefig(args.out, dpi=150)

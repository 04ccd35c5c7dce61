#!/usr/bin/env python3
"""Log-log plot of one or more m = 0 spectra written by `dhkit hurst`.

    python3 scripts/plot_spectrum.py spectrum.csv [more.csv ...] [--fit fit.json] [-o out.png]
"""
import argparse
import csv
import json

import matplotlib.pyplot as plt
import numpy as np


def read_spectrum(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    lam = np.array([float(r["lambda"]) for r in rows])
    psd = np.array([float(r["psd"]) for r in rows])
    used = np.array([r["included_in_fit"].strip() in ("1", "true") for r in rows])
    keep = (lam > 0) & (psd > 0)
    return lam[keep], psd[keep], used[keep]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("spectra", nargs="+")
    ap.add_argument("--fit", help="fit JSON with slope and intercept")
    ap.add_argument("-o", "--out", default="spectrum.png")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(5, 4))
    for path in args.spectra:
        lam, psd, used = read_spectrum(path)
        line, = ax.loglog(lam, psd, ".", ms=3, label=path if len(args.spectra) > 1 else None)
        ax.loglog(lam[~used], psd[~used], "x", ms=4, color=line.get_color())
    if args.fit:
        with open(args.fit) as f:
            fit = json.load(f)
        fit = fit.get("fit", fit)
        lam, _, used = read_spectrum(args.spectra[0])
        x = lam[used] if used.any() else lam
        ax.loglog(x, np.exp(fit["intercept"]) * x ** fit["slope"], "k-",
                  label=f"slope {fit['slope']:.3f}, H = {fit['H']:.3f}")
    ax.set_xlabel(r"$\lambda = l(0)_k$")
    ax.set_ylabel(r"$D^2_{k,m=0}$")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Height map of a grid written by `dhkit generate` (PREFIX.bin + PREFIX.json).

    python3 scripts/plot_surface.py surface [-o out.png]
"""
import argparse
import json

import matplotlib.pyplot as plt
import numpy as np

ap = argparse.ArgumentParser()
ap.add_argument("prefix")
ap.add_argument("-o", "--out", default="surface.png")
args = ap.parse_args()

with open(args.prefix + ".json") as f:
    meta = json.load(f)
n = int(meta["n"])
h = np.fromfile(args.prefix + ".bin", dtype="<f4").reshape(n, n)

fig, ax = plt.subplots(figsize=(5, 4.3))
im = ax.imshow(h, origin="lower", cmap="terrain", extent=(0, meta.get("extent", n), 0, meta.get("extent", n)))
fig.colorbar(im, ax=ax, label="height")
ax.set_title(f"H = {meta.get('H')}, n = {n}")
fig.tight_layout()
fig.savefig(args.out, dpi=150)

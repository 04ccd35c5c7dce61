#!/usr/bin/env python3
"""Draws a disk parameterisation next to its mesh, colouring faces by log area ratio.

    python3 scripts/plot_param.py mesh.obj param.csv [-o out.png]
"""
import argparse
import csv

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import PolyCollection


def read_obj(path):
    verts, faces = [], []
    with open(path) as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
    return np.array(verts), np.array(faces)


def tri_areas(p, faces):
    a, b, c = p[faces[:, 0]], p[faces[:, 1]], p[faces[:, 2]]
    if p.shape[1] == 2:
        return 0.5 * np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


ap = argparse.ArgumentParser()
ap.add_argument("mesh")
ap.add_argument("param")
ap.add_argument("-o", "--out", default="param.png")
args = ap.parse_args()

verts, faces = read_obj(args.mesh)
with open(args.param, newline="") as f:
    rows = list(csv.DictReader(f))
rho = np.array([float(r["rho"]) for r in rows])
phi = np.array([float(r["phi"]) for r in rows])
uv = np.column_stack([rho * np.cos(phi), rho * np.sin(phi)])

a2, a3 = tri_areas(uv, faces), tri_areas(verts, faces)
ratio = np.log((a2 / a2.sum()) / (a3 / a3.sum()))
lim = max(abs(ratio).max(), 1e-6)

fig, ax = plt.subplots(figsize=(5, 5))
pc = PolyCollection(uv[faces], array=ratio, cmap="coolwarm", clim=(-lim, lim), edgecolors="k", linewidths=0.1)
ax.add_collection(pc)
ax.set_xlim(-1.05, 1.05)
ax.set_ylim(-1.05, 1.05)
ax.set_aspect("equal")
fig.colorbar(pc, ax=ax, label="log area ratio")
ax.set_title(f"log area ratio std {ratio.std():.4f}")
fig.tight_layout()
fig.savefig(args.out, dpi=150)

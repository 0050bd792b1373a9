#!/usr/bin/env python3
"""Render CDR-vs-SNR curves from cdr.csv (one curve per interference level
and parameter), with 95% Wilson intervals."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "cdr.csv")
rows = list(csv.DictReader(open(path)))
if not rows:
    sys.exit("no data in " + path)

curves = {}
for r in rows:
    key = (r["interferer_snr_db"], r["interferer_param"])
    curves.setdefault(key, []).append(r)

fig, ax = plt.subplots(figsize=(7, 5))
for (snr_i, param), pts in sorted(curves.items()):
    pts.sort(key=lambda r: float(r["target_snr_db"]))
    x = [float(r["target_snr_db"]) for r in pts]
    y = [float(r["cdr"]) for r in pts]
    lo = [float(r["cdr"]) - float(r["ci_lo"]) for r in pts]
    hi = [float(r["ci_hi"]) - float(r["cdr"]) for r in pts]
    label = "no interferer" if snr_i == "" else f"I-UE {snr_i} dB"
    if param:
        label += f" ({param})"
    ax.errorbar(x, y, yerr=[lo, hi], marker="o", capsize=3, label=label)

ax.set_xlabel("target UE SNR [dB]")
ax.set_ylabel("Correct Detection Rate")
ax.set_ylim(-0.02, 1.02)
ax.grid(True, alpha=0.4)
ax.legend()
ax.set_title(rows[0]["scenario_kind"] + " interference")
out = os.path.splitext(path)[0] + ".png"
fig.tight_layout()
fig.savefig(out, dpi=150)
print("wrote", out)

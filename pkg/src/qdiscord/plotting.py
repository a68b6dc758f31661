"""Standalone matplotlib scripts for the figure data written by ``figure``.

Each script reads only the CSV files next to it and saves ``figN.png``.
"""

import os
import runpy
from pathlib import Path

_PREAMBLE = '''\
import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(HERE, name), newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = {}
    for key in rows[0] if rows else []:
        vals = [r[key] for r in rows]
        if all(v in ("true", "false") for v in vals):
            out[key] = np.array([v == "true" for v in vals])
        else:
            out[key] = np.array([float(v) if v != "" else np.nan for v in vals])
    return out


def step(ax, h, **kw):
    ax.step(h["center"], h["density"], where="mid", **kw)


fig, ax = plt.subplots(figsize=(6, 4.5))
'''

_BODIES = {
    1: '''\
s = load("fig1_scatter.csv")
ax.plot(s["D"], s["discord"], "+", ms=3, alpha=0.4, label="random states")
w = load("fig1_werner.csv")
m = load("fig1_mems.csv")
ax.plot(m["D"], m["discord"], "--", label="MEMS")
ax.plot(w["D"], w["discord"], ":", label="Werner")
ax.plot([0, 0.5], [0, 0.5 * max(1, np.nanmax(s["discord"]) / 0.5)], "-", lw=0.8, label="diagonal")
ax.set_xlabel("GQd")
ax.set_ylabel("Qd (bits)")
''',
    2: '''\
a = load("fig2_hist_all.csv")
p = load("fig2_hist_ppt.csv")
step(ax, a, label="all states")
step(ax, p, label="PPT states")
if os.path.exists(os.path.join(HERE, "fig2_pure_analytic.csv")):
    q = load("fig2_pure_analytic.csv")
    ax.plot(q["D"], q["density"], "k:", label="3 sqrt(1-2D)")
ax.set_xlabel("GQd")
ax.set_ylabel("probability density")
inset = fig.add_axes([0.55, 0.45, 0.33, 0.35])
f = load("fig2_inset.csv")
for r in np.unique(f["target_R"]):
    sel = f["target_R"] == r
    inset.plot(f["center"][sel], f["density"][sel], lw=0.8, label=f"R={r:g}")
inset.tick_params(labelsize=7)
''',
    3: '''\
s = load("fig3_scatter.csv")
ax.plot(s["R"], s["D"], ",", alpha=0.3)
w = load("fig3_werner.csv")
m = load("fig3_mems.csv")
ax.plot(w["R"], w["D"], "-", label="Werner (max GQd)")
ax.plot(m["R"], m["D"], "--", label="MEMS")
ax.set_xlabel("R")
ax.set_ylabel("GQd")
''',
    4: '''\
a = load("fig4_mean_all.csv")
ax.plot(a["center"], a["mean"], "o-", ms=3, label="all states")
ax.axhline(0.2, ls=":", color="k", lw=0.8)
ax.set_xlabel("R")
ax.set_ylabel("<GQd>")
inset = fig.add_axes([0.55, 0.5, 0.33, 0.33])
p = load("fig4_mean_ppt.csv")
inset.plot(p["center"], p["mean"], "o-", ms=2)
inset.tick_params(labelsize=7)
''',
    5: '''\
a = load("fig5_hist_discord_all.csv")
p = load("fig5_hist_discord_ppt.csv")
step(ax, a, label="all states")
step(ax, p, label="PPT states")
ax.set_xlabel("Qd (bits)")
ax.set_ylabel("probability density")
inset = fig.add_axes([0.55, 0.45, 0.33, 0.35])
c = load("fig5_hist_cc_all.csv")
inset.step(c["center"], c["density"], where="mid")
inset.set_xlabel("CC", fontsize=7)
inset.tick_params(labelsize=7)
''',
    6: '''\
s = load("fig6_scatter.csv")
ax.plot(s["R"], s["discord"], ",", alpha=0.4)
m = load("fig6_mems.csv")
w = load("fig6_werner.csv")
ax.plot(m["R"], m["discord"], "--", label="MEMS")
ax.plot(w["R"], w["discord"], "-", label="Werner")
ax.set_xlabel("R")
ax.set_ylabel("Qd (bits)")
inset = fig.add_axes([0.55, 0.5, 0.33, 0.33])
b = load("fig6_mean.csv")
inset.plot(b["center"], b["mean"], "o-", ms=2)
inset.axhline(1 / (3 * np.log(2)), ls=":", color="k", lw=0.8)
inset.tick_params(labelsize=7)
''',
    7: '''\
s = load("fig7_scatter.csv")
ax.plot(s["D"], s["chsh"], ",", alpha=0.4)
lo = load("fig7_lower_werner.csv")
up = load("fig7_upper_mnms.csv")
ax.plot(lo["D"], lo["chsh"], "-", label="Werner: 4 sqrt(D)")
ax.plot(up["D"], up["chsh"], "--", label="MNMS")
ax.axhline(2, color="k", lw=0.8)
ax.axhline(2 * np.sqrt(2), color="k", lw=0.8, ls=":")
ax.set_xlabel("GQd")
ax.set_ylabel("B_CHSH max")
''',
}

_FOOTER = '''\
ax.legend(fontsize=8, loc="upper left")
fig.savefig(os.path.join(HERE, "fig{n}.png"), dpi=150, bbox_inches="tight")
'''


def plot_script(n):
    """Source text of the plotting script for figure ``n``."""
    return _PREAMBLE + _BODIES[n] + _FOOTER.format(n=n)


def script_name(n):
    return f"fig{n}_plot.py"


def render(n, outdir):
    """Run the emitted script for figure ``n`` in ``outdir``; return the PNG path."""
    os.environ.setdefault("MPLBACKEND", "Agg")
    path = Path(outdir) / script_name(n)
    runpy.run_path(str(path), run_name="__main__")
    import matplotlib.pyplot as plt

    plt.close("all")
    return Path(outdir) / f"fig{n}.png"

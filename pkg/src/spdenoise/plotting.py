"""PNG figures rendered from bench rows, written next to the CSV/JSON."""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bench import aggregate  # noqa: E402

COLORS = {"mf": "tab:blue", "ae": "tab:red", "mf3x3": "tab:green", "mf5x5": "tab:blue",
          "2mf": "tab:orange", "mfs_ae": "tab:red"}


def _series(aggs, xkey, **match):
    sel = [a for a in aggs if all(a[k] == v for k, v in match.items())]
    sel.sort(key=lambda a: a[xkey])
    x = np.array([a[xkey] for a in sel])
    return x, sel


def _draw(ax, x, sel, color, style, label):
    img = [a["ssim_img_mean"] for a in sel]
    ax.plot(x, img, style, color=color, marker="o", mfc="none", label=f"{label} SSIM_img")
    smap = [a["ssim_map_mean"] for a in sel]
    if not all(math.isnan(v) for v in smap):
        ax.plot(x, smap, style, color=color, marker="x", label=f"{label} SSIM_Map")


def _finish(fig, ax, xlabel, path):
    ax.set_xlabel(xlabel)
    ax.set_ylabel("SSIM")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_curves(rows, out_dir, prefix="curves") -> list[Path]:
    """One figure per pass count for the noise sweep, plus threshold and passes sweeps."""
    out_dir = Path(out_dir)
    aggs = aggregate(rows)
    schemes = sorted({a["scheme"] for a in aggs})
    paths = []
    noise = [a for a in aggs if a["experiment"] == "noise"]
    for p in sorted({a["passes"] for a in noise}):
        fig, ax = plt.subplots(figsize=(6, 4))
        thresholds = sorted({a["threshold"] for a in noise}, reverse=True)
        for s in schemes:
            for thr in thresholds:
                x, sel = _series(noise, "mu_sp", scheme=s, passes=p, threshold=thr)
                if len(sel):
                    label = f"{s} thr={thr:g}" if thr else f"{s} no thr"
                    _draw(ax, x, sel, COLORS.get(s), "-" if thr else "--", label)
        ax.set_title(f"{p} pass(es)")
        paths.append(_finish(fig, ax, "noise level (%)", out_dir / f"{prefix}_noise_p{p}.png"))
    for exp, xkey, xlabel in (("threshold", "threshold", "threshold"),
                              ("passes", "passes", "passes")):
        sub = [a for a in aggs if a["experiment"] == exp]
        if not sub:
            continue
        fig, ax = plt.subplots(figsize=(6, 4))
        for s in schemes:
            x, sel = _series(sub, xkey, scheme=s)
            if len(sel):
                _draw(ax, x, sel, COLORS.get(s), "-", s)
        paths.append(_finish(fig, ax, xlabel, out_dir / f"{prefix}_{exp}.png"))
    return paths


def plot_scores(rows, out_dir, prefix) -> list[Path]:
    """Grouped bars of mean SSIM_img / SSIM_Map per scheme with std error bars."""
    out_dir = Path(out_dir)
    aggs = aggregate(rows)
    cols = [("ssim_img", "SSIM_img"), ("ssim_map", "SSIM_Map"), ("ssim_map_dilated", "SSIM_Map dilated")]
    cols = [c for c in cols if not all(math.isnan(a[f"{c[0]}_mean"]) for a in aggs)]
    names = [a["scheme"] for a in aggs]
    x = np.arange(len(aggs))
    width = 0.8 / max(len(cols), 1)
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, (key, label) in enumerate(cols):
        ax.bar(x + (i - (len(cols) - 1) / 2) * width, [a[f"{key}_mean"] for a in aggs], width,
               yerr=[a[f"{key}_std"] for a in aggs], capsize=3, label=label)
    ax.set_xticks(x, names)
    models = sorted({a["model"] for a in aggs})
    ax.set_title(f"{prefix}: {', '.join(models)} noise, n={aggs[0]['count'] if aggs else 0} seeds")
    path = out_dir / f"{prefix}_scores.png"
    ax.set_ylabel("SSIM")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]

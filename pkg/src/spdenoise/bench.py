"""Benchmark sweeps: SSIM curves over noise, threshold and passes, and
multi-seed scheme scores on Lena.

Every row carries its seed. Aggregates group rows on every column except
seed and the scores, and carry count, mean and sample std.
"""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .autoencoder import AeConfig, ae_filter, ae_fuse
from .entropy import EntropySpec, dilate, entropy_map
from .image import WindowSpec
from .median import RecursionConfig, median_filter, recursive_threshold_denoise, threshold_merge
from .metrics import SsimSpec, ssim_global
from .noise import NoiseSpec, inject_sp_noise
from .schemes import MfsAeConfig, TwoMfConfig, mf_branch, mfs_ae_branches

CSV_COLUMNS = ("experiment", "model", "mu_sp", "seed", "scheme", "passes", "threshold",
               "ssim_img", "ssim_map", "ssim_map_dilated")
SCORE_COLUMNS = ("ssim_img", "ssim_map", "ssim_map_dilated")
KEY_COLUMNS = ("experiment", "model", "mu_sp", "scheme", "passes", "threshold")

CURVE_LEVELS = tuple(range(5, 71, 5))
CURVE_PASSES = (1, 2, 6)
CURVE_THRESHOLDS = tuple(round(0.05 * i, 2) for i in range(11))
CURVE_AE = AeConfig(block_h=50, block_w=50, window=WindowSpec(5), epochs=20,
                    learning_rate=0.001, compression_ratio=0.5)
LENA_LEVEL = 61.0


@dataclass
class Scorer:
    """SSIM of images and of entropy maps against one clean reference.

    The clean maps are computed once. With ``maps=False`` the map columns
    are left as NaN, which skips the slow entropy computation.
    """

    clean: np.ndarray
    maps: bool = True
    espec: EntropySpec = field(default_factory=EntropySpec)
    sspec: SsimSpec = field(default_factory=SsimSpec)

    def __post_init__(self):
        if self.maps:
            self._cmap = entropy_map(self.clean, self.espec)
            self._cmap_d = dilate(self._cmap)

    def __call__(self, restored) -> dict:
        out = {"ssim_img": ssim_global(self.clean, restored, self.sspec),
               "ssim_map": math.nan, "ssim_map_dilated": math.nan}
        if self.maps:
            rmap = entropy_map(restored, self.espec)
            out["ssim_map"] = ssim_global(self._cmap, rmap, self.sspec)
            out["ssim_map_dilated"] = ssim_global(self._cmap_d, dilate(rmap), self.sspec)
        return out


def _row(experiment, model, mu, seed, scheme, passes, threshold, scores):
    return {"experiment": experiment, "model": model, "mu_sp": float(mu), "seed": int(seed),
            "scheme": scheme, "passes": int(passes), "threshold": float(threshold), **scores}


def _dnf(scheme, ae_cfg, window):
    if scheme == "mf":
        return median_filter(window)
    if scheme == "ae":
        return ae_filter(ae_cfg)
    raise ValueError(f"curves support mf and ae, got {scheme!r}")


def _run_capture(source, dnf, threshold, capture):
    """Run up to ``max(capture)`` passes and keep the images at ``capture``."""
    kept = {}
    cfg = RecursionConfig(WindowSpec(1), threshold, max(capture))

    def cb(p, img):
        if p in capture:
            kept[p] = img

    recursive_threshold_denoise(source, dnf, cfg, callback=cb)
    return kept


def curves(clean, seeds, *, model="interval", schemes=("mf", "ae"), levels=CURVE_LEVELS,
           pass_counts=CURVE_PASSES, threshold=0.2, thresholds=CURVE_THRESHOLDS,
           threshold_level=23.3, max_passes=16, passes_level=66.6,
           window=WindowSpec(5), ae_cfg=CURVE_AE, maps=True, progress=None):
    """SSIM rows for the noise, threshold and pass-count sweeps.

    ``noise`` rows: every level, with ``threshold`` and without (0), at each
    of ``pass_counts``. ``threshold`` rows: single pass at
    ``threshold_level``. ``passes`` rows: 1..``max_passes`` at
    ``passes_level``.
    """
    score = Scorer(clean, maps=maps)
    rows = []
    for seed in seeds:
        for scheme in schemes:
            dnf = _dnf(scheme, ae_cfg, window)
            for mu in levels:
                noisy = inject_sp_noise(clean, NoiseSpec(model, mu, seed))
                for thr in (threshold, 0.0):
                    for p, img in sorted(_run_capture(noisy, dnf, thr, set(pass_counts)).items()):
                        rows.append(_row("noise", model, mu, seed, scheme, p, thr, score(img)))
                if progress:
                    progress(f"noise {scheme} mu={mu} seed={seed}")
            noisy = inject_sp_noise(clean, NoiseSpec(model, threshold_level, seed))
            filtered = dnf(noisy)
            for thr in thresholds:
                img = threshold_merge(noisy, filtered, thr)
                rows.append(_row("threshold", model, threshold_level, seed, scheme, 1, thr, score(img)))
            noisy = inject_sp_noise(clean, NoiseSpec(model, passes_level, seed))
            kept = _run_capture(noisy, dnf, threshold, set(range(1, max_passes + 1)))
            for p, img in sorted(kept.items()):
                rows.append(_row("passes", model, passes_level, seed, scheme, p, threshold, score(img)))
            if progress:
                progress(f"threshold/passes {scheme} seed={seed}")
    return rows


def scheme_outputs(noisy, cfg: MfsAeConfig | None = None, two_mf: TwoMfConfig | None = None,
                   mf3_threshold=0.1) -> dict:
    """Restorations compared on Lena, sharing the step-1 branches.

    ``mf3x3`` is the small-window MF at ``mf3_threshold``; ``mf5x5`` is the
    large-window branch; ``2mf`` merges the two; ``mfs_ae`` is the full
    fusion scheme. Branch images are reused whenever the configs agree.
    """
    cfg = cfg or MfsAeConfig()
    two_mf = two_mf or TwoMfConfig()
    bank, out_w2 = mfs_ae_branches(noisy, cfg)

    def small(thr, window, passes):
        if window == cfg.w1 and passes == cfg.passes and thr in cfg.ladder:
            return bank[cfg.ladder.index(thr)]
        return mf_branch(noisy, window, thr, passes)

    def large(thr, window, passes):
        if window == cfg.w2 and passes == cfg.passes and thr == cfg.thr_w2:
            return out_w2
        return mf_branch(noisy, window, thr, passes)

    out1 = small(two_mf.thr1_w1, two_mf.w1, two_mf.passes)
    out2 = large(two_mf.thr1_w2, two_mf.w2, two_mf.passes)
    return {
        "mf3x3": small(mf3_threshold, cfg.w1, cfg.passes),
        "mf5x5": out_w2,
        "2mf": threshold_merge(out1, out2, two_mf.thr2),
        "mfs_ae": threshold_merge(ae_fuse(bank, cfg.ae), out_w2, cfg.thr_final),
    }


def lena_scores(clean, seeds, *, model="fixed", level=LENA_LEVEL, cfg=None, two_mf=None,
                mf3_threshold=0.1, maps=True, experiment="lena", progress=None):
    """Per-seed rows for every scheme of :func:`scheme_outputs`."""
    cfg = cfg or MfsAeConfig()
    two_mf = two_mf or TwoMfConfig()
    score = Scorer(clean, maps=maps)
    thr = {"mf3x3": mf3_threshold, "mf5x5": cfg.thr_w2, "2mf": two_mf.thr2, "mfs_ae": cfg.thr_final}
    rows = []
    for seed in seeds:
        noisy = inject_sp_noise(clean, NoiseSpec(model, level, seed))
        for name, img in scheme_outputs(noisy, cfg, two_mf, mf3_threshold).items():
            rows.append(_row(experiment, model, level, seed, name, cfg.passes, thr[name], score(img)))
        if progress:
            progress(f"{experiment} {model} seed={seed}")
    return rows


def aggregate(rows) -> list[dict]:
    groups = defaultdict(list)
    for r in rows:
        groups[tuple(r[k] for k in KEY_COLUMNS)].append(r)
    out = []
    for key in sorted(groups):
        grp = groups[key]
        agg = dict(zip(KEY_COLUMNS, key))
        agg["count"] = len(grp)
        for col in SCORE_COLUMNS:
            vals = np.array([g[col] for g in grp], dtype=np.float64)
            agg[f"{col}_mean"] = float(vals.mean())
            agg[f"{col}_std"] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        out.append(agg)
    return out


def sort_rows(rows) -> list[dict]:
    return sorted(rows, key=lambda r: (r["experiment"], r["model"], r["scheme"], r["mu_sp"],
                                       r["threshold"], r["passes"], r["seed"]))


def write_csv(rows, path, columns=CSV_COLUMNS):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


def read_csv(path) -> list[dict]:
    ints = {"seed", "passes", "count"}
    with open(path, newline="") as fh:
        rows = []
        for r in csv.DictReader(fh):
            conv = {}
            for k, v in r.items():
                if k in ints:
                    conv[k] = int(v)
                elif k in ("experiment", "model", "scheme"):
                    conv[k] = v
                else:
                    conv[k] = float(v)
            rows.append(conv)
    return rows


def summary(rows) -> dict:
    """Scheme name -> aggregate scores, for single-experiment score rows."""
    return {a["scheme"]: {k: v for k, v in a.items() if k not in ("experiment", "scheme")}
            for a in aggregate(rows)}

"""Composite pipelines: two-scale 2MF and the MF-bank + AE fusion scheme."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .autoencoder import AeConfig, ae_fuse
from .image import WindowSpec, as_image
from .median import RecursionConfig, median_filter, recursive_threshold_denoise, threshold_merge


def _win(w) -> WindowSpec:
    return w if isinstance(w, WindowSpec) else WindowSpec(int(w))


def mf_branch(source, window, threshold, passes):
    cfg = RecursionConfig(window, threshold, passes)
    return recursive_threshold_denoise(source, median_filter(cfg.window), cfg)


@dataclass(frozen=True)
class TwoMfConfig:
    w1: WindowSpec = field(default_factory=lambda: WindowSpec(3))
    w2: WindowSpec = field(default_factory=lambda: WindowSpec(5))
    thr1_w1: float = 0.1
    thr1_w2: float = 0.1
    thr2: float = 0.2
    passes: int = 26

    def __post_init__(self):
        object.__setattr__(self, "w1", _win(self.w1))
        object.__setattr__(self, "w2", _win(self.w2))
        if self.w1.side >= self.w2.side:
            raise ValueError(f"w1 ({self.w1.side}) must be smaller than w2 ({self.w2.side})")
        if self.passes < 1:
            raise ValueError("passes must be >= 1")


def threshold_ladder(thr_min: float, thr_max: float, thr_step: float) -> list[float]:
    """Inclusive ladder built by integer indexing so the count never drifts."""
    if thr_step <= 0:
        raise ValueError("thr_step must be positive")
    n = int(np.floor((thr_max - thr_min) / thr_step + 1e-9)) + 1
    return [round(thr_min + i * thr_step, 12) for i in range(n)]


@dataclass(frozen=True)
class MfsAeConfig:
    w1: WindowSpec = field(default_factory=lambda: WindowSpec(3))
    w2: WindowSpec = field(default_factory=lambda: WindowSpec(5))
    thr_min: float = 0.08
    thr_max: float = 0.15
    thr_step: float = 0.01
    thr_w2: float = 0.1
    passes: int = 26
    ae: AeConfig = field(default_factory=lambda: AeConfig(
        window=WindowSpec(1), epochs=100, learning_rate=0.001, compression_ratio=0.4, loss="sum"))
    thr_final: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "w1", _win(self.w1))
        object.__setattr__(self, "w2", _win(self.w2))
        if self.w1.side >= self.w2.side:
            raise ValueError(f"w1 ({self.w1.side}) must be smaller than w2 ({self.w2.side})")
        if len(self.ladder) < 2:
            raise ValueError("threshold ladder must contain at least two values")
        if self.passes < 1:
            raise ValueError("passes must be >= 1")

    @property
    def ladder(self) -> list[float]:
        return threshold_ladder(self.thr_min, self.thr_max, self.thr_step)


def denoise_2mf(source, cfg: TwoMfConfig) -> np.ndarray:
    """Sharp (w1) and island-free (w2) branches merged by a final threshold."""
    source = as_image(source)
    out1 = mf_branch(source, cfg.w1, cfg.thr1_w1, cfg.passes)
    out2 = mf_branch(source, cfg.w2, cfg.thr1_w2, cfg.passes)
    return threshold_merge(out1, out2, cfg.thr2)


def mfs_ae_branches(source, cfg: MfsAeConfig):
    """Step 1 outputs: the w1 bank (one per ladder threshold) and the w2 image."""
    source = as_image(source)
    bank = [mf_branch(source, cfg.w1, thr, cfg.passes) for thr in cfg.ladder]
    return bank, mf_branch(source, cfg.w2, cfg.thr_w2, cfg.passes)


def denoise_mfs_ae(source, cfg: MfsAeConfig, *, branches=None) -> np.ndarray:
    """MF bank, AE fusion, then a threshold merge against the w2 branch.

    ``branches`` may carry a precomputed ``(bank, out_w2)`` pair.
    """
    bank, out_w2 = branches if branches is not None else mfs_ae_branches(source, cfg)
    fused = ae_fuse(bank, cfg.ae)
    return threshold_merge(fused, out_w2, cfg.thr_final)

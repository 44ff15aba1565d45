"""SSIM of images, SSIM of entropy maps and the relative-difference statistic."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .image import WindowSpec, iter_window_stacks

C1 = (0.01 * 255) ** 2
C2 = (0.03 * 255) ** 2


@dataclass(frozen=True)
class SsimSpec:
    window: WindowSpec = field(default_factory=lambda: WindowSpec(7))
    c1: float = C1
    c2: float = C2
    intensity_scale: float = 255.0

    def __post_init__(self):
        if not isinstance(self.window, WindowSpec):
            object.__setattr__(self, "window", WindowSpec(int(self.window)))


def ssim_local(win_x, win_y, spec: SsimSpec | None = None) -> float:
    """Local SSIM of two equal-length windows with population moments."""
    spec = spec or SsimSpec()
    x = np.asarray(win_x, dtype=np.float64).ravel() * spec.intensity_scale
    y = np.asarray(win_y, dtype=np.float64).ravel() * spec.intensity_scale
    if x.shape != y.shape:
        raise ValueError(f"window length mismatch: {x.size} vs {y.size}")
    mx, my = x.mean(), y.mean()
    dx, dy = x - mx, y - my
    vx, vy, cxy = (dx * dx).mean(), (dy * dy).mean(), (dx * dy).mean()
    return float((2 * mx * my + spec.c1) * (2 * cxy + spec.c2)
                 / ((mx * mx + my * my + spec.c1) * (vx + vy + spec.c2)))


def ssim_index_map(x, y, spec: SsimSpec | None = None) -> np.ndarray:
    """Per-pixel local SSIM over replicate-padded windows."""
    spec = spec or SsimSpec()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    s = spec.intensity_scale
    out = np.empty_like(x)
    y_stacks = iter_window_stacks(y, spec.window)
    for rows, wx in iter_window_stacks(x, spec.window):
        _, wy = next(y_stacks)
        wx = wx * s
        wy = wy * s
        mx = wx.mean(axis=-1)
        my = wy.mean(axis=-1)
        dx = wx - mx[..., None]
        dy = wy - my[..., None]
        vx = np.einsum("ijk,ijk->ij", dx, dx) / dx.shape[-1]
        vy = np.einsum("ijk,ijk->ij", dy, dy) / dy.shape[-1]
        cxy = np.einsum("ijk,ijk->ij", dx, dy) / dx.shape[-1]
        out[rows] = ((2 * mx * my + spec.c1) * (2 * cxy + spec.c2)
                     / ((mx * mx + my * my + spec.c1) * (vx + vy + spec.c2)))
    return out


def ssim_global(x, y, spec: SsimSpec | None = None) -> float:
    """Mean local SSIM over one window per pixel."""
    return float(math.fsum(ssim_index_map(x, y, spec).ravel()) / np.asarray(x).size)


def ssim_map_metric(clean, restored, espec=None, sspec: SsimSpec | None = None,
                    dilated: bool = False, *, clean_map=None) -> float:
    """SSIM between the entropy maps of ``clean`` and ``restored``.

    ``clean_map`` lets sweeps reuse the reference map (already dilated if
    ``dilated`` is set).
    """
    from .entropy import DILATION_KERNEL, EntropySpec, dilate, entropy_map

    espec = espec or EntropySpec()
    if np.shape(clean) != np.shape(restored):
        raise ValueError("dimension mismatch")
    if clean_map is None:
        clean_map = entropy_map(clean, espec)
        if dilated:
            clean_map = dilate(clean_map, DILATION_KERNEL, 1)
    other = entropy_map(restored, espec)
    if dilated:
        other = dilate(other, DILATION_KERNEL, 1)
    return ssim_global(clean_map, other, sspec)


def delta_ssim(s1: float, s2: float) -> float:
    """Relative difference in percent, ``100 |s1 - s2| / mean(s1, s2)``."""
    mean = (s1 + s2) / 2
    if mean == 0:
        raise ZeroDivisionError("delta_ssim undefined for s1 + s2 == 0")
    return 100.0 * abs(s1 - s2) / mean


@dataclass
class SsimReport:
    ssim_img: float
    ssim_map_standard: float
    ssim_map_dilated: float
    delta_pct: float
    provenance: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def build_report(clean, restored, espec=None, sspec=None, provenance=None) -> SsimReport:
    """Score ``restored`` against ``clean``; ``delta_pct`` compares SSIM_img and SSIM_Map."""
    from .entropy import DILATION_KERNEL, EntropySpec, dilate, entropy_map

    espec = espec or EntropySpec()
    s_img = ssim_global(clean, restored, sspec)
    map_c = entropy_map(clean, espec)
    map_r = entropy_map(restored, espec)
    s_map = ssim_global(map_c, map_r, sspec)
    s_dil = ssim_global(dilate(map_c, DILATION_KERNEL, 1), dilate(map_r, DILATION_KERNEL, 1), sspec)
    return SsimReport(s_img, s_map, s_dil, delta_ssim(s_img, s_map), dict(provenance or {}))

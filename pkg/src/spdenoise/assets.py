"""Bundled test images."""
from __future__ import annotations

from importlib import resources

import numpy as np

from .image import load_image


def lena() -> np.ndarray:
    """The 512x512 8-bit grayscale Lena test image."""
    with resources.as_file(resources.files(__package__) / "data" / "lena.png") as p:
        return load_image(p)


def cap_edge(height: int = 100, width: int = 150, grain: float = 0.03, seed: int = 2024) -> np.ndarray:
    """Synthetic low-resolution stand-in for a natural photograph.

    A mid-tone dome-shaped cap sits on a gently graded background; its
    lower boundary is a circular arc with a sharp step. A fixed-seed grain
    (std ``grain``, correlated over about one pixel) stands in for natural
    texture. Intensities are clipped to [0.3, 0.7], so every clean pixel is
    at least 0.2 away from both impulse bands and leftover impulses are
    unambiguous.
    """
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    bg = 0.38 + 0.08 * (x / max(width - 1, 1)) + 0.04 * (y / max(height - 1, 1))
    cy, cx, radius = 0.85 * height, 0.5 * width, 0.62 * width
    rr = np.hypot(x - cx, (y - cy) * 1.4)
    inside = (rr < radius) & (y < cy)
    shade = 0.52 + 0.10 * np.cos(np.clip(rr / radius, 0, 1) * np.pi / 2)
    img = np.where(inside, shade, bg)
    # stem: a vertical band below the cap
    stem = (np.abs(x - cx) < 0.12 * width) & (y >= cy)
    img = np.where(stem, 0.55 + 0.05 * (y - cy) / max(height - cy, 1), img)
    if grain > 0:
        g = np.random.default_rng(seed).standard_normal((height, width))
        k = np.array([0.25, 0.5, 0.25])
        g = np.apply_along_axis(np.convolve, 1, g, k, "same")
        g = np.apply_along_axis(np.convolve, 0, g, k, "same")
        img = img + grain * g / g.std()
    return np.round(np.clip(img, 0.3, 0.7) * 255) / 255


def cap_edge_mask(height: int = 100, width: int = 150, margin: int = 3) -> np.ndarray:
    """True where a pixel is at least ``margin`` pixels from the cap and stem boundaries."""
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    cy, cx, radius = 0.85 * height, 0.5 * width, 0.62 * width
    inside = (np.hypot(x - cx, (y - cy) * 1.4) < radius) & (y < cy)
    stem = (np.abs(x - cx) < 0.12 * width) & (y >= cy)
    region = inside.astype(int) + 2 * stem.astype(int)
    edge = np.zeros_like(inside)
    edge[:, 1:] |= region[:, 1:] != region[:, :-1]
    edge[1:, :] |= region[1:, :] != region[:-1, :]
    grown = edge.copy()
    for _ in range(margin):
        g = grown.copy()
        g[1:, :] |= grown[:-1, :]
        g[:-1, :] |= grown[1:, :]
        g[:, 1:] |= grown[:, :-1]
        g[:, :-1] |= grown[:, 1:]
        grown = g
    return ~grown

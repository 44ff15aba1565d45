"""Median filtering, the pixel-wise threshold rule and the recursive loop."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .image import WindowSpec, as_image, iter_window_stacks

Filter = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RecursionConfig:
    """Window, threshold and *total* number of filter passes.

    ``passes=1`` is plain single-pass filtering; "k recursions" is
    ``passes=k + 1``.
    """

    window: WindowSpec = field(default_factory=lambda: WindowSpec(5))
    threshold: float = 0.2
    passes: int = 1

    def __post_init__(self):
        if not isinstance(self.window, WindowSpec):
            object.__setattr__(self, "window", WindowSpec(int(self.window)))
        if int(self.passes) != self.passes or self.passes < 1:
            raise ValueError(f"passes must be an integer >= 1, got {self.passes}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")

    @property
    def recursions(self) -> int:
        return self.passes - 1


def median_of_window(values) -> float:
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("median of an empty window")
    if values.size % 2 == 0:
        raise ValueError("window length must be odd")
    k = (values.size - 1) // 2
    return float(np.partition(values, k)[k])


def median_filter_pass(img, window) -> np.ndarray:
    """One non-in-place median pass; the output is a fresh image."""
    img = np.asarray(img, dtype=np.float64)
    side = window.side if isinstance(window, WindowSpec) else WindowSpec(int(window)).side
    if side == 1:
        return img.copy()
    k = (side * side - 1) // 2
    out = np.empty_like(img)
    for rows, stack in iter_window_stacks(img, side):
        out[rows] = np.partition(stack, k, axis=-1)[..., k]
    return out


def threshold_merge(source, filtered, threshold: float) -> np.ndarray:
    """Keep the source pixel where ``|A - B| <= threshold``, else take B.

    Equality keeps the source. A zero threshold keeps the source only where
    the two images already agree, which equals taking B everywhere.
    """
    a = np.asarray(source, dtype=np.float64)
    b = np.asarray(filtered, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return np.where(np.abs(a - b) <= threshold, a, b)


def median_filter(window) -> Filter:
    """Bind a window to :func:`median_filter_pass` for use as a DnF."""
    spec = window if isinstance(window, WindowSpec) else WindowSpec(int(window))

    def dnf(img):
        return median_filter_pass(img, spec)

    dnf.window = spec
    return dnf


def recursive_threshold_denoise(source, dnf: Filter, cfg: RecursionConfig,
                                callback=None) -> np.ndarray:
    """Feed the thresholded output back into ``dnf`` for ``cfg.passes`` passes.

    The threshold always compares against the original ``source``, never
    the previous iterate. ``callback(pass_number, image)`` is invoked after
    every pass when given.
    """
    source = as_image(source)
    current = source
    for p in range(1, cfg.passes + 1):
        filtered = dnf(current)
        current = threshold_merge(source, filtered, cfg.threshold)
        if callback is not None:
            callback(p, current)
    return current


def recursive_median(source, window, threshold: float, passes: int) -> np.ndarray:
    cfg = RecursionConfig(WindowSpec(window) if isinstance(window, int) else window,
                          threshold, passes)
    return recursive_threshold_denoise(source, median_filter(cfg.window), cfg)

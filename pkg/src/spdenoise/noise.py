"""Seeded salt-and-pepper noise injection and measurement."""
from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .image import as_image

PEPPER_BAND = (0.0, 0.1)
SALT_BAND = (0.9, 1.0)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model (``"interval"`` or ``"fixed"``), level in percent, seed."""

    model: str = "interval"
    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("interval", "fixed"):
            raise ValueError(f"unknown noise model {self.model!r}")
        if not 0.0 <= float(self.level) <= 100.0:
            raise ValueError(f"noise level must be in [0, 100], got {self.level}")


def corrupted_count(level: float, n: int) -> int:
    """``round(level / 100 * n)`` with halves rounded up, free of float drift."""
    exact = Decimal(repr(float(level))) * n / 100
    return int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def _draw_band(rng, band, original):
    lo, hi = band
    values = rng.uniform(lo, hi, size=original.shape)
    clash = values == original
    while np.any(clash):
        values[clash] = rng.uniform(lo, hi, size=int(clash.sum()))
        clash = values == original
    return values


def inject_sp_noise(img, spec: NoiseSpec) -> np.ndarray:
    """Corrupt exactly ``round(level/100 * n)`` distinct pixels.

    Half go to salt and half to pepper; an odd count gives salt the extra
    pixel. Under the fixed model a pixel that already sits at 0 or 1 can
    be hit without changing, so exactness of :func:`measure_noise_level`
    holds only for images free of exact extremes.
    """
    clean = as_image(img)
    n = clean.size
    n_c = corrupted_count(spec.level, n)
    out = clean.copy()
    if n_c == 0:
        return out
    rng = np.random.default_rng(spec.seed)
    flat = out.reshape(-1)
    positions = rng.choice(n, size=n_c, replace=False)
    n_salt = (n_c + 1) // 2
    salt, pepper = positions[:n_salt], positions[n_salt:]
    if spec.model == "fixed":
        flat[salt] = 1.0
        flat[pepper] = 0.0
    else:
        flat[salt] = _draw_band(rng, SALT_BAND, flat[salt])
        flat[pepper] = _draw_band(rng, PEPPER_BAND, flat[pepper])
    return out


def measure_noise_level(clean, noisy) -> float:
    clean = np.asarray(clean)
    noisy = np.asarray(noisy)
    if clean.shape != noisy.shape:
        raise ValueError(f"dimension mismatch: {clean.shape} vs {noisy.shape}")
    return 100.0 * np.count_nonzero(clean != noisy) / clean.size

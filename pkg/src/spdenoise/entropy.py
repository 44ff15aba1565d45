"""2-D Sample Entropy over sliding windows, entropy maps and grey dilation.

For an ``s x s`` patch the m-patterns are every ``m x m`` sub-block whose
elements are spaced ``tau`` apart; the (m+1)-patterns likewise. Two
patterns of equal size match when their Chebyshev distance is ``<= r_eff``.
Ordered distinct pairs are counted (no self-matches) and the entropy is
``-ln(U[m+1] / U[m])``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .image import WindowSpec, iter_window_stacks, pad_replicate

DILATION_KERNEL = 5


@dataclass(frozen=True)
class EntropySpec:
    """Map window, embedding dimension, delay and tolerance.

    ``r_mode="std"`` scales ``r`` by the standard deviation of the whole
    image; ``"absolute"`` uses ``r`` as an intensity difference.
    ``undefined_policy="cap"`` maps ``U[m+1] == 0`` to ``ln(U[m])``.
    """

    window: WindowSpec = field(default_factory=lambda: WindowSpec(5))
    m: int = 1
    tau: int = 1
    r: float = 0.2
    r_mode: str = "std"
    undefined_policy: str = "cap"

    def __post_init__(self):
        if not isinstance(self.window, WindowSpec):
            object.__setattr__(self, "window", WindowSpec(int(self.window)))
        if self.m < 1 or self.tau < 1:
            raise ValueError("m and tau must be >= 1")
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.r_mode not in ("std", "absolute"):
            raise ValueError(f"unknown r_mode {self.r_mode!r}")
        if self.undefined_policy not in ("cap", "zero", "nan"):
            raise ValueError(f"unknown undefined_policy {self.undefined_policy!r}")
        if (self.m) * self.tau + 1 > self.window.side:
            raise ValueError("window too small for (m+1)-patterns")


def tolerance(img, spec: EntropySpec) -> float:
    if spec.r_mode == "std":
        return spec.r * float(np.std(img))
    return spec.r


def pattern_index(side: int, size: int, tau: int) -> np.ndarray:
    """Flat indices (n_patterns, size*size) of sub-patterns in a side x side patch."""
    extent = (size - 1) * tau + 1
    offs = np.arange(size) * tau
    idx = []
    for r in range(side - extent + 1):
        for c in range(side - extent + 1):
            idx.append(((r + offs)[:, None] * side + (c + offs)[None, :]).ravel())
    return np.array(idx, dtype=np.intp)


def _resolve(u_m, u_m1, policy):
    u_m = np.asarray(u_m, dtype=np.float64)
    u_m1 = np.asarray(u_m1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.log(u_m1 / u_m)
        if policy == "cap":
            ent = np.where(u_m1 == 0, np.log(np.maximum(u_m, 1.0)), ent)
        elif policy == "zero":
            ent = np.where(u_m1 == 0, 0.0, ent)
    return np.where(u_m == 0, 0.0, ent)


def _match_counts(stack, index, r_eff, block=4096):
    """Ordered distinct pattern-pair matches for each row of ``stack``."""
    flat = stack.reshape(-1, stack.shape[-1])
    counts = np.empty(flat.shape[0], dtype=np.int64)
    npat = index.shape[0]
    eye = np.eye(npat, dtype=bool)
    for s in range(0, flat.shape[0], block):
        pats = flat[s:s + block][:, index]  # (B, npat, size^2)
        dist = np.zeros((pats.shape[0], npat, npat))
        for e in range(pats.shape[-1]):
            col = pats[..., e]
            np.maximum(dist, np.abs(col[:, :, None] - col[:, None, :]), out=dist)
        match = dist <= r_eff
        match[:, eye] = False
        counts[s:s + block] = match.sum(axis=(1, 2))
    return counts.reshape(stack.shape[:-1])


def sampen2d(patch, spec: EntropySpec | None = None, r_eff: float | None = None) -> float:
    """Sample entropy of one square patch.

    ``r_eff`` overrides the tolerance; otherwise it is derived from the
    patch itself via :func:`tolerance`.
    """
    spec = spec or EntropySpec()
    patch = np.asarray(patch, dtype=np.float64)
    side = int(round(math.sqrt(patch.size)))
    if side * side != patch.size:
        raise ValueError("patch must be square")
    if spec.m * spec.tau + 1 > side:
        raise ValueError("patch too small for (m+1)-patterns")
    if r_eff is None:
        r_eff = tolerance(patch, spec)
    flat = patch.reshape(1, -1)
    u_m = _match_counts(flat, pattern_index(side, spec.m, spec.tau), r_eff)
    u_m1 = _match_counts(flat, pattern_index(side, spec.m + 1, spec.tau), r_eff)
    return float(_resolve(u_m, u_m1, spec.undefined_policy)[0])


def raw_entropy_map(img, spec: EntropySpec | None = None) -> np.ndarray:
    """Per-pixel SampEn of replicate-padded windows, before normalization."""
    spec = spec or EntropySpec()
    img = np.asarray(img, dtype=np.float64)
    r_eff = tolerance(img, spec)
    side = spec.window.side
    idx_m = pattern_index(side, spec.m, spec.tau)
    idx_m1 = pattern_index(side, spec.m + 1, spec.tau)
    out = np.empty_like(img)
    for rows, stack in iter_window_stacks(img, spec.window, chunk_rows=16):
        u_m = _match_counts(stack, idx_m, r_eff)
        u_m1 = _match_counts(stack, idx_m1, r_eff)
        out[rows] = _resolve(u_m, u_m1, spec.undefined_policy)
    return out


def normalize_minmax(raw) -> np.ndarray:
    raw = np.asarray(raw, dtype=np.float64)
    lo, hi = float(raw.min()), float(raw.max())
    if hi <= lo:
        return np.zeros_like(raw)
    return (raw - lo) / (hi - lo)


def entropy_map(img, spec: EntropySpec | None = None) -> np.ndarray:
    """Same-size entropy map, min-max normalized to [0, 1]."""
    return normalize_minmax(raw_entropy_map(img, spec))


def dilate(emap, kernel_side: int = DILATION_KERNEL, iterations: int = 1) -> np.ndarray:
    """Grey dilation: max over a replicate-padded square neighbourhood."""
    WindowSpec(kernel_side)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    out = np.asarray(emap, dtype=np.float64)
    k = kernel_side // 2
    for _ in range(iterations):
        padded = pad_replicate(out, k)
        h, w = out.shape
        # separable: row max then column max
        rowmax = padded[:, k:k + w].copy()
        for d in range(-k, k + 1):
            np.maximum(rowmax, padded[:, k + d:k + d + w], out=rowmax)
        res = rowmax[k:k + h].copy()
        for d in range(-k, k + 1):
            np.maximum(res, rowmax[k + d:k + d + h], out=res)
        out = res
    return out

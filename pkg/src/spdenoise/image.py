"""Grayscale image carrier, PGM/PNG I/O and the window/block geometry.

Images are plain 2-D ``float64`` numpy arrays with intensities in [0, 1].
Every sliding window in the package uses replicate (clamp-to-edge) padding so
that each pixel owns a full ``side x side`` neighbourhood.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# Rows processed at once by the windowed kernels; bounds peak memory.
CHUNK_ROWS = 64


class ImageFormatError(ValueError):
    """Raised for files that are not 8-bit grayscale PGM/PNG."""


def as_image(arr, *, copy: bool = False) -> np.ndarray:
    """Validate ``arr`` as an image and return it as a float64 array."""
    img = np.array(arr, dtype=np.float64, copy=copy or None)
    if img.ndim != 2:
        raise ValueError(f"image must be 2-D, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("image must have at least one pixel")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite values")
    if img.min() < 0.0 or img.max() > 1.0:
        raise ValueError("intensities must lie in [0, 1]")
    return img


@dataclass(frozen=True)
class WindowSpec:
    """Square ``side x side`` window centred on a pixel, replicate border."""

    side: int
    border: str = "replicate"

    def __post_init__(self):
        if int(self.side) != self.side or self.side < 1 or self.side % 2 == 0:
            raise ValueError(f"window side must be an odd integer >= 1, got {self.side}")
        if self.border != "replicate":
            raise ValueError("only the replicate border policy is supported")

    @property
    def half(self) -> int:
        return self.side // 2

    @property
    def size(self) -> int:
        return self.side * self.side


def _side(window) -> int:
    return window.side if isinstance(window, WindowSpec) else WindowSpec(int(window)).side


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

def _read_pgm(data: bytes) -> np.ndarray:
    if not data.startswith(b"P5"):
        raise ImageFormatError("only binary PGM (P5) is supported")
    fields: list[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PGM header")
        fields.append(data[start:pos])
    pos += 1  # single whitespace byte before the raster
    width, height, maxval = (int(f) for f in fields)
    if maxval != 255:
        raise ImageFormatError(f"unsupported PGM maxval {maxval}; expected 255")
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    if raster.size != width * height:
        raise ImageFormatError("truncated PGM raster")
    return raster.reshape(height, width)


def load_image(path) -> np.ndarray:
    """Read an 8-bit grayscale PGM (P5) or PNG as intensities in [0, 1]."""
    path = os.fspath(path)
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] == b"P5":
        raw = _read_pgm(data)
    elif data[:8] == b"\x89PNG\r\n\x1a\n":
        from PIL import Image as PILImage

        with PILImage.open(path) as im:
            if im.mode != "L":
                raise ImageFormatError(
                    f"{path}: PNG mode {im.mode!r} is not 8-bit grayscale")
            raw = np.asarray(im, dtype=np.uint8)
    else:
        raise ImageFormatError(f"{path}: not a PGM (P5) or PNG file")
    return raw.astype(np.float64) / 255.0


def to_bytes(img) -> np.ndarray:
    """Quantize to uint8 with ``round(i * 255)``."""
    img = as_image(img)
    return np.rint(img * 255.0).astype(np.uint8)


def save_image(img, path) -> None:
    """Write ``img`` as 8-bit grayscale; format chosen from the extension."""
    path = os.fspath(path)
    raw = to_bytes(img)
    ext = os.path.splitext(path)[1].lower()
    if ext == ".pgm":
        header = f"P5\n{raw.shape[1]} {raw.shape[0]}\n255\n".encode("ascii")
        with open(path, "wb") as fh:
            fh.write(header + raw.tobytes())
    elif ext == ".png":
        from PIL import Image as PILImage

        PILImage.fromarray(raw, mode="L").save(path)
    else:
        raise ImageFormatError(f"{path}: unsupported extension {ext!r} (use .pgm or .png)")


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------

def window_at(img, x: int, y: int, window) -> np.ndarray:
    """Return the ``side**2`` intensities around column ``x``, row ``y``.

    Values are listed row-major; out-of-range coordinates are clamped.
    """
    img = np.asarray(img)
    h, w = img.shape
    if not (0 <= x < w and 0 <= y < h):
        raise IndexError(f"pixel ({x}, {y}) outside {w}x{h} image")
    k = _side(window) // 2
    rows = np.clip(np.arange(y - k, y + k + 1), 0, h - 1)
    cols = np.clip(np.arange(x - k, x + k + 1), 0, w - 1)
    return img[np.ix_(rows, cols)].ravel()


def pad_replicate(img, k: int) -> np.ndarray:
    return np.pad(np.asarray(img), k, mode="edge")


def iter_window_stacks(img, window, chunk_rows: int = CHUNK_ROWS
                       ) -> Iterator[tuple[slice, np.ndarray]]:
    """Yield ``(row_slice, stack)`` with ``stack`` of shape (rows, W, side**2).

    ``stack[r, c]`` equals ``window_at(img, c, row_slice.start + r, window)``.
    """
    side = _side(window)
    k = side // 2
    img = np.asarray(img)
    h, w = img.shape
    padded = pad_replicate(img, k)
    views = sliding_window_view(padded, (side, side))
    for r0 in range(0, h, chunk_rows):
        r1 = min(h, r0 + chunk_rows)
        yield slice(r0, r1), views[r0:r1].reshape(r1 - r0, w, side * side)


def window_stack(img, window) -> np.ndarray:
    """All pixel windows at once, shape (H, W, side**2). Memory heavy."""
    side = _side(window)
    img = np.asarray(img)
    views = sliding_window_view(pad_replicate(img, side // 2), (side, side))
    return views.reshape(img.shape[0], img.shape[1], side * side)


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockGrid:
    """Non-overlapping tiling; edge blocks are truncated, never padded."""

    height: int
    width: int
    block_h: int
    block_w: int

    @property
    def shape(self) -> tuple[int, int]:
        return (-(-self.height // self.block_h), -(-self.width // self.block_w))

    @property
    def origins(self) -> list[tuple[int, int]]:
        return [(r, c)
                for r in range(0, self.height, self.block_h)
                for c in range(0, self.width, self.block_w)]

    def __len__(self) -> int:
        rows, cols = self.shape
        return rows * cols

    def slices(self) -> Iterator[tuple[int, tuple[slice, slice]]]:
        """Yield ``(block_index, (row_slice, col_slice))`` in row-major order."""
        for idx, (r, c) in enumerate(self.origins):
            yield idx, (slice(r, min(r + self.block_h, self.height)),
                        slice(c, min(c + self.block_w, self.width)))


def partition_blocks(img, block_h: int, block_w: int) -> BlockGrid:
    if block_h < 1 or block_w < 1:
        raise ValueError("block dimensions must be >= 1")
    h, w = np.asarray(img).shape
    return BlockGrid(h, w, int(block_h), int(block_w))

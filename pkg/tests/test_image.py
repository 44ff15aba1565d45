import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdenoise.image import (
    ImageFormatError, WindowSpec, as_image, iter_window_stacks, load_image,
    partition_blocks, save_image, window_at,
)


def write_pgm(path, w, h, raw: bytes, maxval=255):
    path.write_bytes(f"P5\n{w} {h}\n{maxval}\n".encode() + raw)


def test_load_pgm_scales_bytes(tmp_path):
    p = tmp_path / "a.pgm"
    write_pgm(p, 2, 2, bytes([0, 255, 128, 64]))
    img = load_image(p)
    np.testing.assert_array_equal(img, [[0.0, 1.0], [128 / 255, 64 / 255]])


def test_pgm_header_comments(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5\n# made by hand\n3 1\n255\n" + bytes([1, 2, 3]))
    assert load_image(p).shape == (1, 3)


def test_load_bundled_lena():
    from spdenoise.assets import lena

    img = lena()
    assert img.shape == (512, 512)
    assert 0 <= img.min() and img.max() <= 1


def test_rgb_png_rejected(tmp_path):
    from PIL import Image

    p = tmp_path / "rgb.png"
    Image.new("RGB", (4, 4)).save(p)
    with pytest.raises(ImageFormatError):
        load_image(p)


def test_sixteen_bit_pgm_rejected(tmp_path):
    p = tmp_path / "deep.pgm"
    write_pgm(p, 1, 1, b"\x00\x01", maxval=65535)
    with pytest.raises(ImageFormatError):
        load_image(p)


def test_unknown_format_rejected(tmp_path):
    p = tmp_path / "x.pgm"
    p.write_bytes(b"hello")
    with pytest.raises(ImageFormatError):
        load_image(p)


@pytest.mark.parametrize("ext", [".pgm", ".png"])
def test_save_extremes(tmp_path, ext):
    zeros = tmp_path / f"z{ext}"
    ones = tmp_path / f"o{ext}"
    save_image(np.zeros((3, 4)), zeros)
    save_image(np.ones((3, 4)), ones)
    if ext == ".pgm":
        assert zeros.read_bytes().endswith(bytes(12))
        assert ones.read_bytes().endswith(bytes([255] * 12))
    np.testing.assert_array_equal(load_image(zeros), 0.0)
    np.testing.assert_array_equal(load_image(ones), 1.0)


@pytest.mark.parametrize("ext", [".pgm", ".png"])
def test_round_trip_quantization(tmp_path, rng, ext):
    img = rng.random((17, 23))
    p = tmp_path / f"r{ext}"
    save_image(img, p)
    back = load_image(p)
    assert back.shape == img.shape
    assert np.max(np.abs(back - img)) <= 1 / 255 + 1e-15
    # bit-exact saved value
    np.testing.assert_array_equal(np.rint(back * 255), np.rint(img * 255))


def test_as_image_rejects_out_of_range():
    with pytest.raises(ValueError):
        as_image([[1.5]])
    with pytest.raises(ValueError):
        as_image(np.zeros(3))


def test_window_spec_odd():
    for bad in (0, 2, 4, -1):
        with pytest.raises(ValueError):
            WindowSpec(bad)
    assert WindowSpec(5).size == 25


def test_window_interior(rng):
    img = rng.random((6, 7))
    vals = window_at(img, 3, 2, WindowSpec(3))
    np.testing.assert_array_equal(vals, img[1:4, 2:5].ravel())


def test_window_corner_constant():
    img = np.full((4, 4), 0.3)
    np.testing.assert_array_equal(window_at(img, 0, 0, WindowSpec(3)), np.full(9, 0.3))


def test_window_corner_clamp_2x2():
    a, b, c, d = 0.1, 0.2, 0.3, 0.4
    img = np.array([[a, b], [c, d]])
    np.testing.assert_array_equal(window_at(img, 0, 0, WindowSpec(3)),
                                  [a, a, b, a, a, b, c, c, d])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.sampled_from([1, 3, 5, 7]))
def test_window_totality_matches_window_at(h, w, side):
    img = np.random.default_rng(h * 31 + w).random((h, w))
    for rows, stack in iter_window_stacks(img, side, chunk_rows=3):
        assert stack.shape[-1] == side * side
        for r in range(stack.shape[0]):
            for c in range(w):
                np.testing.assert_array_equal(stack[r, c], window_at(img, c, rows.start + r, side))


def test_partition_porcini_size():
    grid = partition_blocks(np.zeros((100, 150)), 50, 50)
    assert grid.shape == (2, 3) and len(grid) == 6
    assert all(rs.stop - rs.start == 50 and cs.stop - cs.start == 50 for _, (rs, cs) in grid.slices())


def test_partition_lena_edges():
    grid = partition_blocks(np.zeros((512, 512)), 50, 50)
    assert grid.shape == (11, 11)
    last = list(grid.slices())[-1][1]
    assert (last[0].stop - last[0].start, last[1].stop - last[1].start) == (12, 12)


def test_partition_single_block():
    assert len(partition_blocks(np.zeros((7, 9)), 7, 9)) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(1, 15), st.integers(1, 15))
def test_partition_exact_cover(h, w, bh, bw):
    cover = np.zeros((h, w), dtype=int)
    for _, (rs, cs) in partition_blocks(np.zeros((h, w)), bh, bw).slices():
        cover[rs, cs] += 1
    assert np.all(cover == 1)

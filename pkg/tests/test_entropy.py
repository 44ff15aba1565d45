import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdenoise.entropy import (
    EntropySpec, dilate, entropy_map, normalize_minmax, raw_entropy_map, sampen2d,
)
from spdenoise.image import window_at


def oracle_sampen(patch, m, tau, r):
    """Enumerate every pattern pair by hand; independent of the vectorised path."""
    patch = [list(row) for row in patch]
    side = len(patch)

    def patterns(size):
        extent = (size - 1) * tau + 1
        pats = []
        for r0 in range(side - extent + 1):
            for c0 in range(side - extent + 1):
                pats.append([patch[r0 + i * tau][c0 + j * tau]
                             for i in range(size) for j in range(size)])
        return pats

    def count(pats):
        total = 0
        for i, p in enumerate(pats):
            for j, q in enumerate(pats):
                if i != j and max(abs(a - b) for a, b in zip(p, q)) <= r:
                    total += 1
        return total

    um, um1 = count(patterns(m)), count(patterns(m + 1))
    if um == 0:
        return 0.0
    if um1 == 0:
        return math.log(um)
    return -math.log(um1 / um)


def test_constant_patch_value():
    spec = EntropySpec(window=5)
    val = sampen2d(np.full((5, 5), 0.4), spec)
    assert val == pytest.approx(math.log(600 / 240), abs=1e-12)
    assert val == pytest.approx(0.916, abs=1e-3)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_binary_patch_matches_oracle(seed):
    patch = np.random.default_rng(seed).integers(0, 2, size=(5, 5)).astype(float)
    spec = EntropySpec(window=5, r=0.5, r_mode="absolute")
    assert sampen2d(patch, spec) == pytest.approx(oracle_sampen(patch, 1, 1, 0.5), abs=1e-12)


def test_cap_policy():
    # strictly increasing ramp: no 2x2 pair matches under a tiny tolerance
    patch = np.arange(25, dtype=float).reshape(5, 5) / 24
    spec = EntropySpec(window=5, r=1e-6, r_mode="absolute")
    # 1x1 patterns are all distinct too, so U[m] == 0 -> 0 by policy
    assert sampen2d(patch, spec) == 0.0
    patch2 = np.tile([0.0, 1.0, 0.5, 0.25, 0.75], (5, 1))
    # rows identical: 1x1 matches exist; 2x2 matches exist across rows as well
    u = oracle_sampen(patch2, 1, 1, 1e-6)
    assert sampen2d(patch2, spec) == pytest.approx(u, abs=1e-12)
    patch3 = np.array([[0.0, 0.0, 0.3], [0.6, 0.9, 0.1], [0.2, 0.5, 0.8]])
    # 1x1 has one matching pair (ordered: 2), no 2x2 pair matches -> ln(2)
    assert sampen2d(patch3, EntropySpec(window=3, r=1e-6, r_mode="absolute")) == pytest.approx(math.log(2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.sampled_from([1, 2]), st.sampled_from([1, 2]),
       st.floats(0.05, 0.6), st.integers(0, 10_000))
def test_oracle_equivalence(side, m, tau, r, seed):
    if m * tau + 1 > side:
        return
    patch = np.random.default_rng(seed).integers(0, 5, size=(side, side)) / 4
    spec = EntropySpec(window=side, m=m, tau=tau, r=r, r_mode="absolute")
    assert sampen2d(patch, spec) == pytest.approx(oracle_sampen(patch, m, tau, r), abs=1e-12)


def test_std_scaled_tolerance():
    patch = np.random.default_rng(5).random((5, 5))
    spec = EntropySpec(window=5, r=0.2)
    r_eff = 0.2 * patch.std()
    assert sampen2d(patch, spec) == pytest.approx(oracle_sampen(patch, 1, 1, r_eff), abs=1e-12)


def two_region(h=8, w=8):
    img = np.full((h, w), 0.2)
    img[:, w // 2:] = 0.7
    img += np.random.default_rng(0).integers(0, 3, size=(h, w)) * 0.05
    return img


def test_map_matches_per_pixel_oracle():
    img = two_region()
    spec = EntropySpec()
    r_eff = spec.r * img.std()
    raw = raw_entropy_map(img, spec)
    for y in range(img.shape[0]):
        for x in range(img.shape[1]):
            patch = window_at(img, x, y, 5).reshape(5, 5)
            assert raw[y, x] == pytest.approx(oracle_sampen(patch, 1, 1, r_eff), abs=1e-12)


def test_constant_image_zero_map():
    emap = entropy_map(np.full((9, 11), 0.3))
    assert emap.shape == (9, 11)
    np.testing.assert_array_equal(emap, 0.0)


def test_map_same_size_and_normalized(rng):
    img = rng.random((13, 21))
    emap = entropy_map(img)
    assert emap.shape == img.shape
    assert emap.min() == 0.0 and emap.max() == 1.0


def test_translation_equivariance(rng):
    img = rng.integers(0, 6, size=(24, 24)) / 5
    spec = EntropySpec()
    shifted = np.roll(img, (3, 2), axis=(0, 1))  # roll keeps the global std
    a = raw_entropy_map(img, spec)
    b = raw_entropy_map(shifted, spec)
    np.testing.assert_allclose(b[3 + 4:-4, 2 + 4:-4], a[4:-4 - 3, 4:-4 - 2], atol=1e-12)


def test_normalize_constant():
    np.testing.assert_array_equal(normalize_minmax(np.full((3, 3), 2.0)), 0.0)


def test_dilate_zero_and_point():
    np.testing.assert_array_equal(dilate(np.zeros((6, 6)), 5, 1), 0.0)
    m = np.zeros((11, 11))
    m[5, 5] = 1.0
    out = dilate(m, 5, 1)
    expect = np.zeros((11, 11))
    expect[3:8, 3:8] = 1.0
    np.testing.assert_array_equal(out, expect)


def brute_dilate(m, side):
    h, w = m.shape
    k = side // 2
    out = np.empty_like(m)
    for y, x in product(range(h), range(w)):
        out[y, x] = max(m[min(max(y + dy, 0), h - 1), min(max(x + dx, 0), w - 1)]
                        for dy in range(-k, k + 1) for dx in range(-k, k + 1))
    return out


@pytest.mark.parametrize("side", [1, 3, 5])
def test_dilate_matches_brute(rng, side):
    m = rng.random((9, 14))
    np.testing.assert_array_equal(dilate(m, side, 1), brute_dilate(m, side))
    np.testing.assert_array_equal(dilate(m, side, 2), brute_dilate(brute_dilate(m, side), side))


def test_dilate_extensive_and_plateau(rng):
    m = rng.random((15, 15))
    d = dilate(m, 5, 1)
    assert np.all(d >= m)
    plateau = np.zeros((20, 20))
    plateau[4:14, 4:14] = 1.0
    once = dilate(plateau, 3, 1)
    # the interior of a plateau wider than the kernel is a fixed point
    np.testing.assert_array_equal(dilate(once, 3, 1)[5:13, 5:13], once[5:13, 5:13])


def test_deterministic(rng):
    img = rng.random((10, 10))
    np.testing.assert_array_equal(entropy_map(img), entropy_map(img))


def test_patch_too_small():
    with pytest.raises(ValueError):
        sampen2d(np.zeros((2, 2)), EntropySpec(window=3, m=2))

import dataclasses

import numpy as np
import pytest

from spdenoise.autoencoder import AeConfig, ae_filter, ae_fuse
from spdenoise.image import WindowSpec
from spdenoise.median import RecursionConfig, recursive_median, recursive_threshold_denoise, threshold_merge
from spdenoise.noise import NoiseSpec, inject_sp_noise
from spdenoise.schemes import (
    MfsAeConfig, TwoMfConfig, denoise_2mf, denoise_mfs_ae, mfs_ae_branches, threshold_ladder,
)


@pytest.fixture
def noisy():
    clean = 0.3 + 0.4 * np.random.default_rng(0).random((24, 30))
    return inject_sp_noise(clean, NoiseSpec("interval", 40, 1))


def small_mfs(**kw):
    ae = AeConfig(block_h=12, block_w=10, window=WindowSpec(1), epochs=10,
                  learning_rate=0.001, compression_ratio=0.4, loss="sum", seed=3)
    base = dict(thr_min=0.08, thr_max=0.1, thr_step=0.01, passes=3, ae=ae)
    base.update(kw)
    return MfsAeConfig(**base)


def test_ladder_values():
    lad = threshold_ladder(0.08, 0.15, 0.01)
    assert lad == [0.08, 0.09, 0.1, 0.11, 0.12, 0.13, 0.14, 0.15]
    assert MfsAeConfig().ladder == lad
    assert len(threshold_ladder(0.1, 0.5, 0.1)) == 5
    assert threshold_ladder(0.2, 0.2, 0.05) == [0.2]


def test_ladder_needs_two_values():
    with pytest.raises(ValueError):
        MfsAeConfig(thr_min=0.1, thr_max=0.1)


def test_scale_ordering_enforced():
    with pytest.raises(ValueError):
        TwoMfConfig(w1=5, w2=5)
    with pytest.raises(ValueError):
        TwoMfConfig(w1=7, w2=5)
    with pytest.raises(ValueError):
        MfsAeConfig(w1=5, w2=3)


def test_defaults_match_presets():
    cfg = TwoMfConfig()
    assert (cfg.w1.side, cfg.w2.side, cfg.thr1_w1, cfg.thr1_w2, cfg.thr2, cfg.passes) == \
        (3, 5, 0.1, 0.1, 0.2, 26)
    m = MfsAeConfig()
    assert (m.ae.block_h, m.ae.window.side, m.ae.epochs, m.ae.compression_ratio) == (50, 1, 100, 0.4)
    assert (m.thr_w2, m.thr_final, m.passes) == (0.1, 0.25, 26)


def test_2mf_zero_threshold_is_w2_branch(noisy):
    cfg = TwoMfConfig(thr2=0.0, passes=3)
    out2 = recursive_median(noisy, 5, cfg.thr1_w2, 3)
    np.testing.assert_array_equal(denoise_2mf(noisy, cfg), out2)


def test_2mf_pixel_provenance(noisy):
    cfg = TwoMfConfig(passes=4)
    out = denoise_2mf(noisy, cfg)
    out1 = recursive_median(noisy, 3, cfg.thr1_w1, 4)
    out2 = recursive_median(noisy, 5, cfg.thr1_w2, 4)
    assert np.all((out == out1) | (out == out2))
    np.testing.assert_array_equal(out, threshold_merge(out1, out2, cfg.thr2))


def test_merge_of_equal_branches(noisy):
    a = recursive_median(noisy, 3, 0.1, 2)
    np.testing.assert_array_equal(threshold_merge(a, a.copy(), 0.2), a)


def test_mf_zero_threshold_is_plain_filter(noisy):
    from spdenoise.median import median_filter_pass

    out = recursive_median(noisy, 5, 0.0, 3)
    ref = noisy
    for _ in range(3):
        ref = median_filter_pass(ref, 5)
    np.testing.assert_array_equal(out, ref)


def test_ae_zero_threshold_is_plain_filter(noisy):
    cfg = AeConfig(block_h=12, block_w=15, window=WindowSpec(3), epochs=3, compression_ratio=0.5)
    dnf = ae_filter(cfg)
    out = recursive_threshold_denoise(noisy, dnf, RecursionConfig(WindowSpec(1), 0.0, 2))
    np.testing.assert_array_equal(out, dnf(dnf(noisy)))


def test_mfs_ae_zero_final_threshold_is_w2_branch(noisy):
    cfg = small_mfs(thr_final=0.0)
    _, out_w2 = mfs_ae_branches(noisy, cfg)
    np.testing.assert_array_equal(denoise_mfs_ae(noisy, cfg), out_w2)


def test_mfs_ae_steps(noisy):
    cfg = small_mfs()
    bank, out_w2 = mfs_ae_branches(noisy, cfg)
    assert len(bank) == 3
    for thr, img in zip(cfg.ladder, bank):
        np.testing.assert_array_equal(img, recursive_median(noisy, 3, thr, cfg.passes))
    np.testing.assert_array_equal(out_w2, recursive_median(noisy, 5, cfg.thr_w2, cfg.passes))
    expect = threshold_merge(ae_fuse(bank, cfg.ae), out_w2, cfg.thr_final)
    np.testing.assert_array_equal(denoise_mfs_ae(noisy, cfg), expect)
    # precomputed branches give the same result
    np.testing.assert_array_equal(denoise_mfs_ae(noisy, cfg, branches=(bank, out_w2)), expect)


def test_schemes_deterministic(noisy):
    cfg = small_mfs()
    np.testing.assert_array_equal(denoise_mfs_ae(noisy, cfg), denoise_mfs_ae(noisy, cfg))
    c2 = TwoMfConfig(passes=3)
    np.testing.assert_array_equal(denoise_2mf(noisy, c2), denoise_2mf(noisy, c2))
    other = dataclasses.replace(cfg, ae=dataclasses.replace(cfg.ae, seed=4))
    assert not np.array_equal(denoise_mfs_ae(noisy, cfg), denoise_mfs_ae(noisy, other))


def test_output_range(noisy):
    out = denoise_mfs_ae(noisy, small_mfs())
    assert out.min() >= 0 and out.max() <= 1

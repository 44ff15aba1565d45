"""Salt-and-pepper image denoising: recursive threshold median filters,
block-wise autoencoders, and SSIM scores on images and entropy maps."""

__version__ = "0.1.0"

from .image import WindowSpec, load_image, save_image  # noqa: E402
from .noise import NoiseSpec, inject_sp_noise, measure_noise_level  # noqa: E402
from .median import RecursionConfig, recursive_median, recursive_threshold_denoise, threshold_merge  # noqa: E402
from .autoencoder import AeConfig, ae_denoise_image, ae_fuse, train_ae  # noqa: E402
from .entropy import EntropySpec, dilate, entropy_map, sampen2d  # noqa: E402
from .metrics import SsimSpec, build_report, delta_ssim, ssim_global  # noqa: E402
from .schemes import MfsAeConfig, TwoMfConfig, denoise_2mf, denoise_mfs_ae  # noqa: E402

__all__ = [
    "WindowSpec", "load_image", "save_image", "NoiseSpec", "inject_sp_noise",
    "measure_noise_level", "RecursionConfig", "recursive_median", "recursive_threshold_denoise",
    "threshold_merge", "AeConfig", "ae_denoise_image", "ae_fuse", "train_ae", "EntropySpec",
    "dilate", "entropy_map", "sampen2d", "SsimSpec", "build_report", "delta_ssim", "ssim_global",
    "MfsAeConfig", "TwoMfConfig", "denoise_2mf", "denoise_mfs_ae",
]

"""Satellite-to-ground synthesis pipeline bindings."""

from ._core import (
    ContractError,
    IoError,
    NoiseSchedule,
    UsageError,
    ValidationError,
    add_noise,
    angles_to_pano,
    cfg_combine,
    ddim_step,
    inference_timesteps,
    make_schedule,
    pano_to_angles,
    psnr,
    rasterize,
    resample_perspective,
    sample_guided,
    sample_temporal,
    split_assignments,
    ssim,
    tile_extent,
)

__all__ = [
    "ContractError",
    "IoError",
    "NoiseSchedule",
    "UsageError",
    "ValidationError",
    "add_noise",
    "angles_to_pano",
    "cfg_combine",
    "ddim_step",
    "inference_timesteps",
    "make_schedule",
    "pano_to_angles",
    "psnr",
    "rasterize",
    "resample_perspective",
    "sample_guided",
    "sample_temporal",
    "split_assignments",
    "ssim",
    "tile_extent",
]

"""Fixed-size grayscale images from time-frequency matrices."""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import zoom

from sehs.errors import DomainError


@dataclass(frozen=True)
class TfImage:
    """Normalized time-frequency raster fed to the detector."""

    pixels: np.ndarray            # (H, W) float in [0, 1]
    freq_band: tuple              # (f_lo, f_hi) [Hz]
    duration: float               # [s]
    source_id: str = ""
    degenerate: bool = False      # all-zero input matrix

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 2 or p.size == 0:
            raise DomainError("pixels must be a non-empty 2-D array")
        if p.min() < 0.0 or p.max() > 1.0:
            raise DomainError("pixel intensities must lie in [0, 1]")


def to_image(matrix: np.ndarray, matrix_band: tuple = (0.0, 20.0),
             freq_band: tuple = (0.0, 20.0), size: tuple = (128, 128),
             duration: float = 0.0, source_id: str = "") -> TfImage:
    """Crop, compress, normalize, and resample a matrix into a TfImage.

    Rows of ``matrix`` are linear frequency bins spanning ``matrix_band``;
    the image keeps only rows inside ``freq_band``, applies log1p magnitude
    compression, per-image min-max normalization (an all-equal matrix maps
    to zero), and bilinear resampling to ``size``.
    """
    matrix = np.abs(np.asarray(matrix, dtype=float))
    if matrix.ndim != 2 or matrix.shape[0] < 2 or matrix.shape[1] < 2:
        raise DomainError("matrix must be 2-D with at least 2 rows/columns")
    lo, hi = matrix_band
    centers = lo + (hi - lo) / matrix.shape[0] * (0.5 + np.arange(matrix.shape[0]))
    keep = (centers >= freq_band[0]) & (centers <= freq_band[1])
    if keep.sum() < 2:
        raise DomainError("matrix does not cover the requested band")
    cropped = matrix[keep]
    degenerate = bool(cropped.max() == 0.0)
    # Scale-normalize before compressing so the image is exactly invariant
    # to the absolute signal amplitude.
    if not degenerate:
        cropped = cropped / cropped.max()
    cropped = np.log1p(cropped)
    span = cropped.max() - cropped.min()
    if span > 0.0:
        cropped = (cropped - cropped.min()) / span
    else:
        cropped = np.zeros_like(cropped)

    h, w = size
    resized = zoom(cropped, (h / cropped.shape[0], w / cropped.shape[1]),
                   order=1, grid_mode=True, mode="nearest")
    resized = np.clip(resized, 0.0, 1.0)
    return TfImage(pixels=resized, freq_band=tuple(freq_band),
                   duration=duration, source_id=source_id,
                   degenerate=degenerate)


def save_tf_image(path, image: TfImage, png: bool = False) -> None:
    """Raw little-endian float32 pixels plus a JSON header sidecar."""
    path = Path(path)
    image.pixels.astype("<f4").tofile(path)
    header = {
        "shape": list(image.pixels.shape),
        "dtype": "<f4",
        "freq_band": list(image.freq_band),
        "duration": image.duration,
        "source_id": image.source_id,
        "degenerate": image.degenerate,
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(header, indent=2))
    if png:
        from PIL import Image

        arr = (np.clip(image.pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
        Image.fromarray(arr, mode="L").save(path.with_suffix(".png"))


def load_tf_image(path) -> TfImage:
    path = Path(path)
    header = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    pixels = np.fromfile(path, dtype="<f4").reshape(header["shape"])
    return TfImage(pixels=pixels.astype(float),
                   freq_band=tuple(header["freq_band"]),
                   duration=header["duration"],
                   source_id=header.get("source_id", ""),
                   degenerate=header.get("degenerate", False))

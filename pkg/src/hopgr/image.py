"""Grayscale raster container shared by the whole pipeline."""

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True, eq=False)
class GrayImage:
    """A 2D grayscale image with float64 pixels in [0, 1].

    The pixel array is copied on construction and marked read-only, so a
    GrayImage can be shared freely between workers.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DataError("invalid-parameter",
                            f"image must be a non-empty 2D array, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise DataError("invalid-parameter", "image contains non-finite pixels")
        lo, hi = float(arr.min()), float(arr.max())
        if lo < 0.0 or hi > 1.0:
            raise DataError("invalid-parameter",
                            f"pixel values must lie in [0, 1], got range [{lo}, {hi}]")
        arr = np.array(arr, copy=True, order="C")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

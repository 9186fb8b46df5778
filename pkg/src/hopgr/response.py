"""Bank convolution and the per-pixel competitive (minimum) response.

The convolution is a true 2D convolution (kernel flipped) with edge
replication at the borders, computed tap by tap so that every output pixel
accumulates its terms in the same fixed order. That makes the result
bit-reproducible and exactly translation-equivariant in the interior,
which the downstream direction statistics rely on.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DataError
from .gabor import FilterBank
from .image import GrayImage


@dataclass(frozen=True, eq=False)
class ResponseField:
    """Per-pixel competitive response and the index of the winning orientation.

    m[r, c] is the minimum over the bank's per-orientation responses at
    (r, c); theta_idx[r, c] is the smallest orientation index achieving it.
    """

    m: np.ndarray
    theta_idx: np.ndarray
    bank_thetas: tuple


@njit(cache=True)
def _accumulate_taps(padded, kflip, out):
    # Tap-ordered accumulation: elementwise only, no per-pixel reduction,
    # so identical windows always produce identical bits. The center tap is
    # added last; generated kernels set it so this exact accumulation order
    # sums to zero, making flat regions respond with a true 0.0.
    height, width = out.shape
    side = kflip.shape[0]
    half = side // 2
    for i in range(side):
        for j in range(side):
            if i == half and j == half:
                continue
            w = kflip[i, j]
            for r in range(height):
                for c in range(width):
                    out[r, c] += w * padded[r + i, c + j]
    w = kflip[half, half]
    for r in range(height):
        for c in range(width):
            out[r, c] += w * padded[r + half, c + half]


def convolve(image: GrayImage, kernel) -> np.ndarray:
    """Convolve an image with a kernel; edge-replicated borders, output dims = input dims."""
    side = kernel.side
    if image.height < side or image.width < side:
        raise DataError("image-too-small",
                        f"image {image.height}x{image.width} smaller than kernel side {side}")
    half = side // 2
    padded = np.pad(image.pixels, half, mode="edge")
    kflip = np.ascontiguousarray(kernel.weights[::-1, ::-1])
    out = np.zeros((image.height, image.width), dtype=np.float64)
    _accumulate_taps(padded, kflip, out)
    return out


def competitive_response(image: GrayImage, bank: FilterBank) -> ResponseField:
    """Minimum response and arg-min orientation over all bank kernels.

    Ties go to the smallest orientation index, so the result is independent
    of how the per-orientation maps were scheduled.
    """
    responses = np.stack([convolve(image, k) for k in bank.kernels])
    m = responses.min(axis=0)
    theta_idx = responses.argmin(axis=0).astype(np.int64)
    return ResponseField(m=m, theta_idx=theta_idx, bank_thetas=bank.thetas)


def warm_up():
    """Force JIT compilation of the convolution core (e.g. before forking workers)."""
    tiny = GrayImage(np.zeros((3, 3)))
    from .gabor import Kernel
    convolve(tiny, Kernel(np.zeros((3, 3))))

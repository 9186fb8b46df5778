"""Even (cosine) Gabor kernels and oriented filter banks.

A kernel for orientation ``theta`` responds most strongly to a line whose
visual orientation is ``theta`` (theta=0 is a horizontal line, theta grows
counter-clockwise). Internally the carrier coordinate is taken along the
row axis at theta=0, which is what makes that identification hold; the
synthetic generator uses the same convention.

All generated kernels are zero-mean (DC removed), so a constant image
region produces a zero response regardless of its brightness.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

MODE_UNIFORM = "uniform"
MODE_PHYSIOLOGICAL = "physiological"


@dataclass(frozen=True)
class BankParams:
    """Shared kernel parameters of a bank: frequency, envelope, extent."""

    f0: float = 0.1       # central frequency, cycles/pixel
    sigma: float = 4.0    # Gaussian envelope std, pixels
    half_size: int = 8    # kernel spans (2*half_size+1)^2 taps

    def validate(self):
        if not (self.f0 > 0):
            raise DataError("invalid-parameter", f"f0 must be > 0, got {self.f0}")
        if not (self.sigma > 0):
            raise DataError("invalid-parameter", f"sigma must be > 0, got {self.sigma}")
        if int(self.half_size) != self.half_size or self.half_size < 1:
            raise DataError("invalid-parameter",
                            f"half_size must be an integer >= 1, got {self.half_size}")


@dataclass(frozen=True)
class GaborParams:
    """Parameters of a single oriented kernel."""

    theta: float
    f0: float = 0.1
    sigma: float = 4.0
    half_size: int = 8

    def validate(self):
        if not (0.0 <= self.theta < math.pi):
            raise DataError("invalid-parameter",
                            f"theta must lie in [0, pi), got {self.theta}")
        BankParams(self.f0, self.sigma, self.half_size).validate()


@dataclass(frozen=True, eq=False)
class Kernel:
    """A square, odd-sided, zero-mean convolution kernel."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DataError("invalid-parameter", f"kernel must be square, got shape {w.shape}")
        if w.shape[0] % 2 != 1:
            raise DataError("invalid-parameter", f"kernel side must be odd, got {w.shape[0]}")
        if not np.isfinite(w).all():
            raise DataError("invalid-parameter", "kernel contains non-finite weights")
        if abs(float(w.sum())) > 1e-9:
            raise DataError("invalid-parameter",
                            f"kernel must be zero-mean, sum is {float(w.sum()):.3e}")
        w = np.array(w, copy=True, order="C")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def side(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class FilterBank:
    """An ordered, immutable set of oriented kernels sharing (f0, sigma, half_size)."""

    thetas: tuple
    kernels: tuple
    params: BankParams
    mode: str

    @property
    def count(self) -> int:
        return len(self.thetas)


def uniform_orientations(count: int) -> list:
    """Return ``count`` angles uniformly sampled over [0, pi): pi*k/count for k=0..count-1."""
    if int(count) != count or count < 1:
        raise DataError("invalid-parameter", f"orientation count must be >= 1, got {count}")
    return [math.pi * k / count for k in range(count)]


def make_kernel(params: GaborParams) -> Kernel:
    """Sample an even Gabor kernel on the integer grid and remove its DC component.

    weights[i][j] is evaluated at row offset i-half_size and column offset
    j-half_size; the rotated coordinates are
    x_theta = row*cos(theta) + col*sin(theta),
    y_theta = -row*sin(theta) + col*cos(theta),
    and the kernel is (1 / 2*pi*sigma^2) * exp(-(x_theta^2 + y_theta^2) / 2*sigma^2)
    * cos(2*pi*f0*x_theta), mean-subtracted after sampling.

    After the mean subtraction the center weight is nudged (by less than an
    ulp of a corner weight) so the convolution's own accumulation order sums
    the taps to an exact 0.0; constant regions then respond with a true zero
    and orientation ties break deterministically. The center is its own
    symmetric partner, so even symmetry stays exact.
    """
    params.validate()
    h = params.half_size
    off = np.arange(-h, h + 1, dtype=np.float64)
    rows, cols = np.meshgrid(off, off, indexing="ij")
    x_t = rows * math.cos(params.theta) + cols * math.sin(params.theta)
    y_t = -rows * math.sin(params.theta) + cols * math.cos(params.theta)
    envelope = np.exp(-0.5 * (x_t * x_t + y_t * y_t) / (params.sigma * params.sigma))
    carrier = np.cos(2.0 * math.pi * params.f0 * x_t)
    raw = envelope * carrier / (2.0 * math.pi * params.sigma * params.sigma)
    weights = raw - raw.mean()
    weights[h, h] = -_offcenter_sum(weights)
    return Kernel(weights)


def _offcenter_sum(weights: np.ndarray) -> float:
    """Sum of all non-center taps in the convolution's accumulation order.

    Mirrors response._accumulate_taps: flipped scan order, center skipped.
    """
    side = weights.shape[0]
    h = side // 2
    flipped = weights[::-1, ::-1].ravel()
    center = h * side + h
    total = 0.0
    for idx in range(flipped.size):
        if idx != center:
            total += float(flipped[idx])
    return total


def build_bank(orientations, f0: float = 0.1, sigma: float = 4.0,
               half_size: int = 8) -> FilterBank:
    """Build one kernel per orientation. Orientations must be strictly increasing in [0, pi).

    The bank is tagged ``uniform`` exactly when the orientation list equals
    ``uniform_orientations(len(orientations))``, ``physiological`` otherwise.
    """
    thetas = list(orientations)
    if not thetas:
        raise DataError("invalid-parameter", "orientation list must not be empty")
    for i, t in enumerate(thetas):
        if not (0.0 <= t < math.pi):
            raise DataError("invalid-parameter", f"orientation {t} out of [0, pi)")
        if i > 0 and t <= thetas[i - 1]:
            raise DataError("invalid-parameter",
                            "orientations must be strictly increasing (no duplicates)")
    params = BankParams(f0, sigma, half_size)
    params.validate()
    kernels = tuple(make_kernel(GaborParams(t, f0, sigma, half_size)) for t in thetas)
    mode = MODE_UNIFORM if thetas == uniform_orientations(len(thetas)) else MODE_PHYSIOLOGICAL
    return FilterBank(tuple(thetas), kernels, params, mode)

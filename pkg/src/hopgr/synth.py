"""Synthetic vein-like test images: straight dark bands on a bright background.

Used as the controllable substrate for direction-recovery and descriptor
tests. Lines use the same orientation convention as the filter bank
(theta=0 is a horizontal band), edges are anti-aliased by coverage
fraction, and everything is deterministic given the seed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .image import GrayImage

_MASK64 = (1 << 64) - 1


def split_seed(seed: int, index: int) -> int:
    """Derive a child seed via a splitmix64 step of (seed + (index+1)*golden)."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic image."""

    width: int = 128
    height: int = 64
    line_count: int = 4
    orientation_set: tuple = (0.0,)
    orientation_weights: tuple = None
    line_width: float = 4.0
    contrast: float = 0.5      # darkening depth of a band
    background: float = 0.8    # base intensity
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def validate(self):
        if self.width < 1 or self.height < 1:
            raise DataError("invalid-spec", f"bad canvas {self.width}x{self.height}")
        if self.line_count < 0:
            raise DataError("invalid-spec", f"line_count must be >= 0, got {self.line_count}")
        if not self.orientation_set and self.line_count > 0:
            raise DataError("invalid-spec", "orientation_set must not be empty")
        if not (0.0 <= self.background <= 1.0):
            raise DataError("invalid-spec", f"background must lie in [0, 1], got {self.background}")
        if not (0.0 <= self.contrast <= self.background):
            raise DataError("invalid-spec",
                            f"contrast must lie in [0, background={self.background}], "
                            f"got {self.contrast}")
        if self.line_width <= 0 and self.line_count > 0:
            raise DataError("invalid-spec", f"line_width must be > 0, got {self.line_width}")
        if self.noise_sigma < 0:
            raise DataError("invalid-spec", f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.orientation_weights is not None:
            w = self.orientation_weights
            if len(w) != len(self.orientation_set):
                raise DataError("invalid-spec", "one weight per orientation required")
            if any(x < 0 for x in w) or sum(w) <= 0:
                raise DataError("invalid-spec", "weights must be non-negative with a positive sum")


@dataclass(frozen=True)
class Line:
    """A rendered band: orientation and an anchor point on its axis."""

    theta: float
    row: float
    col: float


def sample_lines(spec: SynthSpec, rng: np.random.Generator) -> tuple:
    """Draw line_count (orientation, anchor) pairs from the spec's distribution."""
    if spec.line_count == 0:
        return ()
    angles = np.asarray(spec.orientation_set, dtype=np.float64)
    if spec.orientation_weights is None:
        idx = rng.integers(0, len(angles), size=spec.line_count)
    else:
        p = np.asarray(spec.orientation_weights, dtype=np.float64)
        idx = rng.choice(len(angles), size=spec.line_count, p=p / p.sum())
    rows = rng.uniform(0.0, spec.height, size=spec.line_count)
    cols = rng.uniform(0.0, spec.width, size=spec.line_count)
    return tuple(Line(theta=float(angles[i]), row=float(r), col=float(c))
                 for i, r, c in zip(idx, rows, cols))


def render(spec: SynthSpec, lines, rng: np.random.Generator) -> GrayImage:
    """Composite the bands over the background, add noise, clamp to [0, 1].

    Band coverage at a pixel is the overlap of the unit pixel footprint
    with the band along the normal direction, so edges fade linearly over
    one pixel. Overlapping bands darken via max, not sum.
    """
    rows = np.arange(spec.height, dtype=np.float64)[:, None]
    cols = np.arange(spec.width, dtype=np.float64)[None, :]
    coverage = np.zeros((spec.height, spec.width), dtype=np.float64)
    half = spec.line_width / 2.0
    for line in lines:
        # distance from the band axis, measured along the normal (cos t, sin t)
        d = np.abs((rows - line.row) * np.cos(line.theta)
                   + (cols - line.col) * np.sin(line.theta))
        np.maximum(coverage, np.clip(half - d + 0.5, 0.0, 1.0), out=coverage)
    img = spec.background - spec.contrast * coverage
    if spec.noise_sigma > 0:
        img = img + rng.normal(0.0, spec.noise_sigma, size=img.shape)
    return GrayImage(np.clip(img, 0.0, 1.0))


def generate(spec: SynthSpec):
    """Render one image; returns (GrayImage, ground-truth lines)."""
    spec.validate()
    rng = np.random.default_rng(spec.rng_seed)
    lines = sample_lines(spec, rng)
    return render(spec, lines, rng), lines

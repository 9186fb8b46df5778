"""Descriptor extraction: oriented responses, cell histograms, block normalization.

The image is tiled into non-overlapping cells; each cell accumulates the
dark-response magnitude max(0, -m) of its pixels into the bin of the
winning orientation. Cells are grouped into overlapping blocks, each block
histogram is L2-normalized with an epsilon guard, and the normalized
blocks are concatenated row-major into the final vector.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CompatibilityError, DataError
from .gabor import BankParams, build_bank
from .image import GrayImage
from .prior import PriorDirections
from .response import ResponseField, competitive_response


@dataclass(frozen=True)
class GridConfig:
    """Cell/block geometry and histogram shape of a descriptor."""

    cell_w: int = 10
    cell_h: int = 10
    block_cells_x: int = 2
    block_cells_y: int = 2
    block_stride: int = 1   # in cells; 1 = overlapping blocks
    epsilon: float = 0.01
    bins: int = 8

    def __post_init__(self):
        for name in ("cell_w", "cell_h", "block_cells_x", "block_cells_y",
                     "block_stride", "bins"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DataError("invalid-parameter",
                                f"{name} must be an integer >= 1, got {v}")
        if not (self.epsilon > 0):
            raise DataError("invalid-parameter",
                            f"epsilon must be > 0, got {self.epsilon}")

    @property
    def block_len(self) -> int:
        return self.block_cells_x * self.block_cells_y * self.bins


@dataclass(frozen=True, eq=False)
class Descriptor:
    """Concatenated normalized block histograms plus the layout to index them.

    values[(by*n_blocks_x + bx)*block_len : ...] is the slice of block
    (bx, by); layout = (n_blocks_x, n_blocks_y, block_len).
    """

    values: np.ndarray
    layout: tuple
    grid: GridConfig
    prior_id: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        n_bx, n_by, block_len = self.layout
        if v.size != n_bx * n_by * block_len:
            raise DataError("invalid-parameter",
                            f"descriptor has {v.size} values, layout implies "
                            f"{n_bx * n_by * block_len}")
        v = np.array(v, copy=True)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "layout", (int(n_bx), int(n_by), int(block_len)))

    def block(self, bx: int, by: int) -> np.ndarray:
        n_bx, _, block_len = self.layout
        start = (by * n_bx + bx) * block_len
        return self.values[start:start + block_len]


def physiological_response(image: GrayImage, prior: PriorDirections,
                           bank_params: BankParams = None) -> ResponseField:
    """Competitive response under the bank built from the prior's selected directions.

    If bank_params is given it must match the parameters the prior was
    learned with; a mismatched prior is rejected, never silently used.
    """
    if bank_params is not None and bank_params != prior.source.bank:
        raise CompatibilityError(
            "prior-mismatch",
            f"prior was learned with bank {prior.source.bank}, requested {bank_params}")
    bp = prior.source.bank
    bank = build_bank(prior.selected_thetas, f0=bp.f0, sigma=bp.sigma,
                      half_size=bp.half_size)
    return competitive_response(image, bank)


def cell_histograms(field: ResponseField, grid: GridConfig,
                    bin_map=None) -> np.ndarray:
    """Per-cell orientation histograms of dark-response magnitude.

    Returns an (n_cells_y, n_cells_x, grid.bins) array. With the default
    identity bin_map, grid.bins must equal the number of bank orientations;
    a custom bin_map (one target bin per orientation index) supports padded
    layouts where unused bins stay zero.
    """
    height, width = field.m.shape
    if height % grid.cell_h != 0 or width % grid.cell_w != 0:
        raise DataError("dimension-mismatch",
                        f"field {height}x{width} not divisible into "
                        f"{grid.cell_h}x{grid.cell_w} cells")
    n_orient = len(field.bank_thetas)
    if bin_map is None:
        if grid.bins != n_orient:
            raise DataError("dimension-mismatch",
                            f"grid.bins={grid.bins} but bank has {n_orient} orientations")
        bin_map = np.arange(n_orient, dtype=np.int64)
    else:
        bin_map = np.asarray(bin_map, dtype=np.int64)
        if bin_map.shape != (n_orient,):
            raise DataError("dimension-mismatch",
                            f"bin_map must have one entry per orientation ({n_orient})")
        if bin_map.min() < 0 or bin_map.max() >= grid.bins:
            raise DataError("dimension-mismatch",
                            f"bin_map targets must lie in [0, {grid.bins})")

    n_cy = height // grid.cell_h
    n_cx = width // grid.cell_w
    weight = np.maximum(-field.m, 0.0)
    cell_row = np.arange(height, dtype=np.int64) // grid.cell_h
    cell_col = np.arange(width, dtype=np.int64) // grid.cell_w
    cell_idx = cell_row[:, None] * n_cx + cell_col[None, :]
    flat_bin = cell_idx * grid.bins + bin_map[field.theta_idx]
    hist = np.bincount(flat_bin.ravel(), weights=weight.ravel(),
                       minlength=n_cy * n_cx * grid.bins)
    return hist.reshape(n_cy, n_cx, grid.bins)


def assemble_blocks(cells: np.ndarray, grid: GridConfig, prior_id: str = "") -> Descriptor:
    """Group cells into overlapping blocks, L2-normalize each, concatenate row-major.

    Each block slice is HB / sqrt(|HB|^2 + epsilon^2), so an all-zero block
    stays zero and a strong block has norm just under 1.
    """
    n_cy, n_cx, bins = cells.shape
    if bins != grid.bins:
        raise DataError("dimension-mismatch",
                        f"cells carry {bins} bins, grid expects {grid.bins}")
    bx_cells, by_cells, stride = grid.block_cells_x, grid.block_cells_y, grid.block_stride
    if n_cx < bx_cells or n_cy < by_cells:
        raise DataError("grid-too-small",
                        f"cell grid {n_cy}x{n_cx} smaller than block "
                        f"{by_cells}x{bx_cells}")
    n_bx = (n_cx - bx_cells) // stride + 1
    n_by = (n_cy - by_cells) // stride + 1
    block_len = grid.block_len
    eps_sq = grid.epsilon * grid.epsilon

    values = np.empty(n_bx * n_by * block_len, dtype=np.float64)
    pos = 0
    for by in range(n_by):
        r0 = by * stride
        for bx in range(n_bx):
            c0 = bx * stride
            hb = cells[r0:r0 + by_cells, c0:c0 + bx_cells, :].ravel()
            norm = math.sqrt(float(np.dot(hb, hb)) + eps_sq)
            values[pos:pos + block_len] = hb / norm
            pos += block_len
    return Descriptor(values=values, layout=(n_bx, n_by, block_len),
                      grid=grid, prior_id=prior_id)


def crop_to_cells(image: GrayImage, grid: GridConfig) -> GrayImage:
    """Center-crop to the largest region divisible by the cell size."""
    new_h = (image.height // grid.cell_h) * grid.cell_h
    new_w = (image.width // grid.cell_w) * grid.cell_w
    if new_h < 1 or new_w < 1:
        raise DataError("dimension-mismatch",
                        f"image {image.height}x{image.width} smaller than one "
                        f"{grid.cell_h}x{grid.cell_w} cell")
    if new_h == image.height and new_w == image.width:
        return image
    top = (image.height - new_h) // 2
    left = (image.width - new_w) // 2
    return GrayImage(image.pixels[top:top + new_h, left:left + new_w])


def extract_hopgr(image: GrayImage, prior: PriorDirections, grid: GridConfig,
                  bank_params: BankParams = None) -> Descriptor:
    """Full extraction: physiological response -> cell histograms -> blocks.

    grid.bins must equal either the number of selected directions (compact
    layout, the default) or the prior's full orientation count O (padded
    layout where never-winning bins stay zero).
    """
    field = physiological_response(image, prior, bank_params)
    o_s = len(prior.selected_k)
    o_full = prior.source.o
    if grid.bins == o_s:
        bin_map = None
    elif grid.bins == o_full:
        bin_map = np.asarray(prior.selected_k, dtype=np.int64)
    else:
        raise DataError("dimension-mismatch",
                        f"grid.bins={grid.bins} matches neither the selected "
                        f"direction count ({o_s}) nor the full count ({o_full})")
    cells = cell_histograms(field, grid, bin_map)
    return assemble_blocks(cells, grid, prior.fingerprint())

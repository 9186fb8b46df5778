"""Finger-vein local descriptor with learned physiological Gabor directions.

Two-phase pipeline: (1) learn the dominant vein orientations from a
training corpus by accumulating competitive Gabor responses; (2) extract
block-normalized orientation histograms under a bank restricted to those
directions. Includes matching metrics, a verification evaluator (EER),
a synthetic vein-image generator, and dataset I/O.
"""

from .archive import (export_csv, load_archive, load_descriptor, save_archive,
                      save_descriptor)
from .descriptor import (Descriptor, GridConfig, assemble_blocks,
                         cell_histograms, crop_to_cells, extract_hopgr,
                         physiological_response)
from .errors import CompatibilityError, DataError, HopgrError, StorageError
from .evaluate import (EvalReport, ScoreSet, compute_eer, export_det,
                       make_scores, summary_line)
from .gabor import (BankParams, FilterBank, GaborParams, Kernel, build_bank,
                    make_kernel, uniform_orientations)
from .image import GrayImage
from .ingest import (DatasetIndex, index_dataset, load_image, read_pgm,
                     write_pgm)
from .match import METRICS, distance, normalize_metric
from .prior import (HcrHistogram, PriorDirections, accumulate_hcr,
                    load_prior, per_image_hcr, save_prior, select_directions,
                    uniform_prior)
from .response import ResponseField, competitive_response, convolve
from .synth import Line, SynthSpec, generate, split_seed

__version__ = "0.1.0"

__all__ = [
    "BankParams", "CompatibilityError", "DataError", "DatasetIndex",
    "Descriptor", "EvalReport", "FilterBank", "GaborParams", "GrayImage",
    "GridConfig", "HcrHistogram", "HopgrError", "Kernel", "Line", "METRICS",
    "PriorDirections", "ResponseField", "ScoreSet", "StorageError",
    "SynthSpec", "accumulate_hcr", "assemble_blocks", "build_bank",
    "cell_histograms", "competitive_response", "compute_eer", "convolve",
    "crop_to_cells", "distance", "export_csv", "export_det", "extract_hopgr",
    "generate", "index_dataset", "load_archive", "load_descriptor",
    "load_image", "load_prior", "make_kernel", "make_scores",
    "normalize_metric", "per_image_hcr", "physiological_response", "read_pgm",
    "save_archive", "save_descriptor", "save_prior", "select_directions",
    "split_seed", "summary_line", "uniform_orientations", "uniform_prior",
    "write_pgm",
]

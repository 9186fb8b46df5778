"""Distances between descriptors.

Descriptors are only comparable when they share layout, grid and prior;
anything else is an error, never a silent zero.
"""

import math

import numpy as np

from .descriptor import Descriptor
from .errors import CompatibilityError, DataError

METRICS = ("euclidean", "chi_square", "cosine_distance")

_ALIASES = {
    "euclidean": "euclidean",
    "l2": "euclidean",
    "chi_square": "chi_square",
    "chi2": "chi_square",
    "cosine_distance": "cosine_distance",
    "cosine": "cosine_distance",
}

_CHI_DELTA = 1e-12


def normalize_metric(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise DataError("invalid-parameter",
                        f"unknown metric {name!r}; choose from {', '.join(METRICS)}")


def distance(a: Descriptor, b: Descriptor, metric: str = "euclidean") -> float:
    """Non-negative distance between two compatible descriptors."""
    metric = normalize_metric(metric)
    if a.layout != b.layout or a.grid != b.grid:
        raise CompatibilityError("layout-mismatch",
                                 f"layout/grid differ: {a.layout}/{a.grid} vs "
                                 f"{b.layout}/{b.grid}")
    if a.prior_id != b.prior_id:
        raise CompatibilityError("prior-mismatch",
                                 "descriptors were extracted with different priors")
    va, vb = a.values, b.values
    if metric == "euclidean":
        return float(np.linalg.norm(va - vb))
    if metric == "chi_square":
        diff = va - vb
        return float(0.5 * np.sum(diff * diff / (va + vb + _CHI_DELTA)))
    # cosine distance, computed as half the squared distance of the unit
    # vectors (equal to 1 - cos, but exactly 0 for identical inputs);
    # defined as 0 when either vector is zero.
    na = math.sqrt(float(np.dot(va, va)))
    nb = math.sqrt(float(np.dot(vb, vb)))
    if na == 0.0 or nb == 0.0:
        return 0.0
    d = va / na - vb / nb
    return float(0.5 * np.dot(d, d))

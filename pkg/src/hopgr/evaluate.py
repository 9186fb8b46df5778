"""Verification protocol: genuine/impostor scores, FAR/FRR sweep, EER.

Scores are distances, and a trial is accepted when its distance is <= the
threshold. FAR(t) is therefore non-decreasing and FRR(t) non-increasing
in t, and the two curves cross exactly once.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, StorageError
from .match import distance, normalize_metric

DEFAULT_IMPOSTOR_CAP = 1_000_000


@dataclass(frozen=True)
class ScoreSet:
    """Genuine and impostor trials as (distance, ((class, sample), (class, sample)))."""

    genuine: tuple
    impostor: tuple


@dataclass(frozen=True)
class EvalReport:
    """EER operating point plus the full threshold sweep.

    eer is a percentage. roc_points is an (N, 3) array of rows
    (threshold, far, frr), one per distinct score, ascending in threshold.
    The EER estimator interpolates linearly between the two sweep points
    bracketing the FAR/FRR crossing (exact crossings are used directly).
    """

    eer: float
    threshold_at_eer: float
    far_at_eer: float
    frr_at_eer: float
    roc_points: np.ndarray = field(repr=False)
    counts: tuple = (0, 0)
    estimator: str = "interpolated"


def make_scores(entries, metric: str = "euclidean", rng_seed: int = 0,
                impostor_cap: int = DEFAULT_IMPOSTOR_CAP) -> ScoreSet:
    """All intra-class pairs as genuine, all inter-class pairs as impostor.

    entries is a sequence of (class_id, sample_id, Descriptor). When the
    impostor pair count exceeds impostor_cap, a seeded RNG subsamples them
    so large runs stay tractable but reproducible.
    """
    entries = list(entries)
    metric = normalize_metric(metric)
    classes = {}
    for idx, (class_id, _sample_id, _d) in enumerate(entries):
        classes.setdefault(class_id, []).append(idx)
    if len(classes) < 2:
        raise DataError("insufficient-classes",
                        f"need at least 2 classes, got {len(classes)}")
    if all(len(v) < 2 for v in classes.values()):
        raise DataError("insufficient-classes",
                        "need at least one class with 2 or more samples")

    def ident(i):
        return (entries[i][0], entries[i][1])

    genuine_pairs = []
    for members in classes.values():
        genuine_pairs.extend(itertools.combinations(members, 2))
    impostor_pairs = [(i, j) for i, j in itertools.combinations(range(len(entries)), 2)
                      if entries[i][0] != entries[j][0]]
    if len(impostor_pairs) > impostor_cap:
        rng = np.random.default_rng(rng_seed)
        keep = rng.choice(len(impostor_pairs), size=impostor_cap, replace=False)
        keep.sort()
        impostor_pairs = [impostor_pairs[k] for k in keep]

    genuine = tuple((distance(entries[i][2], entries[j][2], metric), (ident(i), ident(j)))
                    for i, j in genuine_pairs)
    impostor = tuple((distance(entries[i][2], entries[j][2], metric), (ident(i), ident(j)))
                     for i, j in impostor_pairs)
    return ScoreSet(genuine=genuine, impostor=impostor)


def compute_eer(scores: ScoreSet) -> EvalReport:
    """Sweep every distinct score as a threshold and locate the FAR = FRR point."""
    if not scores.genuine or not scores.impostor:
        raise DataError("empty-scores", "both genuine and impostor scores are required")
    gen = np.sort(np.array([s for s, _ in scores.genuine], dtype=np.float64))
    imp = np.sort(np.array([s for s, _ in scores.impostor], dtype=np.float64))
    n_gen, n_imp = gen.size, imp.size

    thresholds = np.unique(np.concatenate([gen, imp]))
    far = np.searchsorted(imp, thresholds, side="right") / n_imp
    frr = 1.0 - np.searchsorted(gen, thresholds, side="right") / n_gen
    roc = np.column_stack([thresholds, far, frr])

    diff = far - frr  # non-decreasing in the threshold
    exact = np.nonzero(diff == 0.0)[0]
    if exact.size:
        i = int(exact[0])
        t_star, rate = float(thresholds[i]), float(far[i])
        far_star = frr_star = rate
    else:
        # diff[-1] = 1 always, so a first positive entry exists. When even
        # diff[0] > 0 (heavy ties at the minimum score) the left bracket is
        # the virtual pre-sweep point (far 0, frr 1) at the same threshold.
        i = int(np.argmax(diff > 0.0))
        if i == 0:
            t0, f0_, r0 = float(thresholds[0]), 0.0, 1.0
        else:
            t0, f0_, r0 = (float(thresholds[i - 1]), float(far[i - 1]),
                           float(frr[i - 1]))
        d0, d1 = f0_ - r0, float(diff[i])
        alpha = d0 / (d0 - d1)
        t_star = float(t0 + alpha * (thresholds[i] - t0))
        far_star = float(f0_ + alpha * (far[i] - f0_))
        frr_star = float(r0 + alpha * (frr[i] - r0))
        rate = 0.5 * (far_star + frr_star)
    return EvalReport(eer=100.0 * rate, threshold_at_eer=t_star,
                      far_at_eer=far_star, frr_at_eer=frr_star,
                      roc_points=roc, counts=(n_gen, n_imp))


def export_det(report: EvalReport, path):
    """CSV of the sweep, ascending threshold, 9 significant digits per value."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("threshold,far,frr\n")
            for t, fa, fr in report.roc_points:
                fh.write(f"{t:.9g},{fa:.9g},{fr:.9g}\n")
    except OSError as exc:
        raise StorageError("io-error", str(exc))


def summary_line(report: EvalReport, metric: str = "euclidean") -> str:
    """Single-line key=value record for harness scraping."""
    n_gen, n_imp = report.counts
    return (f"eer_percent={report.eer:.6f} threshold={report.threshold_at_eer:.9g} "
            f"far={report.far_at_eer:.9g} frr={report.frr_at_eer:.9g} "
            f"genuine={n_gen} impostor={n_imp} metric={metric} "
            f"estimator={report.estimator}")

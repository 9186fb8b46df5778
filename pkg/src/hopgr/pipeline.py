"""Batch operations behind the CLI: learning, extraction, evaluation, generation.

Per-image work is independent and may fan out over worker processes; every
reduction happens in dataset order on the parent, so results are identical
bit for bit at any worker count.
"""

import multiprocessing
import time

import numpy as np

from .config import (BINS_FULL, MODE_UNIFORM, RunConfig, parse_angle_sets)
from .descriptor import GridConfig, crop_to_cells, extract_hopgr
from .errors import CompatibilityError
from .evaluate import compute_eer, make_scores
from .gabor import BankParams, build_bank, uniform_orientations
from .ingest import DatasetIndex, index_dataset, load_image, write_pgm
from .prior import (PriorDirections, load_prior, reduce_partial_hcr,
                    select_directions, uniform_prior)
from .response import warm_up
from .synth import Line, SynthSpec, render, sample_lines, split_seed

_CTX = None


def _set_ctx(ctx):
    global _CTX
    _CTX = ctx


def _parallel_map(fn, items, workers, ctx):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        _set_ctx(ctx)
        return [fn(item) for item in items]
    warm_up()  # compile the convolution core before forking
    mp = multiprocessing.get_context("fork")
    chunk = max(1, len(items) // (workers * 4))
    with mp.Pool(processes=workers, initializer=_set_ctx, initargs=(ctx,)) as pool:
        return pool.map(fn, items, chunksize=chunk)


def _load_for_run(cfg: RunConfig, index: DatasetIndex, entry):
    return load_image(index.path_of(entry), roi_width=cfg.roi_width,
                      roi_height=cfg.roi_height, strict=cfg.strict_dims,
                      resize=cfg.roi_resize)


def _hcr_worker(entry):
    cfg, index, bank = _CTX
    from .prior import per_image_hcr
    image = _load_for_run(cfg, index, entry)
    return per_image_hcr(image, bank), image.height * image.width


def bank_params_from_config(cfg: RunConfig) -> BankParams:
    return BankParams(f0=cfg.f0, sigma=cfg.sigma, half_size=cfg.half_size)


def grid_from_config(cfg: RunConfig, prior: PriorDirections) -> GridConfig:
    bins = prior.source.o if cfg.bins_mode == BINS_FULL else len(prior.selected_k)
    return GridConfig(cell_w=cfg.cell_w, cell_h=cfg.cell_h,
                      block_cells_x=cfg.block_cells_x,
                      block_cells_y=cfg.block_cells_y,
                      block_stride=cfg.block_stride, epsilon=cfg.epsilon,
                      bins=bins)


def learn_prior(cfg: RunConfig):
    """Phase one over cfg.dataset_dir; returns (PriorDirections, DatasetIndex)."""
    index = index_dataset(cfg.dataset_dir, layout=cfg.layout)
    bp = bank_params_from_config(cfg)
    bank = build_bank(uniform_orientations(cfg.orientations), f0=bp.f0,
                      sigma=bp.sigma, half_size=bp.half_size)
    results = _parallel_map(_hcr_worker, index.entries, cfg.workers,
                            (cfg, index, bank))
    dataset_id = cfg.dataset_id or cfg.dataset_dir
    hcr = reduce_partial_hcr([r[0] for r in results], bank,
                             [r[1] for r in results], dataset_id=dataset_id)
    return select_directions(hcr, cfg.selected), index


def _extract_worker(entry):
    cfg, index, prior, grid = _CTX
    image = _load_for_run(cfg, index, entry)
    t0 = time.perf_counter()
    d = extract_hopgr(crop_to_cells(image, grid), prior, grid)
    elapsed = time.perf_counter() - t0
    return entry[0], entry[1], d, elapsed


def resolve_prior(cfg: RunConfig) -> PriorDirections:
    """The learned prior in physio mode, a full uniform set in baseline mode."""
    bp = bank_params_from_config(cfg)
    if cfg.mode == MODE_UNIFORM:
        return uniform_prior(cfg.orientations, bp, dataset_id="uniform-baseline")
    prior = load_prior(cfg.prior_path)
    if prior.source.bank != bp:
        raise CompatibilityError(
            "prior-mismatch",
            f"prior at {cfg.prior_path} was learned with bank {prior.source.bank}, "
            f"config requests {bp}")
    return prior


def extract_dataset(cfg: RunConfig):
    """Extract every dataset entry; returns (entries, per-image seconds).

    entries is a list of (class_id, sample_id, Descriptor) in dataset order.
    """
    prior = resolve_prior(cfg)
    index = index_dataset(cfg.dataset_dir, layout=cfg.layout)
    grid = grid_from_config(cfg, prior)
    results = _parallel_map(_extract_worker, index.entries, cfg.workers,
                            (cfg, index, prior, grid))
    entries = [(c, s, d) for c, s, d, _ in results]
    timings = [t for _, _, _, t in results]
    return entries, timings


def evaluate_entries(cfg: RunConfig, entries):
    """Verification run over labeled descriptors; returns the EER report."""
    scores = make_scores(entries, metric=cfg.metric, rng_seed=cfg.rng_seed,
                         impostor_cap=cfg.impostor_cap)
    return compute_eer(scores), scores


def synth_class_specs(cfg: RunConfig):
    """One SynthSpec per class; classes cycle through the configured angle groups."""
    groups = parse_angle_sets(cfg.synth_angle_sets)
    if not groups:
        groups = [tuple(uniform_orientations(cfg.orientations))]
    specs = []
    for c in range(cfg.synth_classes):
        specs.append(SynthSpec(width=cfg.synth_width, height=cfg.synth_height,
                               line_count=cfg.synth_line_count,
                               orientation_set=groups[c % len(groups)],
                               line_width=cfg.synth_line_width,
                               contrast=cfg.synth_contrast,
                               background=cfg.synth_background,
                               noise_sigma=cfg.synth_noise_sigma,
                               rng_seed=split_seed(cfg.rng_seed, c)))
    return specs


def synth_dataset(cfg: RunConfig, out_dir=None):
    """Write a labeled synthetic PGM tree in the nested dataset layout.

    Each class is a fixed line geometry; its samples re-render that
    geometry with per-sample jitter and noise, so intra-class pairs are
    close and inter-class pairs are not.
    """
    from pathlib import Path
    root = Path(out_dir if out_dir is not None else cfg.synth_dir)
    written = []
    for c, spec in enumerate(synth_class_specs(cfg)):
        spec.validate()
        class_seed = spec.rng_seed
        lines = sample_lines(spec, np.random.default_rng(class_seed))
        class_dir = root / f"s{c:03d}" / "f0"
        class_dir.mkdir(parents=True, exist_ok=True)
        for s in range(cfg.synth_samples):
            rng = np.random.default_rng(split_seed(class_seed, s + 1))
            dr, dc = rng.uniform(-cfg.synth_jitter, cfg.synth_jitter, size=2)
            jittered = tuple(Line(ln.theta, ln.row + dr, ln.col + dc) for ln in lines)
            image = render(spec, jittered, rng)
            path = class_dir / f"{s:03d}.pgm"
            write_pgm(image, path)
            written.append(str(path))
    return written

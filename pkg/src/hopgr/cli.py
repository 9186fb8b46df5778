"""Command-line front end.

Subcommands: learn-prior, extract, evaluate, synth, show-config.
Exit codes: 0 ok, 2 data error, 3 compatibility error, 4 I/O error.
Every failure prints a single machine-parseable line
``error: <code>: <detail>`` to stderr.
"""

import argparse
import math
import sys

from . import archive as archive_io
from .config import load_config, format_config
from .errors import HopgrError, StorageError
from .evaluate import export_det, summary_line
from .pipeline import (evaluate_entries, extract_dataset, learn_prior,
                       synth_dataset)
from .prior import save_prior


def _common_flags(sub):
    sub.add_argument("--config", metavar="PATH", default=None,
                     help="key=value run configuration file")
    sub.add_argument("--workers", type=int, metavar="N", default=None,
                     help="worker process count (default from config)")
    sub.add_argument("--seed", type=int, metavar="U64", default=None,
                     help="RNG seed override")
    sub.add_argument("--mode", choices=("physio", "uniform"), default=None,
                     help="physiological prior or uniform-direction baseline")
    sub.add_argument("--metric", choices=("euclidean", "chi2", "cosine"), default=None,
                     help="descriptor distance metric")
    sub.add_argument("--strict-dims", action="store_true", default=None,
                     help="reject images whose dimensions differ from the ROI")


def _config_from_args(args):
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.metric is not None:
        overrides["metric"] = args.metric
    if args.strict_dims:
        overrides["strict_dims"] = True
    return load_config(args.config, overrides)


def _theta_label(k: int, o: int) -> str:
    return f"{k}pi/{o}" if k else "0"


def cmd_learn_prior(args) -> int:
    cfg = _config_from_args(args)
    prior, index = learn_prior(cfg)
    save_prior(prior, cfg.prior_path)
    hcr = prior.hcr
    o = len(hcr.bin_thetas)
    print(f"accumulated {hcr.image_count} images, {hcr.pixel_count} pixels, "
          f"{o} directions")
    print("per-direction cumulative response:")
    for k, s in enumerate(hcr.sums):
        print(f"  k={k:<3d} theta={_theta_label(k, o):<8s} sum={s:.6g}")
    print("sorted ascending:")
    for k in sorted(range(o), key=lambda i: (hcr.sums[i], i)):
        print(f"  k={k:<3d} theta={_theta_label(k, o):<8s} sum={hcr.sums[k]:.6g}")
    sel = ",".join(str(k) for k in prior.selected_k)
    print(f"selected ({len(prior.selected_k)} of {o}): k={sel}")
    print(f"prior written: {cfg.prior_path}")
    return 0


def cmd_extract(args) -> int:
    cfg = _config_from_args(args)
    entries, timings = extract_dataset(cfg)
    for (class_id, sample_id, _d), t in zip(entries, timings):
        print(f"extracted {class_id}/{sample_id} in {t * 1e3:.2f} ms", file=sys.stderr)
    archive_io.save_archive(entries, cfg.archive_path)
    if cfg.archive_csv:
        archive_io.export_csv(entries, cfg.archive_csv)
    mean_ms = sum(timings) / len(timings) * 1e3
    print(f"extracted {len(entries)} descriptors "
          f"(mean {mean_ms:.2f} ms/image, environment-specific)", file=sys.stderr)
    print(f"archive written: {cfg.archive_path}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config_from_args(args)
    entries = archive_io.load_archive(cfg.archive_path)
    report, _scores = evaluate_entries(cfg, entries)
    n_gen, n_imp = report.counts
    print(f"EER={report.eer:.4f}% threshold={report.threshold_at_eer:.9g} "
          f"genuine={n_gen} impostor={n_imp}")
    if cfg.report_path:
        try:
            with open(cfg.report_path, "w", encoding="utf-8") as fh:
                fh.write(summary_line(report, metric=cfg.metric) + "\n")
        except OSError as exc:
            raise StorageError("io-error", str(exc))
    if cfg.det_path:
        export_det(report, cfg.det_path)
    return 0


def cmd_synth(args) -> int:
    cfg = _config_from_args(args)
    written = synth_dataset(cfg)
    print(f"wrote {len(written)} images under {cfg.synth_dir}")
    return 0


def cmd_show_config(args) -> int:
    cfg = _config_from_args(args)
    sys.stdout.write(format_config(cfg))
    return 0


_COMMANDS = {
    "learn-prior": cmd_learn_prior,
    "extract": cmd_extract,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
    "show-config": cmd_show_config,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopgr",
        description="Finger-vein descriptor pipeline: learn dominant directions, "
                    "extract descriptors, evaluate verification performance.")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("learn-prior", "accumulate direction statistics and select the prior"),
            ("extract", "extract descriptors for a dataset into an archive"),
            ("evaluate", "score an archive and report the EER"),
            ("synth", "generate a synthetic labeled dataset"),
            ("show-config", "print the effective configuration")):
        sub = subs.add_parser(name, help=help_text)
        _common_flags(sub)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except HopgrError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: io-error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

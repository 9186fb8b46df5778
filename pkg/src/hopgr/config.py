"""Run configuration: a flat key=value file plus command-line overrides.

Every knob the pipeline exposes lives here with its default, so
``show-config`` documents a run completely. Parameter invariants of the
downstream modules are enforced at parse time, before any work starts.
"""

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError, StorageError
from .match import normalize_metric

MODE_PHYSIO = "physio"
MODE_UNIFORM = "uniform"

BINS_SELECTED = "selected"
BINS_FULL = "full"


@dataclass
class RunConfig:
    # filter bank
    f0: float = 0.1
    sigma: float = 4.0
    half_size: int = 8
    orientations: int = 16      # O: uniform directions during learning
    selected: int = 8           # O_s: directions kept by the prior

    # descriptor grid
    cell_w: int = 10
    cell_h: int = 10
    block_cells_x: int = 2
    block_cells_y: int = 2
    block_stride: int = 1
    epsilon: float = 0.01
    bins_mode: str = BINS_SELECTED   # selected | full (pad to O bins)

    # matching / evaluation
    metric: str = "euclidean"
    impostor_cap: int = 1_000_000

    # pipeline behavior
    mode: str = MODE_PHYSIO     # physio | uniform baseline
    rng_seed: int = 1
    workers: int = 1
    strict_dims: bool = False
    roi_width: int = 0          # 0 = accept images as-is
    roi_height: int = 0
    roi_resize: bool = False

    # paths and labels
    dataset_dir: str = ""
    dataset_id: str = ""
    layout: str = "nested"      # nested | flat
    prior_path: str = "prior.txt"
    archive_path: str = "descriptors.hpga"
    archive_csv: str = ""       # optional CSV sidecar of the archive
    report_path: str = ""       # optional evaluation summary file
    det_path: str = ""          # optional DET curve CSV

    # synthetic dataset generation
    synth_dir: str = ""
    synth_classes: int = 4
    synth_samples: int = 6
    synth_width: int = 160
    synth_height: int = 80
    synth_line_count: int = 6
    synth_line_width: float = 4.0
    synth_contrast: float = 0.5
    synth_background: float = 0.85
    synth_noise_sigma: float = 0.02
    synth_jitter: float = 1.0
    synth_angle_sets: str = ""  # "a,b,c|d,e" radians; classes cycle through groups


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _coerce(name: str, text: str):
    ftype = _FIELDS[name].type
    try:
        if ftype == "bool" or ftype is bool:
            low = text.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if ftype == "int" or ftype is int:
            return int(text)
        if ftype == "float" or ftype is float:
            return float(text)
        return text
    except ValueError:
        raise DataError("invalid-parameter",
                        f"config key '{name}' got unparseable value {text!r}")


def parse_config_text(text: str, where: str = "config") -> dict:
    """Parse key=value lines; '#' starts a comment, blank lines are skipped."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError("malformed-file",
                            f"{where} line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FIELDS:
            raise DataError("invalid-parameter",
                            f"{where} line {lineno}: unknown config key '{key}'")
        values[key] = _coerce(key, value.strip())
    return values


def load_config(path=None, overrides=None) -> RunConfig:
    """Defaults, then the config file, then CLI overrides; validated at the end."""
    cfg = RunConfig()
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise StorageError("io-error", str(exc))
        for key, value in parse_config_text(text, where=str(path)).items():
            setattr(cfg, key, value)
    for key, value in (overrides or {}).items():
        if key not in _FIELDS:
            raise DataError("invalid-parameter", f"unknown config key '{key}'")
        setattr(cfg, key, value)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig):
    if not (cfg.f0 > 0):
        raise DataError("invalid-parameter", f"f0 must be > 0, got {cfg.f0}")
    if not (cfg.sigma > 0):
        raise DataError("invalid-parameter", f"sigma must be > 0, got {cfg.sigma}")
    if cfg.half_size < 1:
        raise DataError("invalid-parameter", f"half_size must be >= 1, got {cfg.half_size}")
    if cfg.orientations < 1:
        raise DataError("invalid-parameter",
                        f"orientations must be >= 1, got {cfg.orientations}")
    if not (1 <= cfg.selected <= cfg.orientations):
        raise DataError("invalid-parameter",
                        f"selected must lie in [1, orientations={cfg.orientations}], "
                        f"got {cfg.selected}")
    for name in ("cell_w", "cell_h", "block_cells_x", "block_cells_y", "block_stride"):
        if getattr(cfg, name) < 1:
            raise DataError("invalid-parameter", f"{name} must be >= 1")
    if not (cfg.epsilon > 0):
        raise DataError("invalid-parameter", f"epsilon must be > 0, got {cfg.epsilon}")
    if cfg.bins_mode not in (BINS_SELECTED, BINS_FULL):
        raise DataError("invalid-parameter",
                        f"bins_mode must be '{BINS_SELECTED}' or '{BINS_FULL}', "
                        f"got {cfg.bins_mode!r}")
    cfg.metric = normalize_metric(cfg.metric)
    if cfg.mode not in (MODE_PHYSIO, MODE_UNIFORM):
        raise DataError("invalid-parameter",
                        f"mode must be '{MODE_PHYSIO}' or '{MODE_UNIFORM}', got {cfg.mode!r}")
    if cfg.workers < 1:
        raise DataError("invalid-parameter", f"workers must be >= 1, got {cfg.workers}")
    if cfg.impostor_cap < 1:
        raise DataError("invalid-parameter", "impostor_cap must be >= 1")
    if cfg.rng_seed < 0:
        raise DataError("invalid-parameter", "rng_seed must be a non-negative integer")
    if (cfg.roi_width > 0) != (cfg.roi_height > 0):
        raise DataError("invalid-parameter",
                        "roi_width and roi_height must be set together")
    if cfg.roi_width > 0:
        if cfg.roi_width % cfg.cell_w or cfg.roi_height % cfg.cell_h:
            raise DataError("invalid-parameter",
                            f"ROI {cfg.roi_width}x{cfg.roi_height} must be divisible "
                            f"by the cell size {cfg.cell_w}x{cfg.cell_h}")
    if cfg.layout not in ("nested", "flat"):
        raise DataError("invalid-parameter", f"layout must be nested|flat, got {cfg.layout!r}")
    if cfg.synth_classes < 1 or cfg.synth_samples < 1:
        raise DataError("invalid-parameter", "synth_classes and synth_samples must be >= 1")


def format_config(cfg: RunConfig) -> str:
    """Effective configuration as key=value lines (the show-config output)."""
    lines = []
    for f in dataclasses.fields(RunConfig):
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            value = "1" if value else "0"
        lines.append(f"{f.name}={value}")
    return "\n".join(lines) + "\n"


def parse_angle_sets(text: str) -> list:
    """Parse 'a,b|c,d' into groups of angles (radians); empty input means no groups."""
    if not text.strip():
        return []
    groups = []
    for gi, chunk in enumerate(text.split("|")):
        try:
            angles = tuple(float(t) for t in chunk.split(",") if t.strip())
        except ValueError:
            raise DataError("invalid-parameter",
                            f"synth_angle_sets group {gi}: unparseable angles {chunk!r}")
        if not angles:
            raise DataError("invalid-parameter", f"synth_angle_sets group {gi} is empty")
        groups.append(angles)
    return groups

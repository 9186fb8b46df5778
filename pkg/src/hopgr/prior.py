"""Unsupervised acquisition of the dominant vein directions.

Phase one of the pipeline: run a uniform bank over a training corpus,
accumulate the per-direction cumulative competitive response (one signed
sum per orientation bin), and keep the directions with the smallest (most
negative) sums. Vein lines are darker than their surroundings, so the
most negative bins are the physiologically dominant directions.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, StorageError
from .gabor import MODE_UNIFORM, BankParams, FilterBank
from .image import GrayImage
from .response import competitive_response

PRIOR_FORMAT_VERSION = 1


@dataclass(frozen=True)
class HcrHistogram:
    """Per-orientation cumulative competitive response over a corpus.

    sums[o] adds up m(r, c) over every pixel of every image whose winning
    orientation index is o. Sums stay signed; no magnitude is taken here.
    """

    bin_thetas: tuple
    sums: tuple
    image_count: int
    pixel_count: int
    bank: BankParams
    dataset_id: str


@dataclass(frozen=True)
class PriorSource:
    """Provenance of a learned prior: where it came from and with what bank."""

    o: int
    o_s: int
    image_count: int
    bank: BankParams
    dataset_id: str


@dataclass(frozen=True)
class PriorDirections:
    """The selected orientations plus the full histogram kept as evidence.

    selected_k holds the integer indices k (theta = pi*k/O), sorted
    ascending.
    """

    selected_k: tuple
    source: PriorSource
    hcr: HcrHistogram

    @property
    def selected_thetas(self) -> tuple:
        return tuple(math.pi * k / self.source.o for k in self.selected_k)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical serialization; stamped into descriptors."""
        return hashlib.sha256(format_prior(self).encode("utf-8")).hexdigest()


def per_image_hcr(image: GrayImage, bank: FilterBank) -> np.ndarray:
    """One image's contribution to the histogram: signed sums per winning bin."""
    field = competitive_response(image, bank)
    return np.bincount(field.theta_idx.ravel(), weights=field.m.ravel(),
                       minlength=bank.count)


def accumulate_hcr(corpus, bank: FilterBank, dataset_id: str = "unspecified") -> HcrHistogram:
    """Accumulate the histogram over an iterable of images.

    Partial sums are added in corpus order, so the result is reproducible
    bit for bit however the per-image work was parallelized upstream.
    """
    if bank.mode != MODE_UNIFORM:
        raise DataError("invalid-parameter",
                        "direction learning requires a uniform bank")
    sums = np.zeros(bank.count, dtype=np.float64)
    image_count = 0
    pixel_count = 0
    for image in corpus:
        sums += per_image_hcr(image, bank)
        image_count += 1
        pixel_count += image.height * image.width
    if image_count == 0:
        raise DataError("empty-corpus", "no images to accumulate")
    return HcrHistogram(bin_thetas=bank.thetas, sums=tuple(float(s) for s in sums),
                        image_count=image_count, pixel_count=pixel_count,
                        bank=bank.params, dataset_id=dataset_id)


def reduce_partial_hcr(partials, bank: FilterBank, pixel_counts,
                       dataset_id: str = "unspecified") -> HcrHistogram:
    """Combine per-image partial sums (in list order) into a histogram."""
    partials = list(partials)
    if not partials:
        raise DataError("empty-corpus", "no images to accumulate")
    sums = np.zeros(bank.count, dtype=np.float64)
    for p in partials:
        sums += p
    return HcrHistogram(bin_thetas=bank.thetas, sums=tuple(float(s) for s in sums),
                        image_count=len(partials), pixel_count=int(sum(pixel_counts)),
                        bank=bank.params, dataset_id=dataset_id)


def select_directions(hcr: HcrHistogram, count: int) -> PriorDirections:
    """Keep the ``count`` orientations with the smallest sums; ties go to the smaller angle."""
    o = len(hcr.bin_thetas)
    if int(count) != count or not (1 <= count <= o):
        raise DataError("invalid-count",
                        f"selection count must lie in [1, {o}], got {count}")
    order = sorted(range(o), key=lambda k: (hcr.sums[k], k))
    selected = tuple(sorted(order[:count]))
    source = PriorSource(o=o, o_s=count, image_count=hcr.image_count,
                         bank=hcr.bank, dataset_id=hcr.dataset_id)
    return PriorDirections(selected_k=selected, source=source, hcr=hcr)


def uniform_prior(count: int, bank: BankParams, dataset_id: str = "uniform") -> PriorDirections:
    """A degenerate prior selecting all ``count`` uniform directions (baseline mode)."""
    bank.validate()
    if int(count) != count or count < 1:
        raise DataError("invalid-count", f"orientation count must be >= 1, got {count}")
    thetas = tuple(math.pi * k / count for k in range(count))
    hcr = HcrHistogram(bin_thetas=thetas, sums=(0.0,) * count, image_count=0,
                       pixel_count=0, bank=bank, dataset_id=dataset_id)
    return select_directions(hcr, count)


def format_prior(prior: PriorDirections) -> str:
    """Canonical text serialization; floats use repr so parsing is bit-exact."""
    src = prior.source
    hcr = prior.hcr
    lines = [
        f"version={PRIOR_FORMAT_VERSION}",
        f"O={src.o}",
        f"O_s={src.o_s}",
        f"S={src.image_count}",
        f"f0={src.bank.f0!r}",
        f"sigma={src.bank.sigma!r}",
        f"half_size={src.bank.half_size}",
        f"dataset_id={src.dataset_id}",
        f"pixel_count={hcr.pixel_count}",
    ]
    for k, s in enumerate(hcr.sums):
        lines.append(f"{k} {s!r}")
    lines.append("selected: " + ",".join(str(k) for k in prior.selected_k))
    return "\n".join(lines) + "\n"


def save_prior(prior: PriorDirections, path):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_prior(prior))
    except OSError as exc:
        raise StorageError("io-error", str(exc))


def load_prior(path) -> PriorDirections:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StorageError("io-error", str(exc))
    return parse_prior(text)


def parse_prior(text: str) -> PriorDirections:
    """Parse the prior file format, with line-level diagnostics on malformed input."""
    lines = text.splitlines()

    def fail(lineno, why):
        raise DataError("malformed-file", f"prior file line {lineno}: {why}")

    header = {}
    pos = 0
    header_keys = ["version", "O", "O_s", "S", "f0", "sigma", "half_size",
                   "dataset_id", "pixel_count"]
    for key in header_keys:
        if pos >= len(lines):
            fail(pos + 1, f"missing header field '{key}'")
        line = lines[pos]
        if "=" not in line:
            fail(pos + 1, f"expected '{key}=...', got {line!r}")
        name, _, value = line.partition("=")
        if name != key:
            fail(pos + 1, f"expected header field '{key}', got '{name}'")
        header[key] = value
        pos += 1

    def to_int(key):
        try:
            return int(header[key])
        except ValueError:
            fail(header_keys.index(key) + 1, f"field '{key}' is not an integer: {header[key]!r}")

    def to_float(key):
        try:
            return float(header[key])
        except ValueError:
            fail(header_keys.index(key) + 1, f"field '{key}' is not a number: {header[key]!r}")

    version = to_int("version")
    if version != PRIOR_FORMAT_VERSION:
        fail(1, f"unsupported version {version}")
    o = to_int("O")
    o_s = to_int("O_s")
    s_count = to_int("S")
    bank = BankParams(f0=to_float("f0"), sigma=to_float("sigma"),
                      half_size=to_int("half_size"))
    pixel_count = to_int("pixel_count")
    if o < 1:
        fail(2, f"O must be >= 1, got {o}")
    if not (1 <= o_s <= o):
        fail(3, f"O_s must lie in [1, O={o}], got {o_s}")

    sums = []
    for k in range(o):
        if pos >= len(lines):
            fail(pos + 1, f"missing sum line for bin {k}")
        parts = lines[pos].split()
        if len(parts) != 2:
            fail(pos + 1, f"expected 'k <sum>', got {lines[pos]!r}")
        if parts[0] != str(k):
            fail(pos + 1, f"expected bin index {k}, got {parts[0]!r}")
        try:
            sums.append(float(parts[1]))
        except ValueError:
            fail(pos + 1, f"bin {k} sum is not a number: {parts[1]!r}")
        pos += 1

    if pos >= len(lines) or not lines[pos].startswith("selected:"):
        fail(pos + 1, "missing 'selected:' line")
    sel_text = lines[pos][len("selected:"):].strip()
    try:
        selected = tuple(int(t) for t in sel_text.split(",")) if sel_text else ()
    except ValueError:
        fail(pos + 1, f"selected list is not comma-separated integers: {sel_text!r}")
    if len(selected) != o_s:
        fail(pos + 1, f"selected list has {len(selected)} entries, header says O_s={o_s}")
    if any(not (0 <= k < o) for k in selected):
        fail(pos + 1, f"selected indices must lie in [0, {o}), got {selected}")
    if any(b <= a for a, b in zip(selected, selected[1:])):
        fail(pos + 1, f"selected indices must be strictly increasing, got {selected}")

    thetas = tuple(math.pi * k / o for k in range(o))
    hcr = HcrHistogram(bin_thetas=thetas, sums=tuple(sums), image_count=s_count,
                       pixel_count=pixel_count, bank=bank,
                       dataset_id=header["dataset_id"])
    source = PriorSource(o=o, o_s=o_s, image_count=s_count, bank=bank,
                         dataset_id=header["dataset_id"])
    return PriorDirections(selected_k=selected, source=source, hcr=hcr)

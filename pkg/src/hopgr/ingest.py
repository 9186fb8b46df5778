"""Image loading and dataset enumeration.

Supports binary 8-bit PGM (P5) natively and grayscale PNG through Pillow
(color PNGs are converted by luminance). Datasets are directory trees in
one of two layouts:

  nested: root/<subject>/<finger>/<sample>.pgm  -> class "<subject>-<finger>"
  flat:   root/<subject>_<finger>_<sample>.pgm  -> class "<subject>-<finger>"

Enumeration is sorted lexicographically so the order is platform-independent.
"""

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, StorageError
from .image import GrayImage

_EXTENSIONS = (".pgm", ".png")

LAYOUT_NESTED = "nested"
LAYOUT_FLAT = "flat"


def parse_pgm(data: bytes, where: str = "pgm") -> np.ndarray:
    """Parse binary PGM (P5, maxval 255) into a uint8 array."""
    pos = 0

    def fail(why, at):
        raise DataError("unsupported-format", f"{where}: {why} at byte {at}")

    def skip_separators():
        nonlocal pos
        while pos < len(data):
            ch = data[pos:pos + 1]
            if ch.isspace():
                pos += 1
            elif ch == b"#":
                while pos < len(data) and data[pos:pos + 1] != b"\n":
                    pos += 1
            else:
                return

    def read_token():
        nonlocal pos
        skip_separators()
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if pos == start:
            fail("missing header token", start)
        return data[start:pos]

    if data[:2] != b"P5":
        fail(f"not a P5 file (starts with {data[:2]!r})", 0)
    pos = 2
    try:
        width = int(read_token())
        height = int(read_token())
        maxval = int(read_token())
    except ValueError:
        fail("non-numeric header token", pos)
    if width < 1 or height < 1:
        fail(f"bad dimensions {width}x{height}", pos)
    if maxval != 255:
        raise DataError("unsupported-format",
                        f"{where}: only maxval 255 supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    expected = width * height
    raster = data[pos:pos + expected]
    if len(raster) < expected:
        fail(f"truncated raster, expected {expected} bytes, got {len(raster)}", pos)
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def read_pgm(path) -> np.ndarray:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise StorageError("io-error", str(exc))
    return parse_pgm(data, where=str(path))


def write_pgm(image: GrayImage, path):
    """Write binary PGM with intensity = round(255 * pixel)."""
    raw = np.rint(image.pixels * 255.0).astype(np.uint8)
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(raw.tobytes())
    except OSError as exc:
        raise StorageError("io-error", str(exc))


def _read_png(path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError
    try:
        with Image.open(path) as im:
            if im.mode != "L":
                im = im.convert("L")
            return np.asarray(im, dtype=np.uint8)
    except UnidentifiedImageError:
        raise DataError("unsupported-format", f"{path}: not a recognized image")
    except OSError as exc:
        raise StorageError("io-error", str(exc))


def load_image(path, roi_width: int = 0, roi_height: int = 0,
               strict: bool = False, resize: bool = False) -> GrayImage:
    """Load a grayscale image and scale pixels to [0, 1].

    With roi dims configured: matching images pass through, larger ones are
    center-cropped, and ``resize=True`` rescales instead (bilinear). In
    strict mode any dimension mismatch is an error.
    """
    path = Path(path)
    try:
        head = path.open("rb").read(2)
    except OSError as exc:
        raise StorageError("io-error", str(exc))
    if head == b"P5":
        raw = read_pgm(path)
    else:
        raw = _read_png(path)

    if roi_width and roi_height:
        h, w = raw.shape
        if (w, h) != (roi_width, roi_height):
            if strict:
                raise DataError("wrong-dimensions",
                                f"{path}: got {w}x{h}, expected {roi_width}x{roi_height}")
            if resize:
                from PIL import Image
                im = Image.fromarray(raw, mode="L").resize(
                    (roi_width, roi_height), Image.BILINEAR)
                raw = np.asarray(im, dtype=np.uint8)
            elif w >= roi_width and h >= roi_height:
                top = (h - roi_height) // 2
                left = (w - roi_width) // 2
                raw = raw[top:top + roi_height, left:left + roi_width]
            else:
                raise DataError("wrong-dimensions",
                                f"{path}: {w}x{h} smaller than ROI "
                                f"{roi_width}x{roi_height} and resize is off")
    return GrayImage(raw.astype(np.float64) / 255.0)


@dataclass(frozen=True)
class DatasetIndex:
    """Deterministic enumeration of a labeled image tree."""

    root: str
    entries: tuple   # of (class_id, sample_id, relative path)
    layout: str

    @property
    def class_ids(self) -> tuple:
        seen = {}
        for class_id, _, _ in self.entries:
            seen[class_id] = True
        return tuple(seen)

    def path_of(self, entry) -> str:
        return os.path.join(self.root, entry[2])


def _is_image(name: str) -> bool:
    return name.lower().endswith(_EXTENSIONS)


def index_dataset(root, layout: str = LAYOUT_NESTED) -> DatasetIndex:
    """Enumerate (class, sample, path) triples under root, sorted lexicographically."""
    root = Path(root)
    if layout not in (LAYOUT_NESTED, LAYOUT_FLAT):
        raise DataError("invalid-parameter", f"unknown dataset layout {layout!r}")
    if not root.is_dir():
        raise StorageError("io-error", f"dataset root {root} is not a directory")

    entries = []
    if layout == LAYOUT_NESTED:
        for subject in sorted(p.name for p in root.iterdir() if p.is_dir()):
            subject_dir = root / subject
            for finger in sorted(p.name for p in subject_dir.iterdir() if p.is_dir()):
                finger_dir = subject_dir / finger
                for name in sorted(p.name for p in finger_dir.iterdir()
                                   if p.is_file() and _is_image(p.name)):
                    entries.append((f"{subject}-{finger}", name,
                                    os.path.join(subject, finger, name)))
    else:
        for name in sorted(p.name for p in root.iterdir()
                           if p.is_file() and _is_image(p.name)):
            stem = name.rsplit(".", 1)[0]
            parts = stem.split("_")
            if len(parts) < 3:
                raise DataError("malformed-file",
                                f"{name}: flat layout expects subject_finger_sample names")
            subject, finger = parts[0], parts[1]
            entries.append((f"{subject}-{finger}", name, name))

    if not entries:
        raise DataError("empty-dataset", f"no images found under {root}")
    return DatasetIndex(root=str(root), entries=tuple(entries), layout=layout)

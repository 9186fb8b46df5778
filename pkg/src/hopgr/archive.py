"""On-disk descriptor formats: single-record binary, labeled archive, CSV export.

Single descriptor (little-endian throughout):

    magic "HPGR" | version u16 | n_blocks_x u32 | n_blocks_y u32 |
    block_len u32 | cell_w u32 | cell_h u32 | block_cells_x u32 |
    block_cells_y u32 | block_stride u32 | bins u32 | epsilon f64 |
    prior_id (32 raw bytes) | values (float64 * n_blocks_x*n_blocks_y*block_len)

An archive is "HPGA" | version u16 | count u32, followed by ``count``
records of: class_id (u16 length + UTF-8 bytes), sample_id (same), then a
full single-descriptor blob.
"""

import struct

import numpy as np

from .descriptor import Descriptor, GridConfig
from .errors import DataError, StorageError

DESCRIPTOR_MAGIC = b"HPGR"
ARCHIVE_MAGIC = b"HPGA"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sH9Id32s")


def _pack_descriptor(d: Descriptor) -> bytes:
    n_bx, n_by, block_len = d.layout
    g = d.grid
    try:
        prior_bytes = bytes.fromhex(d.prior_id) if d.prior_id else b"\x00" * 32
    except ValueError:
        raise DataError("invalid-parameter",
                        f"prior_id is not a hex digest: {d.prior_id!r}")
    if len(prior_bytes) != 32:
        raise DataError("invalid-parameter",
                        f"prior_id must be a 32-byte digest, got {len(prior_bytes)} bytes")
    header = _HEADER.pack(DESCRIPTOR_MAGIC, FORMAT_VERSION, n_bx, n_by, block_len,
                          g.cell_w, g.cell_h, g.block_cells_x, g.block_cells_y,
                          g.block_stride, g.bins, g.epsilon, prior_bytes)
    return header + d.values.astype("<f8").tobytes()


def _unpack_descriptor(buf: bytes, offset: int, where: str):
    end = offset + _HEADER.size
    if end > len(buf):
        raise DataError("malformed-file", f"{where}: truncated header at byte {offset}")
    (magic, version, n_bx, n_by, block_len, cell_w, cell_h, bcx, bcy,
     stride, bins, epsilon, prior_bytes) = _HEADER.unpack_from(buf, offset)
    if magic != DESCRIPTOR_MAGIC:
        raise DataError("malformed-file", f"{where}: bad magic {magic!r} at byte {offset}")
    if version != FORMAT_VERSION:
        raise DataError("malformed-file", f"{where}: unsupported version {version}")
    n_values = n_bx * n_by * block_len
    data_end = end + 8 * n_values
    if data_end > len(buf):
        raise DataError("malformed-file",
                        f"{where}: truncated values at byte {end} "
                        f"(need {8 * n_values} bytes)")
    values = np.frombuffer(buf, dtype="<f8", count=n_values, offset=end).astype(np.float64)
    grid = GridConfig(cell_w=cell_w, cell_h=cell_h, block_cells_x=bcx,
                      block_cells_y=bcy, block_stride=stride, epsilon=epsilon,
                      bins=bins)
    d = Descriptor(values=values, layout=(n_bx, n_by, block_len), grid=grid,
                   prior_id=prior_bytes.hex())
    return d, data_end


def save_descriptor(d: Descriptor, path):
    try:
        with open(path, "wb") as fh:
            fh.write(_pack_descriptor(d))
    except OSError as exc:
        raise StorageError("io-error", str(exc))


def load_descriptor(path) -> Descriptor:
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise StorageError("io-error", str(exc))
    d, end = _unpack_descriptor(buf, 0, str(path))
    if end != len(buf):
        raise DataError("malformed-file",
                        f"{path}: {len(buf) - end} trailing bytes after descriptor")
    return d


def _pack_label(text: str) -> bytes:
    raw = text.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise DataError("invalid-parameter", f"label too long: {text[:32]!r}...")
    return struct.pack("<H", len(raw)) + raw


def _unpack_label(buf: bytes, offset: int, where: str):
    if offset + 2 > len(buf):
        raise DataError("malformed-file", f"{where}: truncated label at byte {offset}")
    (n,) = struct.unpack_from("<H", buf, offset)
    end = offset + 2 + n
    if end > len(buf):
        raise DataError("malformed-file", f"{where}: truncated label at byte {offset}")
    return buf[offset + 2:end].decode("utf-8"), end


def save_archive(entries, path):
    """Write labeled descriptors; entries is a sequence of (class_id, sample_id, Descriptor)."""
    entries = list(entries)
    blob = [struct.pack("<4sHI", ARCHIVE_MAGIC, FORMAT_VERSION, len(entries))]
    for class_id, sample_id, d in entries:
        blob.append(_pack_label(class_id))
        blob.append(_pack_label(sample_id))
        blob.append(_pack_descriptor(d))
    try:
        with open(path, "wb") as fh:
            fh.write(b"".join(blob))
    except OSError as exc:
        raise StorageError("io-error", str(exc))


def load_archive(path):
    """Read back the (class_id, sample_id, Descriptor) list in file order."""
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise StorageError("io-error", str(exc))
    where = str(path)
    if len(buf) < 10:
        raise DataError("malformed-file", f"{where}: truncated archive header")
    magic, version, count = struct.unpack_from("<4sHI", buf, 0)
    if magic != ARCHIVE_MAGIC:
        raise DataError("malformed-file", f"{where}: bad archive magic {magic!r}")
    if version != FORMAT_VERSION:
        raise DataError("malformed-file", f"{where}: unsupported archive version {version}")
    entries = []
    offset = 10
    for _ in range(count):
        class_id, offset = _unpack_label(buf, offset, where)
        sample_id, offset = _unpack_label(buf, offset, where)
        d, offset = _unpack_descriptor(buf, offset, where)
        entries.append((class_id, sample_id, d))
    if offset != len(buf):
        raise DataError("malformed-file",
                        f"{where}: {len(buf) - offset} trailing bytes after last record")
    return entries


def export_csv(entries, path):
    """One descriptor per row: class_id, sample_id, then the values at full precision."""
    entries = list(entries)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            n = entries[0][2].values.size if entries else 0
            fh.write("class_id,sample_id," + ",".join(f"v{i}" for i in range(n)) + "\n")
            for class_id, sample_id, d in entries:
                fh.write(f"{class_id},{sample_id},"
                         + ",".join(f"{v:.17g}" for v in d.values) + "\n")
    except OSError as exc:
        raise StorageError("io-error", str(exc))

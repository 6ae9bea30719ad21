"""Reader and writer for the big-endian IDX format used by MNIST."""

import logging
import struct
from pathlib import Path

import numpy as np

from statdec.data.dataset import Dataset
from statdec.errors import DataFormatError
from statdec.models.dataset import DatasetMeta

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def _read_header(data: bytes, path: Path, expected_magic: int) -> tuple[list[int], int]:
    """Validate the magic number and return (dims, payload offset)."""
    if len(data) < 4:
        raise DataFormatError(f"{path.name}: file too short for an IDX header", offset=0)
    (magic,) = struct.unpack(">I", data[:4])
    if magic != expected_magic:
        raise DataFormatError(
            f"{path.name}: magic number {magic:#010x}, expected {expected_magic:#010x}", offset=0
        )
    ndim = magic & 0xFF
    header_end = 4 + 4 * ndim
    if len(data) < header_end:
        raise DataFormatError(f"{path.name}: truncated dimension header", offset=len(data))
    dims = list(struct.unpack(f">{ndim}I", data[4:header_end]))
    expected = header_end + int(np.prod(dims))
    if len(data) < expected:
        raise DataFormatError(
            f"{path.name}: truncated payload, expected {expected} bytes, got {len(data)}",
            offset=len(data),
        )
    if len(data) > expected:
        raise DataFormatError(f"{path.name}: trailing bytes after payload", offset=expected)
    return dims, header_end


def read_idx_images(path: Path) -> np.ndarray:
    """Raw uint8 images flattened to (count, rows * cols)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"IDX image file not found: {path}")
    data = path.read_bytes()
    dims, offset = _read_header(data, path, IMAGE_MAGIC)
    count, width = dims[0], int(np.prod(dims[1:]))
    return np.frombuffer(data, dtype=np.uint8, offset=offset).reshape(count, width)


def read_idx_labels(path: Path) -> np.ndarray:
    """Raw uint8 labels as int64."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"IDX label file not found: {path}")
    data = path.read_bytes()
    dims, offset = _read_header(data, path, LABEL_MAGIC)
    return np.frombuffer(data, dtype=np.uint8, offset=offset, count=dims[0]).astype(np.int64)


def load_idx(images_path: Path, labels_path: Path | None = None) -> Dataset:
    """Load an IDX image file (and optional label file) with pixels scaled to [0, 1].

    Raises:
        FileNotFoundError: If a file does not exist.
        DataFormatError: On a bad magic number, truncation, or a count mismatch.
    """
    images_path = Path(images_path)
    pixels = read_idx_images(images_path)
    labels = None
    if labels_path is not None:
        labels = read_idx_labels(Path(labels_path))
        if labels.shape[0] != pixels.shape[0]:
            raise DataFormatError(
                f"{labels.shape[0]} labels for {pixels.shape[0]} images", offset=4
            )

    x = pixels.astype(np.float64) / 255.0
    counts = None if labels is None else np.bincount(labels).tolist()
    logger.info(f"Loaded {pixels.shape[0]:,} images of width {pixels.shape[1]} from {images_path}")
    return Dataset(x=x, labels=labels, meta=DatasetMeta(source=str(images_path), class_counts=counts))


def save_idx(dataset: Dataset, images_path: Path, labels_path: Path | None = None) -> None:
    """Write features (rescaled to bytes) and labels as IDX files.

    Square widths are written as (count, side, side) so MNIST-shaped data keeps
    its image header; other widths as (count, 1, width).

    Raises:
        DataFormatError: If a label does not fit in one byte.
    """
    labels = dataset.labels
    if labels is not None and labels.size and (labels.min() < 0 or labels.max() > 255):
        raise DataFormatError(
            f"IDX labels are single bytes; got class ids in [{labels.min()}, {labels.max()}]"
        )
    images_path = Path(images_path)
    images_path.parent.mkdir(parents=True, exist_ok=True)
    pixels = np.rint(np.clip(dataset.x, 0.0, 1.0) * 255.0).astype(np.uint8)
    side = int(round(np.sqrt(dataset.dim)))
    dims = [dataset.n, side, side] if side * side == dataset.dim else [dataset.n, 1, dataset.dim]
    header = struct.pack(">4I", IMAGE_MAGIC, *dims)
    images_path.write_bytes(header + pixels.tobytes())

    if labels_path is not None and labels is not None:
        labels_path = Path(labels_path)
        header = struct.pack(">II", LABEL_MAGIC, dataset.n)
        labels_path.write_bytes(header + labels.astype(np.uint8).tobytes())

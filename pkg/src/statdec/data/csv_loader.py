"""Numeric CSV ingestion with optional header and label column."""

import csv
import io
import logging
from pathlib import Path

import numpy as np

from statdec.data.dataset import Dataset
from statdec.errors import DataFormatError
from statdec.models.dataset import DatasetMeta

logger = logging.getLogger(__name__)

DEFAULT_LABEL_COLUMN = "y"


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _resolve_label_index(
    label_column: str | int | None, header: list[str] | None, width: int, filename: str
) -> int | None:
    """Map a label column name or index to a column position."""
    if label_column is None:
        return None
    if header is not None and isinstance(label_column, str) and label_column in header:
        return header.index(label_column)
    if isinstance(label_column, int) or str(label_column).lstrip("-").isdigit():
        index = int(label_column)
        if -width <= index < width:
            return index % width
    raise DataFormatError(f"{filename}: label column {label_column!r} not found")


def min_max_scale(x: np.ndarray) -> np.ndarray:
    """Scale each column to [0, 1]; constant columns become 0."""
    low = x.min(axis=0)
    span = x.max(axis=0) - low
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (x - low) / safe, 0.0)


def load_csv(
    path: Path, label_column: str | int | None = None, scale: bool = True
) -> Dataset:
    """Load a rectangular numeric CSV.

    A first row containing any non-numeric cell is treated as the header.
    Labels are remapped to contiguous ids 0..C-1 in sorted order.

    Raises:
        FileNotFoundError: If the file does not exist.
        DataFormatError: On invalid UTF-8, ragged rows, non-numeric cells, or a missing
            label column.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV file not found: {path}")

    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise DataFormatError(
            f"{path.name}: not UTF-8 text ({e.reason})", row=raw[: e.start].count(b"\n") + 1
        ) from e
    reader = csv.reader(io.StringIO(text, newline=""))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataFormatError(f"{path.name} is empty")

    header = None
    first_data_line = 1
    if not all(_is_number(cell) for cell in rows[0]):
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        first_data_line = 2
    if not rows:
        raise DataFormatError(f"{path.name} has a header but no data rows")

    width = len(header) if header is not None else len(rows[0])
    label_index = _resolve_label_index(label_column, header, width, path.name)

    values = np.empty((len(rows), width), dtype=np.float64)
    for r, row in enumerate(rows):
        line = r + first_data_line
        if len(row) != width:
            raise DataFormatError(
                f"{path.name}: expected {width} cells, got {len(row)}", row=line
            )
        for c, cell in enumerate(row):
            try:
                values[r, c] = float(cell)
            except ValueError as e:
                raise DataFormatError(
                    f"{path.name}: non-numeric cell {cell!r}", row=line, column=c + 1
                ) from e

    labels = None
    if label_index is not None:
        raw = values[:, label_index]
        if not np.all(raw == np.rint(raw)):
            raise DataFormatError(
                f"{path.name}: label column holds non-integer values", column=label_index + 1
            )
        _, labels = np.unique(raw.astype(np.int64), return_inverse=True)
        labels = labels.astype(np.int64)
        values = np.delete(values, label_index, axis=1)

    if values.shape[1] == 0:
        raise DataFormatError(f"{path.name} has no feature columns")
    x = min_max_scale(values) if scale else values
    counts = None if labels is None else np.bincount(labels).tolist()
    logger.info(f"Loaded {x.shape[0]:,} rows of width {x.shape[1]} from {path}")
    return Dataset(x=x, labels=labels, meta=DatasetMeta(source=str(path), class_counts=counts))


def save_csv(dataset: Dataset, path: Path, label_column: str = DEFAULT_LABEL_COLUMN) -> None:
    """Write features (and labels, if any) with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [f"f{j}" for j in range(dataset.dim)]
    if dataset.labels is not None:
        header.append(label_column)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for i in range(dataset.n):
            row = [repr(float(value)) for value in dataset.x[i]]
            if dataset.labels is not None:
                row.append(str(int(dataset.labels[i])))
            writer.writerow(row)

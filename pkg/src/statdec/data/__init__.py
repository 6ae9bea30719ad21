"""Dataset ingestion, writers, imbalance generators and runtime settings."""

from statdec.data.config import StatDECSettings, get_settings, load_train_config
from statdec.data.csv_loader import load_csv, save_csv
from statdec.data.dataset import Dataset
from statdec.data.idx_loader import load_idx, save_idx
from statdec.data.imbalance import (
    longtail_counts,
    make_imbalanced,
    make_longtail_imbalance,
    make_step_imbalance,
    step_counts,
)

__all__ = [
    "Dataset",
    "StatDECSettings",
    "get_settings",
    "load_csv",
    "load_idx",
    "load_train_config",
    "longtail_counts",
    "make_imbalanced",
    "make_longtail_imbalance",
    "make_step_imbalance",
    "save_csv",
    "save_idx",
    "step_counts",
]

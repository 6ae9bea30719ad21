"""StatDEC - statistical deep embedded clustering for imbalanced data."""

__version__ = "0.1.0"

"""Dataset provenance and imbalance descriptors."""

from enum import Enum

from pydantic import BaseModel, Field


class ImbalanceKind(str, Enum):
    STEP = "step"
    LONGTAIL = "longtail"


class ImbalanceSpec(BaseModel):
    """How a balanced dataset is subsampled.

    ratio is majority size over minority size (rho >= 1).
    """

    kind: ImbalanceKind
    ratio: float = Field(ge=1.0)


class DatasetMeta(BaseModel):
    """Where a dataset came from and what it contains."""

    source: str
    class_counts: list[int] | None = Field(
        default=None, description="Samples per class id, when labels are known"
    )
    imbalance: ImbalanceSpec | None = None
    seed: int | None = Field(default=None, description="Seed of the subsampling, if any")

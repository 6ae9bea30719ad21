"""JSON manifests written next to every artifact."""

from datetime import datetime

from pydantic import BaseModel, Field

from statdec.models.dataset import DatasetMeta, ImbalanceKind


class CheckpointManifest(BaseModel):
    """Sidecar for a binary checkpoint."""

    encoder_topology: list[int]
    decoder_topology: list[int]
    encoder_activations: list[str]
    decoder_activations: list[str]
    seed: int
    iterations: int = Field(description="Optimization steps applied to the weights")
    has_centroids: bool = False
    has_pool: bool = False
    sha256: str


class ImbalanceManifest(BaseModel):
    """Sidecar for a subsampled dataset."""

    kind: ImbalanceKind
    ratio: float
    seed: int
    source: str
    kept_counts: list[int]
    invert_step: bool = False


class MetricsReport(BaseModel):
    """Clustering quality against ground truth."""

    acc: float
    nmi: float
    ari: float
    n: int
    k: int
    seed: int


class RunManifest(BaseModel):
    """Everything needed to reproduce one CLI run."""

    command: str
    variant: str | None = None
    config: dict = Field(default_factory=dict)
    seed: int
    dataset: DatasetMeta | None = None
    artifacts: dict[str, str] = Field(
        default_factory=dict, description="File name -> SHA-256 digest"
    )
    timings: dict[str, float] = Field(default_factory=dict, description="Seconds per phase")
    metrics: MetricsReport | None = None
    created_at: datetime

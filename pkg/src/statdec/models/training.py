"""Training configuration and per-iteration history models."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Variant(str, Enum):
    """Ablation variant, named after which switches are on.

    - STATDEC: weighted target + statistics pooling
    - NO_POOLING: weighted target only
    - NO_WEIGHTING: statistics pooling only
    - BASELINE: neither (IDEC-style loop with the DEC target)
    """

    STATDEC = "statdec"
    NO_POOLING = "statdec-2"
    NO_WEIGHTING = "statdec-3"
    BASELINE = "baseline-IDEC"


class Ablation(BaseModel):
    """Switches selecting the ablation variant."""

    weighted_target: bool = True
    stat_pooling: bool = True

    @property
    def variant(self) -> Variant:
        if self.weighted_target and self.stat_pooling:
            return Variant.STATDEC
        if self.weighted_target:
            return Variant.NO_POOLING
        if self.stat_pooling:
            return Variant.NO_WEIGHTING
        return Variant.BASELINE


class TrainConfig(BaseModel):
    """Hyperparameters for pretraining and the joint clustering loop.

    Iteration counts are the full-budget values; `scale` divides them for
    desk-scale runs (see `scaled`).
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    lambda_: float = Field(default=0.1, alias="lambda", gt=0.0, lt=1.0)
    alpha: float = Field(default=1.0, gt=0.0)
    gamma: float = Field(default=2.0, ge=0.0)
    delta: float = Field(default=0.001, gt=0.0)
    eta0: float = Field(default=0.01, gt=0.0)
    lr_decay_factor: float = Field(default=10.0, ge=1.0)
    lr_decay_every: int = Field(default=20000, ge=1)
    batch: int = Field(default=256, ge=1)
    k: int = Field(default=10, ge=2)
    update_interval: int = Field(default=80, ge=1)
    max_iters: int = Field(default=20000, ge=0)
    scale: int = Field(default=1, ge=1)

    hidden_dims: list[int] = Field(default_factory=lambda: [500, 500, 1000])
    embedding_dim: int = Field(default=10, ge=1)
    dropout: float = Field(default=0.2, ge=0.0, lt=1.0)
    pretrain_iters: int = Field(default=100000, ge=0, description="Per layer pair")
    finetune_iters: int = Field(default=200000, ge=0)
    kmeans_restarts: int = Field(default=20, ge=1)
    pool_variance: bool = Field(
        default=False, description="Pool the per-cluster variance instead of the std"
    )

    ablation: Ablation = Field(default_factory=Ablation)

    @model_validator(mode="after")
    def _check_widths(self) -> "TrainConfig":
        if any(width < 1 for width in self.hidden_dims):
            raise ValueError(f"hidden widths must be positive, got {self.hidden_dims}")
        return self

    @property
    def variant(self) -> Variant:
        return self.ablation.variant

    def scaled(self, iterations: int) -> int:
        """Divide an iteration count by `scale` (floor)."""
        return iterations // self.scale

    def encoder_topology(self, input_dim: int) -> list[int]:
        return [input_dim, *self.hidden_dims, self.embedding_dim]

    def decoder_topology(self, input_dim: int) -> list[int]:
        return list(reversed(self.encoder_topology(input_dim)))


# Batch size and target-update interval per dataset family.
DATASET_PRESETS: dict[str, dict[str, int]] = {
    "mnist": {"batch": 256, "update_interval": 80},
    "cifar10": {"batch": 128, "update_interval": 100},
    "cifar100": {"batch": 128, "update_interval": 120},
    "refuge": {"batch": 8, "update_interval": 70},
}


class HistoryRecord(BaseModel):
    """One optimization step of the joint loop."""

    iteration: int
    loss: float = Field(description="lambda * Lc + (1 - lambda) * Lr")
    clustering_loss: float = Field(description="Mean KL(P||Q) over the batch")
    reconstruction_loss: float
    eta: float
    label_change: float | None = Field(
        default=None, description="Fraction of changed labels, set on P-update steps"
    )


class EvaluationPoint(BaseModel):
    """Ground-truth metrics measured at a P-update (monitoring only)."""

    iteration: int
    acc: float
    nmi: float
    ari: float

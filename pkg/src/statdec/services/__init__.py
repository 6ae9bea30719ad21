"""Pretraining, the joint clustering loop, and run output writers."""

from statdec.services.pretraining import pretrain
from statdec.services.schedule import BatchSampler, label_change_fraction, lr_at, should_stop
from statdec.services.trainer import TrainHistory, TrainResult, train

__all__ = [
    "BatchSampler",
    "TrainHistory",
    "TrainResult",
    "label_change_fraction",
    "lr_at",
    "pretrain",
    "should_stop",
    "train",
]

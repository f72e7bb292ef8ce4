"""Unsupervised damage detector: numpy CVAE plus scoring utilities."""

from sehs.detector.cvae import (
    CvaeArch,
    CvaeModel,
    TrainReport,
    build_cvae,
    elbo_loss,
    load_checkpoint,
    reconstruct,
    save_checkpoint,
    train,
)
from sehs.detector.detect import (
    DetectorCalibration,
    calibrate_threshold,
    classify,
    damage_index,
    save_di_table,
    sensing_accuracy,
)

__all__ = [
    "CvaeArch",
    "CvaeModel",
    "DetectorCalibration",
    "TrainReport",
    "build_cvae",
    "calibrate_threshold",
    "classify",
    "damage_index",
    "elbo_loss",
    "load_checkpoint",
    "reconstruct",
    "save_checkpoint",
    "save_di_table",
    "sensing_accuracy",
    "train",
]

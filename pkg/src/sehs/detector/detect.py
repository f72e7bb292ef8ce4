"""Damage scoring: reconstruction-error index, threshold, and accuracy."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sehs.errors import DomainError
from sehs.detector.cvae import CvaeModel, reconstruct

HEALTHY = "healthy"
DAMAGED = "damaged"


@dataclass(frozen=True)
class DetectorCalibration:
    threshold: float        # damage-index decision level
    percentile: float
    calibration_id: str = ""

    def __post_init__(self):
        if self.threshold < 0.0:
            raise DomainError("threshold must be non-negative")


def damage_index(model: CvaeModel, image: np.ndarray) -> float:
    """Mean squared error of the deterministic (mean-mode) reconstruction."""
    image = np.asarray(image, dtype=float)
    xr, _, _ = reconstruct(model, image, sampling="mean")
    return float(np.mean((image - np.asarray(xr, dtype=float))**2))


def calibrate_threshold(model: CvaeModel, images, percentile: float = 90.0,
                        calibration_id: str = "") -> DetectorCalibration:
    """Empirical percentile (linear interpolation) of validation indices."""
    images = list(images)
    if len(images) < 20:
        raise DomainError("threshold calibration needs >= 20 images")
    dis = np.array([damage_index(model, img) for img in images])
    gamma = float(np.percentile(dis, percentile, method="linear"))
    return DetectorCalibration(threshold=gamma, percentile=percentile,
                               calibration_id=calibration_id)


def classify(di: float, gamma: float) -> str:
    """Damaged iff the index exceeds the threshold (ties count healthy)."""
    return DAMAGED if di > gamma else HEALTHY


def sensing_accuracy(predicted, truth) -> float:
    """Fraction of samples whose predicted state matches the truth."""
    predicted, truth = list(predicted), list(truth)
    if len(predicted) != len(truth):
        raise DomainError("label lists must have equal length")
    if not predicted:
        raise DomainError("cannot score an empty label list")
    return float(np.mean([p == t for p, t in zip(predicted, truth)]))


def save_di_table(path, rows) -> None:
    """CSV of (sample_id, state_label, di, predicted) rows."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "state_label", "di", "predicted"])
        for row in rows:
            writer.writerow(row)

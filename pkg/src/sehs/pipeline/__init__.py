"""Experiment pipeline: configs, phased execution, CLI."""

from sehs.pipeline.config import (
    DAMAGE_STATES,
    ROAD_CLASSES,
    SENSOR_LOCATIONS,
    DatasetConfig,
    DesignSpaceConfig,
    DetectorConfig,
    ExperimentConfig,
    ImagingConfig,
    OptimizerConfig,
    ScenarioConfig,
    SeedsConfig,
    load_config,
)
from sehs.pipeline.phases import (
    PowerBudget,
    energy_consumption,
    read_manifest,
    report,
    run_phase1,
    run_phase2,
    run_phase3_evaluate,
    run_phase3_train,
    run_phase4,
    verify_manifest,
    write_manifest,
)

__all__ = [
    "DAMAGE_STATES",
    "ROAD_CLASSES",
    "SENSOR_LOCATIONS",
    "DatasetConfig",
    "DesignSpaceConfig",
    "DetectorConfig",
    "ExperimentConfig",
    "ImagingConfig",
    "OptimizerConfig",
    "ScenarioConfig",
    "SeedsConfig",
    "load_config",
    "PowerBudget",
    "energy_consumption",
    "read_manifest",
    "report",
    "run_phase1",
    "run_phase2",
    "run_phase3_evaluate",
    "run_phase3_train",
    "run_phase4",
    "verify_manifest",
    "write_manifest",
]

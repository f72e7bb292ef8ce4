"""Experiment configuration: one YAML file drives a full pipeline run."""

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from sehs.errors import ConfigError

DAMAGE_STATES = {
    "HN": None,
    "DMN1": (0.5, 0.10),
    "DMN2": (0.5, 0.20),
    "DQN1": (0.25, 0.10),
}
ROAD_CLASSES = ("A", "B", "NR")
SENSOR_LOCATIONS = {"mid-span": 0.5, "quarter-span": 0.25}


@dataclass(frozen=True)
class ScenarioConfig:
    damage_state: str = "DMN1"
    road_class: str = "A"
    sensor_location: str = "mid-span"
    # used when damage_state == "custom" (fractions of the span)
    crack_location: float = 0.5
    crack_severity: float = 0.1
    # used when sensor_location == "custom" (fraction of the span)
    sensor_fraction: float = 0.5

    def crack(self):
        """(location fraction, severity) or None for the healthy state."""
        if self.damage_state == "custom":
            return (self.crack_location, self.crack_severity)
        return DAMAGE_STATES[self.damage_state]

    def sensor(self) -> float:
        if self.sensor_location == "custom":
            return self.sensor_fraction
        return SENSOR_LOCATIONS[self.sensor_location]


@dataclass(frozen=True)
class DesignSpaceConfig:
    lengths: tuple = (0.15, 0.17, 0.22, 0.27, 0.31, 0.34, 0.40, 0.46)
    aspect_ratios: tuple = (1.0,)   # single entry -> 1-D L space
    tip_mass: float = 0.0
    pzt_length_ratio: float = 0.1
    thickness_ratio: float = 0.3


@dataclass(frozen=True)
class DatasetConfig:
    healthy_train: int = 96
    healthy_val: int = 24
    healthy_test: int = 30
    damaged_test: int = 30
    dt: float = 1e-3
    ringdown: float = 6.0   # free-decay tail after the vehicle exits [s]

    @property
    def n_healthy(self) -> int:
        return self.healthy_train + self.healthy_val + self.healthy_test


@dataclass(frozen=True)
class ImagingConfig:
    freq_bins: int = 128
    image_size: int = 128
    n_scales: int = 128
    gamma_threshold: float = 1e-4
    band: tuple = (0.0, 20.0)


@dataclass(frozen=True)
class DetectorConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    latent: int = 16
    channels: tuple = (8, 16, 32)
    repetitions: int = 3
    percentile: float = 90.0


@dataclass(frozen=True)
class OptimizerConfig:
    population: int = 100
    generations: int = 100
    seed: int = 0
    objective: str = "energy"       # or "energy-per-area"
    energy_state: str = "healthy"   # which state's mean energy to maximize


@dataclass(frozen=True)
class SeedsConfig:
    road: int = 1000
    vehicle: int = 2000
    training: tuple = (0, 1, 2)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "run"
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    designs: DesignSpaceConfig = field(default_factory=DesignSpaceConfig)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    imaging: ImagingConfig = field(default_factory=ImagingConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seeds: SeedsConfig = field(default_factory=SeedsConfig)
    baseline_accel: bool = False    # acceleration-based sensing benchmark

    def validate(self) -> None:
        s = self.scenario
        if s.damage_state not in set(DAMAGE_STATES) | {"custom"}:
            raise ConfigError(f"unknown damage state: {s.damage_state}")
        if s.road_class not in ROAD_CLASSES:
            raise ConfigError(f"unknown road class: {s.road_class}")
        if s.sensor_location not in set(SENSOR_LOCATIONS) | {"custom"}:
            raise ConfigError(f"unknown sensor location: {s.sensor_location}")
        d = self.designs
        if not d.lengths or not d.aspect_ratios:
            raise ConfigError("design space must list lengths/aspect ratios")
        for length in d.lengths:
            if not (0.1 <= length <= 0.5):
                raise ConfigError(f"design length {length} outside [0.1, 0.5]")
        for ratio in d.aspect_ratios:
            if not (0.1 <= ratio <= 1.0):
                raise ConfigError(f"aspect ratio {ratio} outside [0.1, 1]")
        ds = self.dataset
        if ds.healthy_val < 20:
            raise ConfigError("healthy validation needs >= 20 passages")
        if min(ds.healthy_train, ds.healthy_test, ds.damaged_test) < 1:
            raise ConfigError("dataset sizes must be positive")
        if ds.dt <= 0 or ds.ringdown < 0:
            raise ConfigError("dt must be positive and ringdown >= 0")
        if self.detector.repetitions < 1:
            raise ConfigError("need at least one training repetition")
        if len(self.seeds.training) < self.detector.repetitions:
            raise ConfigError("need one training seed per repetition")
        if self.optimizer.objective not in ("energy", "energy-per-area"):
            raise ConfigError(f"unknown objective: {self.optimizer.objective}")
        if self.optimizer.energy_state not in ("healthy", "damaged"):
            raise ConfigError("energy_state must be healthy or damaged")


def _build(cls, data: dict, path_hint: str):
    fields = {f.name: f for f in cls.__dataclass_fields__.values()}
    kwargs = {}
    for key, value in data.items():
        if key not in fields:
            raise ConfigError(f"unknown config key '{path_hint}{key}'")
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    return cls(**kwargs)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a YAML experiment config."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping: {path}")
    sections = {
        "scenario": ScenarioConfig,
        "designs": DesignSpaceConfig,
        "dataset": DatasetConfig,
        "imaging": ImagingConfig,
        "detector": DetectorConfig,
        "optimizer": OptimizerConfig,
        "seeds": SeedsConfig,
    }
    kwargs = {}
    for key, value in data.items():
        if key in sections:
            if not isinstance(value, dict):
                raise ConfigError(f"section '{key}' must be a mapping")
            kwargs[key] = _build(sections[key], value, key + ".")
        elif key in ("name", "baseline_accel"):
            kwargs[key] = value
        else:
            raise ConfigError(f"unknown config key '{key}'")
    try:
        config = ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    config.validate()
    return config

"""Simultaneous energy harvesting and sensing (SEHS) toolkit.

Subpackages:
    bridge    vehicle-bridge interaction simulation (beam FEM, roughness, half-car)
    peh       piezoelectric harvester plate model (IGA Kirchhoff-Love, voltage response)
    tfimg     wavelet time-frequency imaging (CWT / synchrosqueezing)
    detector  convolutional variational autoencoder damage detector
    optimize  Kriging surrogates and NSGA-II bi-objective search
    pipeline  four-phase orchestration, CLI, presets
"""

from sehs.errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    NumericalError,
    SehsError,
)

__version__ = "0.1.0"

__all__ = [
    "SehsError",
    "DomainError",
    "ConfigError",
    "NumericalError",
    "ConvergenceError",
    "__version__",
]

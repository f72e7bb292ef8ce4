"""ISO 8608 road roughness synthesis.

The one-sided displacement PSD is G_d(n) = G_d(n0) * (n/n0)^-w with n in
cycle/m.  A profile is the harmonic sum r(x) = sum_i eta_i cos(2*pi*n_i*x +
theta_i) with eta_i = sqrt(2*G_d(n_i)*dn); the 2*pi factor converts the
cycle/m spatial frequencies to radians so that the synthesised profile
reproduces the target PSD.
"""

from dataclasses import dataclass, field

import numpy as np

from sehs.errors import DomainError

ROAD_CLASS_GD = {"A": 16e-6, "B": 64e-6, "NR": 0.0}  # [m^3]


@dataclass(frozen=True)
class RoadProfile:
    road_class: str
    gd_n0: float          # [m^3]
    exponent_w: float
    n0: float             # [cycle/m]
    delta_n: float        # [cycle/m]
    amplitudes: np.ndarray = field(repr=False)
    frequencies: np.ndarray = field(repr=False)   # [cycle/m]
    phases: np.ndarray = field(repr=False)        # [rad]
    seed: int = 0

    def __post_init__(self):
        if np.any(self.amplitudes < 0):
            raise DomainError("harmonic amplitudes must be non-negative")
        if self.phases.size and (self.phases.min() < 0 or self.phases.max() >= 2 * np.pi):
            raise DomainError("phases must lie in [0, 2*pi)")
        if (self.amplitudes.size == 0) != (self.road_class == "NR"):
            raise DomainError("empty harmonic set is reserved for the NR class")

    def height(self, x):
        """Profile elevation r(x) [m]; x may be scalar or array."""
        x = np.asarray(x, dtype=float)
        if self.amplitudes.size == 0:
            return np.zeros_like(x)
        arg = 2.0 * np.pi * np.outer(x, self.frequencies) + self.phases
        return np.cos(arg) @ self.amplitudes

    def slope(self, x):
        """dr/dx [m/m]."""
        x = np.asarray(x, dtype=float)
        if self.amplitudes.size == 0:
            return np.zeros_like(x)
        arg = 2.0 * np.pi * np.outer(x, self.frequencies) + self.phases
        return -np.sin(arg) @ (self.amplitudes * 2.0 * np.pi * self.frequencies)


def generate_road_profile(road_class: str, length: float, seed: int,
                          delta_n: float = 0.04, n0: float = 0.1,
                          exponent_w: float = 2.0,
                          cutoff: float = 10.0) -> RoadProfile:
    """Seeded roughness realisation for class A, B or NR (smooth)."""
    if length <= 0:
        raise DomainError("profile length must be positive")
    if road_class not in ROAD_CLASS_GD:
        raise DomainError(f"unknown road class {road_class!r}")
    gd0 = ROAD_CLASS_GD[road_class]
    if road_class == "NR":
        empty = np.empty(0)
        return RoadProfile(road_class, gd0, exponent_w, n0, delta_n,
                           empty, empty, empty, seed)
    freqs = np.arange(delta_n, cutoff + 0.5 * delta_n, delta_n)
    gd = gd0 * (freqs / n0) ** (-exponent_w)
    amps = np.sqrt(2.0 * gd * delta_n)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=freqs.size)
    return RoadProfile(road_class, gd0, exponent_w, n0, delta_n,
                       amps, freqs, phases, seed)

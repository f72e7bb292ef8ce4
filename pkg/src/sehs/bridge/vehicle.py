"""Half-car vehicle model and Latin-hypercube parameter sampling."""

from dataclasses import dataclass, replace

import numpy as np

from sehs.errors import DomainError

# Fixed suspension/tire properties shared by all sampled vehicles.  Tire mass
# and pitch inertia are not tabulated with the rest; defaults below are the
# documented choices (inertia defaults to m_v*d1*d2 when left at 0).
TABLE_VEHICLE_FIXED = {
    "suspension_stiffness": 27_500.0,   # k_1, k_2 [N/m]
    "suspension_damping": 1_300.0,      # c_1, c_2 [N*s/m]
    "tire_stiffness": 1.5e5,            # k_t1, k_t2 [N/m]
    "tire_damping": 5.0,                # c_t1, c_t2 [N*s/m]
    "tire_mass": 50.0,                  # m_t1, m_t2 [kg]
}


@dataclass(frozen=True)
class VehicleModel:
    body_mass: float          # m_v [kg]
    inertia: float            # I_v [kg*m^2]
    tire_mass_1: float
    tire_mass_2: float
    k1: float
    k2: float
    c1: float
    c2: float
    kt1: float
    kt2: float
    d1: float                 # centre of mass to front axle [m]
    d2: float                 # centre of mass to rear axle [m]
    speed: float              # [m/s]
    ct1: float = 0.0
    ct2: float = 0.0

    def __post_init__(self):
        if min(self.body_mass, self.inertia, self.tire_mass_1, self.tire_mass_2,
               self.k1, self.k2, self.kt1, self.kt2) <= 0:
            raise DomainError("vehicle masses and stiffnesses must be positive")
        if min(self.c1, self.c2, self.ct1, self.ct2) < 0:
            raise DomainError("damping coefficients must be non-negative")
        if self.d1 + self.d2 <= 0:
            raise DomainError("axle spacing must be positive")
        if self.speed <= 0:
            raise DomainError("speed must be positive")

    @property
    def axle_spacing(self) -> float:
        return self.d1 + self.d2

    def matrices(self, include_tire_damping: bool = True):
        """(M, C, K) of the 4-dof half-car (body heave, pitch, two tires)."""
        c1, c2, d1, d2 = self.c1, self.c2, self.d1, self.d2
        k1, k2 = self.k1, self.k2
        M = np.diag([self.body_mass, self.inertia, self.tire_mass_1, self.tire_mass_2])
        C = np.array([
            [c1 + c2, c1 * d1 - c2 * d2, -c1, -c2],
            [c1 * d1 - c2 * d2, c1 * d1**2 + c2 * d2**2, -c1 * d1, c2 * d2],
            [-c1, -c1 * d1, c1, 0.0],
            [-c2, c2 * d2, 0.0, c2],
        ])
        K = np.array([
            [k1 + k2, k1 * d1 - k2 * d2, -k1, -k2],
            [k1 * d1 - k2 * d2, k1 * d1**2 + k2 * d2**2, -k1 * d1, k2 * d2],
            [-k1, -k1 * d1, k1 + self.kt1, 0.0],
            [-k2, k2 * d2, 0.0, k2 + self.kt2],
        ])
        if include_tire_damping:
            C[2, 2] += self.ct1
            C[3, 3] += self.ct2
        return M, C, K


@dataclass(frozen=True)
class VehicleRanges:
    """Sampled intervals; everything else is fixed per TABLE_VEHICLE_FIXED."""
    body_mass: tuple = (500.0, 1500.0)            # [kg]
    speed_kmh: tuple = (50.0, 60.0)               # [km/h]
    axle_spacing: tuple = (2.0, 3.5)              # d1 + d2 [m]
    front_axle_fraction: tuple = (0.4, 0.5)       # d1 / (d1 + d2)

    def intervals(self):
        out = (self.body_mass, self.speed_kmh, self.axle_spacing,
               self.front_axle_fraction)
        for lo, hi in out:
            if not hi > lo:
                raise DomainError("sampling intervals must be non-empty")
        return out


def _lhs(n: int, dims: int, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube in [0,1]^dims: one sample per stratum per dimension."""
    u = np.empty((n, dims))
    for j in range(dims):
        u[:, j] = (rng.permutation(n) + rng.random(n)) / n
    return u


def sample_vehicle_params(n: int, ranges: VehicleRanges | None = None,
                          seed: int = 0) -> list[VehicleModel]:
    """Draw n stratified half-car parameter sets (deterministic under seed)."""
    if n < 1:
        raise DomainError("need n >= 1 samples")
    ranges = ranges or VehicleRanges()
    ivs = ranges.intervals()
    rng = np.random.default_rng(seed)
    u = _lhs(n, len(ivs), rng)
    fixed = TABLE_VEHICLE_FIXED
    out = []
    for row in u:
        vals = [lo + (hi - lo) * t for (lo, hi), t in zip(ivs, row)]
        mass, v_kmh, spacing, frac = vals
        d1 = frac * spacing
        d2 = spacing - d1
        out.append(VehicleModel(
            body_mass=mass,
            inertia=mass * d1 * d2,
            tire_mass_1=fixed["tire_mass"],
            tire_mass_2=fixed["tire_mass"],
            k1=fixed["suspension_stiffness"],
            k2=fixed["suspension_stiffness"],
            c1=fixed["suspension_damping"],
            c2=fixed["suspension_damping"],
            kt1=fixed["tire_stiffness"],
            kt2=fixed["tire_stiffness"],
            ct1=fixed["tire_damping"],
            ct2=fixed["tire_damping"],
            d1=d1,
            d2=d2,
            speed=v_kmh / 3.6,
        ))
    return out

"""Coupled vehicle passage simulation and PassageRecord persistence."""

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from sehs.bridge.beam import GRAVITY, BeamSystem, hermite_shape
from sehs.bridge.road import RoadProfile
from sehs.bridge.vehicle import VehicleModel
from sehs.errors import ConvergenceError, DomainError
from sehs.kernels import passage_loop


@dataclass
class PassageRecord:
    dt: float
    accel_trace: np.ndarray = field(repr=False)   # [m/s^2] at the sensor
    sensor_location: float
    bridge_state_label: str                       # "healthy" or "damaged:..."
    vehicle: VehicleModel | None = None
    road_seed: int = 0
    contact_forces: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        self.accel_trace = np.asarray(self.accel_trace, dtype=float)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.accel_trace.size) * self.dt

    @property
    def duration(self) -> float:
        return (self.accel_trace.size - 1) * self.dt


def _axle_kinematics(system: BeamSystem, road: RoadProfile, speed: float,
                     offset: float, dt: float, n_steps: int):
    """Per-step dof indices, shape values and roughness at one axle."""
    span = system.beam.span
    t = np.arange(n_steps + 1) * dt
    x = speed * t - offset
    on = (x >= 0.0) & (x <= span)
    dofs = np.full((n_steps + 1, 4), -1, dtype=np.int64)
    shp = np.zeros((n_steps + 1, 4))
    n_el = system.beam.n_elements
    le = system.elem_len
    for k in np.nonzero(on)[0]:
        e = min(int(x[k] / le), n_el - 1)
        shp[k] = hermite_shape(x[k] / le - e, le)
        dofs[k] = system.free_index[2 * e:2 * e + 4]
    r = np.zeros(n_steps + 1)
    rd = np.zeros(n_steps + 1)
    if np.any(on):
        r[on] = road.height(x[on])
        rd[on] = speed * road.slope(x[on])
    return on, dofs, shp, r, rd


def simulate_passage(system: BeamSystem, vehicle: VehicleModel,
                     road: RoadProfile, dt: float, sensor_location: float,
                     include_tire_damping: bool = True,
                     state_label: str = "healthy",
                     ringdown: float = 0.0,
                     tol: float = 1e-6, max_iter: int = 100) -> PassageRecord:
    """One vehicle crossing: front-axle entry to rear-axle exit.

    The contact forces are resolved by per-step fixed-point iteration between
    the half-car and the beam (both stepped with average-acceleration
    Newmark).  Off-bridge axles roll on rigid smooth ground.  ``ringdown``
    appends that many seconds of free bridge decay after the rear axle exits.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    span = system.beam.span
    if not 0 < sensor_location < span:
        raise DomainError("sensor must lie strictly inside the span")
    if span / (vehicle.speed * dt) < 10:
        raise DomainError("vehicle too fast for the time step: "
                          "fewer than 10 on-bridge steps")

    n_steps = math.ceil((span + vehicle.axle_spacing) / (vehicle.speed * dt))
    n_steps += math.ceil(max(ringdown, 0.0) / dt)

    ct1 = vehicle.ct1 if include_tire_damping else 0.0
    ct2 = vehicle.ct2 if include_tire_damping else 0.0
    Mv, Cv, Kv = vehicle.matrices(include_tire_damping)

    a0, a1 = 4.0 / dt**2, 2.0 / dt
    keff_b = system.stiffness + a0 * system.mass + a1 * system.damping
    keff_inv_b = sla.inv(keff_b)
    keff_inv_v = sla.inv(Kv + a0 * Mv + a1 * Cv)

    on1, dofs1, shp1, r1, r1d = _axle_kinematics(system, road, vehicle.speed,
                                                 0.0, dt, n_steps)
    on2, dofs2, shp2, r2, r2d = _axle_kinematics(system, road, vehicle.speed,
                                                 vehicle.axle_spacing, dt, n_steps)

    w_front = GRAVITY * (vehicle.tire_mass_1
                         + vehicle.body_mass * vehicle.d2 / vehicle.axle_spacing)
    w_rear = GRAVITY * (vehicle.tire_mass_2
                        + vehicle.body_mass * vehicle.d1 / vehicle.axle_spacing)

    n_el = system.beam.n_elements
    e_s = min(int(sensor_location / system.elem_len), n_el - 1)
    shp_s = hermite_shape(sensor_location / system.elem_len - e_s, system.elem_len)
    dofs_s = system.free_index[2 * e_s:2 * e_s + 4]

    trace, p1, p2, status = passage_loop(
        dt, n_steps, keff_inv_b, system.mass, system.damping,
        keff_inv_v, Mv, Cv,
        vehicle.kt1, vehicle.kt2, ct1, ct2, w_front, w_rear,
        on1, dofs1, shp1, r1, r1d,
        on2, dofs2, shp2, r2, r2d,
        dofs_s, shp_s, tol, max_iter,
    )
    if status != 0:
        raise ConvergenceError(
            f"contact-force iteration exceeded {max_iter} iterations "
            f"(tol={tol:g})")
    return PassageRecord(dt=dt, accel_trace=trace,
                         sensor_location=sensor_location,
                         bridge_state_label=state_label,
                         vehicle=vehicle, road_seed=road.seed,
                         contact_forces=np.stack([p1, p2]))


def save_passage(record: PassageRecord, csv_path) -> None:
    """CSV (t, accel) plus a JSON sidecar with the run metadata."""
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "accel"])
        for t, a in zip(record.times, record.accel_trace):
            w.writerow([f"{t:.6f}", repr(float(a))])
    meta = {
        "dt": record.dt,
        "sensor_location": record.sensor_location,
        "bridge_state_label": record.bridge_state_label,
        "road_seed": record.road_seed,
        "vehicle": asdict(record.vehicle) if record.vehicle else None,
    }
    csv_path.with_suffix(".json").write_text(json.dumps(meta, indent=1))


def load_passage(csv_path) -> PassageRecord:
    """Read a passage CSV (header: t, accel); sidecar JSON is optional, so
    externally recorded acceleration files are accepted as-is."""
    csv_path = Path(csv_path)
    t, a = [], []
    with open(csv_path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if [c.strip().lower() for c in header[:2]] != ["t", "accel"]:
            raise DomainError(f"{csv_path}: expected header 't,accel'")
        for row in r:
            t.append(float(row[0]))
            a.append(float(row[1]))
    if len(t) < 2:
        raise DomainError(f"{csv_path}: need at least 2 samples")
    dt = t[1] - t[0]
    meta_path = csv_path.with_suffix(".json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    vehicle = VehicleModel(**meta["vehicle"]) if meta.get("vehicle") else None
    return PassageRecord(dt=meta.get("dt", dt), accel_trace=np.asarray(a),
                         sensor_location=meta.get("sensor_location", 0.0),
                         bridge_state_label=meta.get("bridge_state_label", "unknown"),
                         vehicle=vehicle, road_seed=meta.get("road_seed", 0))

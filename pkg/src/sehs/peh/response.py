"""Time-domain harvester response, energy accounting, and design sweeps."""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from sehs.errors import DomainError, NumericalError
from sehs.peh.modal import ReducedPeh, reduce_model, voltage_frf
from sehs.peh.plate import PehDesign, assemble_peh


@dataclass(frozen=True)
class VoltageTrace:
    """Voltage across the load resistor sampled at a fixed rate."""

    dt: float
    volts: np.ndarray
    load_resistance: float
    metadata: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.volts.size)


def simulate_voltage(reduced: ReducedPeh, passage, rtol: float = 1e-6,
                     atol: float = 1e-9) -> VoltageTrace:
    """Integrate the coupled modal/circuit equations for one crossing.

    The state stacks modal displacements, modal velocities, and the load
    voltage; the base acceleration is the bridge deck acceleration at the
    harvester mount, linearly interpolated between samples.
    """
    k_diag = reduced.stiffness_diag
    c_diag = reduced.damping_diag
    theta, f = reduced.coupling, reduced.forcing
    cp, rl = reduced.capacitance, reduced.load_resistance
    n = reduced.n_modes

    times = passage.dt * np.arange(passage.accel_trace.size)
    accel = passage.accel_trace

    def rhs(t, z):
        eta, etad, v = z[:n], z[n:2 * n], z[-1]
        a_b = np.interp(t, times, accel, left=0.0, right=0.0)
        etadd = f * a_b - c_diag * etad - k_diag * eta + theta * v
        vdot = (-v / rl - theta @ etad) / cp
        return np.concatenate([etad, etadd, [vdot]])

    sol = solve_ivp(rhs, (times[0], times[-1]), np.zeros(2 * n + 1),
                    method="RK45", t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericalError(f"voltage integration failed: {sol.message}")
    return VoltageTrace(dt=passage.dt, volts=sol.y[-1],
                        load_resistance=rl,
                        metadata={"state_label": passage.bridge_state_label,
                                  "road_seed": passage.road_seed})


def harvested_energy(trace: VoltageTrace,
                     load_resistance: float | None = None) -> float:
    """Energy dissipated in the load resistor, trapezoidal v^2/R [J]."""
    rl = trace.load_resistance if load_resistance is None else load_resistance
    if rl <= 0.0:
        raise DomainError("load resistance must be positive")
    return float(np.trapezoid(trace.volts**2 / rl, dx=trace.dt))


def select_load_resistance(reduced: ReducedPeh,
                           log10_bounds: tuple = (2.0, 8.0),
                           tol: float = 1e-3) -> float:
    """Load resistance maximizing power density at the first mode.

    Golden-section search over log10(R) for the resistance that maximizes
    |H_v(omega_1)|^2 / R, the average power per unit squared base
    acceleration at resonance. For weak coupling this lands near the
    impedance match 1/(omega_1 * C_p).
    """
    w1 = 2.0 * np.pi * reduced.freqs_hz[0]

    def neg_power(log_r):
        r = 10.0**log_r
        h = voltage_frf(reduced, np.array([w1]), load_resistance=r)[0]
        return -abs(h)**2 / r

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = log10_bounds
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = neg_power(c), neg_power(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = neg_power(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = neg_power(d)
    return float(10.0**(0.5 * (a + b)))


def fundamental_frequency_map(lengths, aspect_ratios, tip_mass: float = 0.0,
                              template: PehDesign | None = None,
                              n_spans: int = 13) -> np.ndarray:
    """First modal frequency [Hz] over an (L, R) design grid.

    Rows follow ``lengths``, columns ``aspect_ratios``; all other design
    fields come from ``template`` (reference design when omitted).
    """
    from dataclasses import replace

    base = template if template is not None else PehDesign()
    lengths = np.atleast_1d(np.asarray(lengths, dtype=float))
    ratios = np.atleast_1d(np.asarray(aspect_ratios, dtype=float))
    grid = np.empty((lengths.size, ratios.size))
    for i, length in enumerate(lengths):
        for j, ratio in enumerate(ratios):
            design = replace(base, length=float(length),
                             aspect_ratio=float(ratio), tip_mass=tip_mass)
            system = assemble_peh(design, n_spans=n_spans)
            reduced = reduce_model(system, count=1)
            grid[i, j] = reduced.freqs_hz[0]
    return grid


def save_voltage_trace(path, trace: VoltageTrace) -> None:
    """Write CSV (t, volts) plus a JSON sidecar with circuit metadata."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "volts"])
        for t, v in zip(trace.times, trace.volts):
            writer.writerow([f"{t:.9g}", f"{v:.9g}"])
    sidecar = {"dt": trace.dt, "load_resistance": trace.load_resistance,
               "metadata": trace.metadata}
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2))


def load_voltage_trace(path) -> VoltageTrace:
    """Read a voltage CSV; the sidecar is optional for external files."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["t", "volts"]:
            raise DomainError(f"unexpected voltage CSV header: {header}")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    if len(rows) < 2:
        raise DomainError("voltage CSV needs at least two samples")
    times = np.array([r[0] for r in rows])
    volts = np.array([r[1] for r in rows])
    dt = float(times[1] - times[0])
    sidecar_path = path.with_suffix(path.suffix + ".json")
    rl, meta = 1.0, {}
    if sidecar_path.exists():
        sidecar = json.loads(sidecar_path.read_text())
        dt = float(sidecar.get("dt", dt))
        rl = float(sidecar.get("load_resistance", rl))
        meta = sidecar.get("metadata", {})
    return VoltageTrace(dt=dt, volts=volts, load_resistance=rl, metadata=meta)


def export_frf_csv(path, freq_hz: np.ndarray, frf: np.ndarray) -> None:
    """Write a voltage FRF as CSV (freq_hz, re, im, abs)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["freq_hz", "re", "im", "abs"])
        for f, h in zip(freq_hz, frf):
            writer.writerow([f"{f:.9g}", f"{h.real:.9g}", f"{h.imag:.9g}",
                             f"{abs(h):.9g}"])

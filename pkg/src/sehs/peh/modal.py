"""Modal reduction and voltage frequency response of the harvester.

The assembled plate system is projected onto its lowest mass-normalized
modes; the reduced equations couple the modal coordinates to the voltage
across the load resistor through the modal coupling vector. The voltage FRF
(per unit base acceleration) follows by eliminating the voltage with the
electrical admittance of the resistor-capacitor pair.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from sehs.errors import DomainError
from sehs.peh.plate import PehSystem

# Keep every mode below this frequency in the default reduced model.
MODE_CUTOFF_HZ = 60.0
MIN_MODES = 3


def solve_modes(system: PehSystem, count: int):
    """Lowest ``count`` modes: (frequencies [Hz], mass-normalized shapes)."""
    if not (1 <= count <= system.n_dof):
        raise DomainError("mode count must lie in [1, n_dof]")
    w2, phi = sla.eigh(system.stiffness, system.mass,
                       subset_by_index=[0, count - 1])
    freqs = np.sqrt(np.maximum(w2, 0.0)) / (2.0 * np.pi)
    # scipy returns mass-orthonormal vectors for the generalized problem.
    return freqs, phi


@dataclass(frozen=True)
class ReducedPeh:
    """Modally reduced electro-mechanical harvester model."""

    freqs_hz: np.ndarray       # (K,) modal frequencies
    damping_diag: np.ndarray   # (K,) modal damping coefficients
    stiffness_diag: np.ndarray  # (K,) squared angular frequencies
    coupling: np.ndarray       # (K,) modal coupling vector
    forcing: np.ndarray        # (K,) modal base-acceleration load
    shapes: np.ndarray         # (N, K) mass-normalized mode shapes
    capacitance: float         # [F]
    load_resistance: float     # [ohm]

    @property
    def n_modes(self) -> int:
        return self.freqs_hz.size


def default_mode_count(freqs_hz: np.ndarray) -> int:
    """Smallest count whose highest kept mode exceeds the cutoff (min 3)."""
    above = np.nonzero(freqs_hz > MODE_CUTOFF_HZ)[0]
    count = int(above[0]) + 1 if above.size else freqs_hz.size
    return min(max(count, MIN_MODES), freqs_hz.size)


def reduce_model(system: PehSystem, count: int | None = None) -> ReducedPeh:
    """Project the full system onto its lowest modes.

    With ``count=None`` the model keeps the smallest number of modes whose
    last frequency exceeds 60 Hz (never fewer than three), which bounds the
    truncation error on the sub-20-Hz band of interest.
    """
    if count is None:
        probe = min(max(MIN_MODES + 5, 12), system.n_dof)
        freqs, _ = solve_modes(system, probe)
        while freqs[-1] <= MODE_CUTOFF_HZ and probe < system.n_dof:
            probe = min(probe * 2, system.n_dof)
            freqs, _ = solve_modes(system, probe)
        count = default_mode_count(freqs)
    freqs, phi = solve_modes(system, count)
    omega = 2.0 * np.pi * freqs
    design = system.design
    return ReducedPeh(
        freqs_hz=freqs,
        damping_diag=design.damping_alpha + design.damping_beta * omega**2,
        stiffness_diag=omega**2,
        coupling=phi.T @ system.coupling,
        forcing=phi.T @ system.forcing,
        shapes=phi,
        capacitance=system.capacitance,
        load_resistance=design.load_resistance,
    )


def voltage_frf(reduced: ReducedPeh, omega: np.ndarray,
                load_resistance: float | None = None) -> np.ndarray:
    """Complex voltage per unit base acceleration, H_v(omega) [V*s^2/m]."""
    rl = reduced.load_resistance if load_resistance is None else load_resistance
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    theta, f = reduced.coupling, reduced.forcing
    k, c = reduced.stiffness_diag, reduced.damping_diag
    n = reduced.n_modes
    out = np.empty(omega.shape, dtype=complex)
    for i, w in enumerate(omega):
        g = 1.0 / (1.0 / rl + 1j * w * reduced.capacitance)
        a = np.diag(-w**2 + 1j * w * c + k) \
            + 1j * w * g * np.outer(theta, theta)
        out[i] = 1j * w * g * (theta @ np.linalg.solve(a, f))
    return out


def voltage_frf_full(system: PehSystem, omega: np.ndarray,
                     load_resistance: float | None = None) -> np.ndarray:
    """Voltage FRF from the unreduced matrices (truncation-free reference)."""
    design = system.design
    rl = design.load_resistance if load_resistance is None else load_resistance
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    m, k = system.mass, system.stiffness
    c = system.damping
    theta, f = system.coupling, system.forcing
    out = np.empty(omega.shape, dtype=complex)
    for i, w in enumerate(omega):
        g = 1.0 / (1.0 / rl + 1j * w * system.capacitance)
        a = -w**2 * m + 1j * w * c + k + 1j * w * g * np.outer(theta, theta)
        out[i] = 1j * w * g * (theta @ np.linalg.solve(a, f))
    return out

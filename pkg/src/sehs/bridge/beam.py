"""Simply supported Euler-Bernoulli beam with an optional open-crack zone.

The crack reduces the flexural stiffness linearly over 1.5 beam heights on
each side of the crack location, down to E*I_c at the crack, with
I_c = b*(h - h_c)^3 / 12.  Element stiffness is evaluated at element
midpoints.  Damping is Rayleigh, fitted to the damping ratio at the first two
modes of the *undamaged* beam.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from sehs.errors import DomainError, NumericalError

GRAVITY = 9.81


@dataclass(frozen=True)
class BeamModel:
    span: float              # [m]
    young_modulus: float     # [Pa]
    second_moment: float     # [m^4], undamaged
    area: float              # [m^2]
    mass_per_length: float   # [kg/m]
    damping_ratio: float
    n_elements: int = 100
    height: float = 0.0      # [m], rectangular-equivalent section
    width: float = 0.0       # [m]

    def __post_init__(self):
        if min(self.span, self.young_modulus, self.second_moment,
               self.mass_per_length, self.area) <= 0:
            raise DomainError("beam geometry and material properties must be positive")
        if not 0 <= self.damping_ratio < 1:
            raise DomainError("damping ratio must lie in [0, 1)")
        if self.n_elements < 2:
            raise DomainError("need at least 2 beam elements")
        h, b = self.height, self.width
        if h <= 0 or b <= 0:
            raise DomainError("section height/width must be positive")
        if abs(b * h - self.area) > 1e-9 * self.area:
            raise DomainError("section width*height inconsistent with area")
        if abs(b * h**3 / 12 - self.second_moment) > 1e-9 * self.second_moment:
            raise DomainError("section b*h^3/12 inconsistent with second moment")

    @classmethod
    def rectangular(cls, span, young_modulus, second_moment, area,
                    mass_per_length, damping_ratio, n_elements=100):
        """Derive the unique rectangle matching both A and I0."""
        h = float(np.sqrt(12.0 * second_moment / area))
        b = area / h
        return cls(span, young_modulus, second_moment, area, mass_per_length,
                   damping_ratio, n_elements, height=h, width=b)

    @classmethod
    def reference_bridge(cls, n_elements=100):
        """25 m concrete girder used throughout the study presets."""
        return cls.rectangular(span=25.0, young_modulus=2.87e9, second_moment=2.9,
                               area=8.7, mass_per_length=2303.0, damping_ratio=0.03,
                               n_elements=n_elements)


@dataclass(frozen=True)
class CrackSpec:
    location: float   # [m] along the span
    severity: float   # crack depth / section height, in [0, 1)

    def __post_init__(self):
        if not 0 <= self.severity < 1:
            raise DomainError("crack severity must lie in [0, 1)")


@dataclass
class BeamSystem:
    """Assembled free-dof matrices plus the dof bookkeeping for interpolation."""
    beam: BeamModel
    mass: np.ndarray
    stiffness: np.ndarray
    damping: np.ndarray
    free_index: np.ndarray = field(repr=False)  # full dof -> free dof, -1 if constrained
    elem_len: float = 0.0

    @property
    def n_free(self) -> int:
        return self.mass.shape[0]


def _element_matrices(EI, mu, le):
    l2 = le * le
    k = EI / le**3 * np.array([
        [12, 6 * le, -12, 6 * le],
        [6 * le, 4 * l2, -6 * le, 2 * l2],
        [-12, -6 * le, 12, -6 * le],
        [6 * le, 2 * l2, -6 * le, 4 * l2],
    ])
    m = mu * le / 420.0 * np.array([
        [156, 22 * le, 54, -13 * le],
        [22 * le, 4 * l2, 13 * le, -3 * l2],
        [54, 13 * le, 156, -22 * le],
        [-13 * le, -3 * l2, -22 * le, 4 * l2],
    ])
    return k, m


def _flexural_stiffness(beam: BeamModel, crack, x):
    """EI at position x per the linear-taper crack zone."""
    EI0 = beam.young_modulus * beam.second_moment
    if crack is None or crack.severity == 0.0:
        return EI0
    h = beam.height
    z1 = crack.location - 1.5 * h
    z2 = crack.location + 1.5 * h
    if x < z1 or x > z2:
        return EI0
    Ic = beam.width * (h * (1.0 - crack.severity))**3 / 12.0
    dI = beam.second_moment - Ic
    if x <= crack.location:
        frac = (x - z1) / (crack.location - z1)
    else:
        frac = (z2 - x) / (z2 - crack.location)
    return beam.young_modulus * (beam.second_moment - dI * frac)


def _assemble_mk(beam: BeamModel, crack):
    n_el = beam.n_elements
    le = beam.span / n_el
    ndof = 2 * (n_el + 1)
    K = np.zeros((ndof, ndof))
    M = np.zeros((ndof, ndof))
    for e in range(n_el):
        EI = _flexural_stiffness(beam, crack, (e + 0.5) * le)
        k, m = _element_matrices(EI, beam.mass_per_length, le)
        i = 2 * e
        K[i:i + 4, i:i + 4] += k
        M[i:i + 4, i:i + 4] += m
    # simply supported: w = 0 at both end nodes
    free = np.ones(ndof, dtype=bool)
    free[0] = False
    free[2 * n_el] = False
    free_index = np.full(ndof, -1, dtype=np.int64)
    free_index[free] = np.arange(free.sum())
    return M[np.ix_(free, free)], K[np.ix_(free, free)], free_index, le


def assemble_beam(beam: BeamModel, crack: CrackSpec | None = None) -> BeamSystem:
    """Assemble free-dof mass/stiffness/Rayleigh-damping matrices."""
    if crack is not None and crack.severity > 0:
        h = beam.height
        if crack.location - 1.5 * h < 0 or crack.location + 1.5 * h > beam.span:
            raise DomainError("crack-affected zone extends outside the span")
    M, K, free_index, le = _assemble_mk(beam, crack)
    try:
        sla.cholesky(M)
    except sla.LinAlgError as exc:
        raise NumericalError("assembled mass matrix is not positive definite") from exc

    # Rayleigh coefficients from the first two undamaged modes
    if crack is not None and crack.severity > 0:
        M0, K0, _, _ = _assemble_mk(beam, None)
    else:
        M0, K0 = M, K
    lam = sla.eigh(K0, M0, eigvals_only=True, subset_by_index=[0, 1])
    w1, w2 = np.sqrt(lam)
    xi = beam.damping_ratio
    alpha = 2.0 * xi * w1 * w2 / (w1 + w2)
    beta = 2.0 * xi / (w1 + w2)
    C = alpha * M + beta * K
    return BeamSystem(beam=beam, mass=M, stiffness=K, damping=C,
                      free_index=free_index, elem_len=le)


def beam_modal_frequencies(system: BeamSystem, count: int) -> np.ndarray:
    """First ``count`` natural frequencies [Hz], ascending."""
    if count < 1 or count > system.n_free:
        raise DomainError("mode count must be in [1, n_free]")
    try:
        lam = sla.eigh(system.stiffness, system.mass, eigvals_only=True,
                       subset_by_index=[0, count - 1])
    except sla.LinAlgError as exc:
        raise NumericalError(f"modal eigensolve failed: {exc}") from exc
    return np.sqrt(np.maximum(lam, 0.0)) / (2.0 * np.pi)


def hermite_shape(s: float, le: float) -> np.ndarray:
    """Cubic Hermite shape values at local coordinate s in [0, 1]."""
    s2, s3 = s * s, s * s * s
    return np.array([
        1 - 3 * s2 + 2 * s3,
        le * (s - 2 * s2 + s3),
        3 * s2 - 2 * s3,
        le * (s3 - s2),
    ])


def locate_on_beam(system: BeamSystem, x: float):
    """(free-dof indices, shape values) interpolating deflection at x."""
    n_el = system.beam.n_elements
    e = min(int(x / system.elem_len), n_el - 1)
    s = x / system.elem_len - e
    shp = hermite_shape(s, system.elem_len)
    dofs = system.free_index[2 * e:2 * e + 4]
    return dofs, shp


def static_deflection(system: BeamSystem, load_position: float, load: float) -> float:
    """Deflection at the load point under a static point force (down positive)."""
    if not 0 < load_position < system.beam.span:
        raise DomainError("load must lie strictly inside the span")
    dofs, shp = locate_on_beam(system, load_position)
    f = np.zeros(system.n_free)
    for d, sv in zip(dofs, shp):
        if d >= 0:
            f[d] += load * sv
    u = sla.solve(system.stiffness, f, assume_a="pos")
    return float(sum(sv * u[d] for d, sv in zip(dofs, shp) if d >= 0))


def free_vibration(system: BeamSystem, u0: np.ndarray, v0: np.ndarray,
                   dt: float, n_steps: int, undamped: bool = False):
    """Unforced Newmark (gamma=1/2, beta=1/4) response from initial conditions.

    Returns (displacement, velocity) histories of shape (n_steps+1, n_free).
    """
    M, K = system.mass, system.stiffness
    C = np.zeros_like(M) if undamped else system.damping
    a0, a1, a2 = 4.0 / dt**2, 2.0 / dt, 4.0 / dt
    keff = K + a0 * M + a1 * C
    lu = sla.lu_factor(keff)
    u, v = u0.copy(), v0.copy()
    a = sla.solve(M, -C @ v - K @ u, assume_a="pos")
    us = np.empty((n_steps + 1, system.n_free))
    vs = np.empty_like(us)
    us[0], vs[0] = u, v
    for k in range(1, n_steps + 1):
        rhs = M @ (a0 * u + a2 * v + a) + C @ (a1 * u + v)
        u_new = sla.lu_solve(lu, rhs)
        a_new = a0 * (u_new - u) - a2 * v - a
        v = v + 0.5 * dt * (a + a_new)
        u, a = u_new, a_new
        us[k], vs[k] = u, v
    return us, vs

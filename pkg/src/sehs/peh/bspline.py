"""B-spline basis evaluation (Cox-de Boor) with first/second derivatives.

Kirchhoff-Love bending needs C1 continuity, hence degree >= 2.
"""

import numpy as np

from sehs.errors import DomainError


def open_knot_vector(n_spans: int, degree: int,
                     interior: float | None = None,
                     interior_multiplicity: int = 1) -> np.ndarray:
    """Open (clamped) knot vector on [0,1] with ~uniform spans.

    When ``interior`` is given it is inserted as a knot so material
    interfaces align with a span boundary. ``interior_multiplicity``
    controls the continuity there: multiplicity m leaves the basis
    C^(degree-m), e.g. m = degree-1 keeps deflection and slope continuous
    while letting curvature jump — the right regularity at a stiffness
    discontinuity in a thin plate.
    """
    if n_spans < 1:
        raise DomainError("need at least one span")
    inner = np.linspace(0.0, 1.0, n_spans + 1)
    if interior is not None and 0.0 < interior < 1.0:
        if interior_multiplicity >= degree:
            raise DomainError("interior multiplicity must keep C0 continuity")
        present = int(np.sum(np.isclose(inner, interior, atol=1e-12)))
        if present:
            interior = inner[np.isclose(inner, interior, atol=1e-12)][0]
        for _ in range(interior_multiplicity - present):
            inner = np.sort(np.append(inner, interior))
    return np.concatenate([np.zeros(degree), inner, np.ones(degree)])


def _all_basis(knots: np.ndarray, degree: int, xi: float) -> np.ndarray:
    """Degree-``degree`` basis values of every function at xi."""
    m = len(knots) - 1
    N = np.zeros(m)
    # degree 0
    for i in range(m):
        if knots[i] <= xi < knots[i + 1]:
            N[i] = 1.0
    if xi >= knots[-1]:  # right-end closure
        for i in range(m - 1, -1, -1):
            if knots[i] < knots[i + 1]:
                N[i] = 1.0
                break
    for k in range(1, degree + 1):
        Nk = np.zeros(m - k)
        for i in range(m - k):
            left = 0.0
            if knots[i + k] > knots[i]:
                left = (xi - knots[i]) / (knots[i + k] - knots[i]) * N[i]
            right = 0.0
            if knots[i + k + 1] > knots[i + 1]:
                right = (knots[i + k + 1] - xi) / (knots[i + k + 1] - knots[i + 1]) * N[i + 1]
            Nk[i] = left + right
        N = Nk
    return N


def basis_functions(knots: np.ndarray, degree: int, xi: float):
    """(values, d/dxi, d2/dxi2) of all basis functions at xi in [0,1].

    The knot vector must be open; derivatives follow the standard
    knot-difference recursion applied to the lower-degree bases.
    """
    if degree < 2:
        raise DomainError("degree must be >= 2 for C1 continuity")
    if not (knots[0] <= xi <= knots[-1]):
        raise DomainError("xi outside the knot range")
    p = degree
    n = len(knots) - p - 1
    Np = _all_basis(knots, p, xi)
    Np1 = _all_basis(knots, p - 1, xi)
    Np2 = _all_basis(knots, p - 2, xi)

    def alpha(i, k):
        den = knots[i + k] - knots[i]
        return k / den if den > 0 else 0.0

    d1 = np.zeros(n)
    dNp1 = np.zeros(n + 1)  # first derivatives of the degree p-1 basis
    for i in range(n + 1):
        dNp1[i] = alpha(i, p - 1) * Np2[i] - alpha(i + 1, p - 1) * Np2[i + 1]
    d2 = np.zeros(n)
    for i in range(n):
        d1[i] = alpha(i, p) * Np1[i] - alpha(i + 1, p) * Np1[i + 1]
        d2[i] = alpha(i, p) * dNp1[i] - alpha(i + 1, p) * dNp1[i + 1]
    return Np[:n], d1, d2

"""Hot numeric kernels with numba/numpy twin paths.

Every kernel exists in two forms: ``<name>_py`` (pure numpy reference) and
``<name>`` (the dispatched version, numba-compiled unless ``SEHS_NO_NUMBA`` is
set).  Callers import the dispatched names; the benchmark and the fallback
tests import both.
"""

import numpy as np

from sehs.accel import maybe_njit


def _passage_loop(
    dt,
    n_steps,
    keff_inv_b,
    mass_b,
    damp_b,
    keff_inv_v,
    mass_v,
    damp_v,
    kt1,
    kt2,
    ct1,
    ct2,
    w1,
    w2,
    on1,
    dofs1,
    shp1,
    r1,
    r1d,
    on2,
    dofs2,
    shp2,
    r2,
    r2d,
    dofs_s,
    shp_s,
    tol,
    max_iter,
):
    """Coupled bridge/half-car Newmark time stepping (average acceleration).

    Axle kinematics (element dofs, Hermite shape values, roughness heights and
    their travel-rate r1d = v*r') are precomputed per step by the caller.
    Constrained dofs are marked -1 in the dof index arrays.

    Returns (sensor acceleration trace, front/rear contact-force traces,
    status) with status 0 on success and 1 if the contact fixed-point
    iteration hit ``max_iter`` without reaching ``tol`` relative change at
    some step.  Contact forces are positive downward on the bridge deck.
    """
    nb = mass_b.shape[0]
    a0 = 4.0 / (dt * dt)
    a1 = 2.0 / dt
    a2 = 4.0 / dt

    u = np.zeros(nb)
    v = np.zeros(nb)
    a = np.zeros(nb)
    q = np.zeros(4)
    qd = np.zeros(4)
    qdd = np.zeros(4)

    out = np.zeros(n_steps + 1)
    p1_out = np.zeros(n_steps + 1)
    p2_out = np.zeros(n_steps + 1)
    status = 0
    p1_prev = 0.0
    p2_prev = 0.0

    for k in range(1, n_steps + 1):
        # bridge deflection/velocity at the axles, from the previous state
        zb1 = 0.0
        zbd1 = 0.0
        zb2 = 0.0
        zbd2 = 0.0
        if on1[k]:
            for j in range(4):
                d = dofs1[k, j]
                if d >= 0:
                    zb1 += shp1[k, j] * u[d]
                    zbd1 += shp1[k, j] * v[d]
        if on2[k]:
            for j in range(4):
                d = dofs2[k, j]
                if d >= 0:
                    zb2 += shp2[k, j] * u[d]
                    zbd2 += shp2[k, j] * v[d]

        rhs_b_hist = mass_b @ (a0 * u + a2 * v + a) + damp_b @ (a1 * u + v)
        rhs_v_hist = mass_v @ (a0 * q + a2 * qd + qdd) + damp_v @ (a1 * q + qd)

        p1 = p1_prev
        p2 = p2_prev
        converged = False
        u_new = u
        v_new = v
        a_new = a
        q_new = q
        qd_new = qd
        qdd_new = qdd
        for _ in range(max_iter):
            # half-car step under the current bridge-interface estimate
            fv = np.zeros(4)
            if on1[k]:
                fv[2] = kt1 * (zb1 + r1[k]) + ct1 * (zbd1 + r1d[k])
            if on2[k]:
                fv[3] = kt2 * (zb2 + r2[k]) + ct2 * (zbd2 + r2d[k])
            q_new = keff_inv_v @ (fv + rhs_v_hist)
            qdd_new = a0 * (q_new - q) - a2 * qd - qdd
            qd_new = qd + 0.5 * dt * (qdd + qdd_new)

            # contact loads on the bridge (positive down)
            p1 = 0.0
            p2 = 0.0
            if on1[k]:
                fc1 = kt1 * (q_new[2] - zb1 - r1[k]) + ct1 * (qd_new[2] - zbd1 - r1d[k])
                p1 = w1 - fc1
            if on2[k]:
                fc2 = kt2 * (q_new[3] - zb2 - r2[k]) + ct2 * (qd_new[3] - zbd2 - r2d[k])
                p2 = w2 - fc2

            fb = np.zeros(nb)
            if on1[k]:
                for j in range(4):
                    d = dofs1[k, j]
                    if d >= 0:
                        fb[d] -= p1 * shp1[k, j]
            if on2[k]:
                for j in range(4):
                    d = dofs2[k, j]
                    if d >= 0:
                        fb[d] -= p2 * shp2[k, j]

            u_new = keff_inv_b @ (fb + rhs_b_hist)
            a_new = a0 * (u_new - u) - a2 * v - a
            v_new = v + 0.5 * dt * (a + a_new)

            zb1 = 0.0
            zbd1 = 0.0
            zb2 = 0.0
            zbd2 = 0.0
            if on1[k]:
                for j in range(4):
                    d = dofs1[k, j]
                    if d >= 0:
                        zb1 += shp1[k, j] * u_new[d]
                        zbd1 += shp1[k, j] * v_new[d]
            if on2[k]:
                for j in range(4):
                    d = dofs2[k, j]
                    if d >= 0:
                        zb2 += shp2[k, j] * u_new[d]
                        zbd2 += shp2[k, j] * v_new[d]

            scale = max(abs(p1) + abs(p2), 1.0)
            if abs(p1 - p1_prev) + abs(p2 - p2_prev) <= tol * scale:
                converged = True
                p1_prev = p1
                p2_prev = p2
                break
            p1_prev = p1
            p2_prev = p2
        if not converged:
            status = 1

        u = u_new
        v = v_new
        a = a_new
        q = q_new
        qd = qd_new
        qdd = qdd_new

        acc = 0.0
        for j in range(4):
            d = dofs_s[j]
            if d >= 0:
                acc += shp_s[j] * a[d]
        out[k] = acc
        p1_out[k] = p1
        p2_out[k] = p2

    return out, p1_out, p2_out, status


passage_loop_py = _passage_loop
passage_loop = maybe_njit(_passage_loop)


def _wsst_reassign(wx_re, wx_im, omega, weights, thr, fmin, df, n_bins):
    """Squeeze CWT coefficients into linear frequency bins.

    omega holds instantaneous frequencies [Hz] (NaN where undefined); weights
    is the per-scale da/a measure.  Coefficients below ``thr`` in magnitude
    are discarded.
    """
    n_scales, n_t = wx_re.shape
    s_re = np.zeros((n_bins, n_t))
    s_im = np.zeros((n_bins, n_t))
    for i in range(n_scales):
        wgt = weights[i]
        for t in range(n_t):
            re = wx_re[i, t]
            im = wx_im[i, t]
            mag = np.sqrt(re * re + im * im)
            if mag <= thr:
                continue
            f = omega[i, t]
            if not np.isfinite(f):
                continue
            b = int(np.floor((f - fmin) / df + 0.5))
            if 0 <= b < n_bins:
                s_re[b, t] += re * wgt
                s_im[b, t] += im * wgt
    return s_re, s_im


wsst_reassign_py = _wsst_reassign
wsst_reassign = maybe_njit(_wsst_reassign)

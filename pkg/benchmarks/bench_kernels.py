"""Compare the compiled hot kernels against their pure-numpy twins.

Run twice to see both paths end to end:

    python3 benchmarks/bench_kernels.py
    SEHS_NO_NUMBA=1 python3 benchmarks/bench_kernels.py

The script also times both twins directly in one process (the compiled
dispatcher and the plain function are both importable), so a single run
prints a speedup figure.
"""

import time

import numpy as np

from sehs.accel import NUMBA_DISABLED
from sehs.bridge import (
    BeamModel,
    assemble_beam,
    generate_road_profile,
    sample_vehicle_params,
    simulate_passage,
)
from sehs.kernels import wsst_reassign, wsst_reassign_py
from sehs.tfimg import WsstConfig, wsst


def bench(label, func, repeats=3):
    func()  # warm-up (and JIT compile on the compiled path)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    best = min(times)
    print(f"{label:<42s} {best * 1e3:9.1f} ms")
    return best


def main():
    mode = "pure numpy" if NUMBA_DISABLED else "numba-compiled"
    print(f"active kernel path: {mode}\n")

    system = assemble_beam(BeamModel.reference_bridge())
    vehicle = sample_vehicle_params(1, seed=0)[0]
    road = generate_road_profile("A", 33.0, seed=0)
    bench("passage simulation (100 elements, 1 ms)",
          lambda: simulate_passage(system, vehicle, road, dt=1e-3,
                                   sensor_location=12.5, ringdown=3.0))

    dt = 1e-3
    sig = np.sin(2 * np.pi * 4.8 * dt * np.arange(12000))
    bench("synchrosqueezed transform (12k samples)",
          lambda: wsst(sig, dt, WsstConfig()))

    rng = np.random.default_rng(0)
    n_scales, n_t = 128, 12000
    wx = rng.standard_normal((n_scales, n_t))
    wy = rng.standard_normal((n_scales, n_t))
    omega = rng.uniform(0.0, 20.0, (n_scales, n_t))
    weights = rng.uniform(0.1, 1.0, n_scales)
    args = (wx, wy, omega, weights, 0.05, 0.1, 0.15625, 128)

    t_fast = bench("reassignment kernel (dispatch path)",
                   lambda: wsst_reassign(*args))
    t_py = bench("reassignment kernel (pure numpy twin)",
                 lambda: wsst_reassign_py(*args))
    if not NUMBA_DISABLED:
        print(f"\nreassignment speedup: {t_py / t_fast:.1f}x")
    assert np.array_equal(wsst_reassign(*args), wsst_reassign_py(*args)), \
        "twin kernels disagree"
    print("twin outputs identical: yes")


if __name__ == "__main__":
    main()

"""Acceptance battery: ten end-to-end correctness gates.

Each test prints one ``CRITERION k: PASS/FAIL`` line. Criteria 7 and 9 run
the bundled desk-scale presets and are slow (minutes to tens of minutes);
everything else is fast. Criterion 3 contains a sub-check that is not
physically attainable with a genuine plate model (see the aspect-ratio
xfail in test_peh.py for the mechanism); it is asserted faithfully and is
expected to fail.
"""

import math
import time
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from sehs.bridge import (
    BeamModel,
    CrackSpec,
    assemble_beam,
    beam_modal_frequencies,
    generate_road_profile,
    sample_vehicle_params,
    simulate_passage,
)
from sehs.detector import (
    build_cvae,
    damage_index,
    elbo_loss,
    load_checkpoint,
    train,
)
from sehs.detector.cvae import CvaeArch, elbo_and_grads
from sehs.optimize import (
    dominates,
    fast_nondominated_sort,
    hypervolume_2d,
    kriging_fit,
    kriging_predict,
    nsga2,
)
from sehs.peh import (
    PehDesign,
    assemble_peh,
    reduce_model,
    simulate_voltage,
    voltage_frf,
)
from sehs.pipeline import (
    PowerBudget,
    energy_consumption,
    run_phase1,
    run_phase2,
    run_phase3_evaluate,
    run_phase3_train,
    run_phase4,
)
from sehs.pipeline.cli import resolve_config
from sehs.pipeline.phases import _reduced_with_matched_load
from sehs.tfimg import WsstConfig, to_image, wsst
from sehs.tfimg.transform import bin_frequencies


def _verdict(num, ok, detail):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


# --------------------------------------------------------------------- 1


def test_criterion_01_bridge_modal_frequencies():
    t0 = time.perf_counter()
    beam = BeamModel.reference_bridge()
    freqs = beam_modal_frequencies(assemble_beam(beam), 2)
    ei = beam.young_modulus * beam.second_moment
    oracle = [n**2 * math.pi / (2.0 * beam.span**2)
              * math.sqrt(ei / beam.mass_per_length) for n in (1, 2)]
    elapsed = time.perf_counter() - t0
    ok = (abs(freqs[0] - 4.8) / 4.8 < 0.01
          and abs(freqs[1] - 19.1) / 19.1 < 0.01
          and np.allclose(freqs, oracle, rtol=1e-3)
          and elapsed < 1.0)
    _verdict(1, ok, f"f1={freqs[0]:.4f} Hz, f2={freqs[1]:.4f} Hz, "
                    f"analytic {oracle[0]:.4f}/{oracle[1]:.4f}, "
                    f"{elapsed:.2f}s")


# --------------------------------------------------------------------- 2


def test_criterion_02_damage_frequency_shifts():
    t0 = time.perf_counter()
    beam = BeamModel.reference_bridge()
    got = {}
    for name, loc, sev, mode in (("DMN1", 12.5, 0.10, 0),
                                 ("DMN2", 12.5, 0.20, 0),
                                 ("DQN1", 6.25, 0.10, 1)):
        freqs = beam_modal_frequencies(
            assemble_beam(beam, CrackSpec(loc, sev)), 2)
        got[name] = freqs[mode]
    elapsed = time.perf_counter() - t0
    ok = (abs(got["DMN1"] - 4.6) <= 0.1 and abs(got["DMN2"] - 4.4) <= 0.1
          and abs(got["DQN1"] - 18.5) <= 0.1 and elapsed < 5.0)
    _verdict(2, ok, f"DMN1 f1={got['DMN1']:.4f}, DMN2 f1={got['DMN2']:.4f}, "
                    f"DQN1 f2={got['DQN1']:.4f} Hz, {elapsed:.2f}s")


# --------------------------------------------------------------------- 3


def test_criterion_03_harvester_tuning():
    """The aspect-ratio-independence sub-check fails by ~3%: anticlastic
    (Poisson) stiffening makes a wide plate 1/sqrt(1-nu^2) stiffer than a
    narrow strip, which no faithful plate model can suppress to 1%."""
    t0 = time.perf_counter()
    f_long = reduce_model(assemble_peh(PehDesign()), count=1).freqs_hz[0]
    f_short = reduce_model(assemble_peh(replace(PehDesign(), length=0.17)),
                           count=1).freqs_hz[0]
    ratios = (0.1, 0.55, 1.0)
    f_r = [reduce_model(assemble_peh(replace(PehDesign(), aspect_ratio=r)),
                        count=1).freqs_hz[0] for r in ratios]
    spread = (max(f_r) - min(f_r)) / min(f_r)
    elapsed = time.perf_counter() - t0
    ok = (abs(f_long - 4.8) / 4.8 < 0.10
          and abs(f_short - 19.1) / 19.1 < 0.10
          and spread < 0.01
          and elapsed < 30.0)
    _verdict(3, ok, f"f1(0.34m)={f_long:.4f} Hz, f1(0.17m)={f_short:.4f} Hz, "
                    f"aspect-ratio spread={100 * spread:.2f}% "
                    f"(limit 1%), {elapsed:.1f}s")


# --------------------------------------------------------------------- 4


def test_criterion_04_frf_time_domain_cross_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(10):
        design = replace(PehDesign(), length=rng.uniform(0.15, 0.45),
                         load_resistance=10.0 ** rng.uniform(3.0, 6.0))
        reduced = reduce_model(assemble_peh(design))
        for freq in rng.uniform(2.0, 25.0, 5):
            w = 2.0 * np.pi * freq
            href = float(np.abs(voltage_frf(reduced, np.array([w]))[0]))
            dt = min(1e-3, 1.0 / (freq * 40.0))
            n = int(80.0 / freq / dt)
            t = dt * np.arange(n)
            passage = SimpleNamespace(dt=dt, accel_trace=np.sin(w * t),
                                      bridge_state_label="x", road_seed=0)
            tail = slice(int(0.75 * n), None)
            volts = simulate_voltage(reduced, passage).volts[tail]
            basis = np.column_stack([np.sin(w * t[tail]),
                                     np.cos(w * t[tail])])
            amp = float(np.hypot(
                *np.linalg.lstsq(basis, volts, rcond=None)[0]))
            worst = max(worst, abs(amp - href) / href)
    elapsed = time.perf_counter() - t0
    ok = worst < 0.01 and elapsed < 120.0
    _verdict(4, ok, f"worst steady-state/FRF mismatch {100 * worst:.3f}% "
                    f"over 10 designs x 5 tones, {elapsed:.0f}s")


# --------------------------------------------------------------------- 5


def test_criterion_05_synchrosqueezing_concentration():
    t0 = time.perf_counter()
    cfg = WsstConfig()
    dt = 1.0 / 256.0
    t = dt * np.arange(2048)
    s = wsst(np.sin(2.0 * np.pi * 5.0 * t), dt, cfg)
    freqs = bin_frequencies(cfg)
    energy = s**2
    k = int(np.argmin(np.abs(freqs - 5.0)))
    frac = energy[k - 1:k + 2].sum() / energy.sum()

    f0, f1 = 3.0, 18.0
    total = t[-1] + dt
    phase = 2.0 * np.pi * (f0 * t + (f1 - f0) * t**2 / (2.0 * total))
    sc = wsst(np.sin(phase), dt, cfg)
    inst = f0 + (f1 - f0) * t / total
    lo, hi = int(0.1 * t.size), int(0.9 * t.size)
    ridge = freqs[np.argmax(sc[:, lo:hi], axis=0)]
    df = freqs[1] - freqs[0]
    bins_off = float(np.max(np.abs(ridge - inst[lo:hi])) / df)
    elapsed = time.perf_counter() - t0
    ok = frac >= 0.90 and bins_off <= 1.0 and elapsed < 30.0
    _verdict(5, ok, f"tone energy in +-1 bin {100 * frac:.1f}%, chirp ridge "
                    f"max error {bins_off:.2f} bins, {elapsed:.1f}s")


# --------------------------------------------------------------------- 6


def test_criterion_06_autoencoder_correctness():
    t0 = time.perf_counter()
    arch = CvaeArch(image_size=16, channels=(3, 4), latent=4)
    model = build_cvae(arch, seed=0, dtype="float64")
    rng = np.random.default_rng(1)
    x = rng.random((2, 1, 16, 16))
    eps = rng.standard_normal((2, 4))
    _, _, _, grads = elbo_and_grads(model, x, eps)
    h = 1e-6
    worst = 0.0
    pick = np.random.default_rng(3)
    for name in sorted(model.params):
        flat = model.params[name].ravel()
        gflat = grads[name].ravel()
        for _ in range(4):
            k = pick.integers(flat.size)
            orig = flat[k]
            flat[k] = orig + h
            up = elbo_and_grads(model, x, eps)[0]
            flat[k] = orig - h
            dn = elbo_and_grads(model, x, eps)[0]
            flat[k] = orig
            fd = (up - dn) / (2.0 * h)
            worst = max(worst,
                        abs(fd - gflat[k]) / max(abs(fd), abs(gflat[k]),
                                                 1e-8))

    mu = rng.standard_normal((3, 5))
    sigma = np.exp(0.3 * rng.standard_normal((3, 5)))
    xx = rng.random((3, 8, 8))
    _, _, l2 = elbo_loss(xx, xx, mu, sigma)
    kl_ref = 0.5 * np.mean(np.sum(mu**2 + sigma**2 - 1.0
                                  - 2.0 * np.log(sigma), axis=1))
    kl_err = abs(l2 - kl_ref)

    images = np.clip(rng.random((16, 16, 16)), 0.0, 1.0)
    m1, _ = train(build_cvae(arch, seed=7), images, epochs=3, batch_size=4,
                  seed=7)
    m2, _ = train(build_cvae(arch, seed=7), images, epochs=3, batch_size=4,
                  seed=7)
    bitwise = all(np.array_equal(m1.params[n], m2.params[n])
                  for n in m1.params)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-3 and kl_err < 1e-10 and bitwise and elapsed < 120.0
    _verdict(6, ok, f"grad rel err {worst:.2e}, KL err {kl_err:.2e}, "
                    f"seeded training bitwise={bitwise}, {elapsed:.0f}s")


# --------------------------------------------------------------------- 8


def test_criterion_08_optimizer_correctness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    sort_ok = True
    for _ in range(50):
        objs = rng.random((int(rng.integers(5, 40)), 2))
        got = [sorted(f) for f in fast_nondominated_sort(objs)]
        remaining = set(range(len(objs)))
        ref = []
        while remaining:
            front = sorted(i for i in remaining
                           if not any(dominates(objs[j], objs[i])
                                      for j in remaining if j != i))
            ref.append(front)
            remaining -= set(front)
        sort_ok = sort_ok and got == ref

    result = nsga2(lambda x: (float(x[0]), 1.0 - float(x[0])),
                   bounds=[[0.0, 1.0]], population=60, generations=40,
                   seed=1)
    hv_frac = hypervolume_2d(result.objectives, reference=(0.0, 0.0)) / 0.5

    xs = np.linspace(0.10, 0.45, 36)
    f1 = 4.8 * (0.34 / xs) ** 2
    y = 1.0 / ((f1**2 - 4.8**2) ** 2 + (0.96 * 4.8 * f1) ** 2)
    y = y / y.max()
    model = kriging_fit(xs[:, None], y)
    mean, _, _ = kriging_predict(model, xs[:, None])
    interp_err = float(np.max(np.abs(mean - y)))
    loo = []
    for k in range(36):
        mask = np.arange(36) != k
        sub = kriging_fit(xs[mask, None], y[mask])
        pred, _, _ = kriging_predict(sub, [[xs[k]]])
        loo.append(float(pred) - y[k])
    loo_rmse = float(np.sqrt(np.mean(np.square(loo))))
    elapsed = time.perf_counter() - t0
    ok = (sort_ok and hv_frac >= 0.99 and interp_err < 1e-6
          and loo_rmse < 0.10 * (y.max() - y.min()) and elapsed < 120.0)
    _verdict(8, ok, f"sort oracle={sort_ok}, hypervolume {hv_frac:.4f} of "
                    f"analytic, support interpolation {interp_err:.1e}, "
                    f"LOO-RMSE {100 * loo_rmse:.2f}% of range, {elapsed:.0f}s")


# --------------------------------------------------------------------- 10


def test_criterion_10_power_budget_table():
    t0 = time.perf_counter()
    ars = PowerBudget(33.3e3, 480.0, 6.6, 140.0, 0.0)
    peh = PowerBudget(-4.0, 480.0, 6.0, 140.0, 0.0)
    e_ars = energy_consumption(ars)
    e_peh = energy_consumption(peh)
    # reported sleep-mode totals: the source table lists t_sleep = 300 s but
    # its text says 600 s; accept either within +-0.005 J
    sleep_ok = True
    for t_sleep in (300.0, 600.0):
        e1 = energy_consumption(PowerBudget(33.3e3, 480.0, 6.0, 140.0,
                                            t_sleep))
        e2 = energy_consumption(PowerBudget(-4.0, 480.0, 6.0, 140.0,
                                            t_sleep))
        sleep_ok = sleep_ok and abs(e1 - 4.733) <= 0.005 \
            and abs(e2 - 0.068) <= 0.005
    elapsed = time.perf_counter() - t0
    ok = (round(e_ars, 3) == 4.729 and round(e_peh, 3) == 0.067
          and sleep_ok and elapsed < 1.0)
    _verdict(10, ok, f"continuous: {e_ars:.4f} J vs 4.729, {e_peh:.5f} J vs "
                     f"0.067; sleep-mode within +-0.005 J={sleep_ok}, "
                     f"{elapsed:.2f}s")


# --------------------------------------------------------------------- 7


@pytest.fixture(scope="session")
def desk_nr_run(tmp_path_factory):
    config = resolve_config("desk-nr-dmn1")
    run_dir = tmp_path_factory.mktemp("desk-nr")
    t0 = time.perf_counter()
    run_phase1(config, run_dir)
    run_phase2(config, run_dir)
    run_phase3_train(config, run_dir)
    run_phase3_evaluate(config, run_dir)
    return config, run_dir, time.perf_counter() - t0


def test_criterion_07_detection_at_desk_scale(desk_nr_run):
    config, run_dir, elapsed = desk_nr_run
    t0 = time.perf_counter()
    import csv as csv_mod

    with (run_dir / "phase3" / "s_table.csv").open() as fh:
        row = next(csv_mod.DictReader(fh))
    accuracy = float(row["accuracy_mean"])

    # DI ordering healthy < DMN1 < DMN2 with the rep-0 detector
    with (run_dir / "phase3" / "di_table.csv").open() as fh:
        rows = [r for r in csv_mod.DictReader(fh) if r["repetition"] == "0"]
    di_healthy = np.mean([float(r["di"]) for r in rows
                          if r["state"] == "healthy"])
    di_dmn1 = np.mean([float(r["di"]) for r in rows
                       if r["state"] == "damaged"])

    # simulate the same damaged cohort with a deeper (20%) mid-span crack
    beam = BeamModel.reference_bridge()
    system = assemble_beam(beam, CrackSpec(12.5, 0.20))
    ds = config.dataset
    n_total = ds.n_healthy + ds.damaged_test
    vehicles = sample_vehicle_params(n_total, seed=config.seeds.vehicle)
    design = PehDesign(length=config.designs.lengths[0])
    reduced, _ = _reduced_with_matched_load(design)
    model = load_checkpoint(run_dir / "phase3" / "checkpoints"
                            / "d00_rep0.ckpt")
    img = config.imaging
    wsst_cfg = WsstConfig(n_scales=img.n_scales,
                          gamma_threshold=img.gamma_threshold,
                          freq_bins=img.freq_bins, freq_band=img.band)
    dis = []
    for i in range(ds.n_healthy, n_total):
        road = generate_road_profile(config.scenario.road_class,
                                     beam.span + 8.0,
                                     seed=config.seeds.road + i)
        record = simulate_passage(system, vehicles[i], road, dt=ds.dt,
                                  sensor_location=0.5 * beam.span,
                                  state_label="dmn2", ringdown=ds.ringdown)
        trace = simulate_voltage(reduced, record)
        matrix = wsst(trace.volts, trace.dt, wsst_cfg)
        image = to_image(matrix, matrix_band=img.band, freq_band=img.band,
                         size=(img.image_size, img.image_size))
        dis.append(damage_index(model, image.pixels))
    di_dmn2 = float(np.mean(dis))
    elapsed += time.perf_counter() - t0
    ok = (accuracy >= 0.80 and di_healthy < di_dmn1 < di_dmn2
          and elapsed < 1800.0)
    _verdict(7, ok, f"5-seed mean accuracy {accuracy:.3f} (>=0.80), DI means "
                    f"healthy {di_healthy:.4g} < DMN1 {di_dmn1:.4g} < DMN2 "
                    f"{di_dmn2:.4g}, {elapsed / 60:.1f} min")


# --------------------------------------------------------------------- 9


def _full_run(preset, tmp_path_factory, tag):
    config = resolve_config(preset)
    run_dir = tmp_path_factory.mktemp(tag)
    t0 = time.perf_counter()
    run_phase1(config, run_dir)
    run_phase2(config, run_dir)
    run_phase3_train(config, run_dir)
    run_phase3_evaluate(config, run_dir)
    run_phase4(config, run_dir)
    return run_dir, time.perf_counter() - t0


def _front_lengths(run_dir):
    import csv as csv_mod

    with (run_dir / "phase4" / "pareto.csv").open() as fh:
        rows = list(csv_mod.DictReader(fh))
    return (np.array([float(r["length_m"]) for r in rows]),
            np.array([float(r["energy_j"]) for r in rows]))


def test_criterion_09_pipeline_pareto_reproduction(tmp_path_factory):
    run_a, t_a = _full_run("desk-dmn1-road-a", tmp_path_factory, "desk-a")
    lengths_a, energies_a = _front_lengths(run_a)
    l_energy_opt = float(lengths_a[np.argmax(energies_a)])

    run_q, t_q = _full_run("desk-dqn1-quarter", tmp_path_factory, "desk-q")
    lengths_q, _ = _front_lengths(run_q)
    near_017 = float(np.min(np.abs(lengths_q - 0.17)))
    near_034 = float(np.min(np.abs(lengths_q - 0.34)))

    total = t_a + t_q
    ok = (abs(l_energy_opt - 0.34) <= 0.02
          and near_017 <= 0.03 and near_034 <= 0.03
          and total < 7200.0)
    _verdict(9, ok, f"mid-span run energy-optimal L={l_energy_opt:.3f} m "
                    f"(0.34+-0.02); quarter-span front reaches within "
                    f"{near_017:.3f} m of 0.17 and {near_034:.3f} m of "
                    f"0.34, total {total / 60:.0f} min")

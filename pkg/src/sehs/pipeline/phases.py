"""Four-phase experiment pipeline with content-hashed run directories.

Phase 1 simulates vehicle crossings and harvester voltages, phase 2 turns
traces into time-frequency images, phase 3 trains/scores the detector per
design, and phase 4 fits surrogates and searches the design space. Each
phase writes into its own subdirectory of the run directory plus a manifest
with SHA-256 hashes, so later phases can verify and never mutate earlier
artifacts.
"""

import csv
import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from sehs.bridge import (
    BeamModel,
    CrackSpec,
    VehicleRanges,
    assemble_beam,
    generate_road_profile,
    sample_vehicle_params,
    simulate_passage,
    save_passage,
    load_passage,
)
from sehs.detector import (
    CvaeArch,
    build_cvae,
    calibrate_threshold,
    classify,
    damage_index,
    load_checkpoint,
    save_checkpoint,
    sensing_accuracy,
    train,
)
from sehs.errors import ConfigError, DomainError, NumericalError
from sehs.optimize import kriging_fit, kriging_predict, nsga2
from sehs.peh import (
    PehDesign,
    assemble_peh,
    harvested_energy,
    reduce_model,
    save_voltage_trace,
    load_voltage_trace,
    select_load_resistance,
    simulate_voltage,
)
from sehs.pipeline.config import ExperimentConfig
from sehs.tfimg import WsstConfig, load_tf_image, save_tf_image, to_image, wsst

HEALTHY = "healthy"
DAMAGED = "damaged"


# --------------------------------------------------------------------------
# power budget (energy-consumption comparison)

@dataclass(frozen=True)
class PowerBudget:
    """Sensing-node power profile; powers in microwatts, times in seconds.

    Negative sensing power models a net-harvesting sensor.
    """

    p_sensing_uw: float
    p_sample_uw: float
    p_sleep_uw: float
    t_sample_s: float
    t_sleep_s: float

    def __post_init__(self):
        if min(self.p_sample_uw, self.p_sleep_uw, self.t_sample_s,
               self.t_sleep_s) < 0:
            raise DomainError(
                "sample/sleep powers and times must be non-negative")


def energy_consumption(budget: PowerBudget) -> float:
    """Total energy [J] over one acquisition cycle."""
    return 1e-6 * ((budget.p_sensing_uw + budget.p_sample_uw)
                   * budget.t_sample_s
                   + budget.p_sleep_uw * budget.t_sleep_s)


# --------------------------------------------------------------------------
# manifest helpers

def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(run_dir: Path, phase: str, files, extra=None) -> None:
    run_dir = Path(run_dir)
    entry = {"files": {str(p.relative_to(run_dir)): _sha256(p)
                       for p in sorted(files)}}
    if extra:
        entry.update(extra)
    (run_dir / f"manifest_{phase}.json").write_text(
        json.dumps(entry, indent=2))


def read_manifest(run_dir: Path, phase: str) -> dict:
    path = Path(run_dir) / f"manifest_{phase}.json"
    if not path.exists():
        raise ConfigError(f"missing phase manifest: {path}")
    return json.loads(path.read_text())


def verify_manifest(run_dir: Path, phase: str) -> None:
    run_dir = Path(run_dir)
    manifest = read_manifest(run_dir, phase)
    for rel, digest in manifest["files"].items():
        path = run_dir / rel
        if not path.exists():
            raise ConfigError(f"manifest references missing file: {rel}")
        if _sha256(path) != digest:
            raise ConfigError(f"artifact hash mismatch: {rel}")


# --------------------------------------------------------------------------
# shared pieces

def _design_grid(config: ExperimentConfig):
    return [(length, ratio)
            for length in config.designs.lengths
            for ratio in config.designs.aspect_ratios]


def _design_tag(index: int) -> str:
    return f"d{index:02d}"


def _make_design(config: ExperimentConfig, length: float,
                 ratio: float) -> PehDesign:
    d = config.designs
    return PehDesign(length=length, aspect_ratio=ratio,
                     pzt_length_ratio=d.pzt_length_ratio,
                     thickness_ratio=d.thickness_ratio,
                     tip_mass=d.tip_mass)


def _reduced_with_matched_load(design: PehDesign):
    system = assemble_peh(design)
    reduced = reduce_model(system)
    rl = select_load_resistance(reduced)
    return replace(reduced, load_resistance=rl), rl


def prepare_run_dir(config: ExperimentConfig, run_dir) -> Path:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir


# --------------------------------------------------------------------------
# phase 1: vehicle passages and harvester voltages

def run_phase1(config: ExperimentConfig, run_dir) -> dict:
    """Simulate crossings, then per-design voltage traces and energies."""
    config.validate()
    run_dir = prepare_run_dir(config, run_dir)
    accel_dir = run_dir / "phase1" / "accel"
    accel_dir.mkdir(parents=True, exist_ok=True)

    beam = BeamModel.reference_bridge()
    healthy_system = assemble_beam(beam)
    crack = config.scenario.crack()
    if crack is None:
        damaged_system = healthy_system
    else:
        damaged_system = assemble_beam(
            beam, CrackSpec(location=crack[0] * beam.span,
                            severity=crack[1]))
    sensor = config.scenario.sensor() * beam.span

    ds = config.dataset
    n_total = ds.n_healthy + ds.damaged_test
    vehicles = sample_vehicle_params(n_total, VehicleRanges(),
                                     seed=config.seeds.vehicle)
    road_len = beam.span + 8.0

    files, quarantined, passages = [], [], []
    for i in range(n_total):
        is_damaged = i >= ds.n_healthy
        label = DAMAGED if is_damaged else HEALTHY
        system = damaged_system if is_damaged else healthy_system
        pid = (f"d{i - ds.n_healthy:04d}" if is_damaged else f"h{i:04d}")
        road = generate_road_profile(config.scenario.road_class, road_len,
                                     seed=config.seeds.road + i)
        try:
            record = simulate_passage(system, vehicles[i], road, dt=ds.dt,
                                      sensor_location=sensor,
                                      state_label=label,
                                      ringdown=ds.ringdown)
        except NumericalError as exc:
            quarantined.append({"passage": pid, "error": str(exc)})
            continue
        path = accel_dir / f"{pid}.csv"
        save_passage(record, path)
        files += [path, path.with_suffix(".json")]
        passages.append((pid, label, record))
    if quarantined and len(quarantined) / n_total > 0.01:
        raise NumericalError(
            f"{len(quarantined)} of {n_total} passages quarantined "
            "(>1%); aborting phase 1")

    # per-design harvester response
    energy_rows = []
    designs = _design_grid(config)
    for d_idx, (length, ratio) in enumerate(designs):
        design = _make_design(config, length, ratio)
        reduced, rl = _reduced_with_matched_load(design)
        volt_dir = run_dir / "phase1" / "volts" / _design_tag(d_idx)
        volt_dir.mkdir(parents=True, exist_ok=True)
        per_state = {HEALTHY: [], DAMAGED: []}
        for pid, label, record in passages:
            trace = simulate_voltage(reduced, record)
            energy = harvested_energy(trace)
            per_state[label].append(energy)
            path = volt_dir / f"{pid}.csv"
            save_voltage_trace(path, trace)
            files += [path, path.with_suffix(".csv.json")]
            energy_rows.append([_design_tag(d_idx), pid, label,
                                f"{energy:.9g}"])

    # tables
    table_path = run_dir / "phase1" / "energy_table.csv"
    per_design = {}
    for tag, pid, label, energy in energy_rows:
        per_design.setdefault(tag, {HEALTHY: [], DAMAGED: []})[label].append(
            float(energy))
    with table_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["design", "length_m", "aspect_ratio",
                         "mean_energy_healthy_j", "mean_energy_damaged_j"])
        for d_idx, (length, ratio) in enumerate(designs):
            tag = _design_tag(d_idx)
            means = per_design[tag]
            writer.writerow([
                tag, f"{length:.6g}", f"{ratio:.6g}",
                f"{np.mean(means[HEALTHY]):.9g}",
                f"{np.mean(means[DAMAGED]):.9g}" if means[DAMAGED] else "",
            ])
    energies_path = run_dir / "phase1" / "energies.csv"
    with energies_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["design", "passage", "state", "energy_j"])
        writer.writerows(energy_rows)
    files += [table_path, energies_path]
    write_manifest(run_dir, "phase1", files,
                   extra={"quarantined": quarantined,
                          "n_passages": len(passages)})
    return {"n_passages": len(passages), "quarantined": quarantined,
            "energy_table": table_path}


# --------------------------------------------------------------------------
# phase 2: time-frequency images

def _image_sources(config: ExperimentConfig, run_dir: Path):
    """Yields (group, passage id, trace loader) for every phase-1 trace."""
    designs = _design_grid(config)
    for d_idx in range(len(designs)):
        tag = _design_tag(d_idx)
        volt_dir = run_dir / "phase1" / "volts" / tag
        for path in sorted(volt_dir.glob("*.csv")):
            yield tag, path.stem, path
    if config.baseline_accel:
        accel_dir = run_dir / "phase1" / "accel"
        for path in sorted(accel_dir.glob("*.csv")):
            yield "accel", path.stem, path


def run_phase2(config: ExperimentConfig, run_dir) -> dict:
    """Transform every voltage (and baseline acceleration) trace to images."""
    run_dir = Path(run_dir)
    verify_manifest(run_dir, "phase1")
    img = config.imaging
    wsst_cfg = WsstConfig(n_scales=img.n_scales,
                          gamma_threshold=img.gamma_threshold,
                          freq_bins=img.freq_bins, freq_band=tuple(img.band))
    files, excluded, count = [], [], 0
    for group, pid, src in _image_sources(config, run_dir):
        out_dir = run_dir / "phase2" / "images" / group
        out_dir.mkdir(parents=True, exist_ok=True)
        if group == "accel":
            record = load_passage(src)
            values, dt = record.accel_trace, record.dt
            label = record.bridge_state_label
        else:
            trace = load_voltage_trace(src)
            values, dt = trace.volts, trace.dt
            label = trace.metadata.get("state_label", "")
        matrix = wsst(values, dt, wsst_cfg)
        image = to_image(matrix, matrix_band=tuple(img.band),
                         freq_band=tuple(img.band),
                         size=(img.image_size, img.image_size),
                         duration=dt * values.size,
                         source_id=f"{group}/{pid}:{label}")
        if image.degenerate:
            excluded.append({"group": group, "passage": pid,
                             "reason": "degenerate (all-zero) matrix"})
            continue
        path = out_dir / f"{pid}.f32"
        save_tf_image(path, image)
        files += [path, path.with_suffix(".f32.json")]
        count += 1
    write_manifest(run_dir, "phase2", files,
                   extra={"excluded": excluded, "n_images": count})
    return {"n_images": count, "excluded": excluded}


# --------------------------------------------------------------------------
# phase 3: detector training and scoring

def _load_group_images(config: ExperimentConfig, run_dir: Path, group: str):
    img_dir = Path(run_dir) / "phase2" / "images" / group
    ds = config.dataset
    healthy, damaged = [], []
    for path in sorted(img_dir.glob("*.f32")):
        image = load_tf_image(path)
        (damaged if path.stem.startswith("d") else healthy).append(
            (path.stem, image.pixels))
    n_train, n_val = ds.healthy_train, ds.healthy_val
    if len(healthy) < n_train + n_val + 1:
        raise ConfigError(
            f"group {group}: not enough healthy images "
            f"({len(healthy)} < {n_train + n_val + 1})")
    return {
        "train": healthy[:n_train],
        "val": healthy[n_train:n_train + n_val],
        "test_healthy": healthy[n_train + n_val:],
        "test_damaged": damaged,
    }


def _phase3_groups(config: ExperimentConfig):
    groups = [_design_tag(i) for i in range(len(_design_grid(config)))]
    if config.baseline_accel:
        groups.append("accel")
    return groups


def run_phase3_train(config: ExperimentConfig, run_dir) -> dict:
    """Train one detector per design per repetition seed."""
    run_dir = Path(run_dir)
    verify_manifest(run_dir, "phase2")
    det = config.detector
    arch = CvaeArch(image_size=config.imaging.image_size,
                    channels=tuple(det.channels), latent=det.latent)
    ckpt_dir = run_dir / "phase3" / "checkpoints"
    ckpt_dir.mkdir(parents=True, exist_ok=True)
    files, loss_rows, failed = [], [], []
    for group in _phase3_groups(config):
        splits = _load_group_images(config, run_dir, group)
        train_imgs = np.stack([px for _, px in splits["train"]])
        for rep in range(det.repetitions):
            seed = config.seeds.training[rep]
            try:
                model, report = train(
                    build_cvae(arch, seed=seed), train_imgs,
                    epochs=det.epochs, batch_size=det.batch_size,
                    learning_rate=det.learning_rate, seed=seed)
            except NumericalError as exc:
                failed.append({"group": group, "rep": rep,
                               "error": str(exc)})
                continue
            path = ckpt_dir / f"{group}_rep{rep}.ckpt"
            save_checkpoint(path, model)
            files.append(path)
            for epoch, (l1, l2) in enumerate(zip(report.l1, report.l2)):
                loss_rows.append([group, rep, epoch,
                                  f"{l1:.9g}", f"{l2:.9g}"])
    loss_path = run_dir / "phase3" / "train_losses.csv"
    with loss_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["design", "repetition", "epoch", "l1", "l2"])
        writer.writerows(loss_rows)
    files.append(loss_path)
    write_manifest(run_dir, "phase3_train", files, extra={"failed": failed})
    return {"n_checkpoints": len(files) - 1, "failed": failed}


def run_phase3_evaluate(config: ExperimentConfig, run_dir) -> dict:
    """Calibrate thresholds and score test sets; writes the S table."""
    run_dir = Path(run_dir)
    verify_manifest(run_dir, "phase3_train")
    det = config.detector
    ckpt_dir = run_dir / "phase3" / "checkpoints"
    files, s_rows, di_rows = [], [], []
    designs = _design_grid(config)
    for group in _phase3_groups(config):
        splits = _load_group_images(config, run_dir, group)
        accuracies = []
        for rep in range(det.repetitions):
            path = ckpt_dir / f"{group}_rep{rep}.ckpt"
            if not path.exists():
                continue
            model = load_checkpoint(path)
            cal = calibrate_threshold(model,
                                      [px for _, px in splits["val"]],
                                      percentile=det.percentile,
                                      calibration_id=f"{group}_rep{rep}")
            predicted, truth = [], []
            for state, key in ((HEALTHY, "test_healthy"),
                               (DAMAGED, "test_damaged")):
                for pid, pixels in splits[key]:
                    di = damage_index(model, pixels)
                    decision = classify(di, cal.threshold)
                    predicted.append(decision)
                    truth.append(state)
                    di_rows.append([group, rep, pid, state,
                                    f"{di:.9g}", decision,
                                    f"{cal.threshold:.9g}"])
            accuracies.append(sensing_accuracy(predicted, truth))
        if not accuracies:
            continue
        if group == "accel":
            length, ratio = "", ""
        else:
            length, ratio = designs[int(group[1:])]
        s_rows.append([group, length, ratio,
                       f"{np.mean(accuracies):.9g}",
                       f"{np.std(accuracies):.9g}",
                       ";".join(f"{a:.6g}" for a in accuracies)])
    s_path = run_dir / "phase3" / "s_table.csv"
    with s_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["design", "length_m", "aspect_ratio",
                         "accuracy_mean", "accuracy_std", "per_rep"])
        writer.writerows(s_rows)
    di_path = run_dir / "phase3" / "di_table.csv"
    with di_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["design", "repetition", "passage", "state", "di",
                         "predicted", "threshold"])
        writer.writerows(di_rows)
    files += [s_path, di_path]
    write_manifest(run_dir, "phase3", files)
    return {"s_table": s_path, "di_table": di_path}


# --------------------------------------------------------------------------
# phase 4: surrogates and bi-objective search

def _read_tables(config: ExperimentConfig, run_dir: Path):
    energy_col = ("mean_energy_healthy_j"
                  if config.optimizer.energy_state == "healthy"
                  else "mean_energy_damaged_j")
    energies = {}
    with (run_dir / "phase1" / "energy_table.csv").open(newline="") as fh:
        for row in csv.DictReader(fh):
            energies[row["design"]] = (float(row["length_m"]),
                                       float(row["aspect_ratio"]),
                                       float(row[energy_col]))
    points, e_vals, s_vals = [], [], []
    with (run_dir / "phase3" / "s_table.csv").open(newline="") as fh:
        for row in csv.DictReader(fh):
            if row["design"] == "accel":
                continue
            length, ratio, energy = energies[row["design"]]
            points.append((length, ratio))
            e_vals.append(energy)
            s_vals.append(float(row["accuracy_mean"]))
    return (np.array(points), np.array(e_vals), np.array(s_vals))


def run_phase4(config: ExperimentConfig, run_dir) -> dict:
    """Fit E/S surrogates, search the design box, export the front."""
    run_dir = Path(run_dir)
    verify_manifest(run_dir, "phase1")
    points, e_vals, s_vals = _read_tables(config, run_dir)
    if points.shape[0] < 4:
        raise NumericalError("phase 4 needs >= 4 valid designs")
    multi_r = len(config.designs.aspect_ratios) > 1
    x = points if multi_r else points[:, :1]

    if config.optimizer.objective == "energy-per-area":
        area = points[:, 0]**2 * points[:, 1]
        e_vals = e_vals / area
    e_scale = max(e_vals.max(), 1e-300)
    try:
        e_model = kriging_fit(x, e_vals / e_scale)
        s_model = kriging_fit(x, s_vals)
    except (NumericalError, DomainError) as exc:
        raise NumericalError(f"surrogate fit failed: {exc}") from exc

    def evaluator(design):
        q = np.atleast_2d(design)
        e, _, _ = kriging_predict(e_model, q)
        s, _, _ = kriging_predict(s_model, q)
        return float(e[0] if np.ndim(e) else e), \
            float(s[0] if np.ndim(s) else s)

    bounds = [[x[:, k].min(), x[:, k].max()] for k in range(x.shape[1])]
    opt = config.optimizer
    pareto = nsga2(evaluator, bounds, population=opt.population,
                   generations=opt.generations, seed=opt.seed)

    out_dir = run_dir / "phase4"
    out_dir.mkdir(parents=True, exist_ok=True)
    pareto_path = out_dir / "pareto.csv"
    with pareto_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["length_m"] + (["aspect_ratio"] if multi_r else [])
        writer.writerow(header + ["energy_j", "accuracy"])
        for design, objs in zip(pareto.designs, pareto.objectives):
            writer.writerow([f"{v:.9g}" for v in design]
                            + [f"{objs[0] * e_scale:.9g}",
                               f"{objs[1]:.9g}"])
    curves_path = out_dir / "es_curves.csv"
    grid = np.linspace(bounds[0][0], bounds[0][1], 101)
    with curves_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["length_m", "energy_j", "energy_var",
                         "accuracy", "accuracy_var"])
        for length in grid:
            q = [length] + ([np.mean(config.designs.aspect_ratios)]
                            if multi_r else [])
            e, ev, _ = kriging_predict(e_model, [q])
            s, sv, _ = kriging_predict(s_model, [q])
            writer.writerow([f"{length:.9g}", f"{e * e_scale:.9g}",
                             f"{ev * e_scale**2:.9g}", f"{s:.9g}",
                             f"{sv:.9g}"])
    meta_path = out_dir / "optimizer.json"
    meta_path.write_text(json.dumps({
        "seed": opt.seed, "population": opt.population,
        "generations": opt.generations, "objective": opt.objective,
        "energy_state": opt.energy_state,
        "e_log_lengths": e_model.log_lengths.tolist(),
        "s_log_lengths": s_model.log_lengths.tolist(),
    }, indent=2))
    write_manifest(run_dir, "phase4", [pareto_path, curves_path, meta_path])
    return {"pareto": pareto_path, "front_size": len(pareto.designs)}


# --------------------------------------------------------------------------
# report

def report(config: ExperimentConfig, run_dir) -> dict:
    """Bundle result CSVs and a JSON summary; lists any missing pieces."""
    run_dir = Path(run_dir)
    out_dir = run_dir / "report"
    out_dir.mkdir(parents=True, exist_ok=True)
    gaps, bundle = [], []

    expected = {
        "energy_table": run_dir / "phase1" / "energy_table.csv",
        "energies": run_dir / "phase1" / "energies.csv",
        "s_table": run_dir / "phase3" / "s_table.csv",
        "di_table": run_dir / "phase3" / "di_table.csv",
        "pareto": run_dir / "phase4" / "pareto.csv",
        "es_curves": run_dir / "phase4" / "es_curves.csv",
    }
    for name, path in expected.items():
        if path.exists():
            bundle.append(path)
        else:
            gaps.append(name)

    # confusion matrix from the DI table
    di_path = expected["di_table"]
    if di_path.exists():
        counts = {}
        with di_path.open(newline="") as fh:
            for row in csv.DictReader(fh):
                key = (row["design"], row["repetition"])
                mat = counts.setdefault(key, {"tp": 0, "tn": 0,
                                              "fp": 0, "fn": 0})
                truth_damaged = row["state"] == DAMAGED
                pred_damaged = row["predicted"] == DAMAGED
                if truth_damaged and pred_damaged:
                    mat["tp"] += 1
                elif truth_damaged:
                    mat["fn"] += 1
                elif pred_damaged:
                    mat["fp"] += 1
                else:
                    mat["tn"] += 1
        conf_path = out_dir / "confusion.csv"
        with conf_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["design", "repetition", "tp", "fn", "fp", "tn"])
            for (group, rep), mat in sorted(counts.items()):
                writer.writerow([group, rep, mat["tp"], mat["fn"],
                                 mat["fp"], mat["tn"]])
        bundle.append(conf_path)

    manifests = sorted(run_dir.glob("manifest_*.json"))
    summary = {
        "name": config.name,
        "scenario": {
            "damage_state": config.scenario.damage_state,
            "road_class": config.scenario.road_class,
            "sensor_location": config.scenario.sensor_location,
        },
        "seeds": {"road": config.seeds.road,
                  "vehicle": config.seeds.vehicle,
                  "training": list(config.seeds.training),
                  "optimizer": config.optimizer.seed},
        "artifacts": {str(p.relative_to(run_dir)): _sha256(p)
                      for p in bundle},
        "manifests": [p.name for p in manifests],
        "gaps": gaps,
    }
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2))
    return {"bundle": bundle, "summary": summary_path, "gaps": gaps}

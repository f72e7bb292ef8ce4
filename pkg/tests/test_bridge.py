"""Beam, road, vehicle, and passage-simulation unit tests."""

import math

import numpy as np
import pytest

from sehs.bridge import (
    BeamModel,
    CrackSpec,
    VehicleRanges,
    assemble_beam,
    beam_modal_frequencies,
    generate_road_profile,
    load_passage,
    sample_vehicle_params,
    save_passage,
    simulate_passage,
    static_deflection,
)
from sehs.bridge.beam import hermite_shape
from sehs.errors import ConvergenceError, DomainError


@pytest.fixture(scope="module")
def beam():
    return BeamModel.reference_bridge()


@pytest.fixture(scope="module")
def healthy(beam):
    return assemble_beam(beam)


class TestBeam:
    def test_analytic_frequencies(self, beam, healthy):
        """Simply-supported Euler-Bernoulli closed form, first four modes."""
        ei = beam.young_modulus * beam.second_moment
        analytic = [n**2 * math.pi / (2.0 * beam.span**2)
                    * math.sqrt(ei / beam.mass_per_length)
                    for n in range(1, 5)]
        freqs = beam_modal_frequencies(healthy, 4)
        assert freqs == pytest.approx(analytic, rel=1e-3)

    def test_reference_frequencies_frozen(self, healthy):
        freqs = beam_modal_frequencies(healthy, 2)
        assert freqs[0] == pytest.approx(4.7779, abs=5e-4)
        assert freqs[1] == pytest.approx(19.1114, abs=5e-4)

    def test_crack_frequency_shifts_frozen(self, beam):
        cases = {
            (12.5, 0.10): (0, 4.6014),   # mid-span, 10 %: first mode drops
            (12.5, 0.20): (0, 4.4075),   # mid-span, 20 %: drops further
            (6.25, 0.10): (1, 18.4673),  # quarter-span, 10 %: second mode
        }
        for (loc, sev), (mode, expected) in cases.items():
            freqs = beam_modal_frequencies(
                assemble_beam(beam, CrackSpec(loc, sev)), 2)
            assert freqs[mode] == pytest.approx(expected, abs=5e-4)

    def test_crack_only_softens(self, beam, healthy):
        f0 = beam_modal_frequencies(healthy, 4)
        fc = beam_modal_frequencies(
            assemble_beam(beam, CrackSpec(12.5, 0.15)), 4)
        assert np.all(fc <= f0 + 1e-9)

    def test_static_deflection_midspan(self, beam, healthy):
        """Point load at mid-span: PL^3 / 48EI."""
        p = 1e4
        ei = beam.young_modulus * beam.second_moment
        expected = p * beam.span**3 / (48.0 * ei)
        assert static_deflection(healthy, beam.span / 2, p) == pytest.approx(
            expected, rel=1e-6)

    def test_hermite_partition_of_unity(self):
        le = 0.25
        for s in (0.0, 0.3, 0.7, 1.0):
            shp = hermite_shape(s, le)
            assert shp[0] + shp[2] == pytest.approx(1.0, abs=1e-12)

    def test_invalid_geometry_rejected(self):
        with pytest.raises(DomainError):
            BeamModel.rectangular(span=-1, young_modulus=1e9,
                                  second_moment=1.0, area=1.0,
                                  mass_per_length=100.0, damping_ratio=0.01)
        with pytest.raises(DomainError):
            CrackSpec(location=5.0, severity=1.5)


class TestRoad:
    def test_seeded_determinism(self):
        r1 = generate_road_profile("A", 40.0, seed=7)
        r2 = generate_road_profile("A", 40.0, seed=7)
        x = np.linspace(0, 40, 200)
        assert np.array_equal(r1.height(x), r2.height(x))

    def test_class_b_rougher_than_a(self):
        x = np.linspace(0, 200, 4000)
        va = np.var(generate_road_profile("A", 200.0, seed=3).height(x))
        vb = np.var(generate_road_profile("B", 200.0, seed=3).height(x))
        assert vb > 2.0 * va   # PSD scale is 4x; realisations vary

    def test_variance_matches_psd(self):
        """Realized variance equals the sum of component powers."""
        road = generate_road_profile("A", 500.0, seed=11)
        x = np.linspace(0, 500, 50000, endpoint=False)
        expected = np.sum(road.amplitudes**2) / 2.0
        assert np.var(road.height(x)) == pytest.approx(expected, rel=0.05)

    def test_smooth_class_is_flat(self):
        road = generate_road_profile("NR", 40.0, seed=1)
        x = np.linspace(0, 40, 100)
        assert np.all(road.height(x) == 0.0)
        assert np.all(road.slope(x) == 0.0)

    def test_unknown_class_rejected(self):
        with pytest.raises(DomainError):
            generate_road_profile("Z", 40.0, seed=0)


class TestVehicle:
    def test_latin_hypercube_stratified(self):
        n = 40
        vehicles = sample_vehicle_params(n, seed=5)
        ranges = VehicleRanges()
        (m_lo, m_hi), _, _, _ = ranges.intervals()
        masses = sorted(v.body_mass for v in vehicles)
        # one sample per stratum
        edges = np.linspace(m_lo, m_hi, n + 1)
        counts, _ = np.histogram(masses, bins=edges)
        assert np.all(counts == 1)

    def test_seeded_determinism(self):
        a = sample_vehicle_params(10, seed=9)
        b = sample_vehicle_params(10, seed=9)
        assert all(x == y for x, y in zip(a, b))

    def test_bounds_respected(self):
        ranges = VehicleRanges()
        ivs = ranges.intervals()
        for v in sample_vehicle_params(25, ranges, seed=2):
            assert ivs[0][0] <= v.body_mass <= ivs[0][1]

    def test_bad_count_rejected(self):
        with pytest.raises(DomainError):
            sample_vehicle_params(0)


class TestPassage:
    @pytest.fixture(scope="class")
    def record(self, healthy):
        vehicle = sample_vehicle_params(1, seed=1)[0]
        road = generate_road_profile("A", 33.0, seed=4)
        return simulate_passage(healthy, vehicle, road, dt=2e-3,
                                sensor_location=12.5, ringdown=1.0)

    def test_trace_finite_and_nonzero(self, record):
        assert np.all(np.isfinite(record.accel_trace))
        assert np.max(np.abs(record.accel_trace)) > 0.0

    def test_ringdown_extends_record(self, healthy):
        vehicle = sample_vehicle_params(1, seed=1)[0]
        road = generate_road_profile("A", 33.0, seed=4)
        short = simulate_passage(healthy, vehicle, road, dt=2e-3,
                                 sensor_location=12.5)
        longer = simulate_passage(healthy, vehicle, road, dt=2e-3,
                                  sensor_location=12.5, ringdown=1.0)
        extra = longer.accel_trace.size - short.accel_trace.size
        assert extra == pytest.approx(1.0 / 2e-3, abs=2)

    def test_roundtrip(self, record, tmp_path):
        path = tmp_path / "p.csv"
        save_passage(record, path)
        back = load_passage(path)
        assert back.dt == record.dt
        assert np.allclose(back.accel_trace, record.accel_trace)
        assert back.bridge_state_label == record.bridge_state_label
        assert back.vehicle == record.vehicle

    def test_headerless_csv_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,4\n")
        with pytest.raises(DomainError):
            load_passage(path)

    def test_bad_inputs_rejected(self, healthy):
        vehicle = sample_vehicle_params(1, seed=1)[0]
        road = generate_road_profile("A", 33.0, seed=4)
        with pytest.raises(DomainError):
            simulate_passage(healthy, vehicle, road, dt=-1e-3,
                             sensor_location=12.5)
        with pytest.raises(DomainError):
            simulate_passage(healthy, vehicle, road, dt=1e-3,
                             sensor_location=30.0)

    def test_iteration_budget_enforced(self, healthy):
        vehicle = sample_vehicle_params(1, seed=1)[0]
        road = generate_road_profile("B", 33.0, seed=4)
        with pytest.raises(ConvergenceError):
            simulate_passage(healthy, vehicle, road, dt=2e-3,
                             sensor_location=12.5, tol=1e-14, max_iter=1)

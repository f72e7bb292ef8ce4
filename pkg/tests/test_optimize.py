"""Surrogate (Gaussian-process) and genetic-search unit tests."""

import numpy as np
import pytest

from sehs.errors import DomainError, NumericalError
from sehs.optimize import (
    crowding_distance,
    dominates,
    fast_nondominated_sort,
    hypervolume_2d,
    kriging_fit,
    kriging_predict,
    nsga2,
)


def brute_force_fronts(objs):
    """Reference non-dominated sort by direct pairwise comparison."""
    objs = np.asarray(objs)
    remaining = set(range(len(objs)))
    fronts = []
    while remaining:
        front = [i for i in remaining
                 if not any(dominates(objs[j], objs[i])
                            for j in remaining if j != i)]
        fronts.append(sorted(front))
        remaining -= set(front)
    return fronts


class TestSorting:
    def test_matches_brute_force_on_random_sets(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            objs = rng.random((rng.integers(5, 40), 2))
            got = [sorted(f) for f in fast_nondominated_sort(objs)]
            assert got == brute_force_fronts(objs)

    def test_dominates_semantics(self):
        assert dominates([2.0, 2.0], [1.0, 1.0])
        assert dominates([2.0, 1.0], [1.0, 1.0])
        assert not dominates([1.0, 1.0], [1.0, 1.0])
        assert not dominates([2.0, 0.5], [1.0, 1.0])

    def test_crowding_boundaries_infinite(self):
        objs = np.array([[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]])
        d = crowding_distance(objs)
        assert np.isinf(d[0]) and np.isinf(d[2])
        assert np.isfinite(d[1])

    def test_crowding_tiny_fronts(self):
        assert np.all(np.isinf(crowding_distance(np.array([[1.0, 2.0]]))))


class TestNsga2:
    def test_recovers_linear_front(self):
        result = nsga2(lambda x: (float(x[0]), 1.0 - float(x[0])),
                       bounds=[[0.0, 1.0]], population=60, generations=40,
                       seed=1)
        hv = hypervolume_2d(result.objectives, reference=(0.0, 0.0))
        assert hv >= 0.99 * 0.5

    def test_correlated_objectives_collapse(self):
        result = nsga2(lambda x: (float(x[0]), float(x[0])),
                       bounds=[[0.0, 1.0]], population=20, generations=20,
                       seed=0)
        assert len(result.designs) == 1
        assert result.designs[0][0] == pytest.approx(1.0, abs=1e-6)

    def test_front_is_nondominated_against_archive(self):
        result = nsga2(lambda x: (float(np.sin(3 * x[0]) + x[1]),
                                  float(np.cos(2 * x[0]) - x[1])),
                       bounds=[[0.0, 2.0], [0.0, 1.0]], population=24,
                       generations=15, seed=3)
        for front_obj in result.objectives:
            assert not any(dominates(a, front_obj)
                           for a in result.archive_objectives)

    def test_seeded_determinism(self):
        kw = dict(bounds=[[0.0, 1.0]], population=16, generations=10, seed=9)
        f = lambda x: (float(x[0]), 1.0 - float(x[0]) ** 2)
        a = nsga2(f, **kw)
        b = nsga2(f, **kw)
        assert np.array_equal(a.designs, b.designs)

    def test_evaluator_errors_are_diagnosed(self):
        def bad(x):
            raise ValueError("boom")

        with pytest.raises(NumericalError, match="design"):
            nsga2(bad, bounds=[[0.0, 1.0]], population=8, generations=2)

    def test_population_validation(self):
        with pytest.raises(DomainError):
            nsga2(lambda x: (0.0, 0.0), bounds=[[0.0, 1.0]], population=7)


def energy_curve(lengths):
    """Resonance-shaped synthetic energy table over harvester length."""
    f1 = 4.8 * (0.34 / lengths) ** 2
    return 1.0 / ((f1**2 - 4.8**2) ** 2 + (0.96 * 4.8 * f1) ** 2)


class TestKriging:
    def test_interpolates_supports(self):
        x = np.linspace(0.10, 0.45, 36)[:, None]
        y = energy_curve(x.ravel())
        model = kriging_fit(x, y / y.max())
        mean, var, extrap = kriging_predict(model, x)
        assert np.max(np.abs(mean - y / y.max())) < 1e-6
        assert not np.any(extrap)

    def test_loo_rmse_under_ten_percent(self):
        xs = np.linspace(0.10, 0.45, 36)
        y = energy_curve(xs)
        y = y / y.max()
        errs = []
        for k in range(36):
            mask = np.arange(36) != k
            model = kriging_fit(xs[mask, None], y[mask])
            mean, _, _ = kriging_predict(model, [[xs[k]]])
            errs.append(float(mean) - y[k])
        rmse = float(np.sqrt(np.mean(np.square(errs))))
        assert rmse < 0.10 * (y.max() - y.min())

    def test_variance_zero_at_supports_positive_away(self):
        x = np.linspace(0.0, 1.0, 8)[:, None]
        y = np.sin(3.0 * x.ravel())
        model = kriging_fit(x, y)
        _, var_on, _ = kriging_predict(model, x)
        assert np.max(np.abs(var_on)) < 1e-8 * model.sigma2 + 1e-12
        _, var_off, _ = kriging_predict(model, [[0.55]])
        assert var_off > 0.0

    def test_extrapolation_flagged(self):
        x = np.linspace(0.0, 1.0, 6)[:, None]
        model = kriging_fit(x, x.ravel() ** 2)
        with pytest.warns(UserWarning):
            _, _, extrap = kriging_predict(model, [[1.5]])
        assert extrap

    def test_duplicate_conflicting_values_rejected(self):
        x = np.array([[0.0], [0.0], [1.0], [2.0]])
        with pytest.raises(DomainError):
            kriging_fit(x, np.array([0.0, 1.0, 2.0, 3.0]))

    def test_needs_four_points(self):
        with pytest.raises(DomainError):
            kriging_fit(np.array([[0.0], [1.0], [2.0]]),
                        np.array([0.0, 1.0, 2.0]))

    def test_anisotropic_lengths(self):
        """A direction with no influence gets a longer correlation length."""
        rng = np.random.default_rng(4)
        x = rng.random((40, 2))
        y = np.sin(6.0 * x[:, 0])   # independent of second coordinate
        model = kriging_fit(x, y, seed=1)
        assert model.log_lengths[1] > model.log_lengths[0]


class TestHypervolume:
    def test_rectangle(self):
        hv = hypervolume_2d(np.array([[1.0, 1.0]]), reference=(0.0, 0.0))
        assert hv == pytest.approx(1.0)

    def test_staircase(self):
        pts = np.array([[1.0, 3.0], [2.0, 2.0], [3.0, 1.0]])
        assert hypervolume_2d(pts, reference=(0.0, 0.0)) == pytest.approx(6.0)

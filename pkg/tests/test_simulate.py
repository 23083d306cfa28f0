import numpy as np
import pytest

from svmcompare.metrics import threshold_label
from svmcompare.simulate import SimSpec, pattern_rank, simulate_dataset


class TestPatternRank:
    def test_known_values(self):
        x = np.array([[1.0, 2.0]])
        assert pattern_rank("norm1", x)[0] == pytest.approx(9.0)
        assert pattern_rank("norm2", x)[0] == pytest.approx(5.0)
        assert pattern_rank("norminf", x)[0] == pytest.approx(4.0)

    def test_sign_insensitive(self):
        x = np.array([[-1.0, 2.0], [1.0, -2.0]])
        for name in ("norm1", "norm2", "norminf"):
            vals = pattern_rank(name, x)
            assert vals[0] == pytest.approx(vals[1])

    def test_unknown_pattern(self):
        with pytest.raises(ValueError, match="pattern"):
            pattern_rank("norm3", np.zeros((1, 2)))


class TestSimSpec:
    def test_defaults(self):
        spec = SimSpec("norm2", 100, 0.5)
        assert spec.sigma == 0.25
        assert spec.seed == 0

    @pytest.mark.parametrize(
        "kwargs, match",
        [
            (dict(pattern="bogus", n=10, rho=0.5), "pattern"),
            (dict(pattern="norm1", n=0, rho=0.5), "n must"),
            (dict(pattern="norm1", n=10, rho=1.5), "rho"),
            (dict(pattern="norm1", n=10, rho=0.5, sigma=-1.0), "sigma"),
        ],
    )
    def test_validation(self, kwargs, match):
        with pytest.raises(ValueError, match=match):
            SimSpec(**kwargs)


class TestSimulateDataset:
    def test_exact_tie_quota(self):
        for n, rho, want in [(100, 0.5, 50), (10, 0.25, 3), (7, 0.5, 4), (5, 0.0, 0)]:
            d = simulate_dataset(SimSpec("norm1", n, rho, seed=1))
            assert d.n == n
            assert d.count(0) == want

    def test_points_inside_square(self):
        d = simulate_dataset(SimSpec("norminf", 200, 0.5, seed=2))
        for arr in (d.x, d.x_prime):
            assert arr.shape == (200, 2)
            assert arr.min() >= -3.0 and arr.max() <= 3.0

    def test_deterministic_under_seed(self):
        a = simulate_dataset(SimSpec("norm2", 60, 0.3, seed=7))
        b = simulate_dataset(SimSpec("norm2", 60, 0.3, seed=7))
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.x_prime, b.x_prime)
        assert np.array_equal(a.y, b.y)

    def test_different_seeds_differ(self):
        a = simulate_dataset(SimSpec("norm2", 60, 0.3, seed=7))
        b = simulate_dataset(SimSpec("norm2", 60, 0.3, seed=8))
        assert not np.array_equal(a.x, b.x)

    def test_noise_free_labels_recomputable(self):
        d = simulate_dataset(SimSpec("norm1", 80, 0.4, sigma=0.0, seed=3))
        diff = pattern_rank("norm1", d.x_prime) - pattern_rank("norm1", d.x)
        assert np.array_equal(threshold_label(diff, 1.0), d.y)

    def test_all_label_kinds_appear(self):
        d = simulate_dataset(SimSpec("norm2", 300, 0.5, seed=4))
        assert d.count(0) == 150
        assert d.count(1) > 0 and d.count(-1) > 0

    def test_composite_seed_accepted(self):
        a = simulate_dataset(SimSpec("norm2", 20, 0.5, seed=[1, 2, 3]))
        b = simulate_dataset(SimSpec("norm2", 20, 0.5, seed=[1, 2, 3]))
        assert np.array_equal(a.x, b.x)

import numpy as np
import pytest

from svmcompare.pairs import PairDataset

# one line per acceptance criterion, echoed after the run
acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)


def random_dataset(rng, n=12, p=2, with_all_labels=True) -> PairDataset:
    """Random labeled pairs; guarantees every label class when asked."""
    x = rng.uniform(-3, 3, size=(n, p))
    x_prime = rng.uniform(-3, 3, size=(n, p))
    y = rng.choice([-1, 0, 1], size=n)
    if with_all_labels and n >= 3:
        y[:3] = [-1, 0, 1]
    return PairDataset(x, x_prime, y.astype(np.int64))


@pytest.fixture
def toy_1d() -> PairDataset:
    # one directed pair (0 -> 2) and one tie (0, 0.4)
    return PairDataset(
        np.array([[0.0], [0.0]]),
        np.array([[2.0], [0.4]]),
        np.array([1, 0], dtype=np.int64),
    )

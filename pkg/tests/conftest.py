import numpy as np
import pytest

from sammec2.data import Dataset
from sammec2.datagen import GenConfig, generate


def make_dataset(X, y, K=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y)
    K = int(y.max()) + 1 if K is None else K
    return Dataset(X, y, K, [f"f{j}" for j in range(X.shape[1])])


def dyadic_weights(rng, n, bits=20):
    """Random weights n_i / 2**bits summing to exactly 1.

    Every partial sum is exactly representable, so error totals do not
    depend on summation order.
    """
    total = 2**bits
    cuts = np.sort(rng.choice(np.arange(1, total), size=n - 1, replace=False))
    counts = np.diff(np.concatenate([[0], cuts, [total]]))
    return counts / total


@pytest.fixture(scope="session")
def small_three_class():
    return generate(GenConfig(n_samples=1000, n_features=10, n_informative=4,
                              weights=(0.8, 0.15, 0.05), seed=3))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

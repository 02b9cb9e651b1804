import numpy as np
import pytest

from nlkernel.grid import Dataset, UniformGrid

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    """Store one acceptance verdict; printed in the terminal summary."""
    ACCEPTANCE[criterion] = (bool(passed), detail)
    print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_dataset(rng, J=40, N=2, dx=0.1, support=None) -> Dataset:
    """Random u_i (optionally zero outside a central window) with random f_i."""
    grid = UniformGrid(-0.5 * dx * (J - 1), dx, J)
    U = rng.standard_normal((N, J))
    if support is not None:
        U[:, :support] = 0.0
        U[:, J - support:] = 0.0
    F = rng.standard_normal((N, J))
    return Dataset.from_arrays(grid, U, F)

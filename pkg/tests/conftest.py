import numpy as np
import pytest

from ultrarel import kernels
from ultrarel.eos import EosParams

GAMMAS = (1.1, 4.0 / 3.0, 1.75)

# acceptance results, printed once at the end of the session
_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(n: int, passed: bool, detail: str) -> None:
    _ACCEPTANCE[n] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the JIT kernels once so timing checks measure computation only."""
    z = np.zeros(2)
    o = np.array([0.1, -0.2])
    sol = kernels.solve_batch(z, z, z, o, z, o, 0.5, 1.25)
    kernels.sample_batch(z, z, z, o, z, o, sol, z, 0.5)


@pytest.fixture(params=GAMMAS, ids=lambda g: f"gamma={g:.4g}")
def params(request):
    return EosParams(request.param)


@pytest.fixture
def p43():
    return EosParams(4.0 / 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

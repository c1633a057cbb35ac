import numpy as np
import pytest

from gpoptics import _pykernels

try:
    from gpoptics import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))

_ACCEPTANCE = []


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, text, ok, detail)."""

    def record(number, text, ok, detail=""):
        _ACCEPTANCE.append((number, text, bool(ok), detail))
        assert ok, f"criterion {number} failed: {text} {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        mark = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{mark}] #{number:>2} {text}" + (f"  ({detail})" if detail else ""))

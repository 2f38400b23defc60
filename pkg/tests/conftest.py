import importlib

import pytest

BACKEND_MODULES = ["volint._pykernels", "volint._ckernels"]


def _load(name):
    try:
        return importlib.import_module(name)
    except ImportError:
        return None


@pytest.fixture(params=BACKEND_MODULES, ids=["python", "cython"])
def backend(request):
    mod = _load(request.param)
    if mod is None:
        pytest.skip("compiled kernels not built")
    return mod


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

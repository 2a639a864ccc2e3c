import pytest

from geomrand import _fallback
from geomrand._backend import BACKEND

try:
    from geomrand import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [pytest.param(_fallback, id="python")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels, id="compiled"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


def pytest_report_header(config):
    return f"geomrand backend: {BACKEND}"


@pytest.fixture(scope="session")
def default_reference():
    """Gold64 calibration for the default experiment, 10**4 trials."""
    from geomrand.harness import ExperimentConfig, reference_distribution

    return reference_distribution(ExperimentConfig(), 10_000)

import os

# Allow the 8-worker determinism checks even on small CI boxes; must be set
# before numba initializes its threading layer.
os.environ.setdefault("NUMBA_NUM_THREADS", "8")

import pytest

import fprisk

BACKENDS = ("numba", "numpy")


@pytest.fixture(scope="session")
def records():
    return fprisk.parse_study_csv(fprisk.bundled_studies_path().read_bytes())


@pytest.fixture(scope="session")
def rates(records):
    return fprisk.pool_rates(records)


@pytest.fixture(scope="session")
def schedule():
    return fprisk.parse_schedule_config(fprisk.bundled_schedule_path().read_bytes())


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param

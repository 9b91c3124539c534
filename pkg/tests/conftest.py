import os

import pytest
from hypothesis import HealthCheck, settings

from nilmalle import catalog

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", 60)),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def entries():
    return catalog.load_catalog()


@pytest.fixture(scope="session")
def grp(entries):
    def get(name):
        return entries[name].group

    return get

import pytest

from semifree_tfd.classifier import classify_all
from semifree_tfd.io import load_config


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture(scope="session")
def classification(config):
    log = []
    records = classify_all(config, log=log)
    return records, log


@pytest.fixture(scope="session")
def records(classification):
    return classification[0]


@pytest.fixture(scope="session")
def rejections(classification):
    return classification[1]


@pytest.fixture(scope="session")
def by_id(records):
    return {r.case_id: r for r in records}

"""Shared fixtures: default configs and one completed run per scenario."""

import pytest

from hscsim.config import default_config
from hscsim.engine import run_scenario


@pytest.fixture(scope="session")
def nominal_config():
    return default_config("nominal")


@pytest.fixture(scope="session")
def attack_config():
    return default_config("attack")


@pytest.fixture(scope="session")
def nominal_run(nominal_config):
    return run_scenario(nominal_config)


@pytest.fixture(scope="session")
def attack_run(attack_config):
    return run_scenario(attack_config)

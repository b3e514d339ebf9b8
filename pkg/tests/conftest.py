import json
import sys
import pathlib

import pytest
from hypothesis import HealthCheck, settings

from iwave.params import PhysicalParams

settings.register_profile("iwave", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("iwave")

ROOT = pathlib.Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "demos" / "configs"


def load(name: str) -> PhysicalParams:
    raw = json.loads((CONFIGS / name).read_text())
    return PhysicalParams.from_mapping(raw.get("params", raw))


@pytest.fixture
def irrotational() -> PhysicalParams:
    """rho = (1, 2), d = (1, 2), beta = 1, alpha = 1.1, no vorticity."""
    return load("irrotational.json")


@pytest.fixture
def rotational() -> PhysicalParams:
    """As irrotational with omega_plus = 0.2 and alpha = 1.21."""
    return load("rotational.json")


@pytest.fixture
def config_dir() -> pathlib.Path:
    return CONFIGS


@pytest.fixture(scope="session")
def dprime_report():
    """One dprime_check run on the rotational reference, shared across files."""
    from iwave.functionals import dprime_check

    return dprime_check(load("rotational.json"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile(
    "thorough", max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def sech(u):
    return 1.0 / np.cosh(u)


@pytest.fixture(scope="session")
def grim_reaper_pipeline():
    """Entropy(0), d=1 profile on |s| <= 8 with its reconstruction and dual flow."""
    from solitonlab.energy import CurvatureEnergy, flow_from_energy
    from solitonlab.soliton import integrate_profile, reconstruct_curve

    energy = CurvatureEnergy.entropy(0.0)
    profile = integrate_profile(energy, 1.0, 8.0)
    return profile, reconstruct_curve(profile), flow_from_energy(energy, 1.0)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """List that collects one PASS/FAIL line per acceptance criterion."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

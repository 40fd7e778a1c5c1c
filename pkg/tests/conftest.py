import pytest

from offloadsim.datafiles import packaged_path

# Filled by the acceptance suite; echoed after the run summary so the
# per-criterion verdicts are visible even with output capture on.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def detection_config_path():
    return packaged_path("detection_config.json")


@pytest.fixture(scope="session")
def two_service_config_path():
    return packaged_path("two_service_config.json")


@pytest.fixture(scope="session")
def square_wave_path():
    return packaged_path("traces", "square_wave.csv")


@pytest.fixture(scope="session")
def step_down_path():
    return packaged_path("traces", "step_down.csv")


@pytest.fixture(scope="session")
def urban_5g_path():
    return packaged_path("traces", "urban_5g.csv")

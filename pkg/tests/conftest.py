import pytest

from revzeta.profile import standard_profiles
from revzeta.verify import _heat_table, warm_up

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def profiles():
    return standard_profiles()


@pytest.fixture(scope="session")
def heat_tables():
    """Full spectra below the heat-trace cuts (shared with the acceptance checks)."""
    warm_up()
    return {name: _heat_table(name) for name in ("cylinder", "frustum")}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)

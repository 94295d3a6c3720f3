import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sepgame.io import load_game, load_profile  # noqa: E402

EXAMPLES = Path(__file__).resolve().parents[1] / "src" / "sepgame" / "examples"

# lines recorded by the acceptance tests, echoed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def example1():
    return load_game(EXAMPLES / "example1.json")


@pytest.fixture(scope="session")
def threeplayer():
    return load_game(EXAMPLES / "threeplayer.json")


@pytest.fixture(scope="session")
def pennies():
    return load_game(EXAMPLES / "matching_pennies.json")


@pytest.fixture(scope="session")
def example1_profile(example1):
    return load_profile(EXAMPLES / "example1_equilibrium.profile.json", example1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

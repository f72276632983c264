import pytest

from revac.engine import GameConfig, Role, new_game

FIXED_ROLES = [Role.VILLAGER, Role.DOCTOR, Role.DETECTIVE, Role.MAFIA, Role.MAFIA, Role.VILLAGER]


@pytest.fixture
def config():
    return GameConfig(seed=11)


@pytest.fixture
def state(config):
    """P0 Villager, P1 Doctor, P2 Detective, P3/P4 Mafia, P5 Villager at Night 0."""
    return new_game(config, FIXED_ROLES)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)

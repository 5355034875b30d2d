import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ein.lexicon import builtin_lexicons, builtin_schemas, get_schema

settings.register_profile("ein", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ein")


@pytest.fixture(scope="session")
def schemas():
    return builtin_schemas()


@pytest.fixture(scope="session")
def lexicons():
    return builtin_lexicons()


@pytest.fixture
def emolex():
    return get_schema("EmoLex")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

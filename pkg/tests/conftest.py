from pathlib import Path

import pytest

from polyctmc.network import parse_model

MODELS = Path(__file__).resolve().parent.parent / "models"


def load_model(name: str):
    return parse_model((MODELS / name).read_text(), name).build()


@pytest.fixture
def model():
    return load_model


# one line per acceptance criterion, echoed at the end of the session
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

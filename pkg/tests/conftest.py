import os
import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from lalreg.syntax import parse

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
SEED = int(os.environ.get("LAL_SEED", "20261014"))

settings.register_profile("lal", derandomize="LAL_SEED" not in os.environ,
                          suppress_health_check=[HealthCheck.too_slow], deadline=None)
settings.load_profile("lal")


def corpus_files():
    return sorted(CORPUS.glob("*.lal"))


def load(path):
    path = Path(path)
    return parse(path.read_text(), path.name)


@pytest.fixture
def rng():
    return random.Random(SEED)


# filled by the acceptance tests, printed after the run so fd capture cannot hide it
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

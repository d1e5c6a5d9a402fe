from pathlib import Path

import numpy as np
import pytest

from agdl.pgm import read_pgm
from agdl.testimages import synthetic_corpus

DATA = Path(__file__).parent / "data"
NATURAL = ("camera", "clock", "coins", "moon", "page")


def natural_corpus():
    return {name: read_pgm(DATA / f"{name}.pgm") for name in NATURAL}


def full_corpus():
    corpus = synthetic_corpus()
    corpus.update(natural_corpus())
    return corpus


@pytest.fixture(scope="session")
def corpus():
    return full_corpus()


@pytest.fixture(scope="session")
def camera():
    return read_pgm(DATA / "camera.pgm")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

from pathlib import Path

import pytest

from flowdbg.parser import parse_program

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

CORPUS_NAMES = [
    "leak",
    "clean",
    "loop",
    "branch",
    "scrub",
    "passthrough",
    "twomethod",
]


def corpus_text(name: str) -> str:
    return (CORPUS_DIR / f"{name}.ir").read_text(encoding="utf-8")


def corpus_program(name: str):
    return parse_program(corpus_text(name))


@pytest.fixture(scope="session")
def corpus_programs():
    return {name: corpus_program(name) for name in CORPUS_NAMES}


@pytest.fixture
def leak_program():
    return corpus_program("leak")

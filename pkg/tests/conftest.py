"""Shared fixtures: bundled data paths, parsed corpora, scripted victims."""

import json
from pathlib import Path

import pytest

from hogforge.frontend import parse_unit
from hogforge.victims import VictimHandle, VictimVerdict

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "hogforge" / "data"
CORPUS_DIR = DATA_DIR / "corpus"
VICTIMS_DIR = DATA_DIR / "victims"
VOCAB_DIR = DATA_DIR / "vocab"


def load_rows(path: Path) -> list:
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


@pytest.fixture(scope="session")
def executable_rows():
    return load_rows(CORPUS_DIR / "executable.jsonl")


@pytest.fixture(scope="session")
def opaque_rows():
    return load_rows(CORPUS_DIR / "opaque.jsonl")


@pytest.fixture(scope="session")
def all_rows(executable_rows, opaque_rows):
    return executable_rows + opaque_rows


@pytest.fixture(scope="session")
def executable_units(executable_rows):
    return {r["id"]: parse_unit(r["code"], r["id"]) for r in executable_rows}


@pytest.fixture(scope="session")
def all_units(all_rows):
    return {r["id"]: parse_unit(r["code"], r["id"]) for r in all_rows}


class ScriptedModel:
    """Victim whose score is any function of the code string."""

    def __init__(self, fn):
        self.fn = fn

    def score(self, code: str) -> float:
        return self.fn(code)


def scripted_victim(fn) -> VictimHandle:
    return VictimHandle(ScriptedModel(fn), "builtin", "scripted")


class CountingGate:
    """Minimal predict() wrapper exposing the raw call count."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def predict(self, code: str) -> VictimVerdict:
        self.calls += 1
        return VictimVerdict(p_vulnerable=self.fn(code))


@pytest.fixture
def corpus_paths():
    return {
        "executable": CORPUS_DIR / "executable.jsonl",
        "opaque": CORPUS_DIR / "opaque.jsonl",
        "planted_victim": VICTIMS_DIR / "planted.json",
        "planted_vocab": VOCAB_DIR / "planted_vocab.txt",
    }

from __future__ import annotations

import json
from dataclasses import dataclass

import pytest

import sandra
from sandra.cli import main as cli_main
from sandra.fixtures import ONTOLOGIES, fixture_path, situation_path


@pytest.fixture(scope="session")
def ontologies() -> dict[str, sandra.Ontology]:
    return {name: sandra.load_ontology(fixture_path(name)) for name in ONTOLOGIES}


@pytest.fixture
def fig(ontologies):
    return ontologies["fig"]


@pytest.fixture
def panel(ontologies):
    return ontologies["panel"]


@pytest.fixture
def mini_iraven(ontologies):
    return ontologies["mini_iraven"]


@pytest.fixture
def mini_fmnist(ontologies):
    return ontologies["mini_fmnist"]


@pytest.fixture
def iraven144(ontologies):
    return ontologies["iraven144"]


@pytest.fixture
def s1() -> sandra.Situation:
    return sandra.load_situation(situation_path("s1"))


@pytest.fixture
def circle_only() -> sandra.Situation:
    return sandra.load_situation(situation_path("circle_only"))


@pytest.fixture
def red_only() -> sandra.Situation:
    return sandra.load_situation(situation_path("red_only"))


@pytest.fixture
def empty_situation() -> sandra.Situation:
    return sandra.load_situation(situation_path("empty"))


@pytest.fixture
def s2_nested() -> sandra.Situation:
    return sandra.load_situation(situation_path("s2_nested"))


@dataclass
class CliResult:
    code: int
    out: str
    err: str

    def json(self):
        return json.loads(self.out)


@pytest.fixture
def run_cli(capsys):
    def run(*argv) -> CliResult:
        code = cli_main([str(a) for a in argv])
        captured = capsys.readouterr()
        return CliResult(code, captured.out, captured.err)

    return run

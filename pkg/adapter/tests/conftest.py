"""Shared fixtures for the torch adapter tests."""

from __future__ import annotations

import pytest

from sandra import build_all_bases, load_ontology
from sandra.fixtures import fixture_path

from torch_helpers import TORCH_FIXTURES


@pytest.fixture(scope="session")
def ontologies():
    return {name: load_ontology(fixture_path(name)) for name in TORCH_FIXTURES}


@pytest.fixture(scope="session")
def fig(ontologies):
    return ontologies["fig"]


@pytest.fixture(scope="session")
def mini_fmnist(ontologies):
    return ontologies["mini_fmnist"]


@pytest.fixture(scope="session")
def all_bases(ontologies):
    return {name: build_all_bases(onto) for name, onto in ontologies.items()}

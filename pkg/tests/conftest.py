from __future__ import annotations

import pathlib

import pytest

from dlq.kbtext import parse_concept, parse_kb
from dlq.model import Iri, Role
from dlq.reasoner import Reasoner

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

UNI = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#"


@pytest.fixture(scope="session")
def university_kb():
    return parse_kb((FIXTURES / "university.kb").read_text())


@pytest.fixture(scope="session")
def extended_kb():
    return parse_kb((FIXTURES / "university_extended.kb").read_text())


@pytest.fixture(scope="session")
def university(university_kb):
    """A shared reasoning session over the university KB."""
    return Reasoner(university_kb)


@pytest.fixture(scope="session")
def extended(extended_kb):
    return Reasoner(extended_kb)


@pytest.fixture(scope="session")
def uc(university_kb):
    """Parse a concept against the university prefixes."""
    def parse(text: str):
        return parse_concept(text, university_kb.prefixes)
    return parse


@pytest.fixture(scope="session")
def uobj():
    def make(local: str) -> Iri:
        return Iri(UNI + local)
    return make


@pytest.fixture(scope="session")
def urole():
    def make(local: str, inverse: bool = False) -> Role:
        return Role(Iri(UNI + local), inverse)
    return make

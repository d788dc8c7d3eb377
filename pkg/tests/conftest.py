import random

import pytest

from rdfcsa.core import Rdfcsa, TripleSet
from rdfcsa.dictionary import dict_build
from rdfcsa.testkit import DatasetSpec, gen_dataset

# Ten triples over 5 subjects, 6 predicates and 5 objects; (1,5,2) sorts first.
DESK_TRIPLES = [(1, 5, 2), (2, 4, 5), (2, 5, 1), (3, 1, 1), (3, 2, 3),
                (3, 6, 4), (4, 1, 1), (4, 2, 4), (5, 3, 3), (5, 3, 5)]


@pytest.fixture
def desk_set():
    return TripleSet.from_triples(DESK_TRIPLES, 5, 6, 5)


@pytest.fixture
def desk_index(desk_set):
    return Rdfcsa.build(desk_set, t_psi=4)


@pytest.fixture(scope="session")
def medium_terms():
    return gen_dataset(DatasetSpec(600, 40, 6, 60, 0.6, 11))


@pytest.fixture(scope="session")
def medium(medium_terms):
    d, ts = dict_build(medium_terms)
    return d, ts, Rdfcsa.build(ts, mode="compressed", t_psi=8)


@pytest.fixture
def rng():
    return random.Random(1234)


# -- acceptance summary -------------------------------------------------------------

ACCEPTANCE = {}


def record(number, ok, detail):
    ACCEPTANCE[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])

import itertools

import numpy as np
import pytest

from frchoquet.dataset import DecisionSystem, load_flu_example
from frchoquet.demo import flu_mu_measure

ACCEPTANCE_RESULTS = []


def record(criterion, passed, detail=""):
    ACCEPTANCE_RESULTS.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_RESULTS:
        line = f"{'PASS' if passed else 'FAIL'}  {criterion}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def flu():
    return load_flu_example()


@pytest.fixture
def flu_mu(flu):
    return flu_mu_measure(flu)


def random_system(rng, n_inst=None, n_attr=None, n_classes=2):
    """Small random decision system with every class present."""
    n_inst = n_inst or int(rng.integers(4, 13))
    n_attr = n_attr or int(rng.integers(1, 7))
    labels = np.arange(n_inst) % n_classes
    rng.shuffle(labels)
    values = rng.random((n_inst, n_attr))
    return DecisionSystem(values, labels, [f"a{i + 1}" for i in range(n_attr)])


def all_masks(n):
    return range(1 << n)


def masks_of(indices_list):
    return [sum(1 << i for i in s) for s in indices_list]


def powerset(items):
    items = list(items)
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(len(items) + 1))

import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from tiestrength.graph import build_graph, build_tie_graph  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def tie_graph(records, **kwargs):
    g, _ = build_graph(records, **kwargs)
    return build_tie_graph(g)


def undirected(pairs, weight=1.0):
    """Tie graph with a single directed edge a->b per pair."""
    return tie_graph([(a, b, weight) for a, b in pairs])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, ok: bool, title: str, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(ACCEPTANCE[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])

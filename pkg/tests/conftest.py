import numpy as np
import pytest

from cmfgraph.curve import CurveParams, random_interlaced_params
from cmfgraph.graph import MaximalGraph
from cmfgraph.weierstrass import Catenoid, RiemannFamily

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def riemann_params():
    """The five explicit-family surfaces used across the mechanics tests."""
    return [
        CurveParams(1, (2.0,), (3.0,)),
        random_interlaced_params(np.random.default_rng(7), 1),
        CurveParams(2, (2.0, -4.0), (3.0, -2.5)),
        random_interlaced_params(np.random.default_rng(11), 2),
        random_interlaced_params(np.random.default_rng(12), 2),
    ]


@pytest.fixture(scope="session")
def catenoid_graph():
    return MaximalGraph(Catenoid())


@pytest.fixture(scope="session")
def riemann_graphs():
    return [MaximalGraph(RiemannFamily(p)) for p in riemann_params()]


@pytest.fixture(scope="session")
def test_surfaces(catenoid_graph, riemann_graphs):
    return [catenoid_graph] + riemann_graphs


@pytest.fixture(scope="session")
def r1_graph(riemann_graphs):
    return riemann_graphs[0]


@pytest.fixture
def record():
    def _record(criterion, passed, detail=""):
        ACCEPTANCE[criterion] = (bool(passed), detail)
        print(f"criterion {criterion:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}")

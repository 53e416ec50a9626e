import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from quickstream.objectives import GraphInstance, MaxCoverOracle

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def graph_from_nx(G: nx.Graph) -> GraphInstance:
    G = nx.convert_node_labels_to_integers(G)
    return GraphInstance.from_edges(G.number_of_nodes(), list(G.edges()))


def reference_cover(G: nx.Graph, S) -> int:
    """Vertices touched by an edge at some member of S, computed with networkx."""
    covered = set()
    for s in S:
        for v in G.neighbors(s):
            covered.update((s, v))
    return len(covered)


@pytest.fixture
def star():
    # center 0, leaves 1, 2, 3
    return MaxCoverOracle(GraphInstance.from_edges(4, [(0, 1), (0, 2), (0, 3)]))


@pytest.fixture
def path3():
    return MaxCoverOracle(GraphInstance.from_edges(3, [(0, 1), (1, 2)]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""
Shared fixtures for falqon-lab tests.
"""

import logging

import pytest

from falqon_lab.config import get_settings
from falqon_lab.graphs import Graph


@pytest.fixture(autouse=True)
def fresh_settings():
    """Make every test see settings built from its own environment."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def single_edge() -> Graph:
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def prism() -> Graph:
    """Triangular prism: 3-regular on 6 vertices, max cut 7."""
    return Graph.from_edges(
        6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
    )


@pytest.fixture
def k33() -> Graph:
    """Complete bipartite K_{3,3}: 3-regular on 6 vertices, max cut 9."""
    return Graph.from_edges(6, [(a, b) for a in (0, 1, 2) for b in (3, 4, 5)])


@pytest.fixture
def weighted_square() -> Graph:
    return Graph.from_edges(4, [(0, 1, 0.3), (1, 2, 0.9), (2, 3, 0.5), (0, 3, 0.7), (0, 2, 0.2)])


@pytest.fixture
def restore_root_logger():
    """Undo handler and level changes made by ``setup_logging``."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        if handler not in handlers:
            handler.close()
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)

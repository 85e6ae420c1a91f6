"""Random instance builders for property-style tests."""

import numpy as np

from falqon_lab.graphs import Graph


def random_graph(rng: np.random.Generator, n: int, weighted: bool = False) -> Graph:
    """Random graph with at least one edge; used by property-style tests."""
    edges = [(j, k) for j in range(n) for k in range(j + 1, n) if rng.random() < 0.5]
    if not edges:
        edges = [(0, 1)]
    if weighted:
        return Graph.from_edges(n, [(j, k, 1.0 - rng.random()) for j, k in edges])
    return Graph.from_edges(n, edges)


def random_state_amplitudes(rng: np.random.Generator, n: int) -> np.ndarray:
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return amps / np.linalg.norm(amps)

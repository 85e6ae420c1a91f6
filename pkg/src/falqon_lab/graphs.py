"""
MaxCut instances: generation, isomorphism dedup, weighting, serialization
and the brute-force ground-truth oracle.

Bit convention: character j of a bitstring is vertex/qubit j, and qubit 0 is
the least significant bit of a basis-state index.
"""

import hashlib
import itertools
import logging
from collections import defaultdict
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from falqon_lab.config import get_settings
from falqon_lab.exceptions import (
    GenerationError,
    ParameterError,
    SerializationError,
    require_capacity,
)
from falqon_lab.persistence import atomic_write_text

logger = logging.getLogger(__name__)

Edge = tuple[int, int, float]


# ——— Domain types ———


@dataclass(frozen=True)
class Graph:
    """Weighted undirected MaxCut instance with canonical (j < k) sorted edges."""

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ParameterError("graph needs at least 2 vertices", {"n": self.n})
        seen: set[tuple[int, int]] = set()
        for j, k, w in self.edges:
            if j == k:
                raise ParameterError("self-loops are not allowed", {"edge": (j, k)})
            if not (0 <= j < k < self.n):
                raise ParameterError(
                    "edge endpoints must satisfy 0 <= j < k < n",
                    {"edge": (j, k), "n": self.n},
                )
            if (j, k) in seen:
                raise ParameterError("duplicate edge", {"edge": (j, k)})
            if not (w > 0 and np.isfinite(w)):
                raise ParameterError("edge weights must be positive", {"edge": (j, k, w)})
            seen.add((j, k))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[float]]) -> "Graph":
        """Build a graph from (j, k) or (j, k, w) tuples in any orientation."""
        normalized: list[Edge] = []
        for edge in edges:
            j, k = int(edge[0]), int(edge[1])
            w = float(edge[2]) if len(edge) > 2 else 1.0
            if j > k:
                j, k = k, j
            normalized.append((j, k, w))
        normalized.sort(key=lambda e: (e[0], e[1]))
        return cls(n=n, edges=tuple(normalized))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=float)

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1.0 for _, _, w in self.edges)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for j, k, _ in self.edges:
            deg[j] += 1
            deg[k] += 1
        return deg

    def adjacency(self, weighted: bool = False) -> np.ndarray:
        """Dense symmetric adjacency matrix."""
        adj = np.zeros((self.n, self.n), dtype=float)
        for j, k, w in self.edges:
            adj[j, k] = adj[k, j] = w if weighted else 1.0
        return adj

    def neighbors(self) -> list[set[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for j, k, _ in self.edges:
            nbrs[j].add(k)
            nbrs[k].add(j)
        return nbrs

    def is_connected(self) -> bool:
        if self.num_edges == 0:
            return False
        rows = [j for j, _, _ in self.edges]
        cols = [k for _, k, _ in self.edges]
        matrix = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))
        count, _ = connected_components(matrix, directed=False)
        return bool(count == 1)

    def with_weights(self, weights: Sequence[float]) -> "Graph":
        if len(weights) != self.num_edges:
            raise ParameterError(
                "weight count must match edge count",
                {"weights": len(weights), "edges": self.num_edges},
            )
        return Graph(
            n=self.n,
            edges=tuple((j, k, float(w)) for (j, k, _), w in zip(self.edges, weights)),
        )

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Graph":
        return cls.from_edges(data["n"], data["edges"])


@dataclass(frozen=True)
class MaxCutSolution:
    """Exact MaxCut optimum; ``optimal_bitstrings`` is closed under complement."""

    max_cut_value: float
    optimal_bitstrings: frozenset[str]
    min_energy: float
    optimal_indices: tuple[int, ...] = field(default=(), compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_cut_value": self.max_cut_value,
            "optimal_bitstrings": sorted(self.optimal_bitstrings),
            "min_energy": self.min_energy,
        }


# ——— Bitstring helpers ———


def bitstring_to_index(z: str) -> int:
    """Basis-state index of a bitstring whose character j is qubit j."""
    return sum(1 << j for j, bit in enumerate(z) if bit == "1")


def index_to_bitstring(index: int, n: int) -> str:
    return "".join("1" if (index >> j) & 1 else "0" for j in range(n))


def complement(z: str) -> str:
    return "".join("1" if bit == "0" else "0" for bit in z)


def _validate_bitstring(z: str, n: int) -> None:
    if len(z) != n:
        raise ParameterError(
            "bitstring length must equal vertex count", {"length": len(z), "n": n}
        )
    if set(z) - {"0", "1"}:
        raise ParameterError("bitstring may only contain 0 and 1", {"bitstring": z})


# ——— Generation ———


def generate_connected_regular_graph(
    n: int, d: int, seed: int | None = None, max_attempts: int = 10_000
) -> Graph:
    """
    Sample a simple connected d-regular graph with the pairing model.

    Stubs are shuffled and paired; any pairing with a loop, a repeated edge or
    more than one component is discarded and resampled.
    """
    if n < 4:
        raise ParameterError("regular graph generation needs n >= 4", {"n": n})
    if not 2 <= d < n:
        raise ParameterError("degree must satisfy 2 <= d < n", {"n": n, "d": d})
    if (n * d) % 2 != 0:
        raise ParameterError("n * d must be even", {"n": n, "d": d})

    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)

    for attempt in range(1, max_attempts + 1):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        keys = pairs[:, 0] * n + pairs[:, 1]
        if np.unique(keys).size != keys.size:
            continue
        graph = Graph.from_edges(n, pairs.tolist())
        if not graph.is_connected():
            continue
        logger.debug(f"Generated {d}-regular graph on {n} vertices after {attempt} attempts")
        return graph

    raise GenerationError(
        "pairing model exceeded its rejection budget",
        {"n": n, "d": d, "max_attempts": max_attempts},
    )


def enumerate_regular_graphs(n: int, d: int) -> Iterator[Graph]:
    """
    Yield every connected labeled d-regular graph on n vertices whose vertex 0
    is adjacent to exactly {1, ..., d}.

    Every isomorphism class has such a representative, so deduplicating this
    stream gives all nonisomorphic connected d-regular graphs.
    """
    if n > 10:
        raise ParameterError("exhaustive enumeration supports n <= 10", {"n": n})
    if not 2 <= d < n or (n * d) % 2 != 0:
        raise ParameterError("invalid (n, d) combination", {"n": n, "d": d})

    remaining = [d] * n
    adjacent = [[False] * n for _ in range(n)]
    edges: list[tuple[int, int]] = []

    def add(j: int, k: int) -> None:
        adjacent[j][k] = adjacent[k][j] = True
        remaining[j] -= 1
        remaining[k] -= 1
        edges.append((j, k))

    def remove(j: int, k: int) -> None:
        adjacent[j][k] = adjacent[k][j] = False
        remaining[j] += 1
        remaining[k] += 1
        edges.pop()

    for k in range(1, d + 1):
        add(0, k)

    def extend() -> Iterator[Graph]:
        v = next((u for u in range(n) if remaining[u] > 0), None)
        if v is None:
            graph = Graph.from_edges(n, edges)
            if graph.is_connected():
                yield graph
            return
        candidates = [u for u in range(v + 1, n) if remaining[u] > 0 and not adjacent[v][u]]
        need = remaining[v]
        if len(candidates) < need:
            return
        for chosen in itertools.combinations(candidates, need):
            for u in chosen:
                add(v, u)
            yield from extend()
            for u in reversed(chosen):
                remove(v, u)

    yield from extend()


def assign_uniform_weights(graph: Graph, seed: int | None = None) -> Graph:
    """Independent edge weights uniform on (0, 1]."""
    rng = np.random.default_rng(seed)
    weights = 1.0 - rng.random(graph.num_edges)
    return graph.with_weights(weights.tolist())


def relabel(graph: Graph, permutation: Sequence[int]) -> Graph:
    """Return the graph with vertex v renamed permutation[v]."""
    if sorted(permutation) != list(range(graph.n)):
        raise ParameterError("relabeling must be a permutation of the vertices")
    return Graph.from_edges(
        graph.n, [(permutation[j], permutation[k], w) for j, k, w in graph.edges]
    )


# ——— Isomorphism ———


def _triangle_counts(graph: Graph) -> np.ndarray:
    adj = graph.adjacency()
    return np.rint(np.diag(adj @ adj @ adj) / 2).astype(int)


def fingerprint(graph: Graph, decimals: int = 6) -> tuple[Any, ...]:
    """Isomorphism invariant: degrees, triangle counts and adjacency spectrum."""
    spectrum = np.round(np.linalg.eigvalsh(graph.adjacency()), decimals) + 0.0
    return (
        graph.n,
        graph.num_edges,
        tuple(sorted(graph.degrees().tolist())),
        tuple(sorted(_triangle_counts(graph).tolist())),
        tuple(spectrum.tolist()),
    )


def are_isomorphic(g: Graph, h: Graph) -> bool:
    """Exact isomorphism test (weights ignored) by backtracking search."""
    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    g_deg, h_deg = g.degrees(), h.degrees()
    if sorted(g_deg.tolist()) != sorted(h_deg.tolist()):
        return False

    g_adj, h_adj = g.adjacency().astype(bool), h.adjacency().astype(bool)
    g_tri, h_tri = _triangle_counts(g), _triangle_counts(h)
    g_nbrs = g.neighbors()

    # BFS order from the highest-degree vertex so mapped neighbours prune early
    order: list[int] = []
    for root in sorted(range(g.n), key=lambda v: -g_deg[v]):
        if root in order:
            continue
        queue = [root]
        order.append(root)
        while queue:
            v = queue.pop(0)
            for u in sorted(g_nbrs[v]):
                if u not in order:
                    order.append(u)
                    queue.append(u)

    mapping: dict[int, int] = {}
    used = [False] * h.n

    def search(depth: int) -> bool:
        if depth == len(order):
            return True
        v = order[depth]
        for u in range(h.n):
            if used[u] or h_deg[u] != g_deg[v] or h_tri[u] != g_tri[v]:
                continue
            if any(g_adj[v, w] != h_adj[u, mapping[w]] for w in mapping):
                continue
            mapping[v] = u
            used[u] = True
            if search(depth + 1):
                return True
            del mapping[v]
            used[u] = False
        return False

    return search(0)


def dedupe_nonisomorphic(graphs: Iterable[Graph]) -> list[Graph]:
    """Keep the first representative of each isomorphism class, in input order."""
    buckets: dict[tuple[Any, ...], list[Graph]] = defaultdict(list)
    kept: list[Graph] = []
    n_seen: int | None = None

    for graph in graphs:
        if n_seen is None:
            n_seen = graph.n
        elif graph.n != n_seen:
            raise ParameterError(
                "all graphs must share the same vertex count",
                {"expected": n_seen, "got": graph.n},
            )
        bucket = buckets[fingerprint(graph)]
        if any(are_isomorphic(graph, rep) for rep in bucket):
            continue
        bucket.append(graph)
        kept.append(graph)

    logger.debug(f"Deduplicated to {len(kept)} isomorphism classes")
    return kept


# ——— MaxCut oracle ———


def cut_value(graph: Graph, z: str) -> float:
    """Total weight of edges whose endpoints fall on different sides."""
    _validate_bitstring(z, graph.n)
    return float(sum(w for j, k, w in graph.edges if z[j] != z[k]))


def cut_values(graph: Graph, indices: np.ndarray) -> np.ndarray:
    """Vectorized cut values for an array of basis-state indices."""
    indices = np.asarray(indices, dtype=np.int64)
    values = np.zeros(indices.shape, dtype=float)
    for j, k, w in graph.edges:
        values += w * (((indices >> j) ^ (indices >> k)) & 1)
    return values


def brute_force_maxcut(graph: Graph, chunk_size: int = 1 << 20) -> MaxCutSolution:
    """Exhaustive MaxCut over the 2^(n-1) partitions with vertex n-1 fixed to 0."""
    require_capacity(graph.n, get_settings().max_bruteforce_vertices, "brute_force_maxcut")

    half = 1 << (graph.n - 1)
    best = -np.inf
    best_indices: list[np.ndarray] = []
    for start in range(0, half, chunk_size):
        indices = np.arange(start, min(start + chunk_size, half), dtype=np.int64)
        values = cut_values(graph, indices)
        chunk_best = float(values.max())
        if chunk_best > best + 1e-12:
            best = chunk_best
            best_indices = []
        if chunk_best >= best - 1e-12:
            best_indices.append(indices[values >= best - 1e-12])

    full_mask = (1 << graph.n) - 1
    found = np.concatenate(best_indices)
    optimal = np.unique(np.concatenate([found, found ^ full_mask]))
    return MaxCutSolution(
        max_cut_value=best,
        optimal_bitstrings=frozenset(index_to_bitstring(int(i), graph.n) for i in optimal),
        min_energy=-best,
        optimal_indices=tuple(int(i) for i in optimal),
    )


# ——— Serialization ———


def format_edge_list(graph: Graph) -> str:
    """Edge-list text: header ``n <count>`` then ``j k [w]`` per line."""
    lines = [f"n {graph.n}"]
    for j, k, w in graph.edges:
        lines.append(f"{j} {k}" if w == 1.0 else f"{j} {k} {w:.17g}")
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    n: int | None = None
    edges: list[tuple[int, int, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "n":
                n = int(parts[1])
            elif len(parts) in (2, 3):
                w = float(parts[2]) if len(parts) == 3 else 1.0
                edges.append((int(parts[0]), int(parts[1]), w))
            else:
                raise ValueError(line)
        except (ValueError, IndexError) as e:
            raise SerializationError(
                f"malformed edge-list line {lineno}", {"line": raw}
            ) from e
    if n is None:
        raise SerializationError("edge list is missing its 'n <count>' header")
    return Graph.from_edges(n, edges)


def write_edge_list(graph: Graph, path: Path) -> None:
    atomic_write_text(path, format_edge_list(graph))


def read_edge_list(path: Path) -> Graph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SerializationError(f"cannot read edge list {path}: {e}") from e
    return parse_edge_list(text)


def graph_hash(graph: Graph) -> str:
    """sha256 of the canonical edge-list text."""
    return hashlib.sha256(format_edge_list(graph).encode("utf-8")).hexdigest()

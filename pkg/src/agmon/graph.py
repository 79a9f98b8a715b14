"""Finite simple connected graphs, vertex potentials, generators and file I/O.

Vertices are the integers ``0 .. n-1``; the same indices are used in every
file format. Graphs with a single vertex are rejected because a vertex of
degree zero has no place in the decay estimates (they divide by deg(v)).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._io import atomic_write_text
from .errors import (
    AsymmetricAdjacency,
    Disconnected,
    DuplicateEdge,
    InputError,
    IsolatedVertex,
    ParseError,
    RetriesExhausted,
    SchemaViolation,
    SelfLoop,
    SizeMismatch,
    SizeTooSmall,
)

__all__ = [
    "Graph",
    "validate",
    "as_potential",
    "gen_path",
    "gen_cycle",
    "gen_grid",
    "gen_tree_hub",
    "tree_hub_levels",
    "gen_random_connected",
    "load_graph",
    "save_graph",
    "load_edge_list",
]


@dataclass(frozen=True, eq=True)
class Graph:
    """Undirected simple graph stored as sorted adjacency lists.

    Build instances with :meth:`from_edges` or :meth:`from_adjacency`,
    which validate; the bare constructor does not.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(nb) for nb in self.adjacency)

    @cached_property
    def degree_array(self) -> np.ndarray:
        deg = np.array(self.degrees, dtype=np.int64)
        deg.flags.writeable = False
        return deg

    @cached_property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``u < v``, lexicographically sorted."""
        pairs = [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        arr.flags.writeable = False
        return arr

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Compressed adjacency ``(offsets, targets)``; neighbours of ``v`` are
        ``targets[offsets[v]:offsets[v+1]]``."""
        offsets = np.zeros(self.n + 1, dtype=np.int64)
        offsets[1:] = np.cumsum(self.degrees)
        targets = np.fromiter(
            (w for nb in self.adjacency for w in nb), dtype=np.int64, count=int(offsets[-1])
        )
        return offsets, targets

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        if self.n_edges:
            u, v = self.edges.T
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Iterable[int]]) -> "Graph":
        adj = tuple(tuple(sorted(int(w) for w in nb)) for nb in adjacency)
        g = cls(n=len(adj), adjacency=adj)
        validate(g)
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        n = int(n)
        if n < 1:
            raise SizeTooSmall(f"graph needs at least one vertex, got n={n}")
        adj: list[list[int]] = [[] for _ in range(n)]
        for edge in edges:
            u, v = int(edge[0]), int(edge[1])
            for x in (u, v):
                if not 0 <= x < n:
                    raise SchemaViolation(f"edge ({u},{v}) has vertex outside 0..{n - 1}", field="edges")
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}", vertex=u, edge=(u, v))
            adj[u].append(v)
            adj[v].append(u)
        return cls.from_adjacency(adj)


def validate(graph: Graph) -> None:
    """Check the structural invariants of ``graph``.

    Raises the specific :class:`~agmon.errors.GraphError` subclass naming the
    first offending vertex or edge. Connectivity is established by BFS.
    """
    n = graph.n
    adj = graph.adjacency
    if n != len(adj):
        raise SizeMismatch(f"n={n} but {len(adj)} adjacency lists")
    if n < 2:
        raise IsolatedVertex("a single vertex has degree 0", vertex=0)
    neighbour_sets = []
    for v, nb in enumerate(adj):
        seen = set()
        for w in nb:
            if not 0 <= w < n:
                raise SchemaViolation(f"vertex {v} lists neighbour {w} outside 0..{n - 1}", field="adjacency")
            if w == v:
                raise SelfLoop(f"self-loop at vertex {v}", vertex=v, edge=(v, v))
            if w in seen:
                raise DuplicateEdge(f"edge ({min(v, w)},{max(v, w)}) listed twice", edge=(min(v, w), max(v, w)))
            seen.add(w)
        if list(nb) != sorted(nb):
            raise SchemaViolation(f"adjacency of vertex {v} is not sorted", field="adjacency")
        neighbour_sets.append(seen)
    for v, nb in enumerate(adj):
        for w in nb:
            if v not in neighbour_sets[w]:
                raise AsymmetricAdjacency(f"edge ({v},{w}) present but ({w},{v}) missing", edge=(v, w))
    for v, nb in enumerate(adj):
        if not nb:
            raise IsolatedVertex(f"vertex {v} has no neighbours", vertex=v)
    seen_bfs = [False] * n
    seen_bfs[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if not seen_bfs[w]:
                seen_bfs[w] = True
                queue.append(w)
    if not all(seen_bfs):
        first = seen_bfs.index(False)
        raise Disconnected(f"vertex {first} is not reachable from vertex 0", vertex=first)


def as_potential(values, n: int | None = None) -> np.ndarray:
    """Return ``values`` as a read-only float64 vector of finite numbers."""
    w = np.array(values, dtype=np.float64).reshape(-1)
    if n is not None and w.shape[0] != n:
        raise SizeMismatch(f"potential has {w.shape[0]} entries, graph has {n} vertices")
    if not np.all(np.isfinite(w)):
        bad = int(np.flatnonzero(~np.isfinite(w))[0])
        raise InputError(f"potential entry {bad} is not finite")
    w.flags.writeable = False
    return w


# generators ----------------------------------------------------------------

def gen_path(n: int) -> Graph:
    if n < 2:
        raise SizeTooSmall(f"path needs n >= 2, got {n}")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise SizeTooSmall(f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def gen_grid(rows: int, cols: int) -> Graph:
    """Rectangular grid; vertex ``r * cols + c`` sits at row ``r``, column ``c``."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise SizeTooSmall(f"grid {rows}x{cols} has fewer than two vertices")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def tree_hub_levels(q: int, k: int) -> np.ndarray:
    """Level of every vertex of :func:`gen_tree_hub` ``(q, k)``; the hub gets ``k + 1``."""
    sizes = [q**i for i in range(k + 1)]
    levels = np.repeat(np.arange(k + 1), sizes)
    return np.append(levels, k + 1)


def gen_tree_hub(q: int, k: int) -> tuple[Graph, int]:
    """Complete q-ary tree of depth ``k`` whose leaves all attach to one extra vertex.

    Vertices are numbered level by level (root ``0``); the extra vertex is
    the last index and is returned alongside the graph.

    >>> g, hub = gen_tree_hub(3, 2)
    >>> g.n, hub, g.degrees[hub]
    (14, 13, 9)
    """
    if q < 2 or k < 1:
        raise SizeTooSmall(f"tree-hub needs q >= 2 and k >= 1, got q={q}, k={k}")
    n_tree = (q ** (k + 1) - 1) // (q - 1)
    hub = n_tree
    edges = []
    for parent in range(n_tree - q**k):
        for j in range(q):
            edges.append((parent, q * parent + 1 + j))
    first_leaf = n_tree - q**k
    edges.extend((leaf, hub) for leaf in range(first_leaf, n_tree))
    return Graph.from_edges(n_tree + 1, edges), hub


def gen_random_connected(
    n: int, edge_prob: float, seed: int, max_retries: int = 1000
) -> Graph:
    """Erdos-Renyi G(n, p) sample conditioned on connectivity.

    Uses numpy's PCG64 generator seeded with ``seed``. Each attempt draws one
    uniform per unordered pair ``(u, v)``, ``u < v``, in lexicographic order
    and keeps the edge when the draw is below ``edge_prob``; disconnected
    samples are discarded and the same stream continues, up to
    ``max_retries`` attempts.
    """
    if n < 2:
        raise SizeTooSmall(f"random graph needs n >= 2, got {n}")
    if not 0.0 < edge_prob <= 1.0:
        raise InputError(f"edge probability must lie in (0, 1], got {edge_prob}")
    rng = np.random.Generator(np.random.PCG64(seed))
    iu, iv = np.triu_indices(n, k=1)
    for _ in range(max_retries):
        keep = rng.random(iu.shape[0]) < edge_prob
        edges = np.column_stack([iu[keep], iv[keep]])
        try:
            return Graph.from_edges(n, edges)
        except (Disconnected, IsolatedVertex):
            continue
    raise RetriesExhausted(
        f"no connected sample of G({n}, {edge_prob}) in {max_retries} attempts"
    )


# file I/O ------------------------------------------------------------------

def save_graph(graph: Graph, potential, path) -> None:
    w = as_potential(potential, graph.n)
    doc = {
        "n": graph.n,
        "edges": graph.edges.tolist(),
        "potential": [float(x) for x in w],
    }
    atomic_write_text(path, json.dumps(doc) + "\n")


def _require(doc: dict, key: str, kind, what: str):
    if key not in doc:
        raise SchemaViolation(f"missing required field {key!r}", field=key)
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaViolation(f"field {key!r} must be {what}", field=key)
    return value


def load_graph(path) -> tuple[Graph, np.ndarray]:
    """Read a graph JSON file ``{"n": ..., "edges": [[u, v], ...], "potential": [...]}``."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation("top level must be a JSON object")
    n = _require(doc, "n", int, "an integer")
    edges = _require(doc, "edges", list, "a list of [u, v] pairs")
    potential = _require(doc, "potential", list, "a list of numbers")
    pairs = []
    for i, e in enumerate(edges):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)
        ):
            raise SchemaViolation(f"edges[{i}] must be a pair of integers", field=f"edges[{i}]")
        u, v = e
        if u == v:
            raise SelfLoop(f"edges[{i}]: self-loop at vertex {u}", vertex=u, edge=(u, v))
        if u > v:
            raise SchemaViolation(f"edges[{i}] = [{u}, {v}] must satisfy u < v", field=f"edges[{i}]")
        pairs.append((u, v))
    for i, x in enumerate(potential):
        if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
            raise SchemaViolation(f"potential[{i}] must be a finite number", field=f"potential[{i}]")
    if len(potential) != n:
        raise SchemaViolation(f"potential has {len(potential)} entries, n = {n}", field="potential")
    graph = Graph.from_edges(n, pairs)
    return graph, as_potential(potential, n)


def load_edge_list(edge_path, potential_path) -> tuple[Graph, np.ndarray]:
    """Read a whitespace ``u v`` edge list plus a one-value-per-line potential file.

    Blank lines and ``#`` comments are skipped. The vertex count is the
    length of the potential file.
    """
    pairs = []
    for lineno, line in enumerate(Path(edge_path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if len(parts) != 2:
                raise ValueError
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(f"{edge_path}: line {lineno}: expected 'u v', got {line!r}") from None
    values = []
    for lineno, line in enumerate(Path(potential_path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ParseError(f"{potential_path}: line {lineno}: not a number: {line!r}") from None
    n = len(values)
    seen = set()
    for u, v in pairs:
        key = (min(u, v), max(u, v))
        if u != v and key in seen:
            raise DuplicateEdge(f"edge {key} listed twice", edge=key)
        seen.add(key)
    graph = Graph.from_edges(n, pairs)
    return graph, as_potential(values, n)

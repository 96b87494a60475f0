"""Problem instances: simple graphs and set-cover systems.

Both instance types are immutable and validated on construction. Graph edges
are kept in lexicographic order and an edge's index is its position in that
order; encodings and post-processing rely on this to map edge variables.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import GenerationError, ParameterError, ParseError

Edge = tuple[int, int]

#: Resamples allowed before a random generator gives up.
MAX_RETRIES = 10_000


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph without isolated vertices."""

    n_vertices: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        n = self.n_vertices
        if n < 1:
            raise ParameterError(f"graph needs at least one vertex, got n={n}")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ParameterError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) has a vertex outside [0, {n})")
            if u > v:
                raise ParameterError(f"edge ({u}, {v}) is not stored as (min, max)")
            if (u, v) in seen:
                raise ParameterError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        if list(self.edges) != sorted(self.edges):
            raise ParameterError("edges must be in lexicographic order")
        covered = {x for e in self.edges for x in e}
        isolated = [v for v in range(n) if v not in covered]
        if isolated:
            raise ParameterError(f"isolated vertex {isolated[0]}")

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Build a graph from edges given in any order or orientation."""
        canon = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            canon.append((min(u, v), max(u, v)))
        return cls(int(n_vertices), tuple(sorted(canon)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        adj = [set() for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def incident_edges(self) -> tuple[tuple[int, ...], ...]:
        """Edge indices incident to each vertex, ascending."""
        inc = [[] for _ in range(self.n_vertices)]
        for k, (u, v) in enumerate(self.edges):
            inc[u].append(k)
            inc[v].append(k)
        return tuple(tuple(i) for i in inc)

    @cached_property
    def edge_index(self) -> dict:
        return {e: k for k, e in enumerate(self.edges)}

    @cached_property
    def _edge_nbrs(self) -> tuple[frozenset, ...]:
        out = []
        for k, (u, v) in enumerate(self.edges):
            s = set(self.incident_edges[u]) | set(self.incident_edges[v])
            s.discard(k)
            out.append(frozenset(s))
        return tuple(out)

    def is_connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for u in self.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == self.n_vertices

    def degree(self, v: int) -> int:
        return len(neighbors(self, v))


@dataclass(frozen=True)
class SetCoverInstance:
    """Universe ``{0..universe_size-1}`` and an ordered family of subsets."""

    universe_size: int
    family: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.universe_size
        if n < 1:
            raise ParameterError("universe must be non-empty")
        if not self.family:
            raise ParameterError("family must be non-empty")
        union = set()
        for i, subset in enumerate(self.family):
            if not subset:
                raise ParameterError(f"family member {i} is empty")
            if list(subset) != sorted(set(subset)):
                raise ParameterError(f"family member {i} is not sorted and duplicate-free")
            if subset[0] < 0 or subset[-1] >= n:
                raise ParameterError(f"family member {i} has an element outside [0, {n})")
            union.update(subset)
        if len(union) != n:
            missing = min(set(range(n)) - union)
            raise ParameterError(f"family does not cover the universe (element {missing} missing)")

    @classmethod
    def from_family(cls, universe_size: int, family: Iterable[Iterable[int]]) -> "SetCoverInstance":
        return cls(int(universe_size), tuple(tuple(sorted({int(a) for a in s})) for s in family))

    @property
    def n_subsets(self) -> int:
        return len(self.family)

    @cached_property
    def containing(self) -> tuple[tuple[int, ...], ...]:
        """For each element, the ascending indices of family members holding it."""
        out = [[] for _ in range(self.universe_size)]
        for i, subset in enumerate(self.family):
            for a in subset:
                out[a].append(i)
        return tuple(tuple(c) for c in out)


Instance = Union[Graph, SetCoverInstance]


def neighbors(g: Graph, v: int) -> frozenset:
    """Vertices adjacent to ``v``."""
    if not 0 <= v < g.n_vertices:
        raise ParameterError(f"vertex {v} out of range [0, {g.n_vertices})")
    return g.adjacency[v]


def edge_neighbors(g: Graph, e: int) -> frozenset:
    """Indices of edges sharing exactly one endpoint with edge ``e``."""
    if not 0 <= e < g.n_edges:
        raise ParameterError(f"edge index {e} out of range [0, {g.n_edges})")
    return g._edge_nbrs[e]


# -- small named graphs used throughout the tests -------------------------


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    """Star with center 0 and leaves ``1..leaves``."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# -- random generators ------------------------------------------------------


def _rng(seed: int, attempt: int) -> np.random.Generator:
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng([int(seed), attempt])


def random_regular_graph(n: int, d: int, seed: int) -> Graph:
    """Connected ``d``-regular graph on ``n`` vertices from the pairing model.

    Pairings containing a self-loop or a repeated edge are rejected, as are
    disconnected outcomes. Attempt ``k`` draws from a generator seeded with
    ``(seed, k)``, so the result is a pure function of the arguments.
    """
    if d < 1 or d >= n:
        raise ParameterError(f"need 1 <= d < n, got n={n}, d={d}")
    if (n * d) % 2:
        raise ParameterError(f"n*d must be even, got n={n}, d={d}")
    stubs = np.repeat(np.arange(n), d)
    for attempt in range(MAX_RETRIES):
        perm = _rng(seed, attempt).permutation(stubs).reshape(-1, 2)
        perm.sort(axis=1)
        if np.any(perm[:, 0] == perm[:, 1]):
            continue
        edges = {(int(u), int(v)) for u, v in perm}
        if len(edges) != len(perm):
            continue
        g = Graph.from_edges(n, edges)
        if g.is_connected():
            return g
    raise GenerationError(f"no connected {d}-regular graph on {n} vertices after {MAX_RETRIES} attempts")


def random_connected_graph(n: int, edge_prob: float, seed: int) -> Graph:
    """Connected Erdos-Renyi ``G(n, edge_prob)`` sample, resampled until connected."""
    if n < 2:
        raise ParameterError("a connected graph without isolated vertices needs n >= 2")
    if not 0 < edge_prob <= 1:
        raise ParameterError(f"edge_prob must lie in (0, 1], got {edge_prob}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for attempt in range(MAX_RETRIES):
        keep = _rng(seed, attempt).random(len(pairs)) < edge_prob
        chosen = [p for p, k in zip(pairs, keep) if k]
        covered = {x for e in chosen for x in e}
        if len(covered) < n:
            continue
        g = Graph.from_edges(n, chosen)
        if g.is_connected():
            return g
    raise GenerationError(f"no connected G({n}, {edge_prob}) sample after {MAX_RETRIES} attempts")


def random_set_cover(universe_size: int, n_subsets: int, seed: int, density: float = 0.4) -> SetCoverInstance:
    """Random family of ``n_subsets`` non-empty subsets whose union is the universe."""
    if universe_size < 1 or n_subsets < 1:
        raise ParameterError("universe_size and n_subsets must be positive")
    for attempt in range(MAX_RETRIES):
        rng = _rng(seed, attempt)
        member = rng.random((n_subsets, universe_size)) < density
        if not member.any(axis=0).all() or not member.any(axis=1).all():
            continue
        family = [np.flatnonzero(row).tolist() for row in member]
        return SetCoverInstance.from_family(universe_size, family)
    raise GenerationError("could not draw a covering family")


# -- JSON instance format ---------------------------------------------------


def parse_instance(text: Union[bytes, str]) -> Instance:
    """Parse the JSON instance format into a validated instance."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("instance must be a JSON object")
    kind = doc.get("type")
    try:
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ParseError(f"'n' must be an integer, got {n!r}")
        if kind == "graph":
            edges = doc["edges"]
            for e in edges:
                if len(e) != 2 or not all(isinstance(x, int) for x in e):
                    raise ParseError(f"edge {e!r} is not a pair of integers")
            canon = [tuple(sorted(e)) for e in edges]
            if len(set(canon)) != len(canon):
                raise ParseError("invariant violated: duplicate edge")
            return Graph.from_edges(n, canon)
        if kind == "setcover":
            family = doc["family"]
            for s in family:
                if not all(isinstance(x, int) for x in s):
                    raise ParseError(f"family member {s!r} contains a non-integer")
                if len(set(s)) != len(s):
                    raise ParseError(f"family member {s!r} repeats an element")
            return SetCoverInstance.from_family(n, family)
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from exc
    except TypeError as exc:
        raise ParseError(f"wrong field type: {exc}") from exc
    except ParameterError as exc:
        raise ParseError(f"invariant violated: {exc}") from exc
    raise ParseError(f"unknown instance type {kind!r}")


def serialize_instance(inst: Instance) -> bytes:
    """Canonical JSON encoding; ``parse_instance`` inverts it."""
    if isinstance(inst, Graph):
        doc = {"type": "graph", "n": inst.n_vertices, "edges": [list(e) for e in inst.edges]}
    elif isinstance(inst, SetCoverInstance):
        doc = {"type": "setcover", "n": inst.universe_size, "family": [list(s) for s in inst.family]}
    else:
        raise ParameterError(f"not an instance: {type(inst).__name__}")
    return (json.dumps(doc) + "\n").encode("utf-8")

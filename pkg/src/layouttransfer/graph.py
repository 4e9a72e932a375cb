"""Graph data model, subgraph machinery, and the JSON codec shared by all modules.

Graphs are undirected, simple, and carry a 2D layout. Node order is significant:
the solvers are deterministic only because the codec preserves it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Base class for graph validation/codec errors. ``code`` identifies the failure."""

    code = "graph-error"

    def __init__(self, message: str):
        super().__init__(f"{self.code}: {message}")


class MalformedGraphError(GraphError):
    code = "malformed-syntax"


class DanglingEndpointError(GraphError):
    code = "dangling-endpoint"


class DuplicateNodeError(GraphError):
    code = "duplicate-id"


class NonFiniteCoordinateError(GraphError):
    code = "non-finite-coordinate"


class UnknownNodeError(GraphError):
    code = "unknown-node"


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with a 2D layout.

    ``node_ids`` keeps file order; ``positions`` is an (n, 2) float array aligned
    with it; ``edges`` holds index pairs (i, j) with i != j, deduplicated.
    Instances are immutable: produce new graphs instead of mutating.
    """

    node_ids: tuple[str, ...]
    positions: np.ndarray  # shape (n, 2), read-only
    edges: tuple[tuple[int, int], ...]
    _index: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.shape != (len(self.node_ids), 2):
            raise MalformedGraphError(
                f"positions shape {pos.shape} does not match {len(self.node_ids)} nodes"
            )
        pos = pos.copy()
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "node_ids", tuple(self.node_ids))
        object.__setattr__(self, "_index", {nid: i for i, nid in enumerate(self.node_ids)})
        if len(self._index) != len(self.node_ids):
            raise DuplicateNodeError("duplicate node id")
        if not np.all(np.isfinite(pos)):
            raise NonFiniteCoordinateError("non-finite coordinate")
        seen = set()
        canon = []
        for a, b in self.edges:
            if not (0 <= a < len(self.node_ids) and 0 <= b < len(self.node_ids)):
                raise DanglingEndpointError(f"edge index ({a},{b}) out of range")
            if a == b:
                continue  # self-loops dropped
            key = (min(a, b), max(a, b))
            if key in seen:
                continue
            seen.add(key)
            canon.append(key)
        # canonical edge order (by sorted endpoint ids) so parse/serialize round-trips
        canon.sort(key=lambda e: tuple(sorted((self.node_ids[e[0]], self.node_ids[e[1]]))))
        object.__setattr__(self, "edges", tuple(canon))

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def index_of(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._index

    def position_of(self, node_id: str) -> np.ndarray:
        return self.positions[self.index_of(node_id)]

    def degree(self, i: int) -> int:
        return sum(1 for a, b in self.edges if a == i or b == i)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def edge_ids(self) -> list[tuple[str, str]]:
        return [(self.node_ids[a], self.node_ids[b]) for a, b in self.edges]

    def with_positions(self, positions: np.ndarray) -> "Graph":
        return Graph(self.node_ids, np.asarray(positions, dtype=float), self.edges)

    def bbox_diagonal(self) -> float:
        if self.n == 0:
            return 0.0
        span = self.positions.max(axis=0) - self.positions.min(axis=0)
        return float(np.hypot(span[0], span[1]))

    def max_edge_length(self) -> float:
        if not self.edges:
            return 0.0
        p = self.positions
        return max(float(np.linalg.norm(p[a] - p[b])) for a, b in self.edges)

    @staticmethod
    def build(nodes: Sequence[tuple[str, float, float]],
              edges: Iterable[tuple[str, str]]) -> "Graph":
        """Construct from (id, x, y) triples and id-pair edges."""
        ids = tuple(nid for nid, _, _ in nodes)
        index = {}
        for i, nid in enumerate(ids):
            if nid in index:
                raise DuplicateNodeError(nid)
            index[nid] = i
        pos = np.array([[x, y] for _, x, y in nodes], dtype=float).reshape(len(ids), 2)
        idx_edges = []
        for a, b in edges:
            if a not in index:
                raise DanglingEndpointError(a)
            if b not in index:
                raise DanglingEndpointError(b)
            idx_edges.append((index[a], index[b]))
        return Graph(ids, pos, tuple(idx_edges))


@dataclass(frozen=True)
class Structure:
    """An ordered, non-empty node subset of an owning graph. Induced edges are
    always derived from the owner, never stored."""

    graph_ref: str
    node_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "node_ids", tuple(self.node_ids))
        if not self.node_ids:
            raise MalformedGraphError("empty structure")
        if len(set(self.node_ids)) != len(self.node_ids):
            raise DuplicateNodeError("duplicate node id in structure")

    def validate_against(self, g: Graph) -> None:
        for nid in self.node_ids:
            if not g.has_node(nid):
                raise UnknownNodeError(nid)


# -- codec -----------------------------------------------------------------

def _fmt(x: float) -> str:
    # 17 significant digits round-trips IEEE doubles exactly
    return format(float(x), ".17g")


def parse_graph(data: bytes | str) -> Graph:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise MalformedGraphError(str(e)) from None
    if not isinstance(obj, dict) or "nodes" not in obj:
        raise MalformedGraphError("expected object with 'nodes' and 'edges'")
    nodes = []
    for nd in obj.get("nodes", []):
        try:
            nid, x, y = nd["id"], float(nd["x"]), float(nd["y"])
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedGraphError(f"bad node entry: {e}") from None
        if not (np.isfinite(x) and np.isfinite(y)):
            raise NonFiniteCoordinateError(str(nid))
        nodes.append((str(nid), x, y))
    edges = []
    for ed in obj.get("edges", []):
        try:
            edges.append((str(ed["source"]), str(ed["target"])))
        except (KeyError, TypeError) as e:
            raise MalformedGraphError(f"bad edge entry: {e}") from None
    return Graph.build(nodes, edges)


def serialize_graph(g: Graph) -> bytes:
    """Deterministic codec: nodes in stored order, edges sorted by (min-id, max-id),
    floats at 17 significant digits."""
    parts = ['{"nodes":[']
    parts.append(",".join(
        '{"id":%s,"x":%s,"y":%s}' % (json.dumps(nid), _fmt(x), _fmt(y))
        for nid, (x, y) in zip(g.node_ids, g.positions)
    ))
    parts.append('],"edges":[')
    named = sorted(
        (min(g.node_ids[a], g.node_ids[b]), max(g.node_ids[a], g.node_ids[b]))
        for a, b in g.edges
    )
    parts.append(",".join(
        '{"source":%s,"target":%s}' % (json.dumps(a), json.dumps(b)) for a, b in named
    ))
    parts.append("]}")
    return "".join(parts).encode("utf-8")


def parse_structure(data: bytes | str) -> Structure:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise MalformedGraphError(str(e)) from None
    try:
        return Structure(str(obj.get("graph", "")), tuple(str(n) for n in obj["nodes"]))
    except (KeyError, TypeError) as e:
        raise MalformedGraphError(f"bad structure: {e}") from None


def serialize_structure(s: Structure) -> bytes:
    return json.dumps({"graph": s.graph_ref, "nodes": list(s.node_ids)},
                      separators=(",", ":")).encode("utf-8")


# -- subgraph machinery ----------------------------------------------------

def induced_subgraph(g: Graph, s: Structure) -> Graph:
    """Subgraph on exactly s's nodes with every g-edge internal to s; positions
    copied bitwise."""
    s.validate_against(g)
    keep = {g.index_of(nid) for nid in s.node_ids}
    nodes = [(nid, g.positions[g.index_of(nid)][0], g.positions[g.index_of(nid)][1])
             for nid in s.node_ids]
    edges = [(g.node_ids[a], g.node_ids[b]) for a, b in g.edges
             if a in keep and b in keep]
    return Graph.build(nodes, edges)


def connected_components(g: Graph) -> list[set[str]]:
    """Maximal connected node sets, ordered by smallest member id."""
    adj = g.adjacency()
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack, comp = [start], set()
        seen[start] = True
        while stack:
            v = stack.pop()
            comp.add(g.node_ids[v])
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(comp)
    comps.sort(key=lambda c: min(c))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(connected_components(g)) == 1


def bfs_distances(g: Graph) -> np.ndarray:
    """All-pairs unweighted shortest-path lengths; inf where unreachable."""
    from collections import deque

    adj = g.adjacency()
    n = g.n
    dist = np.full((n, n), np.inf)
    for src in range(n):
        dist[src, src] = 0
        dq = deque([src])
        while dq:
            v = dq.popleft()
            for u in adj[v]:
                if not np.isfinite(dist[src, u]):
                    dist[src, u] = dist[src, v] + 1
                    dq.append(u)
    return dist

"""Merging modified substructures back into the full layout.

Only the surroundings (nodes within distance d of the modified structure) are
re-optimized; everything further away is left bitwise untouched.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, Structure, induced_subgraph
from .transfer import DeformParams, TransferError, deform


@dataclass(frozen=True)
class MergeParams:
    d: float | None = None  # surroundings radius; None = max edge length of the graph
    deform_params: DeformParams = field(default_factory=DeformParams)
    metric: str = "euclidean"  # or "graph" (BFS hop count)

    def __post_init__(self):
        if self.d is not None and self.d <= 0:
            raise TransferError("surroundings radius d must be positive")
        if self.metric not in ("euclidean", "graph"):
            raise TransferError("metric must be 'euclidean' or 'graph'")


def surroundings(g: Graph, s: Structure, d: float, metric: str = "euclidean") -> list[str]:
    """Nodes outside s whose distance to the nearest node of s is < d.
    Euclidean layout distance by default; 'graph' uses BFS hop count."""
    s.validate_against(g)
    inside = {g.index_of(nid) for nid in s.node_ids}
    if metric == "graph":
        from collections import deque

        adj = g.adjacency()
        dist = {i: 0 for i in inside}
        dq = deque(inside)
        while dq:
            v = dq.popleft()
            if dist[v] + 1 >= d:
                continue
            for u in adj[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    dq.append(u)
        near = [i for i, dd in dist.items() if i not in inside]
    else:
        s_pos = g.positions[sorted(inside)]
        near = []
        for i in range(g.n):
            if i in inside:
                continue
            if np.min(np.linalg.norm(s_pos - g.positions[i], axis=1)) < d:
                near.append(i)
    return [g.node_ids[i] for i in sorted(near)]


def merge_with_optimization(g: Graph, modified: Graph,
                            p: MergeParams | None = None) -> Graph:
    """Fix the modified structure's nodes at their new positions and re-optimize
    its surroundings with the deformation solver; all other nodes unchanged."""
    return merge_many(g, [modified], p)


def merge_many(g: Graph, modified_list: list[Graph],
               p: MergeParams | None = None) -> Graph:
    """Merge several modified substructures. Structures whose regions
    (structure + surroundings) overlap are re-optimized jointly in one solve;
    disjoint regions merge independently in the given order."""
    if p is None:
        p = MergeParams()
    d = p.d if p.d is not None else g.max_edge_length()
    if d <= 0:
        d = max(g.bbox_diagonal(), 1.0)

    jobs = []  # (region node-ids, anchor dict id->goal)
    for modified in modified_list:
        for nid in modified.node_ids:
            if not g.has_node(nid):
                raise TransferError(f"modified structure node {nid!r} not in graph")
        s = Structure("g", modified.node_ids)
        anchors = {nid: modified.position_of(nid) for nid in modified.node_ids}
        if all(np.array_equal(g.position_of(nid), goal) for nid, goal in anchors.items()):
            continue  # no modification: exact no-op keeps merge idempotent
        region = list(modified.node_ids) + surroundings(g, s, d, p.metric)
        jobs.append((region, anchors))

    # group jobs with overlapping regions for a joint solve
    groups: list[tuple[set[str], dict]] = []
    for region, anchors in jobs:
        region_set = set(region)
        merged_anchors = dict(anchors)
        keep = []
        for gset, ganch in groups:
            if gset & region_set:
                region_set |= gset
                merged_anchors.update(ganch)
            else:
                keep.append((gset, ganch))
        keep.append((region_set, merged_anchors))
        groups = keep

    positions = g.positions.copy()
    for region_set, anchors in groups:
        region_ids = tuple(sorted(region_set))
        current = g.with_positions(positions)
        sub = induced_subgraph(current, Structure("g", region_ids))
        if sub.n >= 2 and sub.bbox_diagonal() > 0:
            anchor_list = [(nid, goal) for nid, goal in anchors.items()]
            result = deform(sub, anchor_list, p.deform_params)
            for nid in region_ids:
                positions[g.index_of(nid)] = result.graph.position_of(nid)
        # structure nodes land exactly on their modified positions
        for nid, goal in anchors.items():
            positions[g.index_of(nid)] = goal
    return g.with_positions(positions)

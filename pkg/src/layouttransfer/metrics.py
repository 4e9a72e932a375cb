"""Readability measurements for comparing layouts before and after a transfer:
crosslessness, minimum-angle metric, edge-length variation, and a shape-based
metric built on Gabriel-graph neighborhoods.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph


class MetricError(ValueError):
    pass


_EPS = 1e-12


@dataclass(frozen=True)
class ReadabilityScores:
    crosslessness: float
    minimum_angle: float
    edge_length_variation: float
    shape_based: float | None = None  # pairwise; only set on "after" scores

    def as_dict(self) -> dict:
        out = {
            "crosslessness": self.crosslessness,
            "minimum_angle": self.minimum_angle,
            "edge_length_variation": self.edge_length_variation,
        }
        if self.shape_based is not None:
            out["shape_based"] = self.shape_based
        return out


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_cross(p1, p2, p3, p4, eps: float = _EPS) -> bool:
    """True when the open segments p1-p2 and p3-p4 properly intersect, or
    overlap collinearly in more than a point. Shared endpoints do not count."""
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and \
       ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)):
        return True
    if abs(d1) <= eps and abs(d2) <= eps and abs(d3) <= eps and abs(d4) <= eps:
        # collinear: crossing iff the overlap is longer than a point
        axis = 0 if abs(p2[0] - p1[0]) >= abs(p2[1] - p1[1]) else 1
        lo1, hi1 = sorted((p1[axis], p2[axis]))
        lo2, hi2 = sorted((p3[axis], p4[axis]))
        return min(hi1, hi2) - max(lo1, lo2) > eps
    return False


def crossing_count(g: Graph) -> int:
    """Pairs of edges whose interiors intersect; edge pairs sharing an endpoint
    are skipped."""
    pos = g.positions
    edges = g.edges
    count = 0
    for a in range(len(edges)):
        i1, j1 = edges[a]
        for b in range(a + 1, len(edges)):
            i2, j2 = edges[b]
            if {i1, j1} & {i2, j2}:
                continue
            if segments_cross(pos[i1], pos[j1], pos[i2], pos[j2]):
                count += 1
    return count


def crosslessness(g: Graph) -> float:
    """1 - sqrt(c / c_max): 1.0 means crossing-free. c_max discounts edge pairs
    that share an endpoint."""
    m = len(g.edges)
    if m < 1:
        raise MetricError("need at least one edge")
    deg = g.degrees()
    c_max = m * (m - 1) / 2 - sum(d * (d - 1) for d in deg) / 2
    if c_max <= 0:
        return 1.0
    return 1.0 - math.sqrt(crossing_count(g) / c_max)


def minimum_angle_metric(g: Graph) -> float:
    """Mean closeness of each node's smallest incident angle to the ideal
    360/degree spacing; isolated nodes are excluded, degree-1 nodes contribute
    no deviation."""
    adj = g.adjacency()
    deviations = []
    for v in range(g.n):
        nbrs = adj[v]
        if not nbrs:
            continue
        if len(nbrs) == 1:
            deviations.append(0.0)
            continue
        angles = sorted(
            math.atan2(g.positions[u][1] - g.positions[v][1],
                       g.positions[u][0] - g.positions[v][0]) for u in nbrs)
        gaps = [angles[i + 1] - angles[i] for i in range(len(angles) - 1)]
        gaps.append(2 * math.pi - (angles[-1] - angles[0]))
        theta_min = min(gaps)
        theta_ideal = 2 * math.pi / len(nbrs)
        deviations.append(abs((theta_ideal - theta_min) / theta_ideal))
    if not deviations:
        raise MetricError("no nodes with incident edges")
    return 1.0 - float(np.mean(deviations))


def edge_length_variation(g: Graph) -> float:
    """Coefficient of variation of edge lengths, normalized by sqrt(|E|-1);
    0 means perfectly uniform lengths."""
    m = len(g.edges)
    if m < 1:
        raise MetricError("need at least one edge")
    if m == 1:
        return 0.0
    lengths = np.array([np.linalg.norm(g.positions[a] - g.positions[b])
                        for a, b in g.edges])
    mean = float(lengths.mean())
    if mean <= 0:
        return 0.0
    cv = float(lengths.std()) / mean
    return cv / math.sqrt(m - 1)


def gabriel_neighbors(points: np.ndarray) -> list[set[int]]:
    """Neighbor sets of the Gabriel graph: i-j linked iff no third point lies
    inside the closed disc with diameter i-j."""
    n = len(points)
    d2 = np.sum((points[:, None, :] - points[None, :, :]) ** 2, axis=2)
    nbrs: list[set[int]] = [set() for _ in range(n)]
    scale = max(float(d2.max()), 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            ok = True
            for k in range(n):
                if k == i or k == j:
                    continue
                if d2[i, k] + d2[j, k] < d2[i, j] - _EPS * scale:
                    ok = False
                    break
            if ok:
                nbrs[i].add(j)
                nbrs[j].add(i)
    return nbrs


def shape_based_metric(g_before: Graph, g_after: Graph) -> float:
    """Mean per-node Jaccard similarity of Gabriel-graph neighborhoods between
    the two layouts. 1.0 means the layouts induce identical proximity shape."""
    if g_before.node_ids != g_after.node_ids:
        raise MetricError("node sets differ")
    n1 = gabriel_neighbors(g_before.positions)
    n2 = gabriel_neighbors(g_after.positions)
    sims = []
    for a, b in zip(n1, n2):
        union = a | b
        sims.append(len(a & b) / len(union) if union else 1.0)
    return float(np.mean(sims))


def score_layout(g: Graph) -> ReadabilityScores:
    return ReadabilityScores(
        crosslessness=crosslessness(g),
        minimum_angle=minimum_angle_metric(g),
        edge_length_variation=edge_length_variation(g),
    )


def readability_report(before: Graph, after: Graph) -> dict:
    """All four metrics on both layouts plus signed deltas (after - before);
    the shape-based metric is pairwise and reported once."""
    if before.node_ids != after.node_ids:
        raise MetricError("node sets differ")
    b = score_layout(before)
    a = score_layout(after)
    shape = shape_based_metric(before, after)
    return {
        "before": b.as_dict(),
        "after": {**a.as_dict(), "shape_based": shape},
        "delta": {
            "crosslessness": a.crosslessness - b.crosslessness,
            "minimum_angle": a.minimum_angle - b.minimum_angle,
            "edge_length_variation": a.edge_length_variation - b.edge_length_variation,
        },
    }

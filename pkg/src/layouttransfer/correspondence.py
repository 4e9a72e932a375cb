"""Injective node correspondences between source and target structures:
optimal assignment, correspondence filtering, and a seeded baseline matcher.

External matchers can be plugged in by supplying a marker JSON file; everything
downstream only needs an injective pairing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .align import alignment_residual, apply_transform, fit_alignment
from .embedding import EmbeddingConfig, EmbeddingSet, compute_embeddings
from .graph import Graph, MalformedGraphError


class MatchError(ValueError):
    pass


@dataclass(frozen=True)
class CorrespondenceSet:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((str(a), str(b)) for a, b in self.pairs))
        src = [a for a, _ in self.pairs]
        dst = [b for _, b in self.pairs]
        if len(set(src)) != len(src) or len(set(dst)) != len(dst):
            raise MatchError("correspondences must be injective in both coordinates")

    def source_nodes(self) -> set[str]:
        return {a for a, _ in self.pairs}

    def target_nodes(self) -> set[str]:
        return {b for _, b in self.pairs}

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)


# a MarkerSet is a filtered CorrespondenceSet; same shape, same invariants
MarkerSet = CorrespondenceSet


@dataclass(frozen=True)
class FilterParams:
    r_u: float = 0.5  # minimum common-neighbors ratio
    r_d: float = 2.0  # maximum distance ratio

    def __post_init__(self):
        if not 0.0 < self.r_u <= 1.0:
            raise MatchError("r_u must be in (0,1]")
        if self.r_d <= 0:
            raise MatchError("r_d must be positive")


def parse_markers(data: bytes | str) -> MarkerSet:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
        pairs = tuple((str(p["source"]), str(p["target"])) for p in obj["pairs"])
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise MalformedGraphError(f"bad marker file: {e}") from None
    return MarkerSet(pairs)


def serialize_markers(m: MarkerSet) -> bytes:
    return json.dumps(
        {"pairs": [{"source": a, "target": b} for a, b in m.pairs]},
        separators=(",", ":")).encode("utf-8")


def hungarian_assign(costs: np.ndarray, allow_partial: bool = False
                     ) -> list[tuple[int, int]]:
    """Minimum-total-cost injective assignment over a dense cost table.

    Forbidden cells are np.inf. Covers min(rows, cols) pairs; raises MatchError
    if that is impossible, unless allow_partial is set, in which case forbidden
    assignments are dropped from the result. Exact ties resolve toward
    lexicographically smaller (row, col) pairs.
    """
    costs = np.asarray(costs, dtype=float)
    if costs.ndim != 2 or costs.size == 0:
        raise MatchError("cost table must be a non-empty 2-D array")
    finite = np.isfinite(costs)
    if not finite.any():
        raise MatchError("infeasible: no finite cells")
    n, m = costs.shape
    span = float(costs[finite].max() - costs[finite].min()) or 1.0
    big = float(costs[finite].max()) + span * (min(n, m) + 1)
    work = np.where(finite, costs, big)
    if n * m <= 2500:
        pairs = _lexicographic_optimum(work, span)
    else:
        rows, cols = linear_sum_assignment(work)
        pairs = sorted(zip(rows, cols))
    out = []
    for r, c in pairs:
        if not finite[r, c]:
            if allow_partial:
                continue
            raise MatchError("infeasible: full coverage requires a forbidden cell")
        out.append((int(r), int(c)))
    return out


def _lexicographic_optimum(work: np.ndarray, span: float) -> list[tuple[int, int]]:
    """Among all minimum-total assignments, pick the one whose (row, col) pairs
    are lexicographically smallest, by greedily committing each row to the
    smallest column that keeps the remaining subproblem at the optimum."""

    def opt(mat):
        if mat.shape[0] == 0 or mat.shape[1] == 0:
            return 0.0
        r, c = linear_sum_assignment(mat)
        return float(mat[r, c].sum())

    tol = span * 1e-9
    rows = list(range(work.shape[0]))
    cols = list(range(work.shape[1]))
    out = []
    for r in list(rows):
        remaining_opt = opt(work[np.ix_(rows, cols)])
        committed = False
        for c in cols:
            rest_r = [x for x in rows if x != r]
            rest_c = [x for x in cols if x != c]
            reduced = opt(work[np.ix_(rest_r, rest_c)]) + float(work[r, c])
            if reduced <= remaining_opt + tol:
                out.append((r, c))
                rows, cols = rest_r, rest_c
                committed = True
                break
        if not committed:
            # more rows than columns: this row stays unassigned
            rows = [x for x in rows if x != r]
    return out


def mean_adjacent_edge_length(g: Graph, i: int) -> float:
    """Mean layout length of node i's incident edges; 0.0 for isolated nodes."""
    lengths = [float(np.linalg.norm(g.positions[a] - g.positions[b]))
               for a, b in g.edges if a == i or b == i]
    return float(np.mean(lengths)) if lengths else 0.0


def filter_correspondences(s_graph: Graph, t_graph: Graph, c: CorrespondenceSet,
                           p: FilterParams | None = None) -> MarkerSet:
    """Keep only finely matched correspondences: neighborhoods mostly agree
    (common-neighbor ratio above r_u) and the paired nodes sit close together
    relative to their mean adjacent edge lengths (ratio below r_d).

    Positions of the two graphs must already be comparable (post-alignment).
    A node with no adjacent edges fails the distance test.
    """
    if p is None:
        p = FilterParams()
    corr = c.as_dict()
    s_adj = s_graph.adjacency()
    t_adj = t_graph.adjacency()
    kept = []
    for cs, ct in c.pairs:
        si = s_graph.index_of(cs)
        ti = t_graph.index_of(ct)
        ns = {corr[s_graph.node_ids[u]] for u in s_adj[si]
              if s_graph.node_ids[u] in corr}
        nt = {t_graph.node_ids[u] for u in t_adj[ti]}
        nu = len(ns & nt)
        if not (nu > len(ns) * p.r_u or nu > len(nt) * p.r_u):
            continue
        ds = mean_adjacent_edge_length(s_graph, si)
        dt = mean_adjacent_edge_length(t_graph, ti)
        d = float(np.linalg.norm(s_graph.positions[si] - t_graph.positions[ti]))
        if d < ds * p.r_d and d < dt * p.r_d:
            kept.append((cs, ct))
    return MarkerSet(tuple(kept))


def seeded_auto_match(s_graph: Graph, t_graph: Graph,
                      emb_s: EmbeddingSet | None = None,
                      emb_t: EmbeddingSet | None = None,
                      degree_weight: float = 0.25) -> CorrespondenceSet:
    """Built-in matcher: optimal assignment over embedding distance plus a
    normalized degree-difference penalty. Covers min(|V^s|, |V^t|) nodes."""
    if s_graph.n == 0 or t_graph.n == 0:
        raise MatchError("empty structure")
    if emb_s is None:
        emb_s = compute_embeddings(s_graph, EmbeddingConfig())
    if emb_t is None:
        emb_t = compute_embeddings(t_graph, EmbeddingConfig())
    vs = np.stack([emb_s.vector_of(n) for n in s_graph.node_ids])
    vt = np.stack([emb_t.vector_of(n) for n in t_graph.node_ids])
    dist = np.linalg.norm(vs[:, None, :] - vt[None, :, :], axis=2)
    deg_s = s_graph.degrees().astype(float)
    deg_t = t_graph.degrees().astype(float)
    max_deg = max(1.0, deg_s.max(initial=0.0), deg_t.max(initial=0.0))
    deg_pen = np.abs(deg_s[:, None] - deg_t[None, :]) / max_deg
    assign = hungarian_assign(dist + degree_weight * deg_pen)
    return CorrespondenceSet(tuple(
        (s_graph.node_ids[r], t_graph.node_ids[c]) for r, c in assign))


def select_markers(s_graph: Graph, t_graph: Graph, c: CorrespondenceSet,
                   p: FilterParams | None = None) -> tuple[MarkerSet, dict]:
    """Marker selection: align T to S with the raw correspondences, then filter
    them. Falls back to the single best (closest) pair when everything is
    filtered out, flagged in the returned metadata."""
    if not c.pairs:
        raise MatchError("no correspondences to select markers from")
    src_pts = np.stack([s_graph.position_of(a) for a, _ in c.pairs])
    tgt_pts = np.stack([t_graph.position_of(b) for _, b in c.pairs])
    meta: dict = {"fallback": False}
    if len(c.pairs) >= 2:
        transform = fit_alignment(tgt_pts, src_pts)
        t_aligned = apply_transform(transform, t_graph)
        meta["alignment_residual"] = alignment_residual(transform, tgt_pts, src_pts)
    else:
        t_aligned = t_graph
    markers = filter_correspondences(s_graph, t_aligned, c, p)
    if not markers.pairs:
        # keep alignment solvable: retain the closest pair after alignment
        dists = [float(np.linalg.norm(s_graph.position_of(a) - t_aligned.position_of(b)))
                 for a, b in c.pairs]
        best = int(np.argmin(dists))
        markers = MarkerSet((c.pairs[best],))
        meta["fallback"] = True
    return markers, meta

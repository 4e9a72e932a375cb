"""Modification transfer: reference layout, deformation energy minimization,
the align/deform/match layout-simulation loop, and the two-round transfer.

Deformation minimizes E = alpha*E_O + beta*E_D + gamma*E_M over node-pair terms
(orientation preservation, distance preservation) plus marker anchors, by
repeatedly solving a weighted-Laplacian linear system in the spirit of stress
majorization. A backtracking step between iterates keeps E non-increasing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .align import (AffineTransform, IDENTITY, apply_transform, fit_alignment,
                    invert_transform)
from .correspondence import (CorrespondenceSet, MarkerSet, hungarian_assign,
                             mean_adjacent_edge_length)
from .graph import Graph, bfs_distances, is_connected


class TransferError(ValueError):
    pass


@dataclass(frozen=True)
class DeformParams:
    alpha: float = 1.0      # orientation-preservation weight
    beta: float = 5.0       # distance-preservation weight
    gamma: float = 1000.0   # marker-anchor weight
    w: float = 1.0          # extra preservation degree on edges
    max_iterations: int = 300
    convergence_tol: float = 1e-4
    dense_pair_limit: int = 300  # above this, restrict pairs to graph distance <= 2

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.gamma < 0:
            raise TransferError("weights must be non-negative")
        if self.alpha + self.beta <= 0:
            raise TransferError("alpha + beta must be positive")
        if self.w < 1:
            raise TransferError("edge preservation degree w must be >= 1")


@dataclass(frozen=True)
class MatchRadiusPolicy:
    radius_factor: float = 2.0

    def __post_init__(self):
        if self.radius_factor <= 0:
            raise TransferError("radius_factor must be positive")


# -- reference layout ------------------------------------------------------

def layout_stress(positions: np.ndarray, dist: np.ndarray) -> float:
    n = len(positions)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d = dist[i, j]
            if not np.isfinite(d) or d <= 0:
                continue
            delta = np.linalg.norm(positions[i] - positions[j]) - d
            total += delta * delta / (d * d)
    return total


def reference_layout(g: Graph, max_iterations: int = 300, tol: float = 1e-7,
                     seed: int = 0, return_trace: bool = False):
    """Stress-majorization layout from a deterministic seed, with BFS graph
    distances as the targets and weights d^-2. Requires a connected graph."""
    if not is_connected(g):
        raise TransferError("reference_layout requires a connected graph")
    n = g.n
    dist = bfs_distances(g)
    rng = np.random.default_rng(seed)
    x = rng.random((n, 2)) * max(1.0, dist[np.isfinite(dist)].max())
    if n == 1:
        return g.with_positions(np.zeros((1, 2)))
    w = np.where(dist > 0, 1.0 / np.maximum(dist, 1e-12) ** 2, 0.0)
    np.fill_diagonal(w, 0.0)
    lap = -w.copy()
    np.fill_diagonal(lap, w.sum(axis=1))
    trace = [layout_stress(x, dist)]
    for _ in range(max_iterations):
        diff = x[:, None, :] - x[None, :, :]
        norms = np.maximum(np.linalg.norm(diff, axis=2), 1e-12)
        lz = -w * dist / norms
        np.fill_diagonal(lz, 0.0)
        np.fill_diagonal(lz, -lz.sum(axis=1))
        b = lz @ x
        # pin node 0 to kill the translation null space
        x_new = x.copy()
        rhs = b[1:] - lap[1:, :1] @ x[:1]
        x_new[1:] = np.linalg.solve(lap[1:, 1:], rhs)
        stress = layout_stress(x_new, dist)
        done = trace[-1] - stress < tol * max(trace[-1], 1e-12)
        x = x_new
        trace.append(stress)
        if done:
            break
    out = g.with_positions(x)
    return (out, trace) if return_trace else out


# -- deformation -----------------------------------------------------------

@dataclass
class DeformResult:
    graph: Graph
    energy_trace: list[float] = field(default_factory=list)
    iterations: int = 0


def _pair_terms(g: Graph, p: DeformParams):
    """(i, j, w_ij, delta_ij, u_ij) terms of the smoothness energy, taken from
    g's current layout. Full pairwise up to dense_pair_limit nodes, otherwise
    edges plus graph-distance-2 pairs."""
    n = g.n
    bbox = g.bbox_diagonal()
    if bbox <= 0:
        raise TransferError("all nodes coincident; pair weights undefined")
    floor = 1e-6 * bbox
    edge_set = set(g.edges)
    if n <= p.dense_pair_limit:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    else:
        adj = g.adjacency()
        pair_set = set(edge_set)
        for v in range(n):
            for u in adj[v]:
                for t in adj[u]:
                    if t != v:
                        pair_set.add((min(v, t), max(v, t)))
        pairs = sorted(pair_set)
    ii = np.array([a for a, _ in pairs], dtype=int)
    jj = np.array([b for _, b in pairs], dtype=int)
    vec = g.positions[ii] - g.positions[jj]
    delta = np.maximum(np.linalg.norm(vec, axis=1), floor)
    u = vec / delta[:, None]
    wij = delta ** -2.0
    is_edge = np.array([(a, b) in edge_set for a, b in pairs])
    wij = np.where(is_edge, p.w * wij, wij)
    return ii, jj, wij, delta, u


def _deform_energy(pos: np.ndarray, ii, jj, wij, delta, u,
                   anchor_idx, anchor_goals, p: DeformParams, floor: float) -> float:
    vec = pos[ii] - pos[jj]
    r = np.maximum(np.linalg.norm(vec, axis=1), floor)
    direction = vec / r[:, None]
    e_o = float(np.sum(wij * np.sum((direction - u) ** 2, axis=1)))
    e_d = float(np.sum(wij * (np.linalg.norm(vec, axis=1) - delta) ** 2))
    e_m = float(np.sum((pos[anchor_idx] - anchor_goals) ** 2))
    return p.alpha * e_o + p.beta * e_d + p.gamma * e_m


def deform(t_graph: Graph, anchors: list[tuple[str, np.ndarray]],
           p: DeformParams | None = None) -> DeformResult:
    """Pull anchored nodes toward goal positions while preserving the input
    layout's pairwise orientations and distances. Energy is non-increasing
    across iterations; stops when the max per-node displacement falls below
    convergence_tol * bbox diagonal."""
    if p is None:
        p = DeformParams()
    if not anchors:
        raise TransferError("no anchors")
    if t_graph.n < 2:
        raise TransferError("need at least 2 nodes")
    ii, jj, wij, delta, u = _pair_terms(t_graph, p)
    bbox = t_graph.bbox_diagonal()
    floor = 1e-6 * bbox
    n = t_graph.n
    anchor_idx = np.array([t_graph.index_of(a) for a, _ in anchors], dtype=int)
    anchor_goals = np.array([np.asarray(g, dtype=float) for _, g in anchors])

    pos = t_graph.positions.copy()
    energy = _deform_energy(pos, ii, jj, wij, delta, u, anchor_idx, anchor_goals, p, floor)
    trace = [energy]
    iterations = 0
    for _ in range(p.max_iterations):
        iterations += 1
        vec = pos[ii] - pos[jj]
        rho = np.maximum(np.linalg.norm(vec, axis=1), floor)
        zhat = vec / rho[:, None]
        a_coef = p.beta * wij + p.alpha * wij / rho ** 2
        c_vec = (p.beta * wij * delta)[:, None] * zhat + (p.alpha * wij / rho)[:, None] * u
        lap = np.zeros((n, n))
        np.add.at(lap, (ii, jj), -a_coef)
        np.add.at(lap, (jj, ii), -a_coef)
        np.add.at(lap, (ii, ii), a_coef)
        np.add.at(lap, (jj, jj), a_coef)
        rhs = np.zeros((n, 2))
        np.add.at(rhs, ii, c_vec)
        np.add.at(rhs, jj, -c_vec)
        sys = lap.copy()
        np.add.at(sys, (anchor_idx, anchor_idx), p.gamma)
        np.add.at(rhs, anchor_idx, p.gamma * anchor_goals)
        try:
            candidate = np.linalg.solve(sys, rhs)
        except np.linalg.LinAlgError:
            candidate = np.linalg.lstsq(sys, rhs, rcond=None)[0]
        # backtrack toward the previous iterate until the true energy drops
        step = 1.0
        accepted = pos
        for _ in range(40):
            trial = pos + step * (candidate - pos)
            e_trial = _deform_energy(trial, ii, jj, wij, delta, u,
                                     anchor_idx, anchor_goals, p, floor)
            if e_trial <= energy:
                accepted, energy = trial, e_trial
                break
            step *= 0.5
        disp = float(np.max(np.linalg.norm(accepted - pos, axis=1)))
        pos = accepted
        trace.append(energy)
        if disp < p.convergence_tol * max(bbox, 1e-12):
            break
    return DeformResult(t_graph.with_positions(pos), trace, iterations)


# -- matching --------------------------------------------------------------

def match_step(s_graph: Graph, t_deformed: Graph, existing: MarkerSet,
               policy: MatchRadiusPolicy | None = None) -> CorrespondenceSet:
    """Grow the correspondence set: candidate pairs are source/target nodes
    within an adaptive radius (radius_factor x the target node's mean adjacent
    edge length), resolved injectively by minimum-distance assignment. Existing
    markers are preserved and excluded from re-assignment."""
    if policy is None:
        policy = MatchRadiusPolicy()
    used_s = existing.source_nodes()
    used_t = existing.target_nodes()
    free_s = [i for i, nid in enumerate(s_graph.node_ids) if nid not in used_s]
    free_t = [j for j, nid in enumerate(t_deformed.node_ids) if nid not in used_t]
    if not free_s or not free_t:
        return existing
    radii = {j: policy.radius_factor * mean_adjacent_edge_length(t_deformed, j)
             for j in free_t}
    costs = np.full((len(free_s), len(free_t)), np.inf)
    for a, i in enumerate(free_s):
        for b, j in enumerate(free_t):
            d = float(np.linalg.norm(s_graph.positions[i] - t_deformed.positions[j]))
            if d < radii[j]:
                costs[a, b] = d
    if not np.isfinite(costs).any():
        return existing
    new_pairs = [(s_graph.node_ids[free_s[a]], t_deformed.node_ids[free_t[b]])
                 for a, b in hungarian_assign(costs, allow_partial=True)]
    return CorrespondenceSet(existing.pairs + tuple(new_pairs))


# -- layout simulation and transfer ----------------------------------------

@dataclass
class SimulationResult:
    t_tilde: Graph              # deformed target, in the source's frame
    markers: MarkerSet          # expanded marker set
    transform: AffineTransform  # cumulative target->source-frame alignment
    rounds: int = 0
    energy_traces: list[list[float]] = field(default_factory=list)


def _marker_points(markers: MarkerSet, s_graph: Graph, t_graph: Graph):
    src = np.stack([s_graph.position_of(a) for a, _ in markers.pairs])
    tgt = np.stack([t_graph.position_of(b) for _, b in markers.pairs])
    return src, tgt


def simulate_layout(s_graph: Graph, t_graph: Graph, markers: MarkerSet,
                    p: DeformParams | None = None,
                    policy: MatchRadiusPolicy | None = None,
                    max_rounds: int = 20) -> SimulationResult:
    """Iterate align -> deform -> match until the correspondence count stops
    increasing. Returns the deformed target (left in the source's frame), the
    expanded markers, and the cumulative alignment transform."""
    if p is None:
        p = DeformParams()
    if policy is None:
        policy = MatchRadiusPolicy()
    if len(markers.pairs) < 2:
        raise TransferError("need at least 2 markers")
    cur = t_graph
    cumulative = IDENTITY
    traces: list[list[float]] = []
    rounds = 0
    for _ in range(max_rounds):
        rounds += 1
        src_pts, tgt_pts = _marker_points(markers, s_graph, cur)
        fit = fit_alignment(tgt_pts, src_pts)
        cur = apply_transform(fit, cur)
        cumulative = fit.compose(cumulative)
        anchors = [(mt, s_graph.position_of(ms)) for ms, mt in markers.pairs]
        result = deform(cur, anchors, p)
        cur = result.graph
        traces.append(result.energy_trace)
        expanded = match_step(s_graph, cur, markers, policy)
        if len(expanded.pairs) == len(markers.pairs):
            break
        markers = expanded
    return SimulationResult(cur, markers, cumulative, rounds, traces)


def transfer_modification(s_graph: Graph, s_prime: Graph, t_graph: Graph,
                          markers: MarkerSet, p: DeformParams | None = None,
                          policy: MatchRadiusPolicy | None = None,
                          max_rounds: int = 20):
    """Two-round transfer: simulate the original source's shape to grow
    correspondences, then apply one deform pass toward the modified source in
    the source frame, and restore the original target frame.

    The second round anchors each matched target node at its current position
    offset by the source node's modification delta, so an unmodified source is
    an exact no-op. Returns (transferred graph, report dict).
    """
    if s_prime.node_ids != s_graph.node_ids:
        raise TransferError("modified source must share the source's node set")
    if p is None:
        p = DeformParams()
    sim = simulate_layout(s_graph, t_graph, markers, p, policy, max_rounds)
    # round 1 leaves the target in the source frame, so the modification
    # deltas apply directly; goals are offsets from the simulated positions,
    # which makes an unmodified source an exact no-op
    cur = sim.t_tilde
    anchors = []
    for ms, mt in sim.markers.pairs:
        delta = s_prime.position_of(ms) - s_graph.position_of(ms)
        anchors.append((mt, cur.position_of(mt) + delta))
    result = deform(cur, anchors, p)
    restored = apply_transform(invert_transform(sim.transform), result.graph)
    report = {
        "rounds": sim.rounds,
        "marker_coverage": len(sim.markers.pairs) / min(s_graph.n, t_graph.n),
        "markers": list(sim.markers.pairs),
        "round1_iterations": sum(len(t) - 1 for t in sim.energy_traces),
        "round2_iterations": result.iterations,
        "final_energy": result.energy_trace[-1],
    }
    return restored, report

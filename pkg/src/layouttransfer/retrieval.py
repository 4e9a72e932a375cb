"""Retrieving target substructures similar to a user exemplar.

Pipeline: embedding k-NN over the exemplar's nodes -> connected candidate
substructures within a size band -> Weisfeiler-Lehman similarity ranking
against the exemplar, with a minimum-similarity cutoff.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .embedding import EmbeddingSet, knn_similar_nodes
from .graph import Graph, Structure, connected_components, induced_subgraph


class RetrievalError(ValueError):
    pass


@dataclass(frozen=True)
class RetrievalParams:
    k: int = 5
    min_count: int = 1
    max_count: int = 10_000
    epsilon: float = 0.5
    wl_iterations: int = 3

    def __post_init__(self):
        if self.k < 1 or self.min_count < 1 or self.wl_iterations < 1:
            raise RetrievalError("k, min_count, wl_iterations must be positive")
        if self.min_count > self.max_count:
            raise RetrievalError("min_count > max_count")
        if not 0.0 <= self.epsilon <= 1.0:
            raise RetrievalError("epsilon outside [0,1]")

    @staticmethod
    def for_exemplar(exemplar_size: int, k: int = 5, epsilon: float = 0.5,
                     wl_iterations: int = 3) -> "RetrievalParams":
        # size band centered on the exemplar: half to twice its node count
        return RetrievalParams(k=k, min_count=max(1, math.ceil(exemplar_size / 2)),
                               max_count=2 * exemplar_size, epsilon=epsilon,
                               wl_iterations=wl_iterations)


@dataclass(frozen=True)
class RankedSuggestion:
    structure: Structure
    similarity: float


def _wl_histograms(g: Graph, iterations: int) -> list[Counter]:
    """Per-iteration label histograms; initial label is the node degree."""
    adj = g.adjacency()
    labels = [str(d) for d in g.degrees()]
    hists = [Counter(labels)]
    for _ in range(iterations):
        labels = [labels[v] + "|" + ",".join(sorted(labels[u] for u in adj[v]))
                  for v in range(g.n)]
        hists.append(Counter(labels))
    return hists


def wl_similarity(g1: Graph, g2: Graph, iterations: int = 3) -> float:
    """Cosine similarity of the concatenated WL subtree-label count vectors over
    iterations 0..h. Symmetric, in [0,1], exactly 1.0 on isomorphic graphs."""
    if g1.n == 0 or g2.n == 0:
        raise RetrievalError("empty graph")
    h1 = _wl_histograms(g1, iterations)
    h2 = _wl_histograms(g2, iterations)
    dot = 0
    n1 = 0
    n2 = 0
    for c1, c2 in zip(h1, h2):
        for label, cnt in c1.items():
            dot += cnt * c2.get(label, 0)
            n1 += cnt * cnt
        for cnt in c2.values():
            n2 += cnt * cnt
    if n1 == 0 or n2 == 0:
        return 0.0
    return dot / math.sqrt(n1 * n2)


def induce_candidate_substructures(g: Graph, candidates: set[str],
                                   p: RetrievalParams) -> list[Structure]:
    """Connected components of the candidate-induced subgraph, size-filtered to
    [min_count, max_count]."""
    if not candidates:
        return []
    sub = induced_subgraph(g, Structure("g", tuple(sorted(candidates))))
    out = []
    for comp in connected_components(sub):
        if p.min_count <= len(comp) <= p.max_count:
            out.append(Structure("g", tuple(sorted(comp))))
    return out


def retrieve_similar(g: Graph, exemplar: Structure, emb: EmbeddingSet,
                     p: RetrievalParams) -> list[RankedSuggestion]:
    """Rank candidate substructures by WL similarity to the exemplar.

    Candidates overlapping the exemplar by more than half their own nodes are
    dropped (the exemplar should not retrieve itself). Sort is descending by
    similarity with ties broken by smallest node id.
    """
    exemplar.validate_against(g)
    ex_nodes = set(exemplar.node_ids)
    ex_graph = induced_subgraph(g, exemplar)
    candidates = knn_similar_nodes(emb, ex_nodes, p.k)
    out = []
    for cand in induce_candidate_substructures(g, candidates, p):
        overlap = len(ex_nodes.intersection(cand.node_ids))
        if overlap * 2 > len(cand.node_ids):
            continue
        sim = wl_similarity(ex_graph, induced_subgraph(g, cand), p.wl_iterations)
        if sim < p.epsilon:
            continue
        out.append(RankedSuggestion(cand, sim))
    out.sort(key=lambda r: (-r.similarity, min(r.structure.node_ids)))
    return out

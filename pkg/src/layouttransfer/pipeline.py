"""Batch orchestration: the end-to-end fine-tuning pipeline
(embed -> retrieve -> match -> transfer -> merge -> report).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correspondence import (CorrespondenceSet, FilterParams, MarkerSet,
                             seeded_auto_match, select_markers)
from .embedding import EmbeddingConfig, EmbeddingSet, embeddings_with_cache
from .graph import (Graph, Structure, induced_subgraph, parse_graph,
                    parse_structure, serialize_graph)
from .merge import MergeParams, merge_many
from .metrics import readability_report
from .retrieval import RetrievalParams, retrieve_similar
from .transfer import DeformParams, MatchRadiusPolicy, transfer_modification


@dataclass(frozen=True)
class PipelineConfig:
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    retrieval: RetrievalParams | None = None  # None: derive size band from exemplar
    deform: DeformParams = field(default_factory=DeformParams)
    filter: FilterParams = field(default_factory=FilterParams)
    merge: MergeParams = field(default_factory=MergeParams)
    match_radius: MatchRadiusPolicy = field(default_factory=MatchRadiusPolicy)
    k: int = 5
    epsilon: float = 0.5
    seed: int = 0


def markers_for_transfer(s_graph: Graph, t_graph: Graph, c: CorrespondenceSet,
                         filter_params: FilterParams) -> tuple[MarkerSet, dict]:
    """Filtered markers, padded back from the raw correspondences when fewer
    than the 2 pairs alignment needs survive."""
    markers, meta = select_markers(s_graph, t_graph, c, filter_params)
    if len(markers.pairs) < 2:
        kept = set(markers.pairs)
        extra = [pair for pair in c.pairs if pair not in kept]
        markers = MarkerSet(markers.pairs + tuple(extra[: 2 - len(markers.pairs)]))
        meta["padded"] = True
    return markers, meta


def transfer_to_target(g: Graph, exemplar: Structure, modified_exemplar: Graph,
                       target: Structure, cfg: PipelineConfig) -> tuple[Graph, dict]:
    """Auto-match, filter markers, and run the two-round transfer for one
    retrieved target. Returns the modified target subgraph and a report."""
    s_graph = induced_subgraph(g, exemplar)
    t_graph = induced_subgraph(g, target)
    corr = seeded_auto_match(s_graph, t_graph)
    markers, meta = markers_for_transfer(s_graph, t_graph, corr, cfg.filter)
    transferred, report = transfer_modification(
        s_graph, modified_exemplar, t_graph, markers, cfg.deform, cfg.match_radius)
    report.update(meta)
    return transferred, report


def run_pipeline(graph_file: str | Path, exemplar_file: str | Path,
                 modified_exemplar_file: str | Path,
                 cfg: PipelineConfig | None = None,
                 out_file: str | Path | None = None,
                 cache_file: str | Path | None = None) -> tuple[bytes, dict]:
    """End-to-end run. Returns (merged graph bytes, report). Deterministic for
    fixed inputs and config."""
    if cfg is None:
        cfg = PipelineConfig()
    graph_path = Path(graph_file)
    g = parse_graph(graph_path.read_bytes())
    exemplar = parse_structure(Path(exemplar_file).read_bytes())
    exemplar.validate_against(g)
    modified = parse_graph(Path(modified_exemplar_file).read_bytes())
    if set(modified.node_ids) != set(exemplar.node_ids):
        raise ValueError("modified exemplar must cover exactly the exemplar's nodes")
    # reorder the modified layout to the exemplar subgraph's node order
    s_graph = induced_subgraph(g, exemplar)
    modified = s_graph.with_positions(
        np.stack([modified.position_of(n) for n in s_graph.node_ids]))

    if cache_file is None:
        cache_file = graph_path.with_suffix(graph_path.suffix + ".embcache.json")
    emb: EmbeddingSet = embeddings_with_cache(g, cfg.embedding, cache_file)

    params = cfg.retrieval or RetrievalParams.for_exemplar(
        len(exemplar.node_ids), k=cfg.k, epsilon=cfg.epsilon)
    suggestions = retrieve_similar(g, exemplar, emb, params)

    transferred: list[Graph] = [modified]
    target_reports = []
    for rank, sugg in enumerate(suggestions):
        t_new, rep = transfer_to_target(g, exemplar, modified, sugg.structure, cfg)
        transferred.append(t_new)
        target_reports.append({"rank": rank, "similarity": sugg.similarity,
                               "nodes": list(sugg.structure.node_ids), **rep})

    merged = merge_many(g, transferred, cfg.merge)
    report = {
        "targets": target_reports,
        "target_count": len(suggestions),
        "readability": readability_report(g, merged),
    }
    out = serialize_graph(merged)
    if out_file is not None:
        Path(out_file).write_bytes(out)
    return out, report

"""Command-line interface: embed, retrieve, match, transfer, merge, metrics,
pipeline, and serve subcommands."""
from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from .correspondence import (FilterParams, parse_markers, seeded_auto_match,
                             serialize_markers)
from .embedding import EmbeddingConfig, embeddings_with_cache
from .graph import (Structure, induced_subgraph, parse_graph, parse_structure,
                    serialize_graph, serialize_structure)
from .merge import MergeParams, merge_with_optimization
from .metrics import readability_report
from .pipeline import PipelineConfig, markers_for_transfer, run_pipeline
from .retrieval import RetrievalParams, retrieve_similar
from .transfer import DeformParams, MatchRadiusPolicy, transfer_modification


def _load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    raw = json.loads(Path(path).read_text())
    cfg = PipelineConfig()
    if "embedding" in raw:
        cfg = replace(cfg, embedding=EmbeddingConfig(**raw["embedding"]))
    if "retrieval" in raw:
        cfg = replace(cfg, retrieval=RetrievalParams(**raw["retrieval"]))
    if "deform" in raw:
        cfg = replace(cfg, deform=DeformParams(**raw["deform"]))
    if "filter" in raw:
        cfg = replace(cfg, filter=FilterParams(**raw["filter"]))
    if "merge" in raw:
        cfg = replace(cfg, merge=MergeParams(**raw["merge"]))
    for key in ("k", "epsilon", "seed"):
        if key in raw:
            cfg = replace(cfg, **{key: raw[key]})
    return cfg


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON pipeline config file")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def main(ctx, config_path, seed):
    """Exemplar-based graph layout fine-tuning."""
    ctx.ensure_object(dict)
    cfg = _load_config(config_path)
    ctx.obj["config"] = replace(cfg, seed=seed)


@main.command()
@click.option("--graph", "graph_file", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path())
@click.pass_context
def embed(ctx, graph_file, out_file):
    """Compute structural node embeddings and write the cache file."""
    cfg: PipelineConfig = ctx.obj["config"]
    g = parse_graph(Path(graph_file).read_bytes())
    embeddings_with_cache(g, cfg.embedding, out_file)
    click.echo(f"wrote embeddings for {g.n} nodes to {out_file}")


@main.command()
@click.option("--graph", "graph_file", required=True, type=click.Path(exists=True))
@click.option("--exemplar", "exemplar_file", required=True, type=click.Path(exists=True))
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--min", "min_count", type=int, default=None)
@click.option("--max", "max_count", type=int, default=None)
@click.option("--epsilon", type=float, default=0.5, show_default=True)
@click.option("--out", "out_file", required=True, type=click.Path())
@click.pass_context
def retrieve(ctx, graph_file, exemplar_file, k, min_count, max_count, epsilon, out_file):
    """Retrieve substructures similar to the exemplar."""
    cfg: PipelineConfig = ctx.obj["config"]
    g = parse_graph(Path(graph_file).read_bytes())
    exemplar = parse_structure(Path(exemplar_file).read_bytes())
    exemplar.validate_against(g)
    emb = embeddings_with_cache(
        g, cfg.embedding, Path(graph_file).with_suffix(".embcache.json"))
    params = RetrievalParams.for_exemplar(len(exemplar.node_ids), k=k, epsilon=epsilon)
    if min_count is not None or max_count is not None:
        params = replace(params,
                         min_count=min_count or params.min_count,
                         max_count=max_count or params.max_count)
    result = retrieve_similar(g, exemplar, emb, params)
    payload = [{"similarity": r.similarity, "nodes": list(r.structure.node_ids)}
               for r in result]
    Path(out_file).write_text(json.dumps(payload, indent=2))
    click.echo(f"retrieved {len(result)} suggestions")


@main.command()
@click.option("--source", "source_file", required=True, type=click.Path(exists=True))
@click.option("--target", "target_file", required=True, type=click.Path(exists=True))
@click.option("--correspondences", "corr_file", type=click.Path(exists=True), default=None)
@click.option("--r-u", type=float, default=0.5, show_default=True)
@click.option("--r-d", type=float, default=2.0, show_default=True)
@click.option("--out", "out_file", required=True, type=click.Path())
def match(source_file, target_file, corr_file, r_u, r_d, out_file):
    """Produce filtered markers between a source and a target structure."""
    s = parse_graph(Path(source_file).read_bytes())
    t = parse_graph(Path(target_file).read_bytes())
    if corr_file is not None:
        corr = parse_markers(Path(corr_file).read_bytes())
    else:
        corr = seeded_auto_match(s, t)
    markers, meta = markers_for_transfer(s, t, corr, FilterParams(r_u=r_u, r_d=r_d))
    Path(out_file).write_bytes(serialize_markers(markers))
    click.echo(f"{len(markers.pairs)} markers"
               + (" (fallback)" if meta.get("fallback") else ""))


@main.command()
@click.option("--source", "source_file", required=True, type=click.Path(exists=True))
@click.option("--modified", "modified_file", required=True, type=click.Path(exists=True))
@click.option("--target", "target_file", required=True, type=click.Path(exists=True))
@click.option("--markers", "markers_file", required=True, type=click.Path(exists=True))
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--beta", type=float, default=5.0, show_default=True)
@click.option("--gamma", type=float, default=1000.0, show_default=True)
@click.option("--w", type=float, default=1.0, show_default=True)
@click.option("--out", "out_file", required=True, type=click.Path())
def transfer(source_file, modified_file, target_file, markers_file,
             alpha, beta, gamma, w, out_file):
    """Transfer the source's modification onto the target structure."""
    s = parse_graph(Path(source_file).read_bytes())
    sp = parse_graph(Path(modified_file).read_bytes())
    t = parse_graph(Path(target_file).read_bytes())
    markers = parse_markers(Path(markers_file).read_bytes())
    if sp.node_ids != s.node_ids:
        sp = s.with_positions(np.stack([sp.position_of(n) for n in s.node_ids]))
    params = DeformParams(alpha=alpha, beta=beta, gamma=gamma, w=w)
    out, report = transfer_modification(s, sp, t, markers, params, MatchRadiusPolicy())
    Path(out_file).write_bytes(serialize_graph(out))
    Path(str(out_file) + ".report.json").write_text(json.dumps(report, indent=2))
    click.echo(f"transferred; marker coverage {report['marker_coverage']:.2f}")


@main.command()
@click.option("--graph", "graph_file", required=True, type=click.Path(exists=True))
@click.option("--structure", "structure_file", required=True, type=click.Path(exists=True))
@click.option("--modified", "modified_file", required=True, type=click.Path(exists=True))
@click.option("--distance", "d", type=float, default=None,
              help="surroundings radius; default = max edge length")
@click.option("--out", "out_file", required=True, type=click.Path())
def merge(graph_file, structure_file, modified_file, d, out_file):
    """Merge a modified substructure back into the full layout."""
    g = parse_graph(Path(graph_file).read_bytes())
    s = parse_structure(Path(structure_file).read_bytes())
    s.validate_against(g)
    modified = parse_graph(Path(modified_file).read_bytes())
    merged = merge_with_optimization(g, modified, MergeParams(d=d))
    Path(out_file).write_bytes(serialize_graph(merged))
    click.echo("merged")


@main.command()
@click.option("--before", "before_file", required=True, type=click.Path(exists=True))
@click.option("--after", "after_file", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path())
def metrics(before_file, after_file, out_file):
    """Readability report for a before/after layout pair."""
    before = parse_graph(Path(before_file).read_bytes())
    after = parse_graph(Path(after_file).read_bytes())
    report = readability_report(before, after)
    Path(out_file).write_text(json.dumps(report, indent=2))
    click.echo(json.dumps(report["delta"], indent=2))


@main.command()
@click.option("--graph", "graph_file", required=True, type=click.Path(exists=True))
@click.option("--exemplar", "exemplar_file", required=True, type=click.Path(exists=True))
@click.option("--modified", "modified_file", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path())
@click.pass_context
def pipeline(ctx, graph_file, exemplar_file, modified_file, out_file):
    """Run the full embed/retrieve/transfer/merge pipeline."""
    cfg: PipelineConfig = ctx.obj["config"]
    _, report = run_pipeline(graph_file, exemplar_file, modified_file, cfg,
                             out_file=out_file)
    Path(str(out_file) + ".report.json").write_text(json.dumps(report, indent=2))
    click.echo(f"{report['target_count']} targets transferred and merged")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--state-dir", type=click.Path(), default=None,
              help="directory for session snapshots")
def serve(host, port, state_dir):
    """Start the HTTP session service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(state_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()

"""Exemplar-based graph-layout fine-tuning engine.

Modify one substructure's layout, retrieve topologically similar substructures,
transfer the modification to each, and merge the results smoothly back into the
full layout.
"""

from .align import AffineTransform, apply_transform, fit_alignment, invert_transform
from .correspondence import (CorrespondenceSet, FilterParams, MarkerSet,
                             filter_correspondences, hungarian_assign,
                             seeded_auto_match, select_markers)
from .embedding import (EmbeddingConfig, EmbeddingSet, compute_embeddings,
                        knn_similar_nodes)
from .graph import (Graph, Structure, connected_components, induced_subgraph,
                    parse_graph, parse_structure, serialize_graph,
                    serialize_structure)
from .merge import MergeParams, merge_many, merge_with_optimization, surroundings
from .metrics import (ReadabilityScores, crosslessness, edge_length_variation,
                      minimum_angle_metric, readability_report, shape_based_metric)
from .pipeline import PipelineConfig, run_pipeline
from .retrieval import (RankedSuggestion, RetrievalParams,
                        induce_candidate_substructures, retrieve_similar,
                        wl_similarity)
from .transfer import (DeformParams, MatchRadiusPolicy, deform, match_step,
                       reference_layout, simulate_layout, transfer_modification)

__all__ = [name for name in dir() if not name.startswith("_")]

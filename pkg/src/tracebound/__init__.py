"""Trace-bounded hypergraphs: subdivision, exact containment, and a randomized embedding pipeline."""

from .embedding import Budgets, FailureReport, PipelineResult, run_pipeline
from .errors import DomainError, ResourceLimitError
from .family import canonical_form, enumerate_family, subgraphs_up_to_d
from .hypergraph import (
    Hypergraph,
    PartitionedHypergraph,
    SimplicialComplex,
    common_neighbourhood,
    extract_partite,
    is_trace_bounded,
    link,
    trace,
    trace_i,
)
from .oracle import copies_extending, count_copies, find_embedding, verify_embedding
from .schedule import alpha, exponent_schedule, lambda_value
from .subdivision import canonical_subdivide, certify_subdivision, homeomorph_target

__version__ = "0.1.0"

__all__ = [
    "Budgets",
    "DomainError",
    "FailureReport",
    "Hypergraph",
    "PartitionedHypergraph",
    "PipelineResult",
    "ResourceLimitError",
    "SimplicialComplex",
    "alpha",
    "canonical_form",
    "canonical_subdivide",
    "certify_subdivision",
    "common_neighbourhood",
    "copies_extending",
    "count_copies",
    "enumerate_family",
    "exponent_schedule",
    "extract_partite",
    "find_embedding",
    "homeomorph_target",
    "is_trace_bounded",
    "lambda_value",
    "link",
    "run_pipeline",
    "subgraphs_up_to_d",
    "trace",
    "trace_i",
    "verify_embedding",
]

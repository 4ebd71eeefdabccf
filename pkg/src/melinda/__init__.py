"""Interlinking RDF datasets from declarative linking specifications and ontology alignments."""

from .alignment import (
    Alignment,
    Cell,
    EntityExpression,
    UriRule,
    UriTransform,
    eval_class_expr,
    eval_property_expr,
    find_cell,
    parse_alignment,
)
from .engine import Linkset, apply_uri_rules, emit_linkset, evaluate_against_gold, run_interlink, select_candidates
from .linkspec import LinkSpec, ResolvedPlan, parse_spec, resolve, validate
from .rdf import Graph, Term, Triple, parse_ntriples, serialize_ntriples

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "Cell",
    "EntityExpression",
    "Graph",
    "LinkSpec",
    "Linkset",
    "ResolvedPlan",
    "Term",
    "Triple",
    "UriRule",
    "UriTransform",
    "apply_uri_rules",
    "emit_linkset",
    "eval_class_expr",
    "eval_property_expr",
    "evaluate_against_gold",
    "find_cell",
    "parse_alignment",
    "parse_ntriples",
    "parse_spec",
    "resolve",
    "run_interlink",
    "select_candidates",
    "serialize_ntriples",
    "validate",
]

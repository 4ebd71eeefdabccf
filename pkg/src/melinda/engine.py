"""Executing resolved plans: candidates, scoring, classification and output."""

from __future__ import annotations

import os
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .alignment import RuleError, UriRule, UriTransform, eval_class_expr
from .linkspec import PathSide, ResolvedPlan, compare_leaves
from .rdf import (
    OWL_SAME_AS,
    RDF_TYPE,
    VOID,
    Graph,
    Term,
    Triple,
    iri,
    serialize_ntriples,
    values_along_path,
)
from .similarity import apply_transforms, check_metric, combine, compare_values


class EmptyCandidatesWarning(UserWarning):
    pass


class GoldFormatError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ScoredPair:
    source: str
    target: str
    score: float


@dataclass(frozen=True)
class Linkset:
    linkset_iri: str
    source_dataset: str
    target_dataset: str
    link_type: str = OWL_SAME_AS
    accepted: tuple[tuple[str, str], ...] = ()
    verify: tuple[tuple[str, str, float], ...] = ()
    candidates: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class EvalReport:
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float


# --- candidates -------------------------------------------------------------------


def select_candidates(plan: ResolvedPlan, g_source: Graph, g_target: Graph) -> tuple[frozenset[Term], frozenset[Term]]:
    src = frozenset(t for t in eval_class_expr(plan.source_class, g_source) if t.is_iri)
    tgt = frozenset(t for t in eval_class_expr(plan.target_class, g_target) if t.is_iri)
    if not src or not tgt:
        warnings.warn(
            f"interlink {plan.interlink_id!r}: {len(src)} source and {len(tgt)} target candidates",
            EmptyCandidatesWarning,
            stacklevel=2,
        )
    return src, tgt


# --- scoring ----------------------------------------------------------------------------


def compile_plan(plan: ResolvedPlan) -> None:
    """Fail early on anything that would only surface while scoring."""
    for leaf in compare_leaves(plan.condition):
        check_metric(leaf.metric)
        for side in (leaf.left, leaf.right):
            if not isinstance(side, PathSide):
                raise ValueError("plan still contains alignment references")


def side_values(g: Graph, node: Term, side: PathSide) -> frozenset[str]:
    """Lexical values of ``side`` for ``node``, transforms applied."""
    result: set[Term] | None = None
    for path in side.paths:
        vals = values_along_path(g, node, [iri(p) for p in path])
        result = set(vals) if result is None else result & vals
    lexical = frozenset(t.value for t in (result or ()) if not t.is_blank)
    return apply_transforms(lexical, side.transforms)


def _value_table(g: Graph, nodes: Sequence[Term], sides: Sequence[PathSide]) -> list[tuple[frozenset[str], ...]]:
    return [tuple(side_values(g, n, s) for s in sides) for n in nodes]


def _tree_score(c, leaf_scores) -> float:
    if hasattr(c, "metric"):
        return next(leaf_scores)
    return combine(c.combiner, [_tree_score(ch, leaf_scores) for ch in c.children])


def _score_rows(args) -> list[tuple[int, int, float]]:
    condition, metrics, src_rows, tgt_rows, row_offset, verify = args
    out = []
    for i, sv in enumerate(src_rows):
        for j, tv in enumerate(tgt_rows):
            leaf = iter([compare_values(m, a, b) for m, a, b in zip(metrics, sv, tv)])
            score = _tree_score(condition, leaf)
            if score >= verify:
                out.append((row_offset + i, j, score))
    return out


def score_pairs(
    plan: ResolvedPlan,
    g_source: Graph,
    g_target: Graph,
    sources: Iterable[Term],
    targets: Iterable[Term],
    workers: int = 1,
    keep_below: float | None = None,
) -> list[ScoredPair]:
    """Score each (source, target) pair; only pairs at or above ``keep_below``
    (default: the verify threshold) are returned, sorted by IRI."""
    compile_plan(plan)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    src = sorted(sources)
    tgt = sorted(targets)
    leaves = compare_leaves(plan.condition)
    metrics = [leaf.metric for leaf in leaves]
    src_rows = _value_table(g_source, src, [leaf.left for leaf in leaves])
    tgt_rows = _value_table(g_target, tgt, [leaf.right for leaf in leaves])
    floor = plan.verify if keep_below is None else keep_below

    if workers == 1 or len(src) < 2:
        raw = _score_rows((plan.condition, metrics, src_rows, tgt_rows, 0, floor))
    else:
        n_chunks = min(workers, len(src))
        bounds = [len(src) * k // n_chunks for k in range(n_chunks + 1)]
        jobs = [
            (plan.condition, metrics, src_rows[lo:hi], tgt_rows, lo, floor)
            for lo, hi in zip(bounds, bounds[1:])
        ]
        raw = []
        with ProcessPoolExecutor(max_workers=n_chunks) as pool:
            for part in pool.map(_score_rows, jobs):
                raw.extend(part)
    pairs = [ScoredPair(src[i].value, tgt[j].value, s) for i, j, s in raw]
    pairs.sort()
    return pairs


def classify(score: float, accept: float, verify: float) -> str:
    if score >= accept:
        return "accepted"
    if score >= verify:
        return "verify"
    return "rejected"


def dataset_iri(decl_graph: str | None, path: str | os.PathLike | None) -> str:
    if decl_graph:
        return decl_graph
    if path is None:
        raise ValueError("a dataset needs a Graph IRI or a bound file")
    return Path(path).resolve().as_uri()


def default_linkset_iri(plan: ResolvedPlan) -> str:
    return plan.output.linkset or f"urn:melinda:linkset:{plan.interlink_id}"


def run_interlink(
    plan: ResolvedPlan,
    g_source: Graph,
    g_target: Graph,
    source_dataset: str = "urn:melinda:dataset:source",
    target_dataset: str = "urn:melinda:dataset:target",
    workers: int = 1,
) -> Linkset:
    src, tgt = select_candidates(plan, g_source, g_target)
    accepted: list[tuple[str, str]] = []
    verify: list[tuple[str, str, float]] = []
    for p in score_pairs(plan, g_source, g_target, src, tgt, workers=workers):
        label = classify(p.score, plan.accept, plan.verify)
        if label == "accepted":
            accepted.append((p.source, p.target))
        elif label == "verify":
            verify.append((p.source, p.target, p.score))
    return Linkset(
        default_linkset_iri(plan),
        source_dataset,
        target_dataset,
        plan.link_type,
        tuple(accepted),
        tuple(verify),
        candidates=(len(src), len(tgt)),
    )


# --- URI correspondence --------------------------------------------------------------


def orient_transform(transform: UriTransform, g_source: Graph) -> UriRule:
    """Pick the rewrite direction whose pattern full-matches more source subjects."""
    subjects = [s.value for s in g_source.subjects() if s.is_iri]
    rx1 = re.compile(transform.entity1_pattern.regex)
    rx2 = re.compile(transform.entity2_pattern.regex)
    n1 = sum(1 for u in subjects if rx1.fullmatch(u))
    n2 = sum(1 for u in subjects if rx2.fullmatch(u))
    if n1 == n2:
        raise RuleError(
            f"cannot tell the direction of the URI transformation: both patterns match {n1} "
            "source subjects; give the rule explicitly"
        )
    return transform.rule(forward=n1 > n2)


def apply_uri_rules(
    rule: UriRule,
    g_source: Graph,
    g_target: Graph,
    linkset_iri: str = "urn:melinda:linkset:uri-rules",
    source_dataset: str = "urn:melinda:dataset:source",
    target_dataset: str = "urn:melinda:dataset:target",
    link_type: str = OWL_SAME_AS,
) -> Linkset:
    target_iris = {t.value for t in g_target.nodes() if t.is_iri}
    links = set()
    subjects = [s for s in g_source.subjects() if s.is_iri]
    for s in subjects:
        v = rule.apply(s.value)
        if v is not None and v in target_iris:
            links.add((s.value, v))
    return Linkset(
        linkset_iri,
        source_dataset,
        target_dataset,
        link_type,
        tuple(sorted(links)),
        (),
        candidates=(len(subjects), len(target_iris)),
    )


# --- output ---------------------------------------------------------------------------


def linkset_triples(ls: Linkset) -> list[Triple]:
    p = iri(ls.link_type)
    return [Triple(iri(s), p, iri(t)) for s, t in ls.accepted]


def void_graph(ls: Linkset) -> Graph:
    node = iri(ls.linkset_iri)
    return Graph(
        [
            Triple(node, iri(RDF_TYPE), iri(VOID + "Linkset")),
            Triple(node, iri(VOID + "target"), iri(ls.source_dataset)),
            Triple(node, iri(VOID + "target"), iri(ls.target_dataset)),
            Triple(node, iri(VOID + "linkPredicate"), iri(ls.link_type)),
        ]
    )


def format_score(score: float) -> str:
    return f"{score:.6f}"


def render_verify(ls: Linkset) -> str:
    p = iri(ls.link_type)
    lines = []
    for s, t, score in sorted(ls.verify):
        lines.append(Triple(iri(s), p, iri(t)).n3() + "\n")
        lines.append(f"# score={format_score(score)}\n")
    return "".join(lines)


def _write(path: str | os.PathLike, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def emit_linkset(ls: Linkset, accepted_path, verify_path, void_path) -> None:
    # N-Triples serialization sorts lines, so output is independent of input order
    _write(accepted_path, serialize_ntriples(linkset_triples(ls)))
    if verify_path is not None:
        _write(verify_path, render_verify(ls))
    _write(void_path, serialize_ntriples(void_graph(ls)))


# --- evaluation -------------------------------------------------------------------------


def _ratio(num: int, den: int) -> float:
    return 1.0 if den == 0 else num / den


def evaluate_against_gold(produced: Iterable[tuple[str, str]] | Graph, gold: Graph, link_type: str = OWL_SAME_AS) -> EvalReport:
    def pairs_of(g: Graph, what: str) -> set[tuple[str, str]]:
        out = set()
        for t in g:
            if t.predicate.value != link_type:
                raise GoldFormatError(f"{what} contains a triple with predicate {t.predicate.n3()}")
            out.add((t.subject.value, t.object.value))
        return out

    got = pairs_of(produced, "produced") if isinstance(produced, Graph) else set(produced)
    want = pairs_of(gold, "gold")
    tp = len(got & want)
    fp = len(got - want)
    fn = len(want - got)
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return EvalReport(tp, fp, fn, precision, recall, f1)

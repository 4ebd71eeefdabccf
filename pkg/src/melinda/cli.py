"""Command line: ``melinda link | validate | eval | uri-rules``.

Exit codes: 0 success, 1 input or specification error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import alignment as al
from .engine import (
    EmptyCandidatesWarning,
    GoldFormatError,
    apply_uri_rules,
    dataset_iri,
    emit_linkset,
    evaluate_against_gold,
    orient_transform,
    run_interlink,
)
from .linkspec import (
    KindMismatch,
    MissingAlignment,
    SpecError,
    UnresolvableProperty,
    parse_spec,
    resolve,
    validate,
)
from .rdf import OWL_SAME_AS, Graph, ParseError, parse_ntriples
from .similarity import TransformError, UnknownMetric

EXIT_OK, EXIT_INPUT, EXIT_IO = 0, 1, 2

INPUT_ERRORS = (
    SpecError,
    al.AlignmentError,
    ParseError,
    al.CellNotFound,
    al.AmbiguousCell,
    al.RuleError,
    MissingAlignment,
    KindMismatch,
    UnresolvableProperty,
    UnknownMetric,
    TransformError,
    GoldFormatError,
)


class InputError(Exception):
    """An input problem already rendered with its file location."""


@dataclass
class RunConfig:
    spec_path: Path
    interlink_id: str | None = None
    bindings: dict[str, Path] = field(default_factory=dict)
    alignment_paths: list[Path] = field(default_factory=list)
    output_dir: Path = Path(".")
    workers: int = 1
    mode: str = "link"

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: Path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _located(path: Path, exc: Exception) -> InputError:
    line = getattr(exc, "line", None)
    if isinstance(exc, ParseError):
        return InputError(f"{path}:{exc.line}:{exc.column}: {exc.reason}")
    if isinstance(exc, SpecError):
        return InputError(f"{path}:{line}: {exc}" if line else f"{path}: {exc}")
    return InputError(f"{path}: {type(exc).__name__}: {exc}")


def _load_graph(path: Path) -> Graph:
    text = _read(path)
    try:
        return parse_ntriples(text)
    except ParseError as exc:
        raise _located(path, exc) from None


def _load_alignments(paths: list[Path]) -> dict[str, al.Alignment]:
    out: dict[str, al.Alignment] = {}
    for p in paths:
        g = _load_graph(p)
        try:
            found = al.load_alignments(g)
        except al.AlignmentError as exc:
            raise _located(p, exc) from None
        if not found:
            raise InputError(f"{p}: no align:Alignment node found")
        out.update(found)
    return out


def _parse_bindings(items: list[str]) -> dict[str, Path]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise InputError(f"--bind expects id=path, got {item!r}")
        out[key] = Path(value)
    return out


def _source_file(spec_path: Path, spec, ds_id: str, bindings: dict[str, Path]) -> Path:
    if ds_id in bindings:
        return bindings[ds_id]
    ds = spec.data_sources[ds_id]
    if ds.file:
        p = Path(ds.file)
        return p if p.is_absolute() else spec_path.parent / p
    where = f"{spec_path}:{ds.line}: " if ds.line else f"{spec_path}: "
    reason = "only an EndpointURI is given" if ds.endpoint else "no File is given"
    raise InputError(f"{where}data source {ds_id!r} is not bound to a file ({reason}); use --bind {ds_id}=<path>")


def cmd_link(cfg: RunConfig) -> int:
    text = _read(cfg.spec_path)
    try:
        spec = parse_spec(text)
    except SpecError as exc:
        raise _located(cfg.spec_path, exc) from None
    alignments = _load_alignments(cfg.alignment_paths)
    try:
        plan = resolve(spec, cfg.interlink_id, alignments)
    except INPUT_ERRORS as exc:
        raise _located(cfg.spec_path, exc) from None
    for d in validate(spec):
        _err(f"{cfg.spec_path}: {d}")

    src_path = _source_file(cfg.spec_path, spec, plan.source, cfg.bindings)
    tgt_path = _source_file(cfg.spec_path, spec, plan.target, cfg.bindings)
    g_src = _load_graph(src_path)
    g_tgt = _load_graph(tgt_path)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", EmptyCandidatesWarning)
        try:
            ls = run_interlink(
                plan,
                g_src,
                g_tgt,
                source_dataset=dataset_iri(spec.data_sources[plan.source].graph, src_path),
                target_dataset=dataset_iri(spec.data_sources[plan.target].graph, tgt_path),
                workers=cfg.workers,
            )
        except INPUT_ERRORS as exc:
            raise _located(cfg.spec_path, exc) from None
    for w in caught:
        _err(f"warning: {w.message}")

    out = cfg.output_dir
    emit_linkset(ls, out / plan.output.accepted, out / plan.output.verify, out / plan.output.void)
    a, b = ls.candidates
    print(f"accepted={len(ls.accepted)} verify={len(ls.verify)} candidates={a}x{b}")
    return EXIT_OK


def cmd_validate(spec_path: Path, alignment_paths: list[Path]) -> int:
    text = _read(spec_path)
    try:
        spec = parse_spec(text)
    except SpecError as exc:
        raise _located(spec_path, exc) from None
    diagnostics = validate(spec)
    for d in diagnostics:
        _err(f"{spec_path}: {d}")
    alignments = _load_alignments(alignment_paths)
    if alignments or any(il.use_alignment for il in spec.interlinks):
        for il in spec.interlinks:
            try:
                resolve(spec, il.id, alignments)
            except INPUT_ERRORS as exc:
                raise _located(spec_path, exc) from None
    errors = sum(1 for d in diagnostics if d.level == "error")
    warns = len(diagnostics) - errors
    print(f"errors={errors} warnings={warns}")
    return EXIT_INPUT if errors else EXIT_OK


def cmd_eval(links_path: Path, gold_path: Path, link_type: str = OWL_SAME_AS) -> int:
    produced = _load_graph(links_path)
    gold = _load_graph(gold_path)
    try:
        report = evaluate_against_gold(produced, gold, link_type)
    except GoldFormatError as exc:
        raise InputError(f"{gold_path}: {exc}") from None
    print(f"precision={report.precision:.6f} recall={report.recall:.6f} f1={report.f1:.6f}")
    return EXIT_OK


def cmd_uri_rules(
    bindings: dict[str, Path],
    output_dir: Path,
    rule_source: str | None = None,
    rule_target: str | None = None,
    alignment_paths: list[Path] | None = None,
    cell: str | None = None,
    link_type: str = OWL_SAME_AS,
) -> int:
    for key in ("source", "target"):
        if key not in bindings:
            raise InputError(f"uri-rules needs --bind {key}=<path>")
    g_src = _load_graph(bindings["source"])
    g_tgt = _load_graph(bindings["target"])
    try:
        if rule_source is not None or rule_target is not None:
            if rule_source is None or rule_target is None:
                raise InputError("--rule-source and --rule-target go together")
            rule = al.UriRule(rule_source, rule_target)
        else:
            if not cell:
                raise InputError("give --rule-source/--rule-target, or --alignment with --cell")
            found = _load_alignments(alignment_paths or [])
            hits = []
            for a in found.values():
                try:
                    hits.append(al.find_cell(a, cell))
                except al.CellNotFound:
                    pass
            if len(hits) != 1:
                raise InputError(f"cell {cell!r} found in {len(hits)} alignments")
            if hits[0].transform is None:
                raise InputError(f"cell {cell!r} has no URI transformation")
            rule = orient_transform(hits[0].transform, g_src)
    except al.RuleError as exc:
        raise InputError(f"rule error: {exc}") from None
    ls = apply_uri_rules(
        rule,
        g_src,
        g_tgt,
        source_dataset=dataset_iri(None, bindings["source"]),
        target_dataset=dataset_iri(None, bindings["target"]),
        link_type=link_type,
    )
    emit_linkset(ls, output_dir / "accepted_links.nt", None, output_dir / "linkset_void.nt")
    print(f"accepted={len(ls.accepted)} verify=0 candidates={ls.candidates[0]}x{ls.candidates[1]}")
    return EXIT_OK


def _default_workers() -> int:
    raw = os.environ.get("MELINDA_WORKERS")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"MELINDA_WORKERS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"MELINDA_WORKERS must be a positive integer, got {raw!r}")
    return n


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="melinda", description="Interlink RDF datasets from linking specifications.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("link", help="run an interlink and write linkset files")
    p.add_argument("--spec", required=True, type=Path, help="linking specification (XML)")
    p.add_argument("--interlink", help="Interlink id to run (default: the only one)")
    p.add_argument("--bind", action="append", default=[], metavar="ID=PATH", help="read DataSource ID from an N-Triples file")
    p.add_argument("--alignment", action="append", default=[], type=Path, help="alignment document (N-Triples), repeatable")
    p.add_argument("--out", type=Path, default=Path("."), help="directory for the output files (default: .)")
    p.add_argument("--workers", type=_positive, default=None, help="scoring processes (default: $MELINDA_WORKERS or 1)")

    p = sub.add_parser("validate", help="check a specification (and alignments)")
    p.add_argument("--spec", required=True, type=Path, help="linking specification (XML)")
    p.add_argument("--alignment", action="append", default=[], type=Path, help="alignment document (N-Triples), repeatable")

    p = sub.add_parser("eval", help="precision/recall of a link file against a gold linkset")
    p.add_argument("--links", required=True, type=Path, help="produced links (N-Triples)")
    p.add_argument("--gold", required=True, type=Path, help="reference links (N-Triples)")
    p.add_argument("--link-type", default=OWL_SAME_AS, help="link predicate IRI (default: owl:sameAs)")

    p = sub.add_parser("uri-rules", help="link by rewriting URIs with a pattern rule")
    p.add_argument("--rule-source", help="regex matched against whole source IRIs")
    p.add_argument("--rule-target", help="target IRI template using $1, $2, ...")
    p.add_argument("--alignment", action="append", default=[], type=Path, help="alignment holding a transformation cell")
    p.add_argument("--cell", help="cell id or fragment, e.g. #uris")
    p.add_argument("--bind", action="append", default=[], metavar="source=PATH|target=PATH", help="the two graphs to link")
    p.add_argument("--out", type=Path, default=Path("."), help="directory for the output files (default: .)")
    p.add_argument("--link-type", default=OWL_SAME_AS, help="link predicate IRI (default: owl:sameAs)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "link":
            cfg = RunConfig(
                spec_path=args.spec,
                interlink_id=args.interlink,
                bindings=_parse_bindings(args.bind),
                alignment_paths=args.alignment,
                output_dir=args.out,
                workers=args.workers if args.workers is not None else _default_workers(),
            )
            return cmd_link(cfg)
        if args.command == "validate":
            return cmd_validate(args.spec, args.alignment)
        if args.command == "eval":
            return cmd_eval(args.links, args.gold, args.link_type)
        return cmd_uri_rules(
            _parse_bindings(args.bind),
            args.out,
            rule_source=args.rule_source,
            rule_target=args.rule_target,
            alignment_paths=args.alignment,
            cell=args.cell,
            link_type=args.link_type,
        )
    except InputError as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    except OSError as exc:
        _err(f"error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Alignment documents with EDOAL class/property expressions.

Alignments are read out of an RDF graph (N-Triples) that uses the Alignment
format and EDOAL vocabularies. Entity expressions can then be evaluated
against data graphs to get class extensions and property pair extensions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .rdf import (
    OWL,
    RDF,
    RDF_TYPE,
    RDFS,
    Graph,
    Term,
    Triple,
    blank,
    instances_of,
    iri,
    literal,
)

ALIGN = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment#"
EDOAL = "http://ns.inria.org/edoal/1.0/#"

# Property standing for "the resource's own URI" in URI-correspondence cells.
SELF_URI = RDF + "id"

EQUIVALENT, SUBSUMES, SUBSUMED_BY = "equivalent", "subsumes", "subsumedBy"
RELATIONS = {ALIGN + r: r for r in (EQUIVALENT, SUBSUMES, SUBSUMED_BY)}

NAMED_CLASS = "namedClass"
NAMED_PROPERTY = "namedProperty"
CLASS_CONJUNCTION = "classConjunction"
PROPERTY_CONJUNCTION = "propertyConjunction"
VALUE_CONSTRAINT = "propertyValueConstraint"
DOMAIN_RESTRICTION = "propertyDomainRestriction"

CLASS_KINDS = {NAMED_CLASS, CLASS_CONJUNCTION, VALUE_CONSTRAINT}
PROPERTY_KINDS = {NAMED_PROPERTY, PROPERTY_CONJUNCTION, DOMAIN_RESTRICTION}

_CLASS_TYPES = {EDOAL + "Class", OWL + "Class", RDFS + "Class"}
_PROPERTY_TYPES = {
    EDOAL + "Property",
    ALIGN + "Property",
    RDF + "Property",
    OWL + "ObjectProperty",
    OWL + "DatatypeProperty",
}
_KNOWN_NODE_TYPES = _CLASS_TYPES | _PROPERTY_TYPES | {
    EDOAL + "PropertyValueConstraint",
    EDOAL + "PropertyDomainRestriction",
}

_T = iri(RDF_TYPE)


def _a(name: str) -> Term:
    return iri(ALIGN + name)


def _e(name: str) -> Term:
    return iri(EDOAL + name)


class AlignmentError(ValueError):
    def __init__(self, node, reason: str):
        label = node.n3() if isinstance(node, Term) else str(node)
        super().__init__(f"{label}: {reason}")
        self.node = node
        self.reason = reason


class CellNotFound(LookupError):
    pass


class AmbiguousCell(LookupError):
    pass


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class EntityExpression:
    kind: str
    iri: str | None = None
    operands: tuple[EntityExpression, ...] = ()
    prop: str | None = None
    value: Term | None = None

    @property
    def is_class(self) -> bool:
        return self.kind in CLASS_KINDS

    @property
    def is_property(self) -> bool:
        return self.kind in PROPERTY_KINDS

    def key(self) -> str:
        """Canonical string used to order conjunction operands."""
        if self.kind in (NAMED_CLASS, NAMED_PROPERTY):
            return f"{self.kind}<{self.iri}>"
        if self.kind == VALUE_CONSTRAINT:
            return f"{self.kind}<{self.prop}>{self.value.n3()}"
        return self.kind + "(" + ",".join(op.key() for op in self.operands) + ")"

    def __str__(self) -> str:
        return self.key()


def named_class(value: str) -> EntityExpression:
    return EntityExpression(NAMED_CLASS, iri=value)


def named_property(value: str) -> EntityExpression:
    return EntityExpression(NAMED_PROPERTY, iri=value)


def value_constraint(prop: str, value: Term) -> EntityExpression:
    return EntityExpression(VALUE_CONSTRAINT, prop=prop, value=value)


def domain_restriction(domain: EntityExpression) -> EntityExpression:
    if not domain.is_class:
        raise AlignmentError(domain.key(), "domain of a PropertyDomainRestriction must be a class")
    return EntityExpression(DOMAIN_RESTRICTION, operands=(domain,))


def _canonical_operands(kind: str, operands: Iterable[EntityExpression]) -> tuple[EntityExpression, ...]:
    flat: dict[str, EntityExpression] = {}
    for op in operands:
        if op.kind == kind:
            for sub in op.operands:
                flat[sub.key()] = sub
        else:
            flat[op.key()] = op
    return tuple(flat[k] for k in sorted(flat))


def conjoin(*operands: EntityExpression) -> EntityExpression:
    """Class conjunction, flattened, deduplicated and canonically ordered.

    A single remaining operand is returned as is.
    """
    if not operands:
        raise ValueError("conjunction needs at least one operand")
    for op in operands:
        if not op.is_class:
            raise AlignmentError(op.key(), "class conjunction operand is not a class expression")
    ops = _canonical_operands(CLASS_CONJUNCTION, operands)
    if len(ops) == 1:
        return ops[0]
    return EntityExpression(CLASS_CONJUNCTION, operands=ops)


def property_conjunction(*operands: EntityExpression) -> EntityExpression:
    if not operands:
        raise ValueError("conjunction needs at least one operand")
    for op in operands:
        if not op.is_property:
            raise AlignmentError(op.key(), "property conjunction operand is not a property expression")
    return EntityExpression(PROPERTY_CONJUNCTION, operands=_canonical_operands(PROPERTY_CONJUNCTION, operands))


# --- URI correspondences ----------------------------------------------------

_GROUP_REF = re.compile(r"\$(?:\{(\d+)\}|(\d+))")


@dataclass(frozen=True)
class UriRule:
    source_pattern: str
    target_template: str

    def __post_init__(self):
        try:
            compiled = re.compile(self.source_pattern)
        except re.error as exc:
            raise RuleError(f"invalid pattern {self.source_pattern!r}: {exc}") from None
        for m in _GROUP_REF.finditer(self.target_template):
            n = int(m.group(1) or m.group(2))
            if n < 1 or n > compiled.groups:
                raise RuleError(
                    f"template {self.target_template!r} references group ${n}, "
                    f"pattern has {compiled.groups}"
                )

    @property
    def regex(self) -> re.Pattern:
        return re.compile(self.source_pattern)

    def apply(self, uri: str) -> str | None:
        """Rewrite ``uri``; None unless the pattern matches the whole string."""
        m = self.regex.fullmatch(uri)
        if m is None:
            return None
        return _GROUP_REF.sub(lambda r: m.group(int(r.group(1) or r.group(2))) or "", self.target_template)


_REGEX_ESCAPABLE = set(".^$*+?()[]{}|\\/-")
_REGEX_META = set(".^$*+?()[]{}|")


@dataclass(frozen=True)
class LabeledPattern:
    """A URI pattern whose capture groups are each followed by a ``$n`` label.

    ``http://x/([^_]*)$1_([^.]*)$2\\.rdf`` labels its groups 1 and 2. Such a
    pattern can be read as a regex (labels stripped) or, on the other side of
    a correspondence, as a template (each group replaced by its label).
    """

    text: str
    regex: str = field(init=False)
    template: str | None = field(init=False)
    labels: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        regex, template, labels = _split_labeled(self.text)
        object.__setattr__(self, "regex", regex)
        object.__setattr__(self, "template", template)
        object.__setattr__(self, "labels", labels)
        try:
            re.compile(regex)
        except re.error as exc:
            raise RuleError(f"invalid pattern {self.text!r}: {exc}") from None


def _split_labeled(text: str) -> tuple[str, str | None, tuple[int, ...]]:
    regex: list[str] = []
    template: list[str] | None = []
    labels: list[int] = []
    i, depth, n = 0, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n:
            regex.append(text[i:i + 2])
            if depth == 0 and template is not None:
                if text[i + 1] in _REGEX_ESCAPABLE:
                    template.append(text[i + 1])
                else:
                    template = None
            i += 2
            continue
        if c == "[":
            # character class: copy verbatim up to the closing bracket
            j = i + 1
            if j < n and text[j] == "^":
                j += 1
            if j < n and text[j] == "]":
                j += 1
            while j < n and text[j] != "]":
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                raise RuleError(f"unterminated character class in {text!r}")
            regex.append(text[i:j + 1])
            if depth == 0:
                template = None
            i = j + 1
            continue
        if c == "(":
            if depth == 0 and text.startswith("(?", i):
                raise RuleError(f"top-level groups must be plain capture groups in {text!r}")
            depth += 1
            regex.append(c)
            i += 1
            continue
        if c == ")":
            depth -= 1
            if depth < 0:
                raise RuleError(f"unbalanced parenthesis in {text!r}")
            regex.append(c)
            i += 1
            if depth == 0:
                m = re.compile(r"\$(\d+)").match(text, i)
                if m is None:
                    raise RuleError(f"capture group without $n label in {text!r}")
                labels.append(int(m.group(1)))
                if template is not None:
                    template.append("${" + m.group(1) + "}")
                i = m.end()
            continue
        regex.append(c)
        if depth == 0 and template is not None:
            if c in _REGEX_META:
                template = None
            else:
                template.append(c)
        i += 1
    if depth != 0:
        raise RuleError(f"unbalanced parenthesis in {text!r}")
    if len(set(labels)) != len(labels):
        raise RuleError(f"duplicate group label in {text!r}")
    return "".join(regex), None if template is None else "".join(template), tuple(labels)


@dataclass(frozen=True)
class UriTransform:
    """Two labeled URI patterns, one for each side of a correspondence."""

    entity1_pattern: LabeledPattern
    entity2_pattern: LabeledPattern

    def __post_init__(self):
        if sorted(self.entity1_pattern.labels) != sorted(self.entity2_pattern.labels):
            raise RuleError("both sides of a URI transformation must use the same group labels")

    def rule(self, forward: bool = True) -> UriRule:
        """The rule rewriting entity1-side URIs (forward) or entity2-side URIs."""
        src, dst = (
            (self.entity1_pattern, self.entity2_pattern)
            if forward
            else (self.entity2_pattern, self.entity1_pattern)
        )
        if dst.template is None:
            raise RuleError(f"pattern {dst.text!r} cannot be used as a rewrite template")
        # renumber: label k on the source side is regex group position(k)
        position = {label: idx + 1 for idx, label in enumerate(src.labels)}
        template = re.sub(r"\$\{(\d+)\}", lambda m: "${%d}" % position[int(m.group(1))], dst.template)
        return UriRule(src.regex, template)


# --- alignment model --------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    id: str
    entity1: EntityExpression
    entity2: EntityExpression
    relation: str
    transform: UriTransform | None = None

    @property
    def is_class_cell(self) -> bool:
        return self.entity1.is_class

    @property
    def is_property_cell(self) -> bool:
        return self.entity1.is_property


@dataclass(frozen=True)
class Alignment:
    id: str
    onto1: str
    onto2: str
    cells: tuple[Cell, ...] = ()


def _local_name(value: str) -> str:
    for sep in ("#", "/", ":"):
        if sep in value:
            tail = value.rsplit(sep, 1)[1]
            if tail:
                return tail
    return value


def _declared_kind(g: Graph, node: Term) -> str | None:
    types = {t.value for t in g.objects(node, _T) if t.is_iri}
    is_cls = bool(types & _CLASS_TYPES)
    is_prop = bool(types & _PROPERTY_TYPES)
    if is_cls and is_prop:
        raise AlignmentError(node, "typed both as a class and as a property")
    if is_cls:
        return "class"
    if is_prop:
        return "property"
    return None


def _is_composite(g: Graph, node: Term) -> bool:
    if node.is_blank:
        return True
    if g.objects(node, _e("and")):
        return True
    types = {t.value for t in g.objects(node, _T)}
    return bool(types & {EDOAL + "PropertyValueConstraint", EDOAL + "PropertyDomainRestriction"})


class _ExpressionReader:
    def __init__(self, g: Graph):
        self.g = g

    def objects(self, node: Term, pred: Term) -> list[Term]:
        return sorted(self.g.objects(node, pred))

    def one(self, node: Term, name: str, pred: Term) -> Term:
        vals = self.objects(node, pred)
        if not vals:
            raise AlignmentError(node, f"missing {name}")
        if len(vals) > 1:
            raise AlignmentError(node, f"several values for {name}")
        return vals[0]

    def read(self, node: Term, expect: str | None, _seen: frozenset = frozenset()) -> EntityExpression:
        """Read the expression rooted at ``node``; ``expect`` is 'class', 'property' or None."""
        if node in _seen:
            raise AlignmentError(node, "cyclic expression")
        seen = _seen | {node}
        if node.is_literal:
            raise AlignmentError(node, "a literal cannot denote an entity")
        if not _is_composite(self.g, node):
            kind = _declared_kind(self.g, node) or expect or _guess_kind(node)
            if expect and kind != expect:
                raise AlignmentError(node, f"expected a {expect}, found a {kind}")
            return named_class(node.value) if kind == "class" else named_property(node.value)

        types = {t.value for t in self.objects(node, _T) if t.is_iri}
        unknown = types - _KNOWN_NODE_TYPES
        if unknown:
            raise AlignmentError(node, f"unrecognized expression type {sorted(unknown)[0]}")
        if EDOAL + "PropertyValueConstraint" in types:
            self._expect(node, expect, "class")
            prop = self.one(node, "edoal:property", _e("property"))
            if not prop.is_iri:
                raise AlignmentError(node, "edoal:property must be an IRI")
            value = self.one(node, "edoal:value", _e("value"))
            return value_constraint(prop.value, value)
        if EDOAL + "PropertyDomainRestriction" in types:
            self._expect(node, expect, "property")
            dom = self.one(node, "edoal:domain", _e("domain"))
            return domain_restriction(self.read(dom, "class", seen))

        ands = self.objects(node, _e("and"))
        declared = _declared_kind(self.g, node)
        if declared is None:
            raise AlignmentError(node, "expression node has no recognized type")
        self._expect(node, expect, declared)
        operands = [self.read(op, declared if not _is_composite(self.g, op) else None, seen) for op in ands]
        if not operands:
            raise AlignmentError(node, "conjunction without edoal:and operands")
        try:
            if declared == "class":
                if not all(op.is_class for op in operands):
                    raise AlignmentError(node, "class conjunction with a non-class operand")
                return EntityExpression(CLASS_CONJUNCTION, operands=_canonical_operands(CLASS_CONJUNCTION, operands))
            if not all(op.is_property for op in operands):
                raise AlignmentError(node, "property conjunction with a non-property operand")
            return EntityExpression(PROPERTY_CONJUNCTION, operands=_canonical_operands(PROPERTY_CONJUNCTION, operands))
        except AlignmentError as exc:
            if exc.node is node:
                raise
            raise AlignmentError(node, exc.reason) from None

    @staticmethod
    def _expect(node: Term, expect: str | None, actual: str):
        if expect and expect != actual:
            raise AlignmentError(node, f"expected a {expect}, found a {actual} expression")


def _guess_kind(node: Term) -> str:
    # naming convention: Classes are capitalised, properties are not
    name = _local_name(node.value)
    first = next((c for c in name if c.isalpha()), "")
    return "class" if first.isupper() else "property"


def _kind_hint(g: Graph, node: Term) -> str | None:
    if _is_composite(g, node):
        types = {t.value for t in g.objects(node, _T)}
        if EDOAL + "PropertyValueConstraint" in types:
            return "class"
        if EDOAL + "PropertyDomainRestriction" in types:
            return "property"
    return _declared_kind(g, node)


def _read_transform(g: Graph, cell: Term, reader: _ExpressionReader) -> UriTransform | None:
    nodes = reader.objects(cell, _e("transformation"))
    if not nodes:
        return None
    if len(nodes) > 1:
        raise AlignmentError(cell, "several edoal:transformation values")
    node = nodes[0]
    src = reader.one(node, "edoal:source", _e("source"))
    dst = reader.one(node, "edoal:target", _e("target"))
    if not (src.is_literal and dst.is_literal):
        raise AlignmentError(node, "transformation source/target must be literals")
    try:
        return UriTransform(LabeledPattern(src.value), LabeledPattern(dst.value))
    except RuleError as exc:
        raise AlignmentError(node, str(exc)) from None


def _read_cell(g: Graph, node: Term, reader: _ExpressionReader) -> Cell:
    e1 = reader.one(node, "align:entity1", _a("entity1"))
    e2 = reader.one(node, "align:entity2", _a("entity2"))
    rel = reader.one(node, "align:relation", _a("relation"))
    if not rel.is_iri or rel.value not in RELATIONS:
        raise AlignmentError(node, f"unknown relation {rel.n3()}")
    # an untyped named entity takes its kind from the other side when it can
    hint = _kind_hint(g, e1) or _kind_hint(g, e2)
    x1 = reader.read(e1, None if _is_composite(g, e1) else hint)
    x2 = reader.read(e2, None if _is_composite(g, e2) else (hint or ("class" if x1.is_class else "property")))
    if x1.is_class != x2.is_class:
        raise AlignmentError(node, "entity1 and entity2 are not of the same kind")
    transform = _read_transform(g, node, reader)
    if transform is not None and not x1.is_property:
        raise AlignmentError(node, "a transformation is only allowed on a property correspondence")
    return Cell(node.value, x1, x2, RELATIONS[rel.value], transform)


def parse_alignment(g: Graph, root: Term | str) -> Alignment:
    root = iri(root) if isinstance(root, str) else root
    if _a("Alignment") not in g.objects(root, _T):
        raise AlignmentError(root, "not typed align:Alignment")
    reader = _ExpressionReader(g)
    onto1 = reader.one(root, "align:onto1", _a("onto1"))
    onto2 = reader.one(root, "align:onto2", _a("onto2"))
    cells = [_read_cell(g, c, reader) for c in reader.objects(root, _a("map"))]
    cells.sort(key=lambda c: c.id)
    return Alignment(root.value, onto1.value, onto2.value, tuple(cells))


def alignment_roots(g: Graph) -> list[Term]:
    return sorted(g.subjects(_T, _a("Alignment")))


def load_alignments(g: Graph) -> dict[str, Alignment]:
    """Every alignment in ``g`` keyed by its IRI."""
    return {r.value: parse_alignment(g, r) for r in alignment_roots(g)}


def _fragment(value: str) -> str:
    return value.rsplit("#", 1)[1] if "#" in value else value


def find_cell(a: Alignment, cell_id: str) -> Cell:
    for c in a.cells:
        if c.id == cell_id:
            return c
    wanted = cell_id[1:] if cell_id.startswith("#") else _fragment(cell_id)
    hits = [c for c in a.cells if _fragment(c.id) == wanted]
    if not hits:
        raise CellNotFound(cell_id)
    if len(hits) > 1:
        raise AmbiguousCell(cell_id)
    return hits[0]


# --- evaluation ---------------------------------------------------------------


def eval_class_expr(e: EntityExpression, g: Graph) -> frozenset[Term]:
    if e.kind == NAMED_CLASS:
        return instances_of(g, iri(e.iri))
    if e.kind == VALUE_CONSTRAINT:
        return g.subjects(iri(e.prop), e.value)
    if e.kind == CLASS_CONJUNCTION:
        result = None
        for op in sorted(e.operands, key=lambda o: o.kind != NAMED_CLASS):
            ext = eval_class_expr(op, g)
            result = ext if result is None else result & ext
            if not result:
                break
        return frozenset(result or ())
    raise ValueError(f"not a class expression: {e.kind}")


def eval_property_expr(e: EntityExpression, g: Graph) -> frozenset[tuple[Term, Term]]:
    if e.kind == NAMED_PROPERTY:
        return frozenset((t.subject, t.object) for t in g.with_predicate(iri(e.iri)))
    if e.kind == PROPERTY_CONJUNCTION:
        pairs = None
        domains = []
        for op in e.operands:
            if op.kind == DOMAIN_RESTRICTION:
                domains.append(op.operands[0])
            else:
                ext = eval_property_expr(op, g)
                pairs = ext if pairs is None else pairs & ext
        if not pairs:
            return frozenset()
        for dom in domains:
            members = eval_class_expr(dom, g)
            pairs = {(s, o) for (s, o) in pairs if s in members}
        return frozenset(pairs)
    raise ValueError(f"not a pair-valued property expression: {e.kind}")


def named_properties(e: EntityExpression) -> list[str]:
    """IRIs of the named properties conjoined in ``e``, in canonical order."""
    if e.kind == NAMED_PROPERTY:
        return [e.iri]
    if e.kind == PROPERTY_CONJUNCTION:
        out: list[str] = []
        for op in e.operands:
            out.extend(named_properties(op))
        return out
    return []


def domain_restrictions(e: EntityExpression) -> list[EntityExpression]:
    if e.kind == DOMAIN_RESTRICTION:
        return [e.operands[0]]
    if e.kind == PROPERTY_CONJUNCTION:
        return [d for op in e.operands for d in domain_restrictions(op)]
    return []


# --- serialization ----------------------------------------------------------------


class _Writer:
    def __init__(self, prefix: str):
        self.prefix = prefix
        self.n = 0
        self.out: list[Triple] = []

    def fresh(self) -> Term:
        self.n += 1
        return blank(f"{self.prefix}{self.n}")

    def add(self, s: Term, p: Term, o: Term):
        self.out.append(Triple(s, p, o))

    def expr(self, e: EntityExpression) -> Term:
        if e.kind in (NAMED_CLASS, NAMED_PROPERTY):
            node = iri(e.iri)
            self.add(node, _T, _e("Class") if e.kind == NAMED_CLASS else _e("Property"))
            return node
        node = self.fresh()
        if e.kind == VALUE_CONSTRAINT:
            self.add(node, _T, _e("PropertyValueConstraint"))
            self.add(node, _e("property"), iri(e.prop))
            self.add(node, _e("value"), e.value)
        elif e.kind == DOMAIN_RESTRICTION:
            self.add(node, _T, _e("PropertyDomainRestriction"))
            self.add(node, _e("domain"), self.expr(e.operands[0]))
        else:
            self.add(node, _T, _e("Class") if e.kind == CLASS_CONJUNCTION else _e("Property"))
            for op in e.operands:
                self.add(node, _e("and"), self.expr(op))
        return node


def alignment_to_graph(a: Alignment) -> Graph:
    """Triples that :func:`parse_alignment` reads back into ``a``."""
    w = _Writer("x")
    root = iri(a.id)
    w.add(root, _T, _a("Alignment"))
    w.add(root, _a("onto1"), iri(a.onto1))
    w.add(root, _a("onto2"), iri(a.onto2))
    for cell in a.cells:
        node = iri(cell.id) if ":" in cell.id else blank(cell.id)
        w.add(root, _a("map"), node)
        w.add(node, _T, _a("Cell"))
        w.add(node, _a("entity1"), w.expr(cell.entity1))
        w.add(node, _a("entity2"), w.expr(cell.entity2))
        w.add(node, _a("relation"), _a(cell.relation))
        if cell.transform is not None:
            t = w.fresh()
            w.add(node, _e("transformation"), t)
            w.add(t, _e("source"), literal(cell.transform.entity1_pattern.text))
            w.add(t, _e("target"), literal(cell.transform.entity2_pattern.text))
    return Graph(w.out)

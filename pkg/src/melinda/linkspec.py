"""Linking specifications: the Silk-style XML dialect and its resolution.

A specification declares prefixes, data sources and interlinks. An interlink
may point into an alignment (``UseAlignment``/``LinkCell``/``CellParam``) for
its class restrictions and compared properties; :func:`resolve` replaces those
references with concrete class expressions and property paths.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Union
from xml.parsers import expat

from . import alignment as al
from .alignment import Alignment, EntityExpression
from .rdf import OWL, RDF, RDF_TYPE, RDFS, XSD, Term, iri, literal
from .similarity import COMBINERS, METRICS, TransformDecl, TransformError

DEFAULT_PREFIXES = {"rdf": RDF, "rdfs": RDFS, "owl": OWL, "xsd": XSD}


class SpecError(ValueError):
    def __init__(self, element: str, reason: str, line: int | None = None):
        where = f"<{element}>" + (f" (line {line})" if line else "")
        super().__init__(f"{where}: {reason}")
        self.element = element
        self.reason = reason
        self.line = line


class MissingAlignment(LookupError):
    pass


class KindMismatch(ValueError):
    pass


class UnresolvableProperty(ValueError):
    pass


# --- model ------------------------------------------------------------------------


@dataclass(frozen=True)
class DataSourceDecl:
    id: str
    file: str | None = None
    endpoint: str | None = None
    graph: str | None = None
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Pattern:
    """``?var predicate object`` restriction."""

    var: str
    predicate: str
    object: Term


@dataclass(frozen=True)
class DatasetRef:
    data_source: str
    var: str
    restrictions: tuple[Pattern, ...] = ()
    has_restrict_to: bool = False


@dataclass(frozen=True)
class PathSide:
    """Values of a resource reached through each path, intersected.

    Inline parameters carry exactly one path; conjunctions of named
    properties coming from an alignment cell carry one path per property.
    """

    paths: tuple[tuple[str, ...], ...]
    transforms: tuple[TransformDecl, ...] = ()
    var: str | None = field(default=None, compare=False)
    # domain restrictions read off the alignment; candidates are already
    # class-restricted so these are kept for reporting only
    domains: tuple[EntityExpression, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class CellParamSide:
    cell: str
    entity: str  # "entity1" or "entity2"
    transforms: tuple[TransformDecl, ...] = ()


Side = Union[PathSide, CellParamSide]


@dataclass(frozen=True)
class Compare:
    metric: str
    left: Side
    right: Side
    line: int | None = field(default=None, compare=False)

    @property
    def kind(self) -> str:
        return "compare"


@dataclass(frozen=True)
class Aggregate:
    combiner: str
    children: tuple[Condition, ...]

    @property
    def kind(self) -> str:
        return "aggregate"


Condition = Union[Compare, Aggregate]


@dataclass(frozen=True)
class OutputDecl:
    accepted: str = "accepted_links.nt"
    verify: str = "verify_links.nt"
    void: str = "linkset_void.nt"
    mode: str = "truncate"
    linkset: str | None = None


@dataclass(frozen=True)
class Interlink:
    id: str
    link_type: str
    source: DatasetRef
    target: DatasetRef
    condition: Condition
    accept: float
    verify: float
    output: OutputDecl = OutputDecl()
    use_alignment: str | None = None
    link_cell: str | None = None
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class LinkSpec:
    prefixes: dict[str, str]
    data_sources: dict[str, DataSourceDecl]
    interlinks: tuple[Interlink, ...]
    used_prefixes: frozenset[str] = field(default=frozenset(), compare=False)
    prefix_lines: dict[str, int] = field(default_factory=dict, compare=False)

    def interlink(self, interlink_id: str | None = None) -> Interlink:
        if interlink_id is None:
            if len(self.interlinks) != 1:
                raise SpecError("Interlink", f"{len(self.interlinks)} interlinks declared; choose one by id")
            return self.interlinks[0]
        for il in self.interlinks:
            if il.id == interlink_id:
                return il
        raise SpecError("Interlink", f"no interlink with id {interlink_id!r}")


@dataclass(frozen=True)
class ResolvedPlan:
    interlink_id: str
    link_type: str
    source: str
    target: str
    source_var: str
    target_var: str
    source_class: EntityExpression
    target_class: EntityExpression
    condition: Condition
    accept: float
    verify: float
    output: OutputDecl = OutputDecl()


def compare_leaves(c: Condition) -> list[Compare]:
    if isinstance(c, Compare):
        return [c]
    return [leaf for ch in c.children for leaf in compare_leaves(ch)]


# --- XML reading ----------------------------------------------------------------------


@dataclass
class _Node:
    tag: str
    attrib: dict[str, str]
    line: int
    children: list[_Node] = field(default_factory=list)
    text: str = ""


def _read_xml(text: str) -> _Node:
    # no namespace processing: `rdf:resource` is read as a plain attribute name,
    # so specs need not declare xmlns:rdf
    parser = expat.ParserCreate()
    stack: list[_Node] = []
    root: list[_Node] = []

    def start(tag, attrs):
        node = _Node(tag, dict(attrs), parser.CurrentLineNumber)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(tag):
        stack.pop()

    def chars(data):
        if stack:
            stack[-1].text += data

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        raise SpecError("xml", f"malformed XML: {expat.ErrorString(exc.code)}", exc.lineno) from None
    return root[0]


# --- parsing ---------------------------------------------------------------------------

_PNAME = re.compile(r"^([A-Za-z_][\w\-.]*)?:([^\s<>\"]*)$")
_TOKEN = re.compile(r'<[^>]*>|"(?:[^"\\]|\\.)*"(?:@[A-Za-z\-0-9]+|\^\^\S+)?|\S+')


class _Parser:
    def __init__(self):
        self.prefixes = dict(DEFAULT_PREFIXES)
        self.declared: dict[str, int] = {}
        self.used: set[str] = set()

    def fail(self, node: _Node, reason: str):
        raise SpecError(node.tag, reason, node.line)

    def attrs(self, node: _Node, required: tuple[str, ...] = (), optional: tuple[str, ...] = ()) -> dict[str, str]:
        allowed = set(required) | set(optional)
        for name in node.attrib:
            if name not in allowed and not name.startswith("xmlns"):
                self.fail(node, f"unknown attribute {name!r}")
        for name in required:
            if name not in node.attrib:
                self.fail(node, f"missing attribute {name!r}")
        return node.attrib

    def no_children(self, node: _Node):
        if node.children:
            self.fail(node.children[0], f"unexpected element inside <{node.tag}>")

    def expand(self, node: _Node, name: str) -> str:
        name = name.strip()
        if name.startswith("<") and name.endswith(">"):
            value = name[1:-1]
        else:
            m = _PNAME.match(name)
            if not m:
                self.fail(node, f"not a prefixed name or IRI: {name!r}")
            prefix = m.group(1) or ""
            if prefix not in self.prefixes and m.group(2).startswith("//"):
                return name  # an absolute IRI such as http://host/path
            if prefix not in self.prefixes:
                self.fail(node, f"undeclared prefix {prefix!r}")
            self.used.add(prefix)
            value = self.prefixes[prefix] + m.group(2)
        if ":" not in value:
            self.fail(node, f"not an absolute IRI: {value!r}")
        return value

    def term(self, node: _Node, token: str) -> Term:
        if token.startswith('"'):
            m = re.match(r'^"((?:[^"\\]|\\.)*)"(?:@([A-Za-z\-0-9]+)|\^\^(\S+))?$', token)
            if not m:
                self.fail(node, f"malformed literal {token}")
            value = re.sub(r"\\(.)", r"\1", m.group(1))
            if m.group(2):
                return literal(value, lang=m.group(2))
            if m.group(3):
                return literal(value, datatype=self.expand(node, m.group(3)))
            return literal(value)
        return iri(self.expand(node, token))

    # -- elements

    def spec(self, root: _Node) -> LinkSpec:
        if root.tag != "Silk":
            self.fail(root, "root element must be <Silk>")
        self.attrs(root)
        sources: dict[str, DataSourceDecl] = {}
        interlink_nodes: list[_Node] = []
        use_alignment: str | None = None
        for child in root.children:
            if child.tag == "Prefix":
                a = self.attrs(child, ("id", "namespace"))
                self.no_children(child)
                if a["id"] in self.declared:
                    self.fail(child, f"prefix {a['id']!r} declared twice")
                self.prefixes[a["id"]] = a["namespace"].strip()
                self.declared[a["id"]] = child.line
            elif child.tag == "DataSource":
                ds = self.data_source(child)
                if ds.id in sources:
                    self.fail(child, f"data source {ds.id!r} declared twice")
                sources[ds.id] = ds
            elif child.tag == "Interlink":
                interlink_nodes.append(child)
            elif child.tag == "UseAlignment":
                if use_alignment is not None:
                    self.fail(child, "only one UseAlignment is supported")
                use_alignment = self.resource(child)
            else:
                self.fail(child, "unknown element")
        if not interlink_nodes:
            self.fail(root, "no Interlink declared")
        interlinks = []
        for node in interlink_nodes:
            il = self.interlink(node, sources, use_alignment)
            if any(x.id == il.id for x in interlinks):
                self.fail(node, f"interlink {il.id!r} declared twice")
            interlinks.append(il)
        return LinkSpec(
            prefixes={k: v for k, v in self.prefixes.items() if k in self.declared},
            data_sources=sources,
            interlinks=tuple(interlinks),
            used_prefixes=frozenset(self.used),
            prefix_lines=dict(self.declared),
        )

    def resource(self, node: _Node) -> str:
        a = self.attrs(node, ("rdf:resource",))
        self.no_children(node)
        value = a["rdf:resource"].strip()
        if not value:
            self.fail(node, "empty rdf:resource")
        return value

    def data_source(self, node: _Node) -> DataSourceDecl:
        a = self.attrs(node, ("id",))
        fields: dict[str, str] = {}
        for child in node.children:
            key = {"File": "file", "EndpointURI": "endpoint", "Graph": "graph"}.get(child.tag)
            if key is None:
                self.fail(child, "unknown element")
            self.attrs(child)
            self.no_children(child)
            if key in fields:
                self.fail(child, "given twice")
            fields[key] = child.text.strip()
            if not fields[key]:
                self.fail(child, "empty value")
        return DataSourceDecl(a["id"], line=node.line, **fields)

    def dataset(self, node: _Node, sources: dict[str, DataSourceDecl]) -> DatasetRef:
        a = self.attrs(node, ("dataSource",), ("var",))
        if a["dataSource"] not in sources:
            self.fail(node, f"undeclared data source {a['dataSource']!r}")
        var = a.get("var", "a" if node.tag == "SourceDataset" else "b")
        patterns: list[Pattern] = []
        has_restrict = False
        for child in node.children:
            if child.tag != "RestrictTo":
                self.fail(child, "unknown element")
            if has_restrict:
                self.fail(child, "RestrictTo given twice")
            has_restrict = True
            self.attrs(child)
            self.no_children(child)
            patterns.extend(self.restrict_to(child, var))
            if not patterns:
                self.fail(child, "empty RestrictTo")
        return DatasetRef(a["dataSource"], var, tuple(patterns), has_restrict)

    def restrict_to(self, node: _Node, var: str) -> list[Pattern]:
        tokens = _TOKEN.findall(node.text)
        out: list[Pattern] = []
        i = 0
        while i < len(tokens):
            if tokens[i] == ".":
                i += 1
                continue
            chunk = tokens[i:i + 3]
            if len(chunk) < 3:
                self.fail(node, f"incomplete pattern {' '.join(chunk)!r}")
            s, p, o = chunk
            trailing_dot = o.endswith(".") and not o.startswith('"') and len(o) > 1 and not o.startswith("<")
            if trailing_dot:
                o = o[:-1]
            if s != "?" + var:
                self.fail(node, f"pattern subject {s!r} is not the dataset variable ?{var}")
            if o.startswith("?"):
                self.fail(node, "only subject-variable patterns are supported")
            pred = RDF_TYPE if p == "a" else self.expand(node, p)
            out.append(Pattern(var, pred, self.term(node, o)))
            i += 3
        return out

    def path(self, node: _Node, text: str) -> tuple[str, tuple[str, ...]]:
        text = text.strip()
        m = re.match(r"^\?(\w+)", text)
        if not m:
            self.fail(node, f"path must start with a variable: {text!r}")
        var, rest = m.group(1), text[m.end():]
        steps: list[str] = []
        while rest:
            if not rest.startswith("/"):
                self.fail(node, f"malformed path {text!r}")
            rest = rest[1:]
            if rest.startswith("<"):
                end = rest.find(">")
                if end < 0:
                    self.fail(node, f"unterminated IRI in path {text!r}")
                steps.append(self.expand(node, rest[:end + 1]))
                rest = rest[end + 1:]
            else:
                m2 = re.match(r"^[^/]+", rest)
                if not m2:
                    self.fail(node, f"empty step in path {text!r}")
                steps.append(self.expand(node, m2.group(0)))
                rest = rest[m2.end():]
        if not steps:
            self.fail(node, f"path {text!r} has no property step")
        return var, tuple(steps)

    def transforms(self, node: _Node) -> tuple[TransformDecl, ...]:
        out = []
        for child in node.children:
            if child.tag != "Transform":
                self.fail(child, "unknown element")
            a = self.attrs(child, ("function",), ("separator", "pattern", "replacement"))
            self.no_children(child)
            try:
                out.append(
                    TransformDecl(
                        a["function"],
                        separator=a.get("separator"),
                        pattern=a.get("pattern"),
                        replacement=a.get("replacement"),
                    )
                )
            except TransformError as exc:
                self.fail(child, str(exc))
        return tuple(out)

    def condition(self, node: _Node, src: DatasetRef, tgt: DatasetRef) -> Condition:
        if node.tag == "Compare":
            return self.compare(node, src, tgt)
        if node.tag in COMBINERS or node.tag == "And":
            if node.tag == "And":
                a = self.attrs(node, ("combiner",))
                combiner = a["combiner"].strip()
                if combiner not in COMBINERS:
                    self.fail(node, f"unknown combiner {combiner!r}")
            else:
                self.attrs(node)
                combiner = node.tag
            if not node.children:
                self.fail(node, "aggregate without children")
            return Aggregate(combiner, tuple(self.condition(c, src, tgt) for c in node.children))
        self.fail(node, "unknown element")

    def compare(self, node: _Node, src: DatasetRef, tgt: DatasetRef) -> Compare:
        a = self.attrs(node, ("metric",))
        metric = a["metric"].strip()
        params = [c for c in node.children if c.tag == "Param"]
        cells = [c for c in node.children if c.tag == "CellParam"]
        for c in node.children:
            if c.tag not in ("Param", "CellParam"):
                self.fail(c, "compare side is neither a path Param nor a CellParam")
        if cells:
            if params or len(cells) != 1:
                self.fail(node, "a Compare takes either one CellParam or two Params")
            cp = cells[0]
            self.attrs(cp, ("rdf:resource",))
            ts = self.transforms(cp)
            ref = cp.attrib["rdf:resource"].strip()
            return Compare(metric, CellParamSide(ref, "entity1", ts), CellParamSide(ref, "entity2", ts), node.line)
        if len(params) != 2:
            self.fail(node, f"a Compare needs exactly two sides, found {len(params)}")
        sides: dict[str, PathSide] = {}
        for p in params:
            pa = self.attrs(p, ("path",), ("name",))
            var, steps = self.path(p, pa["path"])
            if var not in (src.var, tgt.var):
                self.fail(p, f"path variable ?{var} matches neither ?{src.var} nor ?{tgt.var}")
            if var in sides:
                self.fail(p, f"both sides use ?{var}")
            sides[var] = PathSide((steps,), self.transforms(p), var=var)
        if src.var == tgt.var:
            self.fail(node, "source and target datasets use the same variable")
        return Compare(metric, sides[src.var], sides[tgt.var], node.line)

    def interlink(self, node: _Node, sources: dict[str, DataSourceDecl], use_alignment: str | None) -> Interlink:
        a = self.attrs(node, ("id",))
        by_tag: dict[str, _Node] = {}
        allowed = {
            "LinkType", "SourceDataset", "TargetDataset", "LinkCondition",
            "Thresholds", "Output", "LinkCell", "UseAlignment",
        }
        for child in node.children:
            if child.tag not in allowed:
                self.fail(child, "unknown element")
            if child.tag in by_tag:
                self.fail(child, "given twice")
            by_tag[child.tag] = child

        link_type = OWL + "sameAs"
        if "LinkType" in by_tag:
            lt = by_tag["LinkType"]
            self.attrs(lt)
            self.no_children(lt)
            link_type = self.expand(lt, lt.text)

        ids = list(sources)
        src = self._dataset_or_default(node, by_tag.get("SourceDataset"), sources, ids, 0)
        tgt = self._dataset_or_default(node, by_tag.get("TargetDataset"), sources, ids, 1)

        if "UseAlignment" in by_tag:
            if use_alignment is not None:
                self.fail(by_tag["UseAlignment"], "UseAlignment given at both top level and interlink level")
            use_alignment = self.resource(by_tag["UseAlignment"])
        link_cell = self.resource(by_tag["LinkCell"]) if "LinkCell" in by_tag else None
        if link_cell and not use_alignment:
            self.fail(by_tag["LinkCell"], "LinkCell without UseAlignment")
        if not link_cell and not (src.has_restrict_to and tgt.has_restrict_to):
            self.fail(node, "a dataset without RestrictTo needs a LinkCell")

        if "LinkCondition" not in by_tag:
            self.fail(node, "missing LinkCondition")
        lc = by_tag["LinkCondition"]
        self.attrs(lc)
        if len(lc.children) != 1:
            self.fail(lc, "LinkCondition must contain exactly one condition")
        condition = self.condition(lc.children[0], src, tgt)
        if not use_alignment and any(isinstance(x.left, CellParamSide) for x in compare_leaves(condition)):
            self.fail(lc, "CellParam without UseAlignment")

        if "Thresholds" not in by_tag:
            self.fail(node, "missing Thresholds")
        th = by_tag["Thresholds"]
        ta = self.attrs(th, ("accept",), ("verify",))
        self.no_children(th)
        accept = self._score(th, "accept", ta["accept"])
        verify = self._score(th, "verify", ta.get("verify", ta["accept"]))
        if verify > accept:
            self.fail(th, f"verify threshold {verify} exceeds accept threshold {accept}")

        output = OutputDecl()
        if "Output" in by_tag:
            out = by_tag["Output"]
            oa = self.attrs(out, (), ("acceptedLinks", "verifyLinks", "voidFile", "mode", "linkset"))
            self.no_children(out)
            mode = oa.get("mode", "truncate")
            if mode != "truncate":
                self.fail(out, f"unsupported output mode {mode!r}")
            linkset = oa.get("linkset")
            output = OutputDecl(
                accepted=oa.get("acceptedLinks", output.accepted),
                verify=oa.get("verifyLinks", output.verify),
                void=oa.get("voidFile", output.void),
                mode=mode,
                linkset=self.expand(out, linkset) if linkset else None,
            )
        return Interlink(
            a["id"], link_type, src, tgt, condition, accept, verify, output,
            use_alignment, link_cell, line=node.line,
        )

    def _dataset_or_default(self, node, child, sources, ids, index) -> DatasetRef:
        if child is not None:
            return self.dataset(child, sources)
        # without dataset elements, the first/second declared source is used
        if len(ids) != 2:
            tag = "SourceDataset" if index == 0 else "TargetDataset"
            self.fail(node, f"missing {tag}")
        return DatasetRef(ids[index], "a" if index == 0 else "b")

    def _score(self, node: _Node, name: str, text: str) -> float:
        try:
            x = float(text)
        except ValueError:
            self.fail(node, f"{name} is not a number: {text!r}")
        if not 0.0 <= x <= 1.0:
            self.fail(node, f"{name} must lie in [0, 1], got {x}")
        return x


def parse_spec(xml_text: str) -> LinkSpec:
    return _Parser().spec(_read_xml(xml_text))


# --- resolution ----------------------------------------------------------------------


def _lookup_alignment(ref: str, alignments: dict[str, Alignment]) -> Alignment:
    if ref in alignments:
        return alignments[ref]
    frag = ref[1:] if ref.startswith("#") else None
    if frag is not None:
        hits = [a for k, a in alignments.items() if k.rsplit("#", 1)[-1] == frag or k.rstrip("/").rsplit("/", 1)[-1] == frag]
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise MissingAlignment(f"{ref} matches {len(hits)} alignments")
    raise MissingAlignment(ref)


def restriction_expr(patterns: tuple[Pattern, ...]) -> EntityExpression | None:
    """Class expression equivalent to a RestrictTo pattern list."""
    ops = []
    for p in patterns:
        if p.predicate == RDF_TYPE and p.object.is_iri:
            ops.append(al.named_class(p.object.value))
        else:
            ops.append(al.value_constraint(p.predicate, p.object))
    return al.conjoin(*ops) if ops else None


def _class_for(ref: DatasetRef, cell_expr: EntityExpression | None) -> EntityExpression:
    parts = [x for x in (cell_expr, restriction_expr(ref.restrictions)) if x is not None]
    if not parts:
        raise SpecError("Interlink", f"data source {ref.data_source!r} has no class restriction")
    return al.conjoin(*parts)


def _resolve_side(side: Side, alignment: Alignment | None) -> PathSide:
    if isinstance(side, PathSide):
        return side
    cell = al.find_cell(alignment, side.cell)
    if not cell.is_property_cell:
        raise KindMismatch(f"CellParam {side.cell} names a class correspondence")
    expr = getattr(cell, side.entity)
    props = al.named_properties(expr)
    if not props:
        raise UnresolvableProperty(f"{side.cell}: {side.entity} contains no named property")
    return PathSide(
        tuple((p,) for p in props),
        side.transforms,
        domains=tuple(al.domain_restrictions(expr)),
    )


def _resolve_condition(c: Condition, alignment: Alignment | None) -> Condition:
    if isinstance(c, Compare):
        return replace(c, left=_resolve_side(c.left, alignment), right=_resolve_side(c.right, alignment))
    return replace(c, children=tuple(_resolve_condition(ch, alignment) for ch in c.children))


def resolve(spec: LinkSpec, interlink_id: str | None, alignments: dict[str, Alignment]) -> ResolvedPlan:
    il = spec.interlink(interlink_id)
    alignment = _lookup_alignment(il.use_alignment, alignments) if il.use_alignment else None
    src_cell = tgt_cell = None
    if il.link_cell:
        cell = al.find_cell(alignment, il.link_cell)
        if not cell.is_class_cell:
            raise KindMismatch(f"LinkCell {il.link_cell} names a property correspondence")
        src_cell, tgt_cell = cell.entity1, cell.entity2
    return ResolvedPlan(
        interlink_id=il.id,
        link_type=il.link_type,
        source=il.source.data_source,
        target=il.target.data_source,
        source_var=il.source.var,
        target_var=il.target.var,
        source_class=_class_for(il.source, src_cell),
        target_class=_class_for(il.target, tgt_cell),
        condition=_resolve_condition(il.condition, alignment),
        accept=il.accept,
        verify=il.verify,
        output=il.output,
    )


def _patterns_of(var: str, e: EntityExpression) -> tuple[Pattern, ...]:
    ops = e.operands if e.kind == al.CLASS_CONJUNCTION else (e,)
    out = []
    for op in ops:
        if op.kind == al.NAMED_CLASS:
            out.append(Pattern(var, RDF_TYPE, iri(op.iri)))
        elif op.kind == al.VALUE_CONSTRAINT:
            out.append(Pattern(var, op.prop, op.value))
        else:
            raise ValueError(f"{op.key()} has no RestrictTo form")
    return tuple(out)


def as_spec(plan: ResolvedPlan, data_sources: dict[str, DataSourceDecl]) -> LinkSpec:
    """Wrap a resolved plan back into an alignment-free specification."""
    src = DatasetRef(plan.source, plan.source_var, _patterns_of(plan.source_var, plan.source_class), True)
    tgt = DatasetRef(plan.target, plan.target_var, _patterns_of(plan.target_var, plan.target_class), True)
    il = Interlink(
        plan.interlink_id, plan.link_type, src, tgt, plan.condition,
        plan.accept, plan.verify, plan.output,
    )
    return LinkSpec({}, dict(data_sources), (il,))


# --- validation -------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "warning" or "error"
    code: str
    element: str
    line: int | None
    message: str

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line else ""
        return f"{where}{self.level}: {self.code}: <{self.element}> {self.message}"


def _walk(c: Condition) -> Iterator[Compare]:
    yield from compare_leaves(c)


def validate(spec: LinkSpec) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for ds in spec.data_sources.values():
        if ds.endpoint:
            msg = f"data source {ds.id!r}: EndpointURI is not supported (bind a file)"
            if ds.file:
                msg = f"data source {ds.id!r}: EndpointURI ignored, File is used"
            out.append(Diagnostic("warning", "EndpointUnsupported", "DataSource", ds.line, msg))
    for prefix in sorted(set(spec.prefixes) - spec.used_prefixes):
        out.append(Diagnostic("warning", "UnusedPrefix", "Prefix", spec.prefix_lines.get(prefix), f"prefix {prefix!r} is never used"))
    for il in spec.interlinks:
        for leaf in _walk(il.condition):
            if leaf.metric not in METRICS:
                out.append(Diagnostic("warning", "UnknownMetric", "Compare", leaf.line, f"unknown metric {leaf.metric!r}"))
    return out

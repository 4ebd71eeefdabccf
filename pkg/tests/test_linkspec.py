from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from melinda import alignment as al
from melinda.linkspec import (
    Aggregate,
    CellParamSide,
    Compare,
    KindMismatch,
    MissingAlignment,
    PathSide,
    SpecError,
    UnresolvableProperty,
    as_spec,
    compare_leaves,
    parse_spec,
    resolve,
    restriction_expr,
    validate,
)
from melinda.rdf import RDF_TYPE, RDFS, iri, literal, load_ntriples

from conftest import ALIGNMENTS, SPECS

DBO = "http://dbpedia.org/ontology/"
GN = "http://www.geonames.org/ontology#"


def _spec(name: str):
    return parse_spec((SPECS / name).read_text(encoding="utf-8"))


def _alignments(*names: str):
    out = {}
    for n in names:
        out.update(al.load_alignments(load_ntriples(ALIGNMENTS / n)))
    return out


MINIMAL = """<Silk>
  <Prefix id="ex" namespace="http://example.org/" />
  <DataSource id="s"><File>s.nt</File></DataSource>
  <DataSource id="t"><File>t.nt</File></DataSource>
  <Interlink id="x">
    <SourceDataset dataSource="s" var="a"><RestrictTo>?a rdf:type ex:A</RestrictTo></SourceDataset>
    <TargetDataset dataSource="t" var="b"><RestrictTo>?b a ex:B</RestrictTo></TargetDataset>
    <LinkCondition>
      {condition}
    </LinkCondition>
    {thresholds}
  </Interlink>
</Silk>"""

COMPARE = '<Compare metric="{metric}"><Param name="x" path="?a/ex:p" /><Param name="y" path="?b/ex:q" /></Compare>'


def _minimal(condition: str | None = None, thresholds: str = '<Thresholds accept="0.9" verify="0.7" />', metric: str = "jaroSimilarity") -> str:
    return MINIMAL.format(condition=condition or COMPARE.format(metric=metric), thresholds=thresholds)


# --- parsing the fixture specs ---------------------------------------------------------------


def test_inline_cities_spec_structure():
    spec = _spec("cities_inline.xml")
    assert set(spec.data_sources) == {"dbpedia", "geonames"}
    assert spec.prefixes["gn"] == GN
    (il,) = spec.interlinks
    assert il.id == "cities"
    assert il.link_type == "http://www.w3.org/2002/07/owl#sameAs"
    assert (il.accept, il.verify) == (0.9, 0.7)
    assert il.source.restrictions[0].predicate == RDF_TYPE
    assert il.source.restrictions[0].object == iri(DBO + "City")
    cond = il.condition
    assert isinstance(cond, Aggregate) and cond.combiner == "AVG"
    jaro_leaf, num_leaf = cond.children
    assert jaro_leaf.metric == "jaroSimilarity"
    assert jaro_leaf.left.paths == ((RDFS + "label",),)
    assert jaro_leaf.right.paths == ((GN + "name",),)
    assert num_leaf.metric == "numSimilarity"
    assert num_leaf.left.paths == ((DBO + "populationTotal",),)
    assert il.output.accepted == "accepted_links.n3" and il.output.verify == "verify_links.n3"
    assert spec.data_sources["dbpedia"].file == "../data/cities10/dbpedia.nt"
    assert spec.data_sources["dbpedia"].graph == "http://dbpedia.org"


def test_verbatim_spec_keeps_endpoints():
    spec = _spec("cities_verbatim.xml")
    ds = spec.data_sources["dbpedia"]
    assert ds.endpoint == "http://demo_sparql_server1/sparql"
    assert ds.file is None


def test_extended_spec_structure():
    spec = _spec("cities_aligned.xml")
    (il,) = spec.interlinks
    assert il.use_alignment == "#dbp-geo"
    assert il.link_cell == "#map1"
    assert not il.source.has_restrict_to and il.source.var == "a"
    cells = [leaf.left.cell for leaf in compare_leaves(il.condition)]
    assert cells == ["#map3", "#map2"]
    assert all(isinstance(leaf.right, CellParamSide) and leaf.right.entity == "entity2" for leaf in compare_leaves(il.condition))


def test_parse_is_deterministic():
    text = (SPECS / "cities_aligned.xml").read_text()
    assert parse_spec(text) == parse_spec(text)


def test_param_sides_follow_variables_not_order():
    swapped = '<Compare metric="jaroSimilarity"><Param path="?b/ex:q" /><Param path="?a/ex:p" /></Compare>'
    leaf = parse_spec(_minimal(swapped)).interlinks[0].condition
    assert leaf.left.paths == (("http://example.org/p",),)


def test_multi_step_paths_transforms_and_combiners():
    cond = """<MIN>
      <Compare metric="levenshteinSimilarity">
        <Param path="?a/ex:knows/&lt;http://example.org/name&gt;"><Transform function="lowercase" /></Param>
        <Param path="?b/ex:q"><Transform function="regexReplace" pattern="(\\w+), (.*)" replacement="$2 $1" /></Param>
      </Compare>
      <MAX>{c}{c}</MAX>
    </MIN>""".format(c=COMPARE.format(metric="numSimilarity"))
    root = parse_spec(_minimal(cond)).interlinks[0].condition
    assert root.combiner == "MIN" and root.children[1].combiner == "MAX"
    first = root.children[0]
    assert first.left.paths == (("http://example.org/knows", "http://example.org/name"),)
    assert first.left.transforms[0].kind == "lowercase"
    assert first.right.transforms[0].replacement == "$2 $1"


def test_restrict_to_with_several_patterns():
    text = _minimal().replace(
        "?a rdf:type ex:A", '?a rdf:type ex:A . ?a ex:status "open"@en . ?a ex:flag &lt;http://example.org/On&gt;'
    )
    pats = parse_spec(text).interlinks[0].source.restrictions
    assert [p.object for p in pats] == [iri("http://example.org/A"), literal("open", lang="en"), iri("http://example.org/On")]
    expr = restriction_expr(pats)
    assert expr.kind == al.CLASS_CONJUNCTION and len(expr.operands) == 3


SPEC_ERRORS = [
    (_minimal(thresholds='<Thresholds accept="0.5" verify="0.9" />'), "exceeds"),
    (_minimal(thresholds=""), "missing Thresholds"),
    (_minimal(thresholds='<Thresholds accept="1.5" />'), "[0, 1]"),
    (_minimal().replace("ex:p", "zz:p"), "undeclared prefix"),
    (_minimal().replace("<LinkCondition>", "<LinkCondition><Bogus/>"), "exactly one"),
    (_minimal('<Compare metric="jaroSimilarity"><Param path="?a/ex:p" /></Compare>'), "exactly two"),
    (_minimal('<Compare metric="jaroSimilarity"><Param path="?a/ex:p" /><Literal/></Compare>'), "neither"),
    (_minimal('<Compare metric="jaroSimilarity"><Param path="?c/ex:p" /><Param path="?b/ex:q" /></Compare>'), "?c"),
    (_minimal('<Compare metric="jaroSimilarity" weight="2"><Param path="?a/ex:p" /><Param path="?b/ex:q" /></Compare>'), "unknown attribute"),
    (_minimal("<Median>" + COMPARE.format(metric="jaroSimilarity") + "</Median>"), "unknown element"),
    (_minimal('<And combiner="SUM">' + COMPARE.format(metric="jaroSimilarity") + "</And>"), "combiner"),
    (_minimal('<Compare metric="x"><CellParam rdf:resource="#m" /></Compare>'), "CellParam without UseAlignment"),
    (_minimal().replace("?a rdf:type ex:A", "?b rdf:type ex:A"), "dataset variable"),
    (_minimal().replace('<Thresholds accept="0.9" verify="0.7" />', '<Thresholds accept="0.9" /><Output mode="append" />'), "mode"),
    (_minimal().replace("<RestrictTo>?a rdf:type ex:A</RestrictTo>", ""), "needs a LinkCell"),
    (_minimal().replace('dataSource="t"', 'dataSource="nope"'), "undeclared data source"),
    ("<Silk><DataSource id='s'/></Silk>", "no Interlink"),
    ("<Silk><Interlink id='x'>", "malformed XML"),
    ("<Spec/>", "root element"),
]


@pytest.mark.parametrize("text, reason", SPEC_ERRORS, ids=[r for _, r in SPEC_ERRORS])
def test_spec_errors(text, reason):
    with pytest.raises(SpecError) as info:
        parse_spec(text)
    assert reason in str(info.value)


def test_spec_error_carries_line():
    text = _minimal(thresholds='<Thresholds accept="0.5" verify="0.9" />')
    with pytest.raises(SpecError) as info:
        parse_spec(text)
    assert info.value.line == text[: text.index("<Thresholds")].count("\n") + 1


def test_verify_defaults_to_accept():
    il = parse_spec(_minimal(thresholds='<Thresholds accept="0.8" />')).interlinks[0]
    assert il.verify == il.accept == 0.8


# --- resolution --------------------------------------------------------------------------------


def test_inline_resolution_is_passthrough():
    plan = resolve(_spec("cities_inline.xml"), None, {})
    assert plan.source_class == al.named_class(DBO + "City")
    assert plan.target_class == al.named_class(GN + "P")
    assert plan.condition == _spec("cities_inline.xml").interlinks[0].condition


@pytest.mark.parametrize("alignment", ["dbp-geo.nt", "dbp-geo-edoal.nt"])
def test_extended_spec_resolves_to_inline_plan(alignment):
    inline = resolve(_spec("cities_inline.xml"), "cities", {})
    extended = resolve(_spec("cities_aligned.xml"), "cities", _alignments(alignment))
    assert extended == inline
    for leaf in compare_leaves(extended.condition):
        assert isinstance(leaf.left, PathSide) and isinstance(leaf.right, PathSide)


def test_contextual_alignment_records_domains():
    plan = resolve(_spec("cities_aligned.xml"), None, _alignments("dbp-geo-edoal.nt"))
    jaro_leaf = compare_leaves(plan.condition)[0]
    assert jaro_leaf.left.domains == (al.named_class(DBO + "City"),)
    assert jaro_leaf.right.domains == (al.named_class(GN + "P"),)


def test_link_cell_and_restrict_to_intersect():
    text = (SPECS / "cities_aligned.xml").read_text().replace(
        '<LinkCell rdf:resource="#map1" />',
        '<SourceDataset dataSource="dbpedia" var="a"><RestrictTo>?a dbpedia:country dbpedia:UK</RestrictTo></SourceDataset>\n'
        '<LinkCell rdf:resource="#map1" />',
    ).replace("<Silk>", '<Silk>\n<Prefix id="dbpedia" namespace="http://dbpedia.org/resource/" />')
    plan = resolve(parse_spec(text), None, _alignments("dbp-geo.nt"))
    assert plan.source_class == al.conjoin(
        al.named_class(DBO + "City"), al.value_constraint(DBO.replace("ontology", "resource") + "country", iri("http://dbpedia.org/resource/UK"))
    )


def test_resolution_errors():
    aligned = (SPECS / "cities_aligned.xml").read_text()
    with pytest.raises(MissingAlignment):
        resolve(parse_spec(aligned), None, {})
    with pytest.raises(KindMismatch):
        resolve(parse_spec(aligned.replace('LinkCell rdf:resource="#map1"', 'LinkCell rdf:resource="#map2"')), None, _alignments("dbp-geo.nt"))
    with pytest.raises(KindMismatch):
        resolve(parse_spec(aligned.replace('CellParam rdf:resource="#map3"', 'CellParam rdf:resource="#map1"')), None, _alignments("dbp-geo.nt"))
    with pytest.raises(al.CellNotFound):
        resolve(parse_spec(aligned.replace("#map3", "#map7")), None, _alignments("dbp-geo.nt"))
    with pytest.raises(SpecError):
        resolve(parse_spec(aligned), "no-such-interlink", _alignments("dbp-geo.nt"))


def test_unresolvable_property():
    a = _alignments("dbp-geo.nt")
    (key,) = a
    only_domain = al.EntityExpression(al.PROPERTY_CONJUNCTION, operands=(al.domain_restriction(al.named_class(DBO + "City")),))
    cells = tuple(
        al.Cell(c.id, only_domain, c.entity2, c.relation) if c.id.endswith("#map3") else c for c in a[key].cells
    )
    broken = {key: al.Alignment(a[key].id, a[key].onto1, a[key].onto2, cells)}
    with pytest.raises(UnresolvableProperty):
        resolve(_spec("cities_aligned.xml"), None, broken)


def test_alignment_reference_by_full_iri():
    text = (SPECS / "cities_aligned.xml").read_text().replace("#dbp-geo", "http://example.org/alignments#dbp-geo")
    plan = resolve(parse_spec(text), None, _alignments("dbp-geo.nt"))
    assert plan.source_class == al.named_class(DBO + "City")


@pytest.mark.parametrize(
    "spec_name, alignments",
    [("cities_inline.xml", ()), ("cities_aligned.xml", ("dbp-geo-edoal.nt",)), ("pianists_aligned.xml", ("dbp-mo.nt",))],
)
def test_resolution_idempotence(spec_name, alignments):
    spec = _spec(spec_name)
    plan = resolve(spec, None, _alignments(*alignments))
    again = resolve(as_spec(plan, spec.data_sources), None, {})
    assert again == plan
    assert as_spec(again, spec.data_sources) == as_spec(plan, spec.data_sources)


_classes = st.sampled_from(["http://example.org/A", "http://example.org/B", DBO + "City"]).map(al.named_class)
_pvcs = st.builds(al.value_constraint, st.sampled_from(["http://example.org/p", DBO + "country"]), st.sampled_from([iri("http://example.org/v"), literal("x")]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.one_of(_classes, _pvcs), min_size=1, max_size=4))
def test_restriction_round_trip(ops):
    plan = resolve(_spec("cities_inline.xml"), None, {})
    plan = replace(plan, source_class=al.conjoin(*ops))
    assert resolve(as_spec(plan, {}), None, {}) == plan


# --- validation -------------------------------------------------------------------------------------


def test_validate_verbatim_spec_warns_about_endpoints_only():
    diags = validate(_spec("cities_verbatim.xml"))
    assert [d.code for d in diags] == ["EndpointUnsupported", "EndpointUnsupported"]
    assert all(d.level == "warning" and d.line for d in diags)


def test_validate_clean_and_unknown_metric():
    assert validate(_spec("cities_inline.xml")) == []
    diags = validate(parse_spec(_minimal(metric="foo")))
    assert [d.code for d in diags] == ["UnknownMetric"]


def test_validate_unused_prefix():
    text = _minimal().replace("<Silk>", '<Silk>\n<Prefix id="unused" namespace="http://u/" />')
    diags = validate(parse_spec(text))
    assert [(d.code, d.line) for d in diags] == [("UnusedPrefix", 2)]


def test_compare_leaves_order():
    cond = Aggregate("AVG", (Compare("a", None, None), Aggregate("MIN", (Compare("b", None, None), Compare("c", None, None)))))
    assert [leaf.metric for leaf in compare_leaves(cond)] == ["a", "b", "c"]

"""Regenerate the N-Triples fixture corpus under tests/fixtures/data.

Run from anywhere: ``python tests/fixtures/make_fixtures.py``. The output is
deterministic; the files are committed so tests do not depend on this script.
"""

from pathlib import Path

HERE = Path(__file__).resolve().parent

DBR = "http://dbpedia.org/resource/"
DBO = "http://dbpedia.org/ontology/"
GN = "http://www.geonames.org/ontology#"
GNR = "http://sws.geonames.org/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
XSD_INT = "http://www.w3.org/2001/XMLSchema#integer"
SAME_AS = "http://www.w3.org/2002/07/owl#sameAs"


def lit(value, lang=None, dtype=None):
    value = value.replace("\\", "\\\\").replace('"', '\\"')
    if lang:
        return f'"{value}"@{lang}'
    if dtype:
        return f'"{value}"^^<{dtype}>'
    return f'"{value}"'


def write(path: Path, lines):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(sorted(set(lines))), encoding="utf-8")


def city(slug, labels, population):
    s = f"<{DBR}{slug}>"
    out = [f"{s} <{RDF_TYPE}> <{DBO}City> .\n"]
    for label, lang in labels:
        out.append(f"{s} <{LABEL}> {lit(label, lang)} .\n")
    if population is not None:
        out.append(f"{s} <{DBO}populationTotal> {lit(str(population), dtype=XSD_INT)} .\n")
    return out


def place(geo_id, names, population, cls="P"):
    s = f"<{GNR}{geo_id}/>"
    out = [f"{s} <{RDF_TYPE}> <{GN}{cls}> .\n"]
    for name in names:
        out.append(f"{s} <{GN}name> {lit(name)} .\n")
    if population is not None:
        out.append(f"{s} <{GN}population> {lit(str(population))} .\n")
    return out


def gold(pairs):
    return [f"<{DBR}{a}> <{SAME_AS}> <{GNR}{b}/> .\n" for a, b in pairs]


# Populations climb in steps of about x2, so two different cities never agree
# closely on the numeric compare and no non-matching pair reaches the verify band.


def cities10():
    exact = [
        ("Manchester", 503127, 2643123),
        ("Liverpool", 8702210, 2644210),
        ("Leeds", 2104883, 2644688),
        ("Bristol", 1020441, 2654675),
        ("Sheffield", 4260714, 2638077),
    ]
    # same city, different spelling, population within 5%
    near = [
        ("Cologne", "Köln", 17630455, 17105230, 2886242),
        ("Munich", "München", 36024118, 36892001, 2867714),
    ]
    source_only = [("Edinburgh", 243015), ("Cardiff", 117552), ("Belfast", 56339)]
    target_only = [("Reykjavik", 13118, 3413829), ("Tallinn", 27604, 588409), ("Valletta", 6147, 2562305)]

    src, tgt, links = [], [], []
    for name, pop, gid in exact:
        src += city(name, [(name, "en")], pop)
        tgt += place(gid, [name], pop)
        links.append((name, gid))
    for s_name, t_name, s_pop, t_pop, gid in near:
        src += city(s_name, [(s_name, "en")], s_pop)
        tgt += place(gid, [t_name], t_pop)
    for name, pop in source_only:
        src += city(name, [(name, "en")], pop)
    for name, pop, gid in target_only:
        tgt += place(gid, [name], pop)
    # resources outside the restricted classes
    src.append(f"<{DBR}England> <{RDF_TYPE}> <{DBO}Country> .\n")
    src.append(f"<{DBR}England> <{LABEL}> {lit('Manchester', 'en')} .\n")
    tgt += place(2635167, ["Manchester"], 503127, cls="A")
    return src, tgt, gold(links)


def cities3():
    rows = [("Manchester", 503127, 2643123), ("Leeds", 2104883, 2644688), ("Sheffield", 4260714, 2638077)]
    src, tgt = [], []
    for name, pop, gid in rows:
        src += city(name, [(name, "en")], pop)
        tgt += place(gid, [name], pop)
    return src, tgt, gold([(n, g) for n, _, g in rows])


def cities_noisy():
    src, tgt, links = [], [], []
    # multi-valued labels: the best pair of values decides
    src += city("Brussels", [("Brussels", "en"), ("Bruxelles", "fr")], 2408542)
    tgt += place(2800866, ["Bruxelles", "Brussel"], 2408542)
    links.append(("Brussels", 2800866))
    src += city("Geneva", [("Geneva", "en"), ("Genève", "fr")], 601818)
    tgt += place(2660646, ["Genève"], 601818)
    links.append(("Geneva", 2660646))
    src += city("Porto", [("Porto", "en")], 137591)
    tgt += place(2735943, ["Porto"], 137591)
    links.append(("Porto", 2735943))
    # population missing on one side: jaro alone gives AVG 0.5
    src += city("Lyon", [("Lyon", "en")], None)
    tgt += place(2996944, ["Lyon"], 1216092)
    # blank-node city is never a candidate
    src.append(f"_:anon <{RDF_TYPE}> <{DBO}City> .\n")
    src.append(f"_:anon <{LABEL}> {lit('Porto', 'en')} .\n")
    src.append(f"_:anon <{DBO}populationTotal> {lit('137591', dtype=XSD_INT)} .\n")
    # dirty population literal scores 0 on the numeric compare
    src += city("Ghent", [("Ghent", "en")], None)
    src.append(f"<{DBR}Ghent> <{DBO}populationTotal> {lit('about 260k')} .\n")
    tgt += place(2797656, ["Gent"], 262219)
    tgt += place(2794055, ["Leuven"], 31396)
    return src, tgt, gold(links)


def lastfm():
    mo = "http://purl.org/ontology/mo/"
    src = [
        f"<http://www.last.fm/music/Johann+Sebastian+Bach> <{RDF_TYPE}> <{mo}MusicArtist> .\n",
        f"<http://www.last.fm/music/Johann+Sebastian+Bach> <http://xmlns.com/foaf/0.1/name> {lit('Johann Sebastian Bach')} .\n",
        f"<http://www.last.fm/music/Carl+Philipp+Emanuel+Bach> <{RDF_TYPE}> <{mo}MusicArtist> .\n",
        f"<http://www.last.fm/music/Radiohead> <{RDF_TYPE}> <{mo}MusicArtist> .\n",
    ]
    tgt = [
        f"<{DBR}Johann_Sebastian_Bach> <{RDF_TYPE}> <{DBO}Person> .\n",
        f"<{DBR}Johann_Sebastian_Bach> <{LABEL}> {lit('Johann Sebastian Bach', 'en')} .\n",
        f"<{DBR}Radiohead> <{RDF_TYPE}> <{DBO}Band> .\n",
    ]
    return src, tgt, [f"<http://www.last.fm/music/Johann+Sebastian+Bach> <{SAME_AS}> <{DBR}Johann_Sebastian_Bach> .\n"]


def pianists():
    mo = "http://purl.org/ontology/mo/"
    dbp = "http://dbpedia.org/ontology/"
    src = [
        f"<{DBR}Glenn_Gould> <{RDF_TYPE}> <{dbp}Pianist> .\n",
        f"<{DBR}Glenn_Gould> <{LABEL}> {lit('Glenn Gould', 'en')} .\n",
        f"<{DBR}Martha_Argerich> <{RDF_TYPE}> <{dbp}Pianist> .\n",
        f"<{DBR}Martha_Argerich> <{LABEL}> {lit('Martha Argerich', 'en')} .\n",
        f"<{DBR}Yo-Yo_Ma> <{RDF_TYPE}> <{dbp}Cellist> .\n",
        f"<{DBR}Yo-Yo_Ma> <{LABEL}> {lit('Yo-Yo Ma', 'en')} .\n",
    ]
    mb = "http://musicbrainz.org/artist/"
    tgt = []
    for key, name, instrument in [
        ("a1", "Glenn Gould", "Piano"),
        ("a2", "Martha Argerich", "Piano"),
        ("a3", "Yo-Yo Ma", "Cello"),
        ("a4", "Marta Argerich", "Violin"),
    ]:
        s = f"<{mb}{key}>"
        tgt.append(f"{s} <{RDF_TYPE}> <{mo}MusicArtist> .\n")
        tgt.append(f"{s} <http://xmlns.com/foaf/0.1/name> {lit(name)} .\n")
        tgt.append(f"{s} <{mo}instrument> <{mo}{instrument}> .\n")
    # plays piano but is not typed as an artist
    tgt.append(f"<{mb}a5> <{mo}instrument> <{mo}Piano> .\n")
    tgt.append(f"<{mb}a5> <http://xmlns.com/foaf/0.1/name> {lit('Glenn Gould')} .\n")
    gold_lines = [
        f"<{DBR}Glenn_Gould> <{SAME_AS}> <{mb}a1> .\n",
        f"<{DBR}Martha_Argerich> <{SAME_AS}> <{mb}a2> .\n",
    ]
    return src, tgt, gold_lines


def main():
    for name, build, files in [
        ("cities10", cities10, ("dbpedia.nt", "geonames.nt")),
        ("cities3", cities3, ("dbpedia.nt", "geonames.nt")),
        ("cities-noisy", cities_noisy, ("dbpedia.nt", "geonames.nt")),
        ("lastfm", lastfm, ("lastfm.nt", "dbpedia.nt")),
        ("pianists", pianists, ("dbpedia.nt", "musicbrainz.nt")),
    ]:
        src, tgt, gld = build()
        write(HERE / "data" / name / files[0], src)
        write(HERE / "data" / name / files[1], tgt)
        write(HERE / "data" / name / "gold.nt", gld)


if __name__ == "__main__":
    main()

"""Minimal RDF model: terms, triples, an immutable indexed graph and N-Triples I/O."""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
VOID = "http://rdfs.org/ns/void#"

RDF_TYPE = RDF + "type"
OWL_SAME_AS = OWL + "sameAs"

IRI, LITERAL, BLANK = "iri", "literal", "blank"

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_LANG = re.compile(r"^[A-Za-z]+(-[A-Za-z0-9]+)*$")


def _blank_label_ok(label: str) -> bool:
    # the same character set the parser reads; a trailing '.' would end the statement
    return bool(label) and not label.endswith(".") and all(c.isalnum() or c in "_-." for c in label)


class ParseError(ValueError):
    def __init__(self, line: int, column: int, reason: str):
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


@dataclass(frozen=True, order=True)
class Term:
    kind: str
    value: str
    datatype: str | None = None
    lang: str | None = None

    def __post_init__(self):
        if self.kind == IRI:
            if not _SCHEME.match(self.value):
                raise ValueError(f"not an absolute IRI: {self.value!r}")
        elif self.kind == LITERAL:
            if self.datatype is not None and self.lang is not None:
                raise ValueError("a literal cannot carry both a datatype and a language tag")
        elif self.kind == BLANK:
            if not _blank_label_ok(self.value):
                raise ValueError(f"bad blank node label {self.value!r}")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")
        if self.kind != LITERAL and (self.datatype or self.lang):
            raise ValueError("only literals carry datatype or language")

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL

    @property
    def is_blank(self) -> bool:
        return self.kind == BLANK

    def n3(self) -> str:
        """Canonical N-Triples form of the term."""
        if self.kind == IRI:
            return "<" + _escape_iri(self.value) + ">"
        if self.kind == BLANK:
            return "_:" + self.value
        out = '"' + _escape_literal(self.value) + '"'
        if self.lang:
            out += "@" + self.lang
        elif self.datatype:
            out += "^^<" + _escape_iri(self.datatype) + ">"
        return out

    def __str__(self) -> str:
        return self.n3()


def iri(value: str) -> Term:
    return Term(IRI, value)


def literal(value: str, datatype: str | None = None, lang: str | None = None) -> Term:
    return Term(LITERAL, value, datatype, lang)


def blank(label: str) -> Term:
    return Term(BLANK, label)


@dataclass(frozen=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if self.subject.is_literal:
            raise ValueError("a literal cannot be a subject")
        if not self.predicate.is_iri:
            raise ValueError("predicate must be an IRI")

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."

    def sort_key(self) -> tuple[str, str, str]:
        return (self.subject.n3(), self.predicate.n3(), self.object.n3())


def triple(s: Term, p: Term | str, o: Term) -> Triple:
    return Triple(s, iri(p) if isinstance(p, str) else p, o)


class Graph:
    """Immutable set of triples with (s, p), (p, o) and p indexes.

    Safe to share between readers; nothing mutates after ``__init__``.
    """

    __slots__ = ("_triples", "_sp", "_po", "_p", "_subjects", "_nodes")

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples = frozenset(triples)
        sp: dict[tuple[Term, Term], set[Term]] = defaultdict(set)
        po: dict[tuple[Term, Term], set[Term]] = defaultdict(set)
        p_idx: dict[Term, set[Triple]] = defaultdict(set)
        nodes: set[Term] = set()
        for t in self._triples:
            sp[(t.subject, t.predicate)].add(t.object)
            po[(t.predicate, t.object)].add(t.subject)
            p_idx[t.predicate].add(t)
            nodes.add(t.subject)
            if not t.object.is_literal:
                nodes.add(t.object)
        self._sp = {k: frozenset(v) for k, v in sp.items()}
        self._po = {k: frozenset(v) for k, v in po.items()}
        self._p = {k: frozenset(v) for k, v in p_idx.items()}
        self._subjects = frozenset(s for (s, _p) in self._sp)
        self._nodes = frozenset(nodes)

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, t: object) -> bool:
        return t in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"<Graph {len(self._triples)} triples>"

    def __or__(self, other: Graph) -> Graph:
        return Graph(self._triples | other._triples)

    def objects(self, subject: Term, predicate: Term) -> frozenset[Term]:
        return self._sp.get((subject, predicate), frozenset())

    def subjects(self, predicate: Term | None = None, obj: Term | None = None) -> frozenset[Term]:
        if predicate is None and obj is None:
            return self._subjects
        if predicate is None or obj is None:
            raise TypeError("subjects() takes both predicate and object, or neither")
        return self._po.get((predicate, obj), frozenset())

    def with_predicate(self, predicate: Term) -> frozenset[Triple]:
        return self._p.get(predicate, frozenset())

    def value(self, subject: Term, predicate: Term) -> Term | None:
        """The single object of (subject, predicate); None if absent, ValueError if several."""
        objs = self.objects(subject, predicate)
        if len(objs) > 1:
            raise ValueError(f"{subject.n3()} has {len(objs)} values for {predicate.n3()}")
        return next(iter(objs), None)

    def nodes(self) -> frozenset[Term]:
        """Every non-literal term occurring as subject or object."""
        return self._nodes


def instances_of(g: Graph, cls: Term) -> frozenset[Term]:
    if not cls.is_iri:
        raise ValueError("class must be an IRI")
    return g.subjects(iri(RDF_TYPE), cls)


def values_along_path(g: Graph, start: Term, path: Sequence[Term]) -> frozenset[Term]:
    """Terms reachable from ``start`` by following ``path`` predicate by predicate."""
    if not path:
        raise ValueError("path must be non-empty")
    frontier = {start}
    for pred in path:
        nxt: set[Term] = set()
        for node in frontier:
            if node.is_literal:
                continue
            nxt.update(g.objects(node, pred))
        frontier = nxt
        if not frontier:
            break
    return frozenset(frontier)


# --- N-Triples ------------------------------------------------------------

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_LIT_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}
_IRI_FORBIDDEN = set('<>"{}|^`\\') | {chr(c) for c in range(0x21)}


def _escape_literal(s: str) -> str:
    return "".join(_LIT_ESCAPES.get(c, c) for c in s)


def _escape_iri(s: str) -> str:
    out = []
    for c in s:
        if c in _IRI_FORBIDDEN:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


class _LineParser:
    def __init__(self, text: str, lineno: int):
        self.s = text
        self.i = 0
        self.lineno = lineno

    def fail(self, reason: str):
        raise ParseError(self.lineno, self.i + 1, reason)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i] in " \t":
            self.i += 1

    def peek(self) -> str:
        return self.s[self.i] if self.i < len(self.s) else ""

    def _uchar(self, length: int) -> str:
        digits = self.s[self.i:self.i + length]
        if len(digits) != length or not all(c in "0123456789abcdefABCDEF" for c in digits):
            self.fail(f"bad \\{'u' if length == 4 else 'U'} escape")
        self.i += length
        cp = int(digits, 16)
        if cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
            self.fail("escape is not a Unicode scalar value")
        return chr(cp)

    def iriref(self) -> str:
        assert self.s[self.i] == "<"
        self.i += 1
        out = []
        while True:
            c = self.peek()
            if c == "":
                self.fail("unterminated IRI")
            self.i += 1
            if c == ">":
                break
            if c == "\\":
                e = self.peek()
                self.i += 1
                if e == "u":
                    out.append(self._uchar(4))
                elif e == "U":
                    out.append(self._uchar(8))
                else:
                    self.i -= 2
                    self.fail("bad escape in IRI")
                continue
            if c in _IRI_FORBIDDEN:
                self.i -= 1
                self.fail(f"character {c!r} not allowed in IRI")
            out.append(c)
        value = "".join(out)
        if not _SCHEME.match(value):
            self.fail(f"IRI is not absolute: {value!r}")
        return value

    def blank(self) -> Term:
        if self.s[self.i:self.i + 2] != "_:":
            self.fail("expected blank node")
        self.i += 2
        start = self.i
        while self.i < len(self.s) and (self.s[self.i].isalnum() or self.s[self.i] in "_-."):
            self.i += 1
        label = self.s[start:self.i]
        # a trailing '.' belongs to the statement terminator
        while label.endswith("."):
            label = label[:-1]
            self.i -= 1
        if not label:
            self.fail("empty blank node label")
        return blank(label)

    def literal(self) -> Term:
        self.i += 1
        out = []
        while True:
            c = self.peek()
            if c == "":
                self.fail("unterminated literal")
            self.i += 1
            if c == '"':
                break
            if c == "\\":
                e = self.peek()
                self.i += 1
                if e == "u":
                    out.append(self._uchar(4))
                elif e == "U":
                    out.append(self._uchar(8))
                elif e in _ECHAR:
                    out.append(_ECHAR[e])
                else:
                    self.i -= 2
                    self.fail("bad escape in literal")
                continue
            out.append(c)
        value = "".join(out)
        if self.peek() == "@":
            self.i += 1
            start = self.i
            while self.i < len(self.s) and (self.s[self.i].isalnum() or self.s[self.i] == "-"):
                self.i += 1
            tag = self.s[start:self.i]
            if not _LANG.match(tag):
                self.fail("bad language tag")
            return literal(value, lang=tag)
        if self.s[self.i:self.i + 2] == "^^":
            self.i += 2
            if self.peek() != "<":
                self.fail("datatype must be an IRI")
            return literal(value, datatype=self.iriref())
        return literal(value)

    def term(self, position: str) -> Term:
        self.ws()
        c = self.peek()
        if c == "<":
            return iri(self.iriref())
        if c == "_" and position != "predicate":
            return self.blank()
        if c == '"' and position == "object":
            return self.literal()
        if c == "":
            self.fail(f"missing {position}")
        self.fail(f"malformed {position} term")

    def statement(self) -> Triple:
        s = self.term("subject")
        p = self.term("predicate")
        o = self.term("object")
        self.ws()
        if self.peek() != ".":
            self.fail('missing terminal "."')
        self.i += 1
        self.ws()
        if self.i < len(self.s) and self.s[self.i] != "#":
            self.fail("trailing content after statement")
        return Triple(s, p, o)


def parse_ntriples(text: str) -> Graph:
    triples = []
    # split on LF only: str.splitlines() would also break on U+2028 and friends
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        stripped = line.strip(" \t")
        if not stripped or stripped.startswith("#"):
            continue
        triples.append(_LineParser(line, lineno).statement())
    return Graph(triples)


def serialize_ntriples(g: Graph | Iterable[Triple]) -> str:
    lines = sorted(t.sort_key() for t in g)
    return "".join(f"{s} {p} {o} .\n" for s, p, o in lines)


def load_ntriples(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_ntriples(fh.read())

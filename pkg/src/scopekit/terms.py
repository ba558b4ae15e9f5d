"""RDF term model and immutable triple-set graph.

Terms are frozen values with structural equality: two literals are equal iff
their lexical form, datatype, and language tag are equal ("1"^^xsd:int and
"01"^^xsd:int are different terms). Graphs are immutable; insert/remove return
new graphs, so a graph value can be shared freely across readers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union

from .errors import InvalidIriError

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")
_FORBIDDEN_IRI_CHARS = set('<>"{}|^`\\')
_BLANK_LABEL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_PREFIX_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9-]*$")
_LANG_TAG_RE = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
SKOLEM_PREFIX = "urn:skolem:"


@dataclass(frozen=True)
class Iri:
    """Absolute IRI. Rejects whitespace, control characters and <>"{}|^`\\."""

    value: str

    def __post_init__(self):
        v = self.value
        if not v:
            raise InvalidIriError("IRI must be non-empty")
        if not _SCHEME_RE.match(v):
            raise InvalidIriError(f"IRI has no scheme: {v!r}")
        for ch in v:
            if ch in _FORBIDDEN_IRI_CHARS or ord(ch) <= 0x20:
                raise InvalidIriError(f"IRI contains forbidden character {ch!r}: {v!r}")

    def local_name(self) -> str:
        """Substring after the last '/', '#', or ':' separator."""
        idx = max(self.value.rfind("/"), self.value.rfind("#"), self.value.rfind(":"))
        return self.value[idx + 1:]

    def __str__(self) -> str:
        return self.value


# Fixed datatype IRIs used throughout.
XSD_STRING = Iri(XSD + "string")
XSD_INTEGER = Iri(XSD + "integer")
XSD_BOOLEAN = Iri(XSD + "boolean")
XSD_DECIMAL = Iri(XSD + "decimal")
XSD_DATETIME = Iri(XSD + "dateTime")
XSD_ANYURI = Iri(XSD + "anyURI")
RDF_TYPE = Iri(RDF_NS + "type")
RDFS_LABEL = Iri(RDFS_NS + "label")
RDFS_COMMENT = Iri(RDFS_NS + "comment")
RDFS_SUBCLASSOF = Iri(RDFS_NS + "subClassOf")
RDFS_DOMAIN = Iri(RDFS_NS + "domain")
RDFS_RANGE = Iri(RDFS_NS + "range")
RDFS_CLASS = Iri(RDFS_NS + "Class")
RDF_PROPERTY = Iri(RDF_NS + "Property")


@dataclass(frozen=True)
class Literal:
    """RDF literal. A bare literal (no datatype, no lang) is an xsd:string."""

    lexical: str
    datatype: Optional[Iri] = None
    lang: Optional[str] = None

    def __post_init__(self):
        if self.lang is not None and self.datatype is not None:
            raise ValueError("literal cannot carry both a language tag and a datatype")
        if self.lang is not None:
            if not _LANG_TAG_RE.match(self.lang):
                raise ValueError(f"malformed language tag: {self.lang!r}")
            object.__setattr__(self, "lang", self.lang.lower())
        elif self.datatype is None:
            # implied datatype
            object.__setattr__(self, "datatype", XSD_STRING)

    def __str__(self) -> str:
        if self.lang:
            return f'"{self.lexical}"@{self.lang}'
        if self.datatype and self.datatype != XSD_STRING:
            return f'"{self.lexical}"^^{self.datatype}'
        return f'"{self.lexical}"'


@dataclass(frozen=True)
class BlankNode:
    label: str

    def __post_init__(self):
        if not _BLANK_LABEL_RE.match(self.label):
            raise ValueError(f"malformed blank node label: {self.label!r}")

    def __str__(self) -> str:
        return f"_:{self.label}"


Term = Union[Iri, BlankNode, Literal]

# Sort rank per term kind; used by the canonical term order below.
_KIND_RANK = {Iri: 0, BlankNode: 1, Literal: 2}


def term_sort_key(t: Term):
    """Total order over terms: IRIs, then blank nodes, then literals."""
    if isinstance(t, Iri):
        return (0, t.value, "", "")
    if isinstance(t, BlankNode):
        return (1, t.label, "", "")
    return (2, t.lexical, t.datatype.value if t.datatype else "", t.lang or "")


@dataclass(frozen=True)
class Triple:
    subject: Union[Iri, BlankNode]
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TypeError(f"triple subject must be an IRI or blank node: {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TypeError(f"triple predicate must be an IRI: {self.predicate!r}")
        if not isinstance(self.object, (Iri, BlankNode, Literal)):
            raise TypeError(f"triple object must be a term: {self.object!r}")

    def __str__(self) -> str:
        return f"{self.subject} {self.predicate} {self.object} ."


def triple_sort_key(t: Triple):
    return (term_sort_key(t.subject), term_sort_key(t.predicate), term_sort_key(t.object))


def _check_prefix_map(prefixes: Mapping[str, Iri]) -> dict[str, Iri]:
    out: dict[str, Iri] = {}
    for name, ns in prefixes.items():
        if not _PREFIX_NAME_RE.match(name):
            raise ValueError(f"malformed prefix short-name: {name!r}")
        if not isinstance(ns, Iri):
            ns = Iri(str(ns))
        out[name] = ns
    return out


class Graph:
    """Immutable set of triples plus a prefix map.

    Equality and hashing consider the triple set only; the prefix map is
    presentation metadata (N-Triples, for one, cannot carry it).
    """

    __slots__ = ("_triples", "_prefixes", "_index")

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Mapping[str, Iri] | None = None):
        self._triples: frozenset[Triple] = frozenset(triples)
        for t in self._triples:
            if not isinstance(t, Triple):
                raise TypeError(f"not a triple: {t!r}")
        self._prefixes: dict[str, Iri] = _check_prefix_map(prefixes or {})
        self._index = None  # built lazily; graph is immutable so it never goes stale

    # -- basic accessors --
    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    @property
    def prefixes(self) -> dict[str, Iri]:
        return dict(self._prefixes)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def contains(self, t: Triple) -> bool:
        return t in self._triples

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"<Graph {len(self._triples)} triples, {len(self._prefixes)} prefixes>"

    # -- functional updates --
    def insert(self, t: Triple) -> "Graph":
        """New graph with t added; no-op (same content) if already present."""
        if t in self._triples:
            return self
        return Graph(self._triples | {t}, self._prefixes)

    def remove(self, t: Triple) -> "Graph":
        """New graph with t removed; no-op if absent."""
        if t not in self._triples:
            return self
        return Graph(self._triples - {t}, self._prefixes)

    def insert_all(self, triples: Iterable[Triple]) -> "Graph":
        new = self._triples | frozenset(triples)
        if new == self._triples:
            return self
        return Graph(new, self._prefixes)

    def with_prefixes(self, prefixes: Mapping[str, Iri]) -> "Graph":
        merged = dict(self._prefixes)
        merged.update(_check_prefix_map(prefixes))
        return Graph(self._triples, merged)

    # -- matching --
    def _build_index(self):
        by_s: dict = {}
        by_p: dict = {}
        by_o: dict = {}
        for t in self._triples:
            by_s.setdefault(t.subject, []).append(t)
            by_p.setdefault(t.predicate, []).append(t)
            by_o.setdefault(t.object, []).append(t)
        self._index = (by_s, by_p, by_o)

    def match(self, subject: Term | None = None, predicate: Iri | None = None,
              object: Term | None = None) -> list[Triple]:
        """All triples matching the bound positions, in canonical sort order.

        None is a wildcard. The result is a fresh list.
        """
        if self._index is None:
            self._build_index()
        by_s, by_p, by_o = self._index
        # narrowest available index first: subject, object, then predicate
        if subject is not None:
            candidates = by_s.get(subject, [])
        elif object is not None:
            candidates = by_o.get(object, [])
        elif predicate is not None:
            candidates = by_p.get(predicate, [])
        else:
            candidates = self._triples
        out = [
            t for t in candidates
            if (subject is None or t.subject == subject)
            and (predicate is None or t.predicate == predicate)
            and (object is None or t.object == object)
        ]
        out.sort(key=triple_sort_key)
        return out

    def subjects(self) -> set[Union[Iri, BlankNode]]:
        return {t.subject for t in self._triples}

    def objects_of(self, subject: Term, predicate: Iri) -> list[Term]:
        return [t.object for t in self.match(subject, predicate, None)]

    def has_blank_nodes(self) -> bool:
        for t in self._triples:
            if isinstance(t.subject, BlankNode) or isinstance(t.object, BlankNode):
                return True
        return False


def skolemize(g: Graph) -> Graph:
    """Replace every blank node with an IRI under the urn:skolem: scheme.

    Deterministic: the skolem IRI is derived from the blank node label.
    """
    if not g.has_blank_nodes():
        return g
    def sk(term: Term) -> Term:
        if isinstance(term, BlankNode):
            return Iri(SKOLEM_PREFIX + term.label)
        return term
    triples = [Triple(sk(t.subject), t.predicate, sk(t.object)) for t in g]
    return Graph(triples, g.prefixes)

"""Schema model and loader.

Schema documents are Turtle-subset files using a deliberately small
vocabulary: rdfs:Class / rdf:Property declarations, rdfs:subClassOf,
rdfs:domain (repeatable), rdfs:range (single), rdfs:label, rdfs:comment, and
three cardinality annotations in the scm: namespace (minCount, maxCount,
functional). Anything else in a schema document is ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import (
    DanglingReferenceError,
    DuplicateDefinitionError,
    InvalidCardinalityError,
    SchemaCycleError,
    UnknownClassError,
    UnknownPropertyError,
)
from .namespaces import SCOPE_META, STANDARD_PREFIXES
from .terms import (
    RDF_PROPERTY,
    RDF_TYPE,
    RDFS_CLASS,
    RDFS_COMMENT,
    RDFS_DOMAIN,
    RDFS_LABEL,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    XSD,
    Graph,
    Iri,
    Literal,
)
from .turtle import parse_turtle

SCM_MIN_COUNT = Iri(SCOPE_META + "minCount")
SCM_MAX_COUNT = Iri(SCOPE_META + "maxCount")
SCM_FUNCTIONAL = Iri(SCOPE_META + "functional")

KNOWN_DATATYPES = frozenset(
    Iri(XSD + local)
    for local in ("string", "integer", "boolean", "dateTime", "decimal", "anyURI")
)


@dataclass(frozen=True)
class ClassDef:
    iri: Iri
    parents: frozenset[Iri]
    label: str = ""
    description: str = ""


@dataclass(frozen=True)
class PropertyDef:
    iri: Iri
    domain: frozenset[Iri]
    range: Optional[Iri]
    min_card: int = 0
    max_card: Optional[int] = None  # None = unbounded
    functional: bool = False
    label: str = ""
    description: str = ""


class Schema:
    """Immutable class/property index with subclass reachability."""

    def __init__(self, classes: dict[Iri, ClassDef], properties: dict[Iri, PropertyDef],
                 namespaces: dict[str, Iri], version: str = "custom"):
        self.classes = dict(classes)
        self.properties = dict(properties)
        self.namespaces = dict(namespaces)
        self.version = version
        self._ancestor_cache: dict[Iri, frozenset[Iri]] = {}

    def __eq__(self, other):
        if not isinstance(other, Schema):
            return NotImplemented
        return (self.classes == other.classes
                and self.properties == other.properties
                and self.namespaces == other.namespaces
                and self.version == other.version)

    def __repr__(self):
        return f"<Schema v{self.version}: {len(self.classes)} classes, {len(self.properties)} properties>"

    def ancestors(self, c: Iri) -> frozenset[Iri]:
        """Reflexive-transitive closure of the parent relation."""
        if c not in self.classes:
            raise UnknownClassError(f"class not declared: {c}")
        cached = self._ancestor_cache.get(c)
        if cached is not None:
            return cached
        seen: set[Iri] = set()
        stack = [c]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(self.classes[cur].parents)
        result = frozenset(seen)
        self._ancestor_cache[c] = result
        return result

    def is_subclass_of(self, c: Iri, ancestor: Iri) -> bool:
        if ancestor not in self.classes:
            raise UnknownClassError(f"class not declared: {ancestor}")
        return ancestor in self.ancestors(c)

    def subclasses_of(self, ancestor: Iri) -> frozenset[Iri]:
        """All declared classes that reach ancestor, including itself."""
        if ancestor not in self.classes:
            raise UnknownClassError(f"class not declared: {ancestor}")
        return frozenset(c for c in self.classes if ancestor in self.ancestors(c))

    def applicable_properties(self, c: Iri) -> list[PropertyDef]:
        """Properties usable on instances of c, via domain-or-ancestor match."""
        anc = self.ancestors(c)
        hits = [p for p in self.properties.values() if p.domain & anc]
        hits.sort(key=lambda p: p.iri.value)
        return hits

    def property(self, iri: Iri) -> PropertyDef:
        try:
            return self.properties[iri]
        except KeyError:
            raise UnknownPropertyError(f"property not declared: {iri}") from None


def _single_string(g: Graph, subject: Iri, predicate: Iri, what: str) -> str:
    values = {o.lexical for o in g.objects_of(subject, predicate) if isinstance(o, Literal)}
    if len(values) > 1:
        raise DuplicateDefinitionError(
            f"{subject} has {len(values)} distinct {what} values")
    return values.pop() if values else ""


def _single_int(g: Graph, subject: Iri, predicate: Iri, what: str) -> Optional[int]:
    objs = g.objects_of(subject, predicate)
    values = set()
    for o in objs:
        if not isinstance(o, Literal):
            raise InvalidCardinalityError(f"{what} on {subject} must be an integer literal")
        try:
            values.add(int(o.lexical))
        except ValueError:
            raise InvalidCardinalityError(
                f"{what} on {subject} is not an integer: {o.lexical!r}") from None
    if len(values) > 1:
        raise DuplicateDefinitionError(f"{subject} has conflicting {what} values")
    return values.pop() if values else None


def _detect_cycle(classes: dict[Iri, ClassDef]):
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {c: WHITE for c in classes}
    path: list[Iri] = []

    def visit(node: Iri):
        color[node] = GRAY
        path.append(node)
        for parent in sorted(classes[node].parents, key=lambda i: i.value):
            if parent not in classes:
                continue  # dangling; reported separately
            if color[parent] == GRAY:
                idx = path.index(parent)
                cycle = [c.value for c in path[idx:]] + [parent.value]
                raise SchemaCycleError(cycle)
            if color[parent] == WHITE:
                visit(parent)
        path.pop()
        color[node] = BLACK

    for c in sorted(classes, key=lambda i: i.value):
        if color[c] == WHITE:
            visit(c)


def load_schema(docs: Iterable[Union[str, bytes]], version: str = "custom") -> Schema:
    """Build a Schema from Turtle documents.

    Raises SchemaCycleError on a subClassOf cycle, DanglingReferenceError
    when a parent/domain/range names nothing declared, and
    DuplicateDefinitionError on conflicting redefinitions.
    """
    union = Graph()
    namespaces: dict[str, Iri] = {}
    for doc in docs:
        g = parse_turtle(doc)
        for name, ns in g.prefixes.items():
            if name in namespaces and namespaces[name] != ns:
                raise DuplicateDefinitionError(
                    f"prefix {name!r} bound to both {namespaces[name]} and {ns}")
            namespaces[name] = ns
        union = union.insert_all(g.triples)

    class_iris: set[Iri] = set()
    property_iris: set[Iri] = set()
    for t in union.match(None, RDF_TYPE, RDFS_CLASS):
        if not isinstance(t.subject, Iri):
            raise DanglingReferenceError("class declarations must use IRIs")
        class_iris.add(t.subject)
    for t in union.match(None, RDF_TYPE, RDF_PROPERTY):
        if not isinstance(t.subject, Iri):
            raise DanglingReferenceError("property declarations must use IRIs")
        property_iris.add(t.subject)

    both = class_iris & property_iris
    if both:
        worst = sorted(both, key=lambda i: i.value)[0]
        raise DuplicateDefinitionError(f"{worst} is declared as both a class and a property")

    # subClassOf on an undeclared subject is a typo worth failing loudly on
    for t in union.match(None, RDFS_SUBCLASSOF, None):
        if t.subject not in class_iris:
            raise DanglingReferenceError(
                f"subClassOf asserted on undeclared class {t.subject}")

    classes: dict[Iri, ClassDef] = {}
    for c in class_iris:
        parents = set()
        for o in union.objects_of(c, RDFS_SUBCLASSOF):
            if not isinstance(o, Iri):
                raise DanglingReferenceError(f"subclass target of {c} must be an IRI")
            parents.add(o)
        classes[c] = ClassDef(
            iri=c,
            parents=frozenset(parents),
            label=_single_string(union, c, RDFS_LABEL, "label"),
            description=_single_string(union, c, RDFS_COMMENT, "comment"),
        )

    properties: dict[Iri, PropertyDef] = {}
    for p in property_iris:
        domain = set()
        for o in union.objects_of(p, RDFS_DOMAIN):
            if not isinstance(o, Iri):
                raise DanglingReferenceError(f"domain of {p} must be an IRI")
            domain.add(o)
        ranges = {o for o in union.objects_of(p, RDFS_RANGE)}
        if len(ranges) > 1:
            raise DuplicateDefinitionError(f"{p} declares {len(ranges)} ranges")
        rng = None
        if ranges:
            rng = ranges.pop()
            if not isinstance(rng, Iri):
                raise DanglingReferenceError(f"range of {p} must be an IRI")
        min_card = _single_int(union, p, SCM_MIN_COUNT, "minCount") or 0
        max_card = _single_int(union, p, SCM_MAX_COUNT, "maxCount")
        functional = _single_string(union, p, SCM_FUNCTIONAL, "functional") == "true"
        if functional and max_card is None:
            max_card = 1
        if functional and max_card != 1:
            raise InvalidCardinalityError(
                f"{p} is functional but declares maxCount {max_card}")
        if min_card < 0 or (max_card is not None and max_card < min_card):
            raise InvalidCardinalityError(
                f"{p} has an impossible cardinality window [{min_card}, {max_card}]")
        properties[p] = PropertyDef(
            iri=p,
            domain=frozenset(domain),
            range=rng,
            min_card=min_card,
            max_card=max_card,
            functional=functional,
            label=_single_string(union, p, RDFS_LABEL, "label"),
            description=_single_string(union, p, RDFS_COMMENT, "comment"),
        )

    # referential integrity over the merged documents
    for c in classes.values():
        for parent in c.parents:
            if parent not in classes:
                raise DanglingReferenceError(
                    f"{c.iri} declares undeclared parent {parent}")
    for p in properties.values():
        for d in p.domain:
            if d not in classes:
                raise DanglingReferenceError(f"{p.iri} has undeclared domain {d}")
        if p.range is not None and p.range not in classes and p.range not in KNOWN_DATATYPES:
            raise DanglingReferenceError(
                f"{p.iri} has a range that is neither a declared class nor a known datatype: {p.range}")

    _detect_cycle(classes)
    return Schema(classes, properties, namespaces, version)


def _embedded_schema_dir() -> Path:
    return Path(__file__).resolve().parent / "schemas"


def read_manifest(path: Path) -> tuple[str, list[tuple[str, Iri]]]:
    version = "unversioned"
    entries: list[tuple[str, Iri]] = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("version "):
            version = line.split(None, 1)[1]
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DanglingReferenceError(f"malformed manifest line: {raw!r}")
        entries.append((parts[0], Iri(parts[1])))
    return version, entries


def load_schema_dir(directory: Union[str, Path]) -> Schema:
    """Load every .ttl in a directory, checking it against the directory's
    manifest.txt when present."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.ttl"))
    if not paths:
        raise DanglingReferenceError(f"no .ttl schema documents in {directory}")
    docs = [p.read_text(encoding="utf-8") for p in paths]

    manifest_path = directory / "manifest.txt"
    version = "unversioned"
    entries: list[tuple[str, Iri]] = []
    if manifest_path.exists():
        version, entries = read_manifest(manifest_path)

    schema = load_schema(docs, version=version)
    for prefix, class_iri in entries:
        if prefix not in schema.namespaces:
            raise DanglingReferenceError(
                f"manifest expects namespace {prefix!r}, absent from loaded documents")
        if class_iri not in schema.classes:
            raise DanglingReferenceError(
                f"manifest expects class {class_iri}, absent from loaded documents")
    return schema


_DEFAULT_SCHEMA: Schema | None = None


def load_default_schema() -> Schema:
    """The embedded schema set, loaded once per process."""
    global _DEFAULT_SCHEMA
    if _DEFAULT_SCHEMA is None:
        _DEFAULT_SCHEMA = load_schema_dir(_embedded_schema_dir())
    return _DEFAULT_SCHEMA


__all__ = [
    "ClassDef",
    "PropertyDef",
    "Schema",
    "KNOWN_DATATYPES",
    "load_schema",
    "load_schema_dir",
    "load_default_schema",
    "read_manifest",
]

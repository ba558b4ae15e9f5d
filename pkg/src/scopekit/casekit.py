"""Case construction, diff, and merge.

CaseGraph is the one mutable façade in the package: it wraps an immutable
Graph and replaces it on every builder call. Everything a builder mints is
named kb:<kebab-name>-<uuid4>, typed, and linked back to the incident, so a
case built purely through this module validates with zero errors.
"""

from __future__ import annotations

import csv
import io
import random
import re
import uuid
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .catalog import (
    CRIME_TYPES,
    CUSTODY_ACTIONS,
    CVE_ID_RE,
    Catalog,
    MD5_RE,
    load_default_catalog,
)
from .errors import (
    CaseMismatchError,
    CsvFormatError,
    DanglingTargetError,
    InvalidNameError,
    InvalidTimestampError,
    MalformedIdError,
    UnknownClassError,
    UnknownPropertyError,
)
from .namespaces import (
    CLS_ACQUIRED_EVIDENCE,
    CLS_ADVERSARY,
    CLS_ATTACK_PATTERN,
    CLS_ATTACK_TECHNIQUE,
    CLS_DOMAIN_INDICATOR,
    CLS_HASH_VALUE,
    CLS_INCIDENT,
    CLS_INDICATOR_VALUE,
    CLS_INVESTIGATIVE_ACTION,
    CLS_PROVENANCE_RECORD,
    CLS_SCI,
    CLS_THREAT,
    KB,
    PROP_ADVERSARY,
    PROP_AFFECTS,
    PROP_CAPEC_ID,
    PROP_CREATED_TIME,
    PROP_CRIME_TYPE,
    PROP_CUSTODY_ACTION,
    PROP_CUSTODY_ACTOR,
    PROP_CUSTODY_OF,
    PROP_CUSTODY_SEQ,
    PROP_CUSTODY_TS,
    PROP_CVE_ID,
    PROP_DESCRIPTION,
    PROP_DOMAIN_NAME,
    PROP_IOC_SOURCE,
    PROP_LOCATION_NOTE,
    PROP_MD5,
    PROP_NAME,
    PROP_PERFORMED_BY,
    PROP_RELATED_INCIDENT,
    PROP_RELATED_PATTERN,
    PROP_START_TIME,
    PROP_TACTIC,
    PROP_TARGETS,
    PROP_TECHNIQUE_ID,
    PROP_USES_TECHNIQUE,
    STANDARD_PREFIXES,
    crime as crime_iri,
)
from .schema import Schema, load_default_schema
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_INTEGER,
    Graph,
    Iri,
    Literal,
    Triple,
)
from .turtle import serialize_turtle_canonical
from .validation import is_valid_utc_timestamp

_CAMEL_SPLIT_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")


def kebab(text: str) -> str:
    """Lowercase-kebab a label or CamelCase class name; e.g. ResourceSystem
    becomes resource-system."""
    text = _CAMEL_SPLIT_RE.sub("-", text)
    text = re.sub(r"[^A-Za-z0-9]+", "-", text).strip("-").lower()
    return text


@dataclass(frozen=True)
class CustodyEvent:
    evidence: Iri
    actor: Optional[Iri]
    action: str
    at: str


@dataclass(frozen=True)
class Ioc:
    kind: str  # Md5Hash | Domain
    value: str  # normalized (no defanging)
    source: str

    def defanged(self) -> str:
        return self.value.replace(".", "[.]") if self.kind == "Domain" else self.value


@dataclass
class MergeOutcome:
    merged: "CaseGraph"
    conflicts: list[tuple[Iri, Iri, str, str]]

    def conflicts_text(self) -> str:
        """Conflict lines in the validator's line-oriented report format."""
        return "".join(
            f"M01\tError\t{s.value}\t{p.local_name()}: kept {a!r}, dropped {b!r}\n"
            for s, p, a, b in self.conflicts)


def _check_timestamp(at: str) -> str:
    if not is_valid_utc_timestamp(at):
        raise InvalidTimestampError(
            f"timestamps must be UTC ISO-8601 with a Z suffix, got {at!r}")
    return at


class CaseGraph:
    """A single investigation's graph plus the handles builders need."""

    def __init__(self, graph: Graph, case_iri: Iri, schema: Schema, catalog: Catalog,
                 rng: Optional[random.Random] = None):
        self._graph = graph
        self.case_iri = case_iri
        self.schema = schema
        self.catalog = catalog
        self._rng = rng
        self.ioc_import_errors: list[str] = []

    # -- plumbing --

    @property
    def graph(self) -> Graph:
        return self._graph

    @property
    def created(self) -> str:
        for o in self._graph.objects_of(self.case_iri, PROP_CREATED_TIME):
            if isinstance(o, Literal):
                return o.lexical
        return ""

    @property
    def name(self) -> str:
        for o in self._graph.objects_of(self.case_iri, PROP_NAME):
            if isinstance(o, Literal):
                return o.lexical
        return ""

    def add(self, triple: Triple) -> None:
        self._graph = self._graph.insert(triple)

    def add_all(self, triples: Iterable[Triple]) -> None:
        self._graph = self._graph.insert_all(triples)

    def mint(self, base: str) -> Iri:
        slug = kebab(base)
        if not slug:
            raise InvalidNameError(f"cannot derive a name from {base!r}")
        if self._rng is not None:
            u = uuid.UUID(int=self._rng.getrandbits(128), version=4)
        else:
            u = uuid.uuid4()
        return Iri(f"{KB}{slug}-{u}")

    def has_node(self, iri: Iri) -> bool:
        return bool(self._graph.match(iri, None, None))

    def _require_node(self, iri: Iri, what: str) -> None:
        if not self.has_node(iri):
            raise DanglingTargetError(f"{what} {iri.value} is not in this case")

    def _require_class(self, class_iri: Iri, under: Iri, what: str) -> None:
        if class_iri not in self.schema.classes:
            raise UnknownClassError(f"class not declared: {class_iri}")
        if under not in self.schema.ancestors(class_iri):
            raise UnknownClassError(
                f"{class_iri.local_name()} is not a {what} class (not under {under.local_name()})")

    def add_node(self, class_iri: Iri, label: Optional[str] = None) -> Iri:
        """Mint a typed node of any declared class; building block for the
        add_* helpers."""
        if class_iri not in self.schema.classes:
            raise UnknownClassError(f"class not declared: {class_iri}")
        node = self.mint(class_iri.local_name())
        self.add(Triple(node, RDF_TYPE, class_iri))
        if label:
            self.add(Triple(node, PROP_NAME, Literal(label)))
        return node

    # -- builders --

    def add_component(self, class_iri: Iri, label: str) -> Iri:
        self._require_class(class_iri, CLS_SCI, "infrastructure")
        return self.add_node(class_iri, label)

    def add_threat(self, stride_class: Iri, target: Iri) -> Iri:
        self._require_class(stride_class, CLS_THREAT, "threat")
        self._require_node(target, "target component")
        node = self.add_node(stride_class)
        self.add(Triple(node, PROP_TARGETS, target))
        self.add(Triple(node, PROP_RELATED_INCIDENT, self.case_iri))
        return node

    def add_crime(self, crime_type: str, target: Iri,
                  adversary: Optional[Iri] = None) -> Iri:
        if crime_type not in CRIME_TYPES:
            raise UnknownClassError(
                f"crime type {crime_type!r} is not one of: {', '.join(sorted(CRIME_TYPES))}")
        self._require_node(target, "target component")
        node = self.add_node(crime_iri(crime_type))
        self.add(Triple(node, PROP_CRIME_TYPE, Literal(crime_type)))
        self.add(Triple(node, PROP_AFFECTS, target))
        self.add(Triple(node, PROP_RELATED_INCIDENT, self.case_iri))
        if adversary is not None:
            self._require_node(adversary, "adversary")
            self.add(Triple(node, PROP_ADVERSARY, adversary))
        return node

    def add_role(self, role_class: Iri, name: str) -> Iri:
        from .namespaces import role as role_ns
        self._require_class(role_class, role_ns("Role"), "role")
        return self.add_node(role_class, name)

    def add_evidence(self, evidence_class: Iri, attrs: Optional[dict] = None,
                     crime: Optional[Iri] = None, seized_at: Optional[str] = None,
                     seized_by: Optional[Iri] = None) -> Iri:
        """Create an evidence node. Acquired items get their first custody
        record (Seized) automatically so the chain always exists."""
        if evidence_class not in self.schema.classes:
            raise UnknownClassError(f"class not declared: {evidence_class}")
        ancestors = self.schema.ancestors(evidence_class)
        acquired = CLS_ACQUIRED_EVIDENCE in ancestors
        if not acquired and CLS_INDICATOR_VALUE not in ancestors:
            raise UnknownClassError(
                f"{evidence_class.local_name()} is not an evidence class")
        node = self.add_node(evidence_class)
        self.add(Triple(node, PROP_RELATED_INCIDENT, self.case_iri))
        for key, value in (attrs or {}).items():
            self.add(Triple(node, self._resolve_attr(key), self._literal_for(key, value)))
        if crime is not None:
            self._require_node(crime, "crime")
            from .namespaces import PROP_EVIDENCE_OF
            self.add(Triple(node, PROP_EVIDENCE_OF, crime))
        if acquired:
            at = _check_timestamp(seized_at) if seized_at else (self.created or "1970-01-01T00:00:00Z")
            self.add_custody_event(node, "Seized", at, actor=seized_by)
        return node

    def _resolve_attr(self, key) -> Iri:
        if isinstance(key, Iri):
            if key not in self.schema.properties:
                raise UnknownPropertyError(f"property not declared: {key}")
            return key
        from .namespaces import (
            PROP_MAC,
            PROP_MANUFACTURER,
        )
        shorthand = {
            "name": PROP_NAME,
            "description": PROP_DESCRIPTION,
            "manufacturer": PROP_MANUFACTURER,
            "mac": PROP_MAC,
            "macAddress": PROP_MAC,
            "md5": PROP_MD5,
            "md5Hash": PROP_MD5,
            "domainName": PROP_DOMAIN_NAME,
            "iocSource": PROP_IOC_SOURCE,
            "cveId": PROP_CVE_ID,
        }
        if key in shorthand:
            return shorthand[key]
        raise UnknownPropertyError(f"unknown evidence attribute {key!r}")

    def _literal_for(self, key, value) -> Literal:
        if isinstance(value, Literal):
            return value
        if isinstance(value, bool):
            return Literal("true" if value else "false", XSD_BOOLEAN)
        if isinstance(value, int):
            return Literal(str(value), XSD_INTEGER)
        return Literal(str(value))

    def add_custody_event(self, evidence_or_event, action: Optional[str] = None,
                          at: Optional[str] = None, actor: Optional[Iri] = None) -> Iri:
        if isinstance(evidence_or_event, CustodyEvent):
            ev = evidence_or_event
            evidence, action, at, actor = ev.evidence, ev.action, ev.at, ev.actor
        else:
            evidence = evidence_or_event
        self._require_node(evidence, "evidence item")
        if action not in CUSTODY_ACTIONS:
            raise InvalidNameError(
                f"custody action must be one of {', '.join(CUSTODY_ACTIONS)}, got {action!r}")
        _check_timestamp(at)
        seq = len(self._graph.match(None, PROP_CUSTODY_OF, evidence)) + 1
        rec = self.add_node(CLS_PROVENANCE_RECORD)
        self.add(Triple(rec, PROP_CUSTODY_OF, evidence))
        self.add(Triple(rec, PROP_CUSTODY_ACTION, Literal(action)))
        self.add(Triple(rec, PROP_CUSTODY_TS, Literal(at, XSD_DATETIME)))
        self.add(Triple(rec, PROP_CUSTODY_SEQ, Literal(str(seq), XSD_INTEGER)))
        if actor is not None:
            self._require_node(actor, "custody actor")
            self.add(Triple(rec, PROP_CUSTODY_ACTOR, actor))
        return rec

    def _find_technique_node(self, technique_id: str) -> Optional[Iri]:
        for t in self._graph.match(None, PROP_TECHNIQUE_ID, Literal(technique_id)):
            if isinstance(t.subject, Iri):
                return t.subject
        return None

    def _find_pattern_node(self, capec_id: str) -> Optional[Iri]:
        for t in self._graph.match(None, PROP_CAPEC_ID, Literal(capec_id)):
            if isinstance(t.subject, Iri):
                return t.subject
        return None

    def attach_technique(self, subject: Iri, technique_id: str, capec: bool = False,
                         cve: Union[str, list[str], None] = None) -> Iri:
        """Annotate subject with a catalog technique. Technique and pattern
        nodes are shared within a case, keyed by their id."""
        entry = self.catalog.lookup_technique(technique_id)
        self._require_node(subject, "annotation subject")
        node = self._find_technique_node(technique_id)
        if node is None:
            node = self.add_node(CLS_ATTACK_TECHNIQUE, entry.name)
            self.add(Triple(node, PROP_TECHNIQUE_ID, Literal(entry.id)))
            self.add(Triple(node, PROP_TACTIC, Literal(entry.tactic)))
        self.add(Triple(subject, PROP_USES_TECHNIQUE, node))
        if capec:
            for pattern in self.catalog.capec_for_technique(technique_id):
                pnode = self._find_pattern_node(pattern.id)
                if pnode is None:
                    pnode = self.add_node(CLS_ATTACK_PATTERN, pattern.name)
                    self.add(Triple(pnode, PROP_CAPEC_ID, Literal(pattern.id)))
                self.add(Triple(node, PROP_RELATED_PATTERN, pnode))
        if cve:
            ids = [cve] if isinstance(cve, str) else list(cve)
            for cve_id in ids:
                if not CVE_ID_RE.match(cve_id):
                    raise MalformedIdError(f"not a CVE id: {cve_id!r}")
                self.add(Triple(node, PROP_CVE_ID, Literal(cve_id)))
        return node

    def add_action(self, description: str, at: str, location: Optional[str] = None,
                   by: Optional[Iri] = None) -> Iri:
        if not description:
            raise InvalidNameError("action description must be non-empty")
        _check_timestamp(at)
        node = self.add_node(CLS_INVESTIGATIVE_ACTION)
        self.add(Triple(node, PROP_DESCRIPTION, Literal(description)))
        self.add(Triple(node, PROP_START_TIME, Literal(at, XSD_DATETIME)))
        self.add(Triple(node, PROP_RELATED_INCIDENT, self.case_iri))
        if location:
            self.add(Triple(node, PROP_LOCATION_NOTE, Literal(location)))
        if by is not None:
            self._require_node(by, "performer")
            self.add(Triple(node, PROP_PERFORMED_BY, by))
        return node

    # -- IoC ingest / export --

    def iocs(self) -> list[Ioc]:
        """All IoC nodes in the case, normalized, sorted by (kind, value)."""
        out = []
        for t in self._graph.match(None, RDF_TYPE, CLS_HASH_VALUE):
            value = _first_literal(self._graph, t.subject, PROP_MD5)
            if value is not None:
                out.append(Ioc("Md5Hash", value,
                               _first_literal(self._graph, t.subject, PROP_IOC_SOURCE) or ""))
        for t in self._graph.match(None, RDF_TYPE, CLS_DOMAIN_INDICATOR):
            value = _first_literal(self._graph, t.subject, PROP_DOMAIN_NAME)
            if value is not None:
                out.append(Ioc("Domain", value,
                               _first_literal(self._graph, t.subject, PROP_IOC_SOURCE) or ""))
        out.sort(key=lambda i: (i.kind, i.value))
        return out

    def import_iocs(self, rows: str) -> int:
        """Ingest kind,value,source CSV. Defanged domains are normalized; rows
        already present (same kind and value) are counted but not re-minted.
        Per-row validation failures land in ioc_import_errors."""
        self.ioc_import_errors = []
        reader = csv.reader(io.StringIO(rows))
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("missing header row", 1) from None
        if [h.strip() for h in header] != ["kind", "value", "source"]:
            raise CsvFormatError("expected header kind,value,source", 1)
        existing = {(i.kind, i.value) for i in self.iocs()}
        count = 0
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise CsvFormatError(f"expected 3 columns, found {len(row)}", rownum)
            kind, value, source = (c.strip() for c in row)
            value = value.replace("[.]", ".")
            if kind == "Md5Hash":
                value = value.lower()
                if not MD5_RE.match(value):
                    self.ioc_import_errors.append(
                        f"row {rownum}: not an MD5 digest: {value!r}")
                    continue
                cls, prop = CLS_HASH_VALUE, PROP_MD5
            elif kind == "Domain":
                if not value or " " in value or "." not in value:
                    self.ioc_import_errors.append(
                        f"row {rownum}: not a domain name: {value!r}")
                    continue
                cls, prop = CLS_DOMAIN_INDICATOR, PROP_DOMAIN_NAME
            else:
                self.ioc_import_errors.append(
                    f"row {rownum}: unknown IoC kind {kind!r}")
                continue
            count += 1
            if (kind, value) in existing:
                continue
            existing.add((kind, value))
            node = self.add_node(cls)
            self.add(Triple(node, prop, Literal(value)))
            self.add(Triple(node, PROP_RELATED_INCIDENT, self.case_iri))
            if source:
                self.add(Triple(node, PROP_IOC_SOURCE, Literal(source)))
        return count

    def export_iocs(self) -> str:
        """kind,value,source CSV with domains re-defanged for safe exchange."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["kind", "value", "source"])
        for ioc in self.iocs():
            writer.writerow([ioc.kind, ioc.defanged(), ioc.source])
        return buf.getvalue()

    # -- serialization --

    def to_turtle(self) -> str:
        return serialize_turtle_canonical(self._graph)

    def validate(self):
        from .validation import validate_graph
        return validate_graph(self._graph, self.schema, self.catalog)


def _first_literal(g: Graph, subject, predicate) -> Optional[str]:
    for o in g.objects_of(subject, predicate):
        if isinstance(o, Literal):
            return o.lexical
    return None


def new_case(name: str, at: str, schema: Optional[Schema] = None,
             catalog: Optional[Catalog] = None,
             rng: Optional[random.Random] = None) -> CaseGraph:
    """Open a case: one Incident node carrying the name and opening time."""
    if not name or not kebab(name):
        raise InvalidNameError(f"case name must be non-empty, got {name!r}")
    _check_timestamp(at)
    schema = schema or load_default_schema()
    catalog = catalog or load_default_catalog()
    c = CaseGraph(Graph(prefixes=STANDARD_PREFIXES), CLS_INCIDENT, schema, catalog, rng)
    case_iri = c.mint(name)
    c.case_iri = case_iri
    c.add(Triple(case_iri, RDF_TYPE, CLS_INCIDENT))
    c.add(Triple(case_iri, PROP_NAME, Literal(name)))
    c.add(Triple(case_iri, PROP_CREATED_TIME, Literal(at, XSD_DATETIME)))
    return c


def from_graph(g: Graph, schema: Optional[Schema] = None,
               catalog: Optional[Catalog] = None,
               case_iri: Optional[Iri] = None,
               rng: Optional[random.Random] = None) -> CaseGraph:
    """Wrap an existing graph, locating its single Incident node."""
    schema = schema or load_default_schema()
    catalog = catalog or load_default_catalog()
    if case_iri is None:
        incidents = sorted(
            (t.subject for t in g.match(None, RDF_TYPE, CLS_INCIDENT) if isinstance(t.subject, Iri)),
            key=lambda i: i.value)
        if not incidents:
            raise CaseMismatchError("graph contains no Incident node")
        if len(incidents) > 1:
            raise CaseMismatchError(
                f"graph contains {len(incidents)} Incident nodes; pass case_iri to pick one")
        case_iri = incidents[0]
    prefixes = dict(STANDARD_PREFIXES)
    prefixes.update(g.prefixes)
    return CaseGraph(g.with_prefixes(prefixes), case_iri, schema, catalog, rng=rng)


def diff(a: CaseGraph, b: CaseGraph) -> tuple[frozenset[Triple], frozenset[Triple]]:
    """(added, removed): what to add to / remove from a to obtain b."""
    added = b.graph.triples - a.graph.triples
    removed = a.graph.triples - b.graph.triples
    return frozenset(added), frozenset(removed)


def apply_diff(a: CaseGraph, added: Iterable[Triple], removed: Iterable[Triple]) -> CaseGraph:
    triples = (a.graph.triples - frozenset(removed)) | frozenset(added)
    return CaseGraph(Graph(triples, a.graph.prefixes), a.case_iri, a.schema, a.catalog)


def merge(a: CaseGraph, b: CaseGraph, allow_mismatch: bool = False) -> MergeOutcome:
    """Union of both graphs. Where a functional property would end up with two
    distinct values for one subject, a's value wins and the conflict is
    reported; b's competing triples stay out of the merged graph."""
    if a.case_iri != b.case_iri and not allow_mismatch:
        raise CaseMismatchError(
            f"cases differ: {a.case_iri.value} vs {b.case_iri.value} "
            "(pass allow_mismatch to merge anyway)")

    functional = {p.iri for p in a.schema.properties.values() if p.functional}
    a_values: dict[tuple, set] = {}
    for t in a.graph:
        if t.predicate in functional:
            a_values.setdefault((t.subject, t.predicate), set()).add(t.object)

    conflicts: list[tuple[Iri, Iri, str, str]] = []
    dropped: set[Triple] = set()
    seen_conflict_keys = set()
    for t in sorted(b.graph, key=lambda t: (str(t.subject), t.predicate.value, str(t.object))):
        if t.predicate not in functional:
            continue
        key = (t.subject, t.predicate)
        mine = a_values.get(key)
        if mine and t.object not in mine:
            dropped.add(t)
            if key not in seen_conflict_keys:
                seen_conflict_keys.add(key)
                kept = sorted(mine, key=str)[0]
                subject_iri = t.subject if isinstance(t.subject, Iri) else Iri(
                    "urn:skolem:" + t.subject.label)
                conflicts.append((subject_iri, t.predicate, str(kept), str(t.object)))

    merged_triples = a.graph.triples | (b.graph.triples - dropped)
    prefixes = dict(b.graph.prefixes)
    prefixes.update(a.graph.prefixes)
    merged = CaseGraph(Graph(merged_triples, prefixes), a.case_iri, a.schema, a.catalog)
    return MergeOutcome(merged, conflicts)

"""Rule-based conformance checking for case graphs.

Twelve registered rules, R01 through R12. Reports are deterministic: findings
are sorted by (code, subject, message), so equal graphs always produce
byte-identical reports. Validation never mutates the graph and never infers
anything: an untyped node is a finding, not a candidate for inference.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from .catalog import (
    CAPEC_ID_RE,
    CRIME_TYPES,
    CVE_ID_RE,
    Catalog,
    MD5_RE,
    TECHNIQUE_ID_RE,
)
from .errors import UnknownRuleError
from .namespaces import (
    CLS_ACQUIRED_EVIDENCE,
    CLS_CYBERCRIME,
    CLS_THREAT,
    PROP_CAPEC_ID,
    PROP_CRIME_TYPE,
    PROP_CUSTODY_OF,
    PROP_CUSTODY_SEQ,
    PROP_CUSTODY_TS,
    PROP_CVE_ID,
    PROP_MD5,
    PROP_TARGETS,
    PROP_TECHNIQUE_ID,
)
from .schema import KNOWN_DATATYPES, Schema
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_INTEGER,
    BlankNode,
    Graph,
    Iri,
    Literal,
    SKOLEM_PREFIX,
)

ERROR = "Error"
WARNING = "Warning"

NAME_UUID_RE = re.compile(
    r"^[a-z0-9]+(-[a-z0-9]+)*-"
    r"[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-4[0-9a-fA-F]{3}-[89abAB][0-9a-fA-F]{3}-[0-9a-fA-F]{12}$")

DATETIME_Z_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?Z$")
INTEGER_LEX_RE = re.compile(r"^[+-]?\d+$")
DECIMAL_LEX_RE = re.compile(r"^[+-]?\d+(\.\d+)?$")


def is_valid_utc_timestamp(lexical: str) -> bool:
    if not DATETIME_Z_RE.match(lexical):
        return False
    try:
        # fromisoformat (3.10) does not accept a trailing Z
        datetime.fromisoformat(lexical[:-1])
        return True
    except ValueError:
        return False


@dataclass(frozen=True)
class Finding:
    severity: str
    code: str
    subject: Iri
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]
    checked_triples: int
    schema_version: str

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_text(self) -> str:
        return "".join(
            f"{f.code}\t{f.severity}\t{f.subject.value}\t{f.message}\n"
            for f in self.findings)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "checked_triples": self.checked_triples,
            "error_count": len(self.errors),
            "warning_count": len(self.warnings),
            "findings": [
                {
                    "code": f.code,
                    "severity": f.severity,
                    "subject": f.subject.value,
                    "message": f.message,
                }
                for f in self.findings
            ],
        }


def _report_iri(node) -> Iri:
    # blank subjects are reported under the skolem scheme so Finding.subject
    # stays an IRI
    if isinstance(node, BlankNode):
        return Iri(SKOLEM_PREFIX + node.label)
    return node


class _Ctx:
    """Shared per-validation indexes so rules stay small."""

    def __init__(self, g: Graph, schema: Schema, catalog: Catalog):
        self.g = g
        self.schema = schema
        self.catalog = catalog
        self.types: dict = {}          # subject -> set of declared+undeclared type IRIs
        self.by_subject_pred: dict = {}  # (subject, predicate) -> list of objects
        for t in g:
            if t.predicate == RDF_TYPE and isinstance(t.object, Iri):
                self.types.setdefault(t.subject, set()).add(t.object)
            self.by_subject_pred.setdefault((t.subject, t.predicate), []).append(t.object)
        self.subjects = sorted(g.subjects(), key=lambda s: _report_iri(s).value)

    def declared_types(self, subject) -> set[Iri]:
        return {c for c in self.types.get(subject, set()) if c in self.schema.classes}

    def is_instance_of(self, subject, ancestor: Iri) -> bool:
        return any(ancestor in self.schema.ancestors(c) for c in self.declared_types(subject))

    def values(self, subject, predicate: Iri) -> list:
        return self.by_subject_pred.get((subject, predicate), [])


def _rule_r01(ctx: _Ctx):
    """Typed-node discipline: every subject is typed, with declared classes."""
    for s in ctx.subjects:
        types = ctx.types.get(s, set())
        if not types:
            yield Finding(ERROR, "R01", _report_iri(s), "node has no type")
            continue
        for c in sorted(types, key=lambda i: i.value):
            if c not in ctx.schema.classes:
                yield Finding(ERROR, "R01", _report_iri(s), f"typed with undeclared class {c.value}")


def _rule_r02(ctx: _Ctx):
    """Domain conformance for declared properties; untyped subjects are R01's."""
    seen = set()
    for t in ctx.g:
        p = ctx.schema.properties.get(t.predicate)
        if p is None or not p.domain:
            continue
        if (t.subject, t.predicate) in seen:
            continue
        seen.add((t.subject, t.predicate))
        declared = ctx.declared_types(t.subject)
        if not declared:
            continue
        satisfied = any(p.domain & ctx.schema.ancestors(c) for c in declared)
        if not satisfied:
            classes = ", ".join(sorted(c.local_name() for c in declared))
            yield Finding(ERROR, "R02", _report_iri(t.subject),
                          f"{t.predicate.local_name()} is not applicable to a node of class {classes}")


def _check_datatype_value(lit: Literal, expected: Iri) -> str | None:
    if lit.datatype != expected:
        found = lit.datatype.value if lit.datatype else f"@{lit.lang}"
        return f"expected {expected.local_name()} literal, found {found}"
    if expected == XSD_DATETIME and not is_valid_utc_timestamp(lit.lexical):
        return f"not a UTC Z-form timestamp: {lit.lexical!r}"
    if expected == XSD_INTEGER and not INTEGER_LEX_RE.match(lit.lexical):
        return f"not an integer: {lit.lexical!r}"
    if expected == XSD_DECIMAL and not DECIMAL_LEX_RE.match(lit.lexical):
        return f"not a decimal: {lit.lexical!r}"
    if expected == XSD_BOOLEAN and lit.lexical not in ("true", "false"):
        return f"not a boolean: {lit.lexical!r}"
    return None


def _rule_r03(ctx: _Ctx):
    """Range conformance: datatype shape for literals, typing for objects."""
    for t in sorted(ctx.g, key=lambda t: (_report_iri(t.subject).value, t.predicate.value)):
        p = ctx.schema.properties.get(t.predicate)
        if p is None or p.range is None:
            continue
        pname = t.predicate.local_name()
        if p.range in KNOWN_DATATYPES:
            if not isinstance(t.object, Literal):
                yield Finding(ERROR, "R03", _report_iri(t.subject),
                              f"{pname} expects a {p.range.local_name()} literal")
                continue
            problem = _check_datatype_value(t.object, p.range)
            if problem:
                yield Finding(ERROR, "R03", _report_iri(t.subject), f"{pname}: {problem}")
        else:
            if isinstance(t.object, Literal):
                yield Finding(ERROR, "R03", _report_iri(t.subject),
                              f"{pname} expects a node of class {p.range.local_name()}, found a literal")
                continue
            if not ctx.is_instance_of(t.object, p.range):
                yield Finding(ERROR, "R03", _report_iri(t.subject),
                              f"{pname} expects a node of class {p.range.local_name()}: "
                              f"{_report_iri(t.object).value} is not one")


def _rule_r04(ctx: _Ctx):
    """Cardinality: occurrence counts against minCount/maxCount/functional."""
    # max side: count distinct objects per (subject, property)
    for (s, pred), objs in sorted(ctx.by_subject_pred.items(),
                                  key=lambda kv: (_report_iri(kv[0][0]).value, kv[0][1].value)):
        p = ctx.schema.properties.get(pred)
        if p is None or p.max_card is None:
            continue
        n = len(set(objs))
        if n > p.max_card:
            kind = "functional property" if p.functional else "property"
            yield Finding(ERROR, "R04", _report_iri(s),
                          f"{kind} {pred.local_name()} has {n} distinct values, at most {p.max_card} allowed")
    # min side: every instance of a domain class must reach the floor
    min_props = [p for p in ctx.schema.properties.values() if p.min_card > 0]
    for p in sorted(min_props, key=lambda p: p.iri.value):
        for s in ctx.subjects:
            declared = ctx.declared_types(s)
            if not declared:
                continue
            if not any(p.domain & ctx.schema.ancestors(c) for c in declared):
                continue
            n = len(set(ctx.values(s, p.iri)))
            if n < p.min_card:
                yield Finding(ERROR, "R04", _report_iri(s),
                              f"property {p.iri.local_name()} has {n} values, at least {p.min_card} required")


def _rule_r05(ctx: _Ctx):
    """Identifier shape: typed instance IRIs end in <kebab-name>-<uuid-v4>."""
    for s in ctx.subjects:
        if not isinstance(s, Iri):
            continue  # labeled blanks have no minted name to check
        if s.value.startswith(SKOLEM_PREFIX):
            continue
        if s not in ctx.types:
            continue  # untyped nodes are R01 findings, not naming findings
        if not NAME_UUID_RE.match(s.local_name()):
            yield Finding(ERROR, "R05", s,
                          f"local name {s.local_name()!r} does not follow <kebab-name>-<uuid-v4>")


def _literal_shape_rule(code: str, prop: Iri, regex, what: str):
    def rule(ctx: _Ctx):
        for t in sorted(ctx.g, key=lambda t: (_report_iri(t.subject).value, str(t.object))):
            if t.predicate != prop or not isinstance(t.object, Literal):
                continue
            if not regex.match(t.object.lexical):
                yield Finding(ERROR, code, _report_iri(t.subject),
                              f"{t.object.lexical!r} is not a well-formed {what}")
    return rule


_rule_r06 = _literal_shape_rule("R06", PROP_TECHNIQUE_ID, TECHNIQUE_ID_RE,
                                "technique id (T#### or T####.###)")
_rule_r07 = _literal_shape_rule("R07", PROP_CAPEC_ID, CAPEC_ID_RE, "CAPEC id (CAPEC-N)")
_rule_r08 = _literal_shape_rule("R08", PROP_MD5, MD5_RE, "MD5 digest (32 lowercase hex digits)")
_rule_r12 = _literal_shape_rule("R12", PROP_CVE_ID, CVE_ID_RE, "CVE id (CVE-YYYY-N)")


def _rule_r09(ctx: _Ctx):
    """Threat nodes should point at the infrastructure they apply to."""
    for s in ctx.subjects:
        if not ctx.is_instance_of(s, CLS_THREAT):
            continue
        if not ctx.values(s, PROP_TARGETS):
            yield Finding(WARNING, "R09", _report_iri(s),
                          "threat is not linked to any infrastructure component")


def _rule_r10(ctx: _Ctx):
    """Chain of custody: every acquired item has one, and it moves forward in time."""
    # custody records grouped by the evidence item they describe
    records_by_evidence: dict = {}
    for (s, pred), objs in ctx.by_subject_pred.items():
        if pred != PROP_CUSTODY_OF:
            continue
        for o in objs:
            records_by_evidence.setdefault(o, []).append(s)

    for e in ctx.subjects:
        if not ctx.is_instance_of(e, CLS_ACQUIRED_EVIDENCE):
            continue
        records = records_by_evidence.get(e, [])
        if not records:
            yield Finding(ERROR, "R10", _report_iri(e), "no custody chain recorded")
            continue

        entries = []
        for rec in records:
            seq = None
            for o in ctx.values(rec, PROP_CUSTODY_SEQ):
                if isinstance(o, Literal) and INTEGER_LEX_RE.match(o.lexical):
                    seq = int(o.lexical)
            ts = None
            for o in ctx.values(rec, PROP_CUSTODY_TS):
                if isinstance(o, Literal) and is_valid_utc_timestamp(o.lexical):
                    ts = o.lexical
            if ts is None:
                continue  # malformed timestamps are R03's finding
            entries.append((seq, ts, _report_iri(rec).value))

        if len(entries) < 2:
            continue
        # order by sequence number when the chain carries distinct ones,
        # otherwise by timestamp (which can still expose duplicates)
        seqs = [seq for seq, _, _ in entries]
        if None not in seqs and len(set(seqs)) == len(seqs):
            entries.sort(key=lambda x: x[0])
        else:
            entries.sort(key=lambda x: (x[1], x[2]))
        for (_, ts_a, _), (_, ts_b, rec_b) in zip(entries, entries[1:]):
            if ts_b <= ts_a:
                yield Finding(ERROR, "R10", _report_iri(e),
                              f"custody timestamps do not strictly increase: {ts_b} follows {ts_a}")
                break


def _rule_r11(ctx: _Ctx):
    """Crime nodes carry a crimeType from the closed set."""
    allowed = ", ".join(sorted(CRIME_TYPES))
    for s in ctx.subjects:
        if not ctx.is_instance_of(s, CLS_CYBERCRIME):
            continue
        values = ctx.values(s, PROP_CRIME_TYPE)
        if not values:
            yield Finding(ERROR, "R11", _report_iri(s),
                          f"crime node lacks a crimeType (one of: {allowed})")
            continue
        for v in values:
            if isinstance(v, Literal) and v.lexical not in CRIME_TYPES:
                yield Finding(ERROR, "R11", _report_iri(s),
                              f"crimeType {v.lexical!r} is not one of: {allowed}")


_RULES = {
    "R01": (ERROR, _rule_r01,
            "Every node in a case graph must carry an rdf:type whose class the schema declares. "
            "Evidence must be explicit: nothing is inferred for untyped or unknown-class nodes."),
    "R02": (ERROR, _rule_r02,
            "A property may only be asserted on nodes whose class (or an ancestor) appears in the "
            "property's declared domain. Untyped subjects are reported by R01 instead."),
    "R03": (ERROR, _rule_r03,
            "Property values must match the declared range: datatype properties need a literal of "
            "the right datatype (timestamps must be UTC ISO-8601 with a Z suffix), object "
            "properties need a node typed with the range class."),
    "R04": (ERROR, _rule_r04,
            "Occurrence counts must respect the declared cardinality window; functional properties "
            "admit at most one distinct value per node."),
    "R05": (ERROR, _rule_r05,
            "Instance identifiers follow the <kebab-name>-<uuid-v4> naming convention, e.g. "
            "resource-system-9f1b2c3d-....  The UUID part is any RFC 4122 version-4 value, "
            "case-insensitive. Keeps minted names self-describing and collision-free."),
    "R06": (ERROR, _rule_r06,
            "Technique annotations must be well-formed ids: T followed by four digits, with an "
            "optional .NNN sub-technique suffix (T1190, T1566.002)."),
    "R07": (ERROR, _rule_r07,
            "Attack-pattern annotations must be well-formed CAPEC ids: CAPEC- followed by digits."),
    "R08": (ERROR, _rule_r08,
            "MD5 values must be exactly 32 lowercase hexadecimal digits."),
    "R09": (WARNING, _rule_r09,
            "Each threat node should target at least one infrastructure component; an untargeted "
            "threat carries no modelling value. Advisory only."),
    "R10": (ERROR, _rule_r10,
            "Every acquired evidence item needs a chain of custody: at least one custody record, "
            "with timestamps strictly increasing along the chain."),
    "R11": (ERROR, _rule_r11,
            "Every crime node carries a crimeType drawn from the closed set: DataInterference, "
            "SystemInterference, IllegalAccess, IllegalInterception."),
    "R12": (ERROR, _rule_r12,
            "CVE annotations must be well-formed ids: CVE-, a four-digit year, a dash, and at "
            "least four digits."),
    "M01": (ERROR, None,
            "Merge conflict: a functional property holds two distinct values for the same node "
            "across the merged inputs. The merge keeps the first input's value; the conflict "
            "line records both."),
}

RULE_CODES = tuple(code for code in sorted(_RULES) if code.startswith("R"))


def validate_graph(g: Graph, schema: Schema, catalog: Catalog) -> ValidationReport:
    """Apply every registered rule; malformed content becomes findings, never
    exceptions."""
    ctx = _Ctx(g, schema, catalog)
    findings: list[Finding] = []
    for code in RULE_CODES:
        _, rule, _ = _RULES[code]
        findings.extend(rule(ctx))
    findings.sort(key=lambda f: (f.code, f.subject.value, f.message))
    return ValidationReport(tuple(findings), checked_triples=len(g),
                            schema_version=schema.version)


def explain_rule(code: str) -> str:
    try:
        severity, _, text = _RULES[code]
    except KeyError:
        raise UnknownRuleError(f"no such rule: {code!r}") from None
    return f"{code} ({severity}): {text}"

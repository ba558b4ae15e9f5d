"""Investigation summaries: a typed CaseSummary plus Markdown and JSON views.

Reports are fail-closed: a case that does not validate cleanly cannot be
summarized, because a forensic digest built on a broken graph misleads the
reader downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .casekit import CaseGraph
from .errors import InvalidCaseError, UnknownClassError
from .namespaces import (
    CLS_ATTACK_TECHNIQUE,
    CLS_INVESTIGATIVE_ACTION,
    CLS_THREAT,
    PROP_CUSTODY_ACTION,
    PROP_CUSTODY_ACTOR,
    PROP_CUSTODY_OF,
    PROP_CUSTODY_SEQ,
    PROP_CUSTODY_TS,
    PROP_DESCRIPTION,
    PROP_LOCATION_NOTE,
    PROP_NAME,
    PROP_PERFORMED_BY,
    PROP_START_TIME,
    PROP_TACTIC,
    PROP_TECHNIQUE_ID,
)
from .terms import RDF_TYPE, Graph, Iri, Literal


@dataclass(frozen=True)
class CustodyEntry:
    at: str
    action: str
    evidence: str  # display label
    actor: str  # display label, "" when unrecorded
    sequence: int


@dataclass(frozen=True)
class ActionEntry:
    at: str
    description: str
    location: str
    performer: str


@dataclass(frozen=True)
class CaseSummary:
    case_id: str
    name: str
    created: str
    threat_counts: tuple[tuple[str, int], ...]  # (category, count), sorted
    tactic_map: tuple[tuple[str, tuple[tuple[str, str], ...]], ...]  # tactic -> ((id, name), ...)
    iocs: tuple[tuple[str, str, str], ...]  # (kind, defanged value, source)
    custody: tuple[CustodyEntry, ...]  # ascending timeline
    actions: tuple[ActionEntry, ...]  # ascending log

    def to_json_dict(self) -> dict:
        return {
            "case": {"id": self.case_id, "name": self.name, "created": self.created},
            "threats": {category: n for category, n in self.threat_counts},
            "ttps": {tactic: [{"id": tid, "name": tname} for tid, tname in techs]
                     for tactic, techs in self.tactic_map},
            "iocs": [{"kind": k, "value": v, "source": s} for k, v, s in self.iocs],
            "custody": [{"at": e.at, "action": e.action, "evidence": e.evidence,
                         "actor": e.actor, "sequence": e.sequence} for e in self.custody],
            "actions": [{"at": a.at, "description": a.description,
                         "location": a.location, "performer": a.performer}
                        for a in self.actions],
        }


def _first(g: Graph, subject, predicate) -> str:
    for o in g.objects_of(subject, predicate):
        if isinstance(o, Literal):
            return o.lexical
    return ""


def _label(g: Graph, node) -> str:
    """Display label: the node's name if set, else its IRI local name."""
    name = _first(g, node, PROP_NAME)
    if name:
        return name
    if isinstance(node, Iri):
        return node.local_name()
    return str(node)


def _instances_under(g: Graph, schema, root: Iri) -> dict:
    """subject -> set of its declared types that sit under root."""
    out: dict = {}
    for t in g.match(None, RDF_TYPE, None):
        cls = t.object
        if not isinstance(cls, Iri) or cls not in schema.classes:
            continue
        if root in schema.ancestors(cls):
            out.setdefault(t.subject, set()).add(cls)
    return out


def summarize(c: CaseGraph) -> CaseSummary:
    report = c.validate()
    if report.errors:
        raise InvalidCaseError(report)

    g = c.graph
    schema, catalog = c.schema, c.catalog

    counts: dict[str, int] = {}
    for subject, classes in _instances_under(g, schema, CLS_THREAT).items():
        category = None
        for cls in sorted(classes, key=lambda x: x.value):
            try:
                category = catalog.stride_category_of(cls, schema)
            except UnknownClassError:
                continue  # typed with the bare root; counted as Uncategorized
            if category:
                break
        counts[category or "Uncategorized"] = counts.get(category or "Uncategorized", 0) + 1
    threat_counts = tuple(sorted(counts.items()))

    by_tactic: dict[str, dict[str, str]] = {}
    for subject in _instances_under(g, schema, CLS_ATTACK_TECHNIQUE):
        tid = _first(g, subject, PROP_TECHNIQUE_ID)
        if not tid:
            continue
        tactic = _first(g, subject, PROP_TACTIC) or "Unspecified"
        by_tactic.setdefault(tactic, {})[tid] = _first(g, subject, PROP_NAME)
    tactic_map = tuple(
        (tactic, tuple(sorted(techs.items())))
        for tactic, techs in sorted(by_tactic.items()))

    iocs = tuple((i.kind, i.defanged(), i.source) for i in c.iocs())

    custody = []
    for t in g.match(None, PROP_CUSTODY_OF, None):
        rec, ev = t.subject, t.object
        seq_text = _first(g, rec, PROP_CUSTODY_SEQ)
        actor_nodes = g.objects_of(rec, PROP_CUSTODY_ACTOR)
        custody.append(CustodyEntry(
            at=_first(g, rec, PROP_CUSTODY_TS),
            action=_first(g, rec, PROP_CUSTODY_ACTION),
            evidence=_label(g, ev),
            actor=_label(g, actor_nodes[0]) if actor_nodes else "",
            sequence=int(seq_text) if seq_text.lstrip("+-").isdigit() else 0,
        ))
    custody.sort(key=lambda e: (e.at, e.evidence, e.sequence))

    actions = []
    for subject in _instances_under(g, schema, CLS_INVESTIGATIVE_ACTION):
        performers = g.objects_of(subject, PROP_PERFORMED_BY)
        actions.append(ActionEntry(
            at=_first(g, subject, PROP_START_TIME),
            description=_first(g, subject, PROP_DESCRIPTION),
            location=_first(g, subject, PROP_LOCATION_NOTE),
            performer=_label(g, performers[0]) if performers else "",
        ))
    actions.sort(key=lambda a: (a.at, a.description))

    return CaseSummary(
        case_id=c.case_iri.value,
        name=c.name,
        created=c.created,
        threat_counts=threat_counts,
        tactic_map=tactic_map,
        iocs=iocs,
        custody=tuple(custody),
        actions=tuple(actions),
    )


def render_markdown(s: CaseSummary) -> str:
    lines: list[str] = []
    title = s.name or s.case_id or "(unnamed case)"
    lines.append(f"# Case report: {title}")
    lines.append("")

    lines.append("## Overview")
    lines.append("")
    lines.append(f"- Case id: {s.case_id}")
    if s.name:
        lines.append(f"- Name: {s.name}")
    if s.created:
        lines.append(f"- Opened: {s.created}")
    total_techniques = sum(len(techs) for _, techs in s.tactic_map)
    lines.append(f"- Threats: {sum(n for _, n in s.threat_counts)}"
                 f", techniques: {total_techniques}"
                 f", IoCs: {len(s.iocs)}"
                 f", custody events: {len(s.custody)}"
                 f", actions: {len(s.actions)}")
    lines.append("")

    lines.append("## Threats")
    lines.append("")
    if s.threat_counts:
        for category, n in s.threat_counts:
            lines.append(f"- {category}: {n}")
    else:
        lines.append("None recorded.")
    lines.append("")

    lines.append("## TTPs")
    lines.append("")
    if s.tactic_map:
        for tactic, techs in s.tactic_map:
            rendered = "; ".join(f"{tid} {tname}".rstrip() for tid, tname in techs)
            lines.append(f"- {tactic}: {rendered}")
    else:
        lines.append("None recorded.")
    lines.append("")

    lines.append("## IoCs")
    lines.append("")
    if s.iocs:
        lines.append("| Kind | Value | Source |")
        lines.append("| --- | --- | --- |")
        for kind, value, source in s.iocs:
            lines.append(f"| {kind} | {value} | {source} |")
    else:
        lines.append("None recorded.")
    lines.append("")

    lines.append("## Custody")
    lines.append("")
    if s.custody:
        lines.append("| When | Action | Evidence | Actor |")
        lines.append("| --- | --- | --- | --- |")
        for e in s.custody:
            lines.append(f"| {e.at} | {e.action} | {e.evidence} | {e.actor} |")
    else:
        lines.append("None recorded.")
    lines.append("")

    lines.append("## Actions")
    lines.append("")
    if s.actions:
        lines.append("| When | Description | Location | By |")
        lines.append("| --- | --- | --- | --- |")
        for a in s.actions:
            lines.append(f"| {a.at} | {a.description} | {a.location} | {a.performer} |")
    else:
        lines.append("None recorded.")
    lines.append("")

    return "\n".join(lines)

"""Two investigators extend the same case; diff shows the drift and merge
reconciles it. Conflict-free merges are order independent. When both sides
set the same single-valued property, the first argument wins and every
dropped value comes back as an M01 conflict line.
"""

from scopekit import diff, from_graph, merge, new_case
from scopekit.namespaces import PROP_MD5, evidence, infrastructure, role, threats
from scopekit.terms import Literal, Triple

base = new_case("joint-task-force", at="2031-06-01T08:00:00Z")
telemetry = base.add_component(infrastructure("WaterSystem"), "reservoir telemetry")
logs = base.add_evidence(evidence("LogFile"), seized_at="2031-06-01T09:00:00Z")

# both teams start from the same snapshot
field = from_graph(base.graph)
lab = from_graph(base.graph)

field.add_threat(threats("Tampering"), telemetry)
field.add_action("Walked the pump house intake", "2031-06-01T10:00:00Z",
                 by=field.add_role(role("FirstResponder"), "field lead"))

lab.add_custody_event(logs, "Analyzed", "2031-06-01T11:30:00Z")
lab.attach_technique(lab.add_threat(threats("DenialOfService"), telemetry),
                     "T1499")

added, removed = diff(field, lab)
print(f"field -> lab drift: +{len(added)} / -{len(removed)} triples")

outcome = merge(field, lab)
print(f"merged: {len(outcome.merged.graph.triples)} triples,"
      f" {len(outcome.conflicts)} conflicts")
print("order independent:",
      merge(lab, field).merged.graph == outcome.merged.graph)

# now make them disagree about a single-valued property
field.add(Triple(logs, PROP_MD5, Literal("a" * 32)))
lab.add(Triple(logs, PROP_MD5, Literal("b" * 32)))
clash = merge(field, lab)
print()
print(clash.conflicts_text().rstrip())
kept = [t.object.lexical for t in clash.merged.graph.match(logs, PROP_MD5, None)]
print("kept:", kept)
print("merged case still validates:", clash.merged.validate().ok)

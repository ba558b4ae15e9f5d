"""Browse the embedded reference catalog.

Technique lookups, tactic listings, CAPEC cross-references, STRIDE
classification of threat classes, and the ISO 37120-family indicator
clauses suggested for each infrastructure family.
"""

from scopekit import TACTICS, UnknownClassError, load_default_catalog, load_default_schema
from scopekit.namespaces import infrastructure, threats

catalog = load_default_catalog()
schema = load_default_schema()

entry = catalog.lookup_technique("T1190")
print(f"{entry.id}  {entry.name}  [{entry.tactic}]")
for pattern in catalog.capec_for_technique(entry.id):
    print(f"    maps to {pattern.id}  {pattern.name}")

print("\ntactics:", ", ".join(TACTICS))
for tech in catalog.techniques_for_tactic("Impact"):
    print(f"    Impact: {tech.id}  {tech.name}")

# STRIDE classification walks the class hierarchy; the bare root has none
print("\nDenialOfService falls under",
      catalog.stride_category_of(threats("DenialOfService"), schema))
try:
    catalog.stride_category_of(threats("Threat"), schema)
except UnknownClassError as err:
    print("bare Threat:", err)

print("\nindicator clauses for an energy system:")
for ind in catalog.indicators_for_system(infrastructure("EnergySystem"), schema):
    print(f"    {ind.iso_standard} clause {ind.clause}  {ind.description}")

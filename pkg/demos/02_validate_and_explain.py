"""Validate a bundled case, then break it on purpose and read the findings.

Shows the finding report format, the Error/Warning split, and explain_rule
for turning a code into its contract.
"""

from importlib import resources

from scopekit import explain_rule, parse_turtle, validate_graph
from scopekit.catalog import load_default_catalog
from scopekit.namespaces import PROP_MD5, PROP_TARGETS
from scopekit.schema import load_default_schema
from scopekit.terms import Literal, Triple

schema = load_default_schema()
catalog = load_default_catalog()

text = (resources.files("scopekit") / "fixtures" / "scenario1.ttl").read_text()
g = parse_turtle(text)

report = validate_graph(g, schema, catalog)
print(f"pristine case: {len(report.findings)} findings, ok={report.ok}")

# break it three ways: truncate a hash, double it up, drop a threat's target
item = next(iter(g.match(None, PROP_MD5, None)))
broken = (
    g.remove(item)
    .insert(Triple(item.subject, PROP_MD5, Literal(item.object.lexical[:31])))
    .insert(Triple(item.subject, PROP_MD5, Literal("f" * 32)))
)
target = next(iter(broken.match(None, PROP_TARGETS, None)))
broken = broken.remove(target)

report = validate_graph(broken, schema, catalog)
print(f"\nbroken case: {len(report.errors)} errors, {len(report.warnings)} warnings")
print(report.to_text())

for code in sorted({f.code for f in report.findings}):
    print(explain_rule(code))

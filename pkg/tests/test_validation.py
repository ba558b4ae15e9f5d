"""Rule-by-rule validator behaviour, report shape, and rule explanations."""

import random

import pytest

from scopekit import casekit
from scopekit.errors import UnknownRuleError
from scopekit.namespaces import (
    CLS_ATTACK_TECHNIQUE,
    PROP_CAPEC_ID,
    PROP_CRIME_TYPE,
    PROP_CUSTODY_TS,
    PROP_MD5,
    PROP_TARGETS,
    PROP_TECHNIQUE_ID,
    evidence,
    infrastructure,
    role,
    threats,
)
from scopekit.terms import RDF_TYPE, Graph, Iri, Literal, Triple, XSD_DATETIME
from scopekit.validation import (
    RULE_CODES,
    Finding,
    explain_rule,
    is_valid_utc_timestamp,
    validate_graph,
)


def build_case():
    """One small case touching every rule's subject matter."""
    c = casekit.new_case("unit-case", at="2100-01-01T00:00:00Z",
                         rng=random.Random(7))
    comp = c.add_component(infrastructure("EnergySystem"), "Test grid")
    analyst = c.add_role(role("ForensicAnalyst"), "Analyst")
    threat = c.add_threat(threats("Tampering"), comp)
    crime = c.add_crime("SystemInterference", comp)
    item = c.add_evidence(evidence("DeviceImage"),
                          attrs={"name": "disk image", "md5": "0" * 32},
                          crime=crime, seized_at="2100-01-01T01:00:00Z",
                          seized_by=analyst)
    c.add_custody_event(item, "Imaged", "2100-01-01T02:00:00Z", actor=analyst)
    tech = c.attach_technique(crime, "T1190", capec=True, cve="CVE-2022-2884")
    action = c.add_action("imaged the controller", "2100-01-01T03:00:00Z",
                          by=analyst)
    nodes = {"comp": comp, "analyst": analyst, "threat": threat, "crime": crime,
             "item": item, "tech": tech, "action": action}
    return c, nodes


@pytest.fixture()
def case():
    return build_case()


def codes(g, schema, catalog):
    return sorted({f.code for f in validate_graph(g, schema, catalog).findings})


class TestCleanInputs:
    def test_builder_case_is_clean(self, case, schema, catalog):
        c, _ = case
        report = validate_graph(c.graph, schema, catalog)
        assert report.ok
        assert report.findings == ()
        assert report.checked_triples == len(c.graph)
        assert report.schema_version == schema.version

    @pytest.mark.parametrize("name", ["scenario1", "scenario2", "scenario3"])
    def test_fixtures_are_clean(self, request, name, schema, catalog):
        g = request.getfixturevalue(name)
        report = validate_graph(g, schema, catalog)
        assert report.ok
        assert not report.warnings

    def test_empty_graph_is_clean(self, schema, catalog):
        assert validate_graph(Graph(), schema, catalog).ok


class TestR01Typing:
    def test_untyped_node_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph
        for t in g.match(n["action"], RDF_TYPE, None):
            g = g.remove(t)
        assert codes(g, schema, catalog) == ["R01"]

    def test_undeclared_class_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph.insert(Triple(n["comp"], RDF_TYPE, infrastructure("HologramGrid")))
        report = validate_graph(g, schema, catalog)
        assert [f.code for f in report.findings] == ["R01"]
        assert "HologramGrid" in report.findings[0].message


class TestR02Domain:
    def test_property_outside_domain_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph.insert(Triple(n["comp"], PROP_CRIME_TYPE,
                                  Literal("IllegalAccess")))
        assert codes(g, schema, catalog) == ["R02"]

    def test_untyped_subject_is_not_a_domain_finding(self, case, schema, catalog):
        c, n = case
        g = c.graph
        for t in g.match(n["action"], RDF_TYPE, None):
            g = g.remove(t)
        fired = {f.code for f in validate_graph(g, schema, catalog).findings}
        assert "R02" not in fired


class TestR03Range:
    def test_corrupt_timestamp_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph
        rec = g.match(None, PROP_CUSTODY_TS, None)[0]
        g = g.remove(rec).insert(
            Triple(rec.subject, PROP_CUSTODY_TS, Literal("yesterday", XSD_DATETIME)))
        assert "R03" in codes(g, schema, catalog)

    def test_offset_timestamp_rejected(self, case, schema, catalog):
        c, n = case
        g = c.graph
        rec = g.match(None, PROP_CUSTODY_TS, None)[0]
        g = g.remove(rec).insert(
            Triple(rec.subject, PROP_CUSTODY_TS,
                   Literal("2100-01-01T01:00:00+00:00", XSD_DATETIME)))
        assert "R03" in codes(g, schema, catalog)

    def test_literal_where_node_expected_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph.insert(Triple(n["threat"], PROP_TARGETS, Literal("the grid")))
        assert codes(g, schema, catalog) == ["R03"]

    def test_node_of_wrong_class_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph.insert(Triple(n["threat"], PROP_TARGETS, n["analyst"]))
        assert codes(g, schema, catalog) == ["R03"]


class TestR04Cardinality:
    def test_second_md5_on_one_item_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph.insert(Triple(n["item"], PROP_MD5, Literal("f" * 32)))
        assert codes(g, schema, catalog) == ["R04"]
        finding = validate_graph(g, schema, catalog).findings[0]
        assert "md5Hash" in finding.message
        assert "functional" in finding.message

    def test_duplicate_value_does_not_fire(self, case, schema, catalog):
        # distinct values are counted, not assertions
        c, n = case
        g = c.graph.insert(Triple(n["item"], PROP_MD5, Literal("0" * 32)))
        assert validate_graph(g, schema, catalog).ok


class TestR05Naming:
    def test_minted_names_pass(self, case, schema, catalog):
        c, _ = case
        assert validate_graph(c.graph, schema, catalog).ok

    @pytest.mark.parametrize("bad_local", [
        "grid",                                          # no uuid
        "grid-1234",                                     # not a uuid
        "grid-9f1b2c3d-0000-1000-8000-000000000000",     # version 1, not 4
        "Grid-9f1b2c3d-0000-4000-8000-000000000000",     # upper-case name part
    ])
    def test_bad_local_names_fire(self, case, schema, catalog, bad_local):
        c, n = case
        old = n["comp"]
        new = Iri(old.value.rsplit("/", 1)[0] + "/" + bad_local)
        g = c.graph
        for t in list(g):
            changed = t
            if t.subject == old:
                changed = Triple(new, changed.predicate, changed.object)
            if t.object == old:
                changed = Triple(changed.subject, changed.predicate, new)
            if changed is not t:
                g = g.remove(t).insert(changed)
        assert codes(g, schema, catalog) == ["R05"]

    def test_uuid_case_insensitive(self, case, schema, catalog):
        c, n = case
        old = n["comp"]
        local = old.local_name()
        new = Iri(old.value.rsplit("/", 1)[0] + "/" + local[:-36] + local[-36:].upper())
        g = c.graph
        for t in list(g):
            changed = t
            if t.subject == old:
                changed = Triple(new, changed.predicate, changed.object)
            if t.object == old:
                changed = Triple(changed.subject, changed.predicate, new)
            if changed is not t:
                g = g.remove(t).insert(changed)
        assert validate_graph(g, schema, catalog).ok


class TestLiteralShapeRules:
    def test_r06_bad_technique_id(self, case, schema, catalog):
        c, n = case
        g = c.graph
        old = g.match(n["tech"], PROP_TECHNIQUE_ID, None)[0]
        g = g.remove(old).insert(
            Triple(n["tech"], PROP_TECHNIQUE_ID, Literal("T1566.2")))
        assert codes(g, schema, catalog) == ["R06"]

    def test_r07_bad_capec_id(self, case, schema, catalog):
        c, n = case
        pat = c.graph.match(None, PROP_CAPEC_ID, None)[0]
        g = c.graph.remove(pat).insert(
            Triple(pat.subject, PROP_CAPEC_ID, Literal("CAPEC650")))
        assert codes(g, schema, catalog) == ["R07"]

    def test_r08_short_md5(self, case, schema, catalog):
        c, n = case
        old = c.graph.match(n["item"], PROP_MD5, None)[0]
        g = c.graph.remove(old).insert(
            Triple(n["item"], PROP_MD5, Literal("0" * 31)))
        assert codes(g, schema, catalog) == ["R08"]

    def test_r08_uppercase_md5(self, case, schema, catalog):
        c, n = case
        old = c.graph.match(n["item"], PROP_MD5, None)[0]
        g = c.graph.remove(old).insert(
            Triple(n["item"], PROP_MD5, Literal("A" * 32)))
        assert codes(g, schema, catalog) == ["R08"]

    def test_r12_two_digit_year(self, case, schema, catalog):
        c, n = case
        old = [t for t in c.graph.match(n["tech"], None, None)
               if t.predicate.local_name() == "cveId"][0]
        g = c.graph.remove(old).insert(
            Triple(n["tech"], old.predicate, Literal("CVE-22-2884")))
        assert codes(g, schema, catalog) == ["R12"]


class TestR09Targets:
    def test_untargeted_threat_warns(self, case, schema, catalog):
        c, n = case
        g = c.graph
        for t in g.match(n["threat"], PROP_TARGETS, None):
            g = g.remove(t)
        report = validate_graph(g, schema, catalog)
        assert report.ok  # warning only
        assert [f.code for f in report.warnings] == ["R09"]
        assert report.warnings[0].severity == "Warning"


class TestR10Custody:
    def test_missing_chain_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph
        # drop both custody records entirely
        for rec in {t.subject for t in g.match(None, PROP_CUSTODY_TS, None)}:
            for t in g.match(rec, None, None):
                g = g.remove(t)
        report = validate_graph(g, schema, catalog)
        assert [f.code for f in report.findings] == ["R10"]
        assert "no custody chain" in report.findings[0].message

    def test_non_increasing_timestamps_fire(self, case, schema, catalog):
        c, n = case
        g = c.graph
        ts = sorted(g.match(None, PROP_CUSTODY_TS, None),
                    key=lambda t: t.object.lexical)
        first, second = ts[0], ts[1]
        g = (g.remove(first).remove(second)
              .insert(Triple(first.subject, PROP_CUSTODY_TS, second.object))
              .insert(Triple(second.subject, PROP_CUSTODY_TS, first.object)))
        assert codes(g, schema, catalog) == ["R10"]

    def test_equal_timestamps_fire(self, case, schema, catalog):
        c, n = case
        g = c.graph
        ts = sorted(g.match(None, PROP_CUSTODY_TS, None),
                    key=lambda t: t.object.lexical)
        first, second = ts[0], ts[1]
        g = g.remove(second).insert(
            Triple(second.subject, PROP_CUSTODY_TS, first.object))
        assert codes(g, schema, catalog) == ["R10"]

    def test_indicator_evidence_needs_no_chain(self, schema, catalog):
        c, _ = build_case()
        c.add_evidence(evidence("DomainIndicator"),
                       attrs={"domainName": "agegamepay.com",
                              "iocSource": "reversing"})
        assert validate_graph(c.graph, schema, catalog).ok


class TestR11CrimeType:
    def test_missing_crime_type_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph
        for t in g.match(n["crime"], PROP_CRIME_TYPE, None):
            g = g.remove(t)
        assert codes(g, schema, catalog) == ["R11"]

    def test_unknown_crime_type_fires(self, case, schema, catalog):
        c, n = case
        g = c.graph
        for t in g.match(n["crime"], PROP_CRIME_TYPE, None):
            g = g.remove(t)
        g = g.insert(Triple(n["crime"], PROP_CRIME_TYPE, Literal("Jaywalking")))
        report = validate_graph(g, schema, catalog)
        assert [f.code for f in report.findings] == ["R11"]
        assert "Jaywalking" in report.findings[0].message


class TestReportShape:
    def test_findings_sorted_by_code_subject_message(self, case, schema, catalog):
        c, n = case
        g = c.graph
        for t in g.match(n["action"], RDF_TYPE, None):
            g = g.remove(t)
        g = g.insert(Triple(n["item"], PROP_MD5, Literal("f" * 32)))
        g = g.insert(Triple(n["item"], PROP_MD5, Literal("e" * 32)))
        report = validate_graph(g, schema, catalog)
        keys = [(f.code, f.subject.value, f.message) for f in report.findings]
        assert keys == sorted(keys)

    def test_to_text_tab_separated(self, case, schema, catalog):
        c, n = case
        g = c.graph.insert(Triple(n["item"], PROP_MD5, Literal("f" * 32)))
        report = validate_graph(g, schema, catalog)
        line = report.to_text().splitlines()[0]
        code, severity, subject, message = line.split("\t")
        assert code == "R04"
        assert severity == "Error"
        assert subject == n["item"].value
        assert "md5Hash" in message

    def test_to_json_dict_counts(self, case, schema, catalog):
        c, n = case
        g = c.graph
        for t in g.match(n["threat"], PROP_TARGETS, None):
            g = g.remove(t)
        g = g.insert(Triple(n["item"], PROP_MD5, Literal("f" * 32)))
        d = validate_graph(g, schema, catalog).to_json_dict()
        assert d["error_count"] == 1
        assert d["warning_count"] == 1
        assert d["schema_version"] == schema.version
        assert {f["code"] for f in d["findings"]} == {"R04", "R09"}

    def test_validation_is_deterministic(self, case, schema, catalog):
        c, n = case
        g = c.graph
        for t in g.match(n["action"], RDF_TYPE, None):
            g = g.remove(t)
        a = validate_graph(g, schema, catalog)
        b = validate_graph(g, schema, catalog)
        assert a == b
        assert a.to_text() == b.to_text()


class TestExplainRule:
    def test_twelve_rule_codes(self):
        assert RULE_CODES == tuple(f"R{i:02d}" for i in range(1, 13))

    @pytest.mark.parametrize("code", [f"R{i:02d}" for i in range(1, 13)] + ["M01"])
    def test_every_code_explained(self, code):
        text = explain_rule(code)
        assert text.startswith(code)
        assert len(text) > 40

    def test_severity_in_explanation(self):
        assert "(Warning)" in explain_rule("R09")
        assert "(Error)" in explain_rule("R10")
        assert "(Error)" in explain_rule("M01")

    def test_unknown_rule(self):
        with pytest.raises(UnknownRuleError):
            explain_rule("R99")


class TestTimestampHelper:
    @pytest.mark.parametrize("good", [
        "2100-01-01T06:00:00Z",
        "1970-01-01T00:00:00Z",
        "2023-06-30T23:59:59.125Z",
    ])
    def test_accepts(self, good):
        assert is_valid_utc_timestamp(good)

    @pytest.mark.parametrize("bad", [
        "2100-01-01T06:00:00",            # no zone
        "2100-01-01T06:00:00+08:00",      # offset form
        "2100-01-01 06:00:00Z",           # space separator
        "2100-02-30T06:00:00Z",           # no such day
        "2100-13-01T06:00:00Z",           # no such month
        "yesterday",
        "",
    ])
    def test_rejects(self, bad):
        assert not is_valid_utc_timestamp(bad)

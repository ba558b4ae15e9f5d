"""Build an investigation case from scratch.

Covers the whole builder surface: infrastructure components, roles, a
threat model, the crime, seized evidence with its custody chain, ATT&CK
annotations, IoC ingest, and the investigation log. Ends by validating
the case and printing its Markdown report.
"""

from scopekit import new_case, render_markdown, summarize
from scopekit.namespaces import evidence, infrastructure, role, threats

case = new_case("harbourfront-scada-intrusion", at="2031-03-02T08:00:00Z")

# what was attacked
grid = case.add_component(infrastructure("EnergySystem"),
                          "Harbourfront substation SCADA")
ot_layer = case.add_component(infrastructure("DigitalOperationalTechnologyLayer"),
                              "RTU head-end network")

# who is involved
responder = case.add_role(role("FirstResponder"), "duty responder")
analyst = case.add_role(role("ForensicAnalyst"), "lab analyst")
adversary = case.add_role(role("Adversary"), "UNC-0142")

# threat model and the offence under investigation
tampering = case.add_threat(threats("Tampering"), ot_layer)
case.add_threat(threats("DenialOfService"), grid)
crime = case.add_crime("SystemInterference", grid, adversary=adversary)

# seized evidence; the Seized custody record is minted automatically
image = case.add_evidence(
    evidence("DeviceImage"),
    attrs={"md5": "9e107d9d372bb6826bd81d3542a419d6", "manufacturer": "Tableau"},
    crime=crime,
    seized_at="2031-03-02T09:15:00Z",
    seized_by=responder)
case.add_custody_event(image, "Imaged", "2031-03-02T10:05:00Z", actor=responder)
case.add_custody_event(image, "Transferred", "2031-03-02T12:40:00Z", actor=responder)
case.add_custody_event(image, "Analyzed", "2031-03-02T15:00:00Z", actor=analyst)

# how they did it: technique nodes are shared per id, CAPEC comes along when asked
case.attach_technique(crime, "T1190", capec=True, cve="CVE-2022-2884")
case.attach_technique(tampering, "T1486")

case.import_iocs(
    "kind,value,source\n"
    "Domain,beacon.unc0142[.]net,gateway pcap\n"
    "Md5Hash,9e107d9d372bb6826bd81d3542a419d6,device image\n")

case.add_action("Isolated the substation VLAN", "2031-03-02T08:40:00Z",
                location="Harbourfront substation", by=responder)
case.add_action("Began timeline reconstruction from the image",
                "2031-03-02T15:30:00Z", by=analyst)

report = case.validate()
print(f"validation: {'clean' if report.ok else 'FAILED'}"
      f" ({len(case.graph.triples)} triples)")
print()
print(render_markdown(summarize(case)))

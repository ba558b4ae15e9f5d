#!/usr/bin/env python3
"""Regenerate the bundled scenario fixtures.

Each scenario uses its own seeded RNG, so minted node ids are stable across
runs and the committed fixtures stay byte-identical. Run from the repo root:

    python3 tools/generate_fixtures.py
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from scopekit import casekit
from scopekit.catalog import TACTICS, load_default_catalog
from scopekit.namespaces import evidence, infrastructure, role, threats
from scopekit.schema import load_default_schema

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "scopekit" / "fixtures"

IOC_CSV = """kind,value,source
Md5Hash,00c4c3946ec03c915cfe4cbddffe93da,Malware reverse engineering
Md5Hash,f84d54b351b7926106ef377b06423734,Malware reverse engineering
Md5Hash,762a96d79e747457e086e6812816b0aa,Malware reverse engineering
Domain,5jua3omslrbkks4c[.]onion[.]link,Malware reverse engineering
Domain,agegamepay[.]com,Malware reverse engineering
Domain,ageofwuxia[.]com,Malware reverse engineering
Domain,ageofwuxia[.]info,Malware reverse engineering
Domain,ageofwuxia[.]net,Malware reverse engineering
Domain,ageofwuxia[.]org,Malware reverse engineering
"""


def scenario1() -> str:
    """Initial triage: district ransomware, field seizure, lab custody."""
    c = casekit.new_case("punggol-ransomware-triage", "2100-01-01T06:00:00Z",
                         rng=random.Random(101))
    grid = c.add_component(infrastructure("EnergySystem"), "Punggol district microgrid")
    ot = c.add_component(infrastructure("DigitalOperationalTechnologyLayer"),
                         "Meter head-end OT layer")
    c.add_component(infrastructure("TelecommunicationSystem"), "District fibre backbone")
    c.add_component(infrastructure("ResourceSystem"), "Punggol shared resource backbone")

    responder = c.add_role(role("FirstResponder"), "SingCERT field responder")
    analyst = c.add_role(role("ForensicAnalyst"), "SingCERT lab analyst")
    apt = c.add_role(role("Adversary"), "APT41")

    c.add_threat(threats("Tampering"), ot)
    c.add_threat(threats("DenialOfService"), grid)

    crime = c.add_crime("SystemInterference", grid, adversary=apt)

    image = c.add_evidence(
        evidence("DeviceImage"),
        {"description": "TX1 image of a ransomed operator workstation",
         "manufacturer": "Tableau",
         "md5": "00c4c3946ec03c915cfe4cbddffe93da",
         "mac": "08:00:27:3a:9f:21"},
        crime=crime, seized_at="2100-01-01T08:30:00Z", seized_by=responder)
    c.add_custody_event(image, "Imaged", "2100-01-01T09:10:00Z", actor=responder)
    c.add_custody_event(image, "Transferred", "2100-01-01T11:00:00Z", actor=responder)
    c.add_custody_event(image, "Analyzed", "2100-01-01T15:00:00Z", actor=analyst)

    memory = c.add_evidence(
        evidence("MemoryCapture"),
        {"description": "Volatile memory from the head-end server"},
        crime=crime, seized_at="2100-01-01T08:45:00Z", seized_by=responder)
    c.add_custody_event(memory, "Transferred", "2100-01-01T11:00:00Z", actor=responder)
    c.add_custody_event(memory, "Analyzed", "2100-01-01T13:20:00Z", actor=analyst)

    pcap = c.add_evidence(
        evidence("NetworkPacketCapture"),
        {"description": "North-south capture at the district gateway"},
        crime=crime, seized_at="2100-01-01T09:00:00Z", seized_by=responder)
    c.add_custody_event(pcap, "Transferred", "2100-01-01T11:05:00Z", actor=responder)
    c.add_custody_event(pcap, "Analyzed", "2100-01-01T14:00:00Z", actor=analyst)

    logs = c.add_evidence(
        evidence("LogFile"),
        {"description": "Host and application logs for lab ingestion"},
        crime=crime, seized_at="2100-01-01T09:30:00Z", seized_by=responder)
    c.add_custody_event(logs, "Transferred", "2100-01-01T11:10:00Z", actor=responder)
    c.add_custody_event(logs, "Analyzed", "2100-01-01T16:00:00Z", actor=analyst)

    c.add_action("Imaged affected devices with a TX1 hardware imager",
                 "2100-01-01T08:30:00Z", location="Punggol Digital District", by=responder)
    c.add_action("Captured volatile memory and triage artifacts",
                 "2100-01-01T08:45:00Z", location="Punggol Digital District", by=responder)
    c.add_action("Recorded network traffic at the district gateway",
                 "2100-01-01T09:00:00Z", location="Punggol Digital District", by=responder)
    c.add_action("Ingested seized logs into the lab analysis stack",
                 "2100-01-01T12:00:00Z", location="SingCERT forensic lab", by=analyst)
    c.add_action("Issued the interim assessment of ransomware spread",
                 "2100-01-01T17:00:00Z", location="SingCERT forensic lab", by=analyst)
    return c.to_turtle()


def scenario2() -> str:
    """TTP identification: every catalog technique attached with patterns."""
    c = casekit.new_case("punggol-ransomware-ttps", "2100-01-15T09:00:00Z",
                         rng=random.Random(202))
    estate = c.add_component(infrastructure("TelecommunicationSystem"),
                             "District network estate")
    apt = c.add_role(role("Adversary"), "APT41")
    crime = c.add_crime("IllegalAccess", estate, adversary=apt)

    catalog = load_default_catalog()
    for tactic in TACTICS:
        for entry in catalog.techniques_for_tactic(tactic):
            cve = "CVE-2022-2884" if entry.id == "T1190" else None
            c.attach_technique(crime, entry.id, capec=True, cve=cve)
    return c.to_turtle()


def scenario3() -> str:
    """Containment and recovery: Encryptor IoC set plus response actions."""
    c = casekit.new_case("punggol-ransomware-recovery", "2100-01-20T08:00:00Z",
                         rng=random.Random(303))
    grid = c.add_component(infrastructure("EnergySystem"), "Punggol district microgrid")
    c.add_component(infrastructure("DigitalOperationalTechnologyLayer"),
                    "Meter head-end OT layer")
    analyst = c.add_role(role("ForensicAnalyst"), "SingCERT lab analyst")
    apt = c.add_role(role("Adversary"), "APT41")
    crime = c.add_crime("DataInterference", grid, adversary=apt)

    pcap = c.add_evidence(
        evidence("NetworkPacketCapture"),
        {"description": "Capture holding the symmetric key observed in transit"},
        crime=crime, seized_at="2100-01-20T10:00:00Z", seized_by=analyst)
    c.add_custody_event(pcap, "Analyzed", "2100-01-24T12:00:00Z", actor=analyst)

    c.import_iocs(IOC_CSV)

    c.add_action("Quarantined infected hosts across the district",
                 "2100-01-20T09:00:00Z", location="Punggol Digital District", by=analyst)
    c.add_action("Removed the ransomware and deployed the eradication patch",
                 "2100-01-21T09:00:00Z", location="SingCERT forensic lab", by=analyst)
    c.add_action("Restored business systems from verified backups",
                 "2100-01-24T09:00:00Z", location="Punggol Digital District", by=analyst)
    c.add_action("Recovered the symmetric key and decrypted affected hosts",
                 "2100-01-24T18:00:00Z", location="SingCERT forensic lab", by=analyst)
    return c.to_turtle()


def main() -> int:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    schema = load_default_schema()
    catalog = load_default_catalog()
    for name, build in (("scenario1", scenario1),
                        ("scenario2", scenario2),
                        ("scenario3", scenario3)):
        text = build()
        from scopekit.turtle import parse_turtle
        from scopekit.validation import validate_graph
        report = validate_graph(parse_turtle(text), schema, catalog)
        if not report.ok:
            print(f"{name}: NOT CLEAN", file=sys.stderr)
            print(report.to_text(), file=sys.stderr)
            return 1
        path = OUT_DIR / f"{name}.ttl"
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path} ({len(text.splitlines())} lines, clean)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Shared generators and oracles for the test suite.

The random-graph builders stay deliberately independent of the library's
serializers (plain string assembly only), and naive_run_query re-implements
join semantics without indexes so it can act as an oracle.
"""

from __future__ import annotations

import random
import re
import string

from scopekit.query import Pattern, Variable
from scopekit.terms import (
    BlankNode,
    Graph,
    Iri,
    Literal,
    Triple,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_INTEGER,
    XSD_STRING,
    term_sort_key,
)

SAFE_LOCAL = string.ascii_lowercase + string.digits
LEXICAL_POOL = (
    "", "plain", "two words", 'with "quotes"', "back\\slash", "tab\there",
    "new\nline", "carriage\rreturn", "unicode: é世界", "trailing space ",
    "\x01control", "percent % and <angle>", "dot.", "123", "true",
)
LANGS = ("en", "en-gb", "de", "zh-hans")


def random_iri(rng: random.Random, ns: str = "http://example.org/t/") -> Iri:
    return Iri(ns + "".join(rng.choice(SAFE_LOCAL) for _ in range(rng.randint(1, 8))))


def random_literal(rng: random.Random) -> Literal:
    lex = rng.choice(LEXICAL_POOL)
    kind = rng.randrange(6)
    if kind == 0:
        return Literal(lex)
    if kind == 1:
        return Literal(lex, XSD_STRING)
    if kind == 2:
        return Literal(lex, lang=rng.choice(LANGS))
    if kind == 3:
        return Literal(str(rng.randint(-5000, 5000)), XSD_INTEGER)
    if kind == 4:
        return Literal(rng.choice(("true", "false", "TRUE", "1")), XSD_BOOLEAN)
    return Literal(lex, XSD_DATETIME)


def random_term(rng: random.Random, blanks: bool = False):
    roll = rng.randrange(10)
    if blanks and roll == 0:
        return BlankNode("b" + str(rng.randint(0, 5)))
    if roll <= 5:
        return random_iri(rng)
    return random_literal(rng)


def random_triple(rng: random.Random, blanks: bool = False) -> Triple:
    subject = random_term(rng, blanks)
    while isinstance(subject, Literal):
        subject = random_term(rng, blanks)
    obj = random_term(rng, blanks)
    return Triple(subject, random_iri(rng), obj)


def random_graph(rng: random.Random, max_triples: int = 200,
                 blanks: bool = False) -> Graph:
    n = rng.randint(0, max_triples)
    triples = [random_triple(rng, blanks) for _ in range(n)]
    prefixes = {"t": Iri("http://example.org/t/")}
    if rng.random() < 0.5:
        prefixes["x"] = Iri("http://example.org/x#")
    return Graph(triples, prefixes)


# -- query oracle: same semantics, no indexes, no early exits --

def _naive_bind(row: dict, pattern: Pattern, triple: Triple):
    ext = dict(row)
    for want, got in ((pattern.subject, triple.subject),
                      (pattern.predicate, triple.predicate),
                      (pattern.object, triple.object)):
        if isinstance(want, Variable):
            if want.name in ext and ext[want.name] != got:
                return None
            ext[want.name] = got
        elif want != got:
            return None
    return ext


def naive_run_query(g: Graph, patterns, filters=()):
    """Brute-force evaluator returning (columns, sorted row tuples)."""
    rows = [{}]
    for pattern in patterns:
        rows = [b for row in rows for t in g
                if (b := _naive_bind(row, pattern, t)) is not None]
    for var, regex in filters:
        var = var.lstrip("?")
        rx = re.compile(regex)
        kept = []
        for row in rows:
            term = row[var]
            text = term.value if isinstance(term, Iri) else (
                term.label if isinstance(term, BlankNode) else term.lexical)
            if rx.search(text):
                kept.append(row)
        rows = kept
    columns = tuple(sorted({v for p in patterns for v in p.variables()}))
    uniq = {tuple(r[c] for c in columns) for r in rows}
    return columns, tuple(sorted(uniq, key=lambda row: tuple(term_sort_key(t) for t in row)))


# -- random query cases over a small vocabulary so joins actually join --

def random_query_graph(rng: random.Random, max_triples: int = 60) -> Graph:
    subjects = [Iri(f"http://example.org/q/s{i}") for i in range(6)]
    predicates = [Iri(f"http://example.org/q/p{i}") for i in range(4)]
    objects = subjects + [Literal(w) for w in ("alpha", "beta", "gamma", "42")]
    triples = [
        Triple(rng.choice(subjects), rng.choice(predicates), rng.choice(objects))
        for _ in range(rng.randint(0, max_triples))
    ]
    return Graph(triples)


def random_patterns(rng: random.Random, max_patterns: int = 4):
    names = ["a", "b", "c", "d"]
    predicates = [Iri(f"http://example.org/q/p{i}") for i in range(4)]
    subjects = [Iri(f"http://example.org/q/s{i}") for i in range(6)]
    patterns = []
    for _ in range(rng.randint(1, max_patterns)):
        s = Variable(rng.choice(names)) if rng.random() < 0.8 else rng.choice(subjects)
        p = rng.choice(predicates) if rng.random() < 0.8 else Variable(rng.choice(names))
        o = Variable(rng.choice(names)) if rng.random() < 0.6 else rng.choice(
            subjects + [Literal("alpha"), Literal("42")])
        patterns.append(Pattern(s, p, o))
    filters = []
    if rng.random() < 0.3:
        bound = sorted({v for p in patterns for v in p.variables()})
        if bound:
            filters.append((rng.choice(bound), rng.choice((r"alpha|beta", r"^http", r"\d+", r"a"))))
    return patterns, filters


# -- randomized investigation scripts for builder / merge properties --

STRIDE_POOL = ("Spoofing", "Tampering", "Repudiation", "InformationDisclosure",
               "DenialOfService", "ElevationOfPrivilege")
COMPONENT_POOL = ("EnergySystem", "WaterSystem", "TelecommunicationSystem",
                  "TransportationSystem", "ResourceSystem",
                  "DigitalOperationalTechnologyLayer")
ACQUIRED_POOL = ("DeviceImage", "MemoryCapture", "NetworkPacketCapture", "LogFile")
CRIME_POOL = ("DataInterference", "SystemInterference", "IllegalAccess",
              "IllegalInterception")
TECHNIQUE_POOL = ("T1190", "T1566.002", "T1059", "T1078", "T1021", "T1486",
                  "T1499", "T1041", "T1071.004")


class _Clock:
    """Strictly increasing case timestamps, minute granularity."""

    def __init__(self):
        self.n = 0

    def tick(self) -> str:
        self.n += 1
        return f"2100-01-{1 + self.n // 1440:02d}T{(self.n // 60) % 24:02d}:{self.n % 60:02d}:00Z"


def random_case_script(rng: random.Random, name: str = "random-script"):
    """Drive the public builder API with random but well-formed steps."""
    from scopekit import casekit

    clock = _Clock()
    c = casekit.new_case(name, at=clock.tick(), rng=rng)
    apply_random_steps(c, rng, clock)
    return c


def apply_random_steps(c, rng: random.Random, clock: _Clock) -> None:
    """Random but well-formed builder steps against an open case."""
    from scopekit.namespaces import evidence, infrastructure, role, threats

    components = [
        c.add_component(infrastructure(rng.choice(COMPONENT_POOL)),
                        f"component {i}")
        for i in range(rng.randint(1, 3))
    ]
    actors = [c.add_role(role(rng.choice(("FirstResponder", "ForensicAnalyst"))),
                         f"actor {i}")
              for i in range(rng.randint(0, 2))]
    adversary = c.add_role(role("Adversary"), "adversary") if rng.random() < 0.4 else None

    attachable = []
    for _ in range(rng.randint(0, 2)):
        attachable.append(c.add_threat(threats(rng.choice(STRIDE_POOL)),
                                       rng.choice(components)))
    if rng.random() < 0.7:
        attachable.append(c.add_crime(rng.choice(CRIME_POOL),
                                      rng.choice(components),
                                      adversary=adversary))

    for _ in range(rng.randint(0, 3)):
        item = c.add_evidence(
            evidence(rng.choice(ACQUIRED_POOL)),
            attrs={"md5": "".join(rng.choice("0123456789abcdef") for _ in range(32))}
            if rng.random() < 0.5 else None,
            seized_at=clock.tick(),
            seized_by=rng.choice(actors) if actors else None)
        for action in ("Imaged", "Transferred", "Analyzed")[: rng.randint(0, 3)]:
            c.add_custody_event(item, action, clock.tick(),
                                actor=rng.choice(actors) if actors else None)

    for _ in range(rng.randint(0, 4)):
        if attachable:
            c.attach_technique(rng.choice(attachable), rng.choice(TECHNIQUE_POOL),
                               capec=rng.random() < 0.5,
                               cve="CVE-2022-2884" if rng.random() < 0.2 else None)

    if rng.random() < 0.3:
        c.import_iocs("kind,value,source\n"
                      "Domain,ageofwuxia[.]com,feed\n"
                      f"Md5Hash,{''.join(rng.choice('0123456789abcdef') for _ in range(32))},feed\n")

    for i in range(rng.randint(0, 2)):
        c.add_action(f"step {i}", clock.tick(),
                     by=rng.choice(actors) if actors else None)

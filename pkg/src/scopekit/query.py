"""Conjunctive triple-pattern queries with variable joins and regex filters.

Small on purpose: patterns join on shared variables, filters run as a final
pass, and results come back as a deduplicated, canonically sorted table. No
OPTIONAL, no UNION, no property paths.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    MalformedVariableError,
    QueryTextError,
    UnboundFilterVariableError,
    UnsupportedRegexError,
)
from .namespaces import STANDARD_PREFIXES
from .ntriples import _render_term_nt
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_INTEGER,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Term,
    term_sort_key,
)
from .turtle import _STRING_UNESCAPES

_VAR_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not _VAR_NAME_RE.match(self.name):
            raise MalformedVariableError(
                f"variable names match ?[A-Za-z][A-Za-z0-9_]*, got ?{self.name}")

    def __str__(self) -> str:
        return "?" + self.name


PatternTerm = Union[Variable, Iri, Literal, BlankNode]


@dataclass(frozen=True)
class Pattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def __post_init__(self):
        if not isinstance(self.predicate, (Variable, Iri)):
            raise MalformedVariableError("pattern predicate must be an IRI or a variable")

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.predicate, self.object)
                if isinstance(t, Variable)}


@dataclass(frozen=True)
class BindingTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[Term, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def to_tsv(self) -> str:
        """Header of ?names, then one row per binding, N-Triples term syntax."""
        out = ["\t".join("?" + c for c in self.columns)]
        for row in self.rows:
            out.append("\t".join(_render_term_nt(t) for t in row))
        return "\n".join(out) + "\n"


def check_regex(text: str) -> "re.Pattern[str]":
    """Compile the conservative filter dialect: literals, classes, ., * + ?,
    anchors, alternation, plain groups. Counted repetition, (?...) extensions,
    and backreferences are rejected so filters behave the same everywhere."""
    i, in_class = 0, False
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text):
                raise UnsupportedRegexError("trailing backslash in filter regex")
            if text[i + 1].isdigit():
                raise UnsupportedRegexError("backreferences are not supported in filters")
            i += 2
            continue
        if in_class:
            if ch == "]":
                in_class = False
        elif ch == "[":
            in_class = True
        elif ch in "{}":
            raise UnsupportedRegexError("counted repetition {m,n} is not supported in filters")
        elif ch == "(" and text[i + 1:i + 2] == "?":
            raise UnsupportedRegexError("(?...) group extensions are not supported in filters")
        i += 1
    if in_class:
        raise UnsupportedRegexError("unterminated character class in filter regex")
    try:
        return re.compile(text)
    except re.error as exc:
        raise UnsupportedRegexError(f"bad filter regex: {exc}") from None


def _filter_text(term: Term) -> str:
    """The text a filter regex sees."""
    if isinstance(term, Iri):
        return term.value
    if isinstance(term, BlankNode):
        return term.label
    return term.lexical


def run_query(g: Graph, patterns: Sequence[Pattern],
              filters: Iterable[tuple[str, str]] = ()) -> BindingTable:
    if not patterns:
        raise MalformedVariableError("a query needs at least one pattern")
    known_vars: set[str] = set()
    for p in patterns:
        known_vars |= p.variables()

    compiled = []
    for var, regex in filters:
        var = var[1:] if var.startswith("?") else var
        if var not in known_vars:
            raise UnboundFilterVariableError(
                f"filter variable ?{var} does not appear in any pattern")
        compiled.append((var, check_regex(regex)))

    # index nested loop join, one pattern at a time
    bindings: list[dict[str, Term]] = [{}]
    for p in patterns:
        grown: list[dict[str, Term]] = []
        for row in bindings:
            parts = []
            for t in (p.subject, p.predicate, p.object):
                parts.append(row.get(t.name) if isinstance(t, Variable) else t)
            for triple in g.match(*parts):
                ext = dict(row)
                consistent = True
                for t, got in ((p.subject, triple.subject),
                               (p.predicate, triple.predicate),
                               (p.object, triple.object)):
                    if isinstance(t, Variable):
                        prior = ext.get(t.name)
                        if prior is None:
                            ext[t.name] = got
                        elif prior != got:
                            consistent = False
                            break
                if consistent:
                    grown.append(ext)
        bindings = grown
        if not bindings:
            break

    for var, rx in compiled:
        bindings = [b for b in bindings if rx.search(_filter_text(b[var]))]

    columns = tuple(sorted(known_vars))
    rows = {tuple(b[c] for c in columns) for b in bindings}
    ordered = sorted(rows, key=lambda row: tuple(term_sort_key(t) for t in row))
    return BindingTable(columns, tuple(ordered))


def count(g: Graph, patterns: Sequence[Pattern],
          filters: Iterable[tuple[str, str]] = ()) -> int:
    return len(run_query(g, patterns, filters))


# -- textual query syntax (one pattern per line, FILTER lines) --

_FILTER_LINE_RE = re.compile(r"^FILTER\s+\?([A-Za-z][A-Za-z0-9_]*)\s+/((?:[^/\\]|\\.)*)/\s*$")
_PNAME_RE = re.compile(r"^([A-Za-z][A-Za-z0-9-]*)?:(\S*)$")
_INTEGER_RE = re.compile(r"^[+-]?[0-9]+$")


class _LineScanner:
    def __init__(self, line: str, lineno: int):
        self.line = line
        self.lineno = lineno
        self.pos = 0

    def err(self, msg: str):
        raise QueryTextError(msg, self.lineno)

    def skip_ws(self):
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.line)

    def _read_quoted(self) -> str:
        self.pos += 1
        out = []
        while True:
            if self.pos >= len(self.line):
                self.err("unterminated string literal")
            ch = self.line[self.pos]
            if ch == '"':
                self.pos += 1
                return "".join(out)
            if ch == "\\":
                self.pos += 1
                if self.pos >= len(self.line):
                    self.err("unterminated escape in string literal")
                esc = self.line[self.pos]
                if esc in _STRING_UNESCAPES:
                    out.append(_STRING_UNESCAPES[esc])
                    self.pos += 1
                elif esc in "uU":
                    width = 4 if esc == "u" else 8
                    hexpart = self.line[self.pos + 1:self.pos + 1 + width]
                    if len(hexpart) != width or any(c not in "0123456789abcdefABCDEF" for c in hexpart):
                        self.err(f"\\{esc} needs {width} hex digits")
                    code = int(hexpart, 16)
                    if code > 0x10FFFF:
                        self.err("escape beyond the Unicode range")
                    out.append(chr(code))
                    self.pos += 1 + width
                else:
                    self.err(f"unknown string escape \\{esc}")
            else:
                out.append(ch)
                self.pos += 1

    def _read_word(self) -> str:
        start = self.pos
        while self.pos < len(self.line) and self.line[self.pos] not in " \t":
            self.pos += 1
        return self.line[start:self.pos]

    def read_term(self, prefixes: dict[str, Iri]) -> PatternTerm:
        self.skip_ws()
        if self.pos >= len(self.line):
            self.err("expected a term")
        ch = self.line[self.pos]
        if ch == "?":
            self.pos += 1
            word = self._read_word()
            try:
                return Variable(word)
            except MalformedVariableError as exc:
                self.err(str(exc))
        if ch == "<":
            end = self.line.find(">", self.pos)
            if end < 0:
                self.err("unterminated <IRI>")
            raw = self.line[self.pos + 1:end]
            self.pos = end + 1
            try:
                return Iri(raw)
            except Exception as exc:
                self.err(f"bad IRI: {exc}")
        if ch == '"':
            lexical = self._read_quoted()
            if self.line.startswith("^^", self.pos):
                self.pos += 2
                if self.pos >= len(self.line) or self.line[self.pos] in " \t":
                    self.err("^^ needs a datatype")
                dt = self.read_term(prefixes)
                if not isinstance(dt, Iri):
                    self.err("datatype must be an IRI")
                return Literal(lexical, dt)
            if self.line.startswith("@", self.pos):
                self.pos += 1
                tag = self._read_word()
                try:
                    return Literal(lexical, lang=tag)
                except ValueError as exc:
                    self.err(str(exc))
            return Literal(lexical)
        word = self._read_word()
        if word == "a":
            return RDF_TYPE
        if word in ("true", "false"):
            return Literal(word, XSD_BOOLEAN)
        if _INTEGER_RE.match(word):
            return Literal(word, XSD_INTEGER)
        if word.startswith("_:"):
            try:
                return BlankNode(word[2:])
            except Exception as exc:
                self.err(f"bad blank node label: {exc}")
        m = _PNAME_RE.match(word)
        if m:
            prefix = m.group(1) or ""
            if prefix not in prefixes:
                self.err(f"undefined prefix {prefix!r}")
            return Iri(prefixes[prefix].value + m.group(2))
        self.err(f"cannot read term starting at {word!r}")


def parse_query(text: str, prefixes: Optional[dict[str, Iri]] = None
                ) -> tuple[list[Pattern], list[tuple[str, str]]]:
    """One whitespace-separated s p o pattern per line; `FILTER ?v /regex/`
    lines; `#` comments and blank lines ignored. Prefixed names resolve
    against the standard profile unless a map is supplied."""
    resolved = dict(STANDARD_PREFIXES)
    if prefixes:
        resolved.update(prefixes)
    patterns: list[Pattern] = []
    filters: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("FILTER"):
            m = _FILTER_LINE_RE.match(line)
            if not m:
                raise QueryTextError("FILTER lines look like: FILTER ?v /regex/", lineno)
            filters.append((m.group(1), m.group(2).replace("\\/", "/")))
            continue
        scanner = _LineScanner(line, lineno)
        s = scanner.read_term(resolved)
        p = scanner.read_term(resolved)
        o = scanner.read_term(resolved)
        if not scanner.at_end():
            raise QueryTextError("a pattern line holds exactly three terms", lineno)
        try:
            patterns.append(Pattern(s, p, o))
        except MalformedVariableError as exc:
            raise QueryTextError(str(exc), lineno) from None
    if not patterns:
        raise QueryTextError("query has no patterns", 1)
    return patterns, filters


def run_text_query(g: Graph, text: str,
                   prefixes: Optional[dict[str, Iri]] = None) -> BindingTable:
    patterns, filters = parse_query(text, prefixes)
    return run_query(g, patterns, filters)

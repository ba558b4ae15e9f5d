"""N-Triples parser and canonical serializer.

Line-oriented grammar: one triple per non-blank, non-comment line, full IRIs
only, no prefix machinery. The canonical serializer writes one triple per
line with lines sorted bytewise, so output is stable across runs and
insertion orders.
"""

from __future__ import annotations

import re
from typing import Union

from .errors import BlankNodePresentError, InvalidIriError, ParseError
from .terms import (
    XSD_STRING,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Term,
    Triple,
)
from .turtle import MAX_DOCUMENT_BYTES, _STRING_UNESCAPES, _coerce_text, escape_string_literal

_LANGTAG_SHAPE_RE = re.compile(r"^[A-Za-z]+(-[A-Za-z0-9]+)*$")


class _LineCursor:
    def __init__(self, line: str, lineno: int):
        self.line = line
        self.lineno = lineno
        self.pos = 0

    def _err(self, msg: str, col=None):
        raise ParseError(msg, self.lineno, (col if col is not None else self.pos + 1))

    def skip_ws(self):
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.line[i] if i < len(self.line) else ""

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def read_iriref(self) -> Iri:
        col = self.pos + 1
        self.pos += 1  # past '<'
        start = self.pos
        while True:
            ch = self.peek()
            if ch == "":
                self._err("unterminated IRI (missing '>')", col)
            if ch == ">":
                break
            if ch in " \t" or ord(ch) < 0x20:
                self._err("whitespace or control character inside IRI")
            self.pos += 1
        value = self.line[start:self.pos]
        self.pos += 1
        try:
            return Iri(value)
        except InvalidIriError as e:
            raise ParseError(str(e), self.lineno, col) from None

    def read_blank(self) -> BlankNode:
        col = self.pos + 1
        if self.peek(1) != ":":
            self._err("expected ':' after '_' in blank node label", col)
        self.pos += 2
        start = self.pos
        while self.peek() and (self.peek().isalnum() or self.peek() == "_"):
            self.pos += 1
        label = self.line[start:self.pos]
        if not label or not label[0].isalpha():
            self._err(f"malformed blank node label: {label!r}", col)
        return BlankNode(label)

    def read_string(self) -> str:
        col = self.pos + 1
        self.pos += 1  # past opening quote
        parts = []
        while True:
            ch = self.peek()
            if ch == "":
                self._err("unterminated string literal", col)
            if ch == '"':
                self.pos += 1
                return "".join(parts)
            if ch == "\\":
                ecol = self.pos + 1
                self.pos += 1
                esc = self.peek()
                if esc in ("u", "U"):
                    width = 4 if esc == "u" else 8
                    self.pos += 1
                    hexdigits = self.line[self.pos:self.pos + width]
                    if len(hexdigits) < width or any(c not in "0123456789abcdefABCDEF" for c in hexdigits):
                        self._err(f"malformed \\{esc} escape", ecol)
                    cp = int(hexdigits, 16)
                    if cp > 0x10FFFF:
                        self._err("escape is not a valid code point", ecol)
                    parts.append(chr(cp))
                    self.pos += width
                elif esc in _STRING_UNESCAPES:
                    parts.append(_STRING_UNESCAPES[esc])
                    self.pos += 1
                else:
                    self._err(f"unknown escape \\{esc}", ecol)
            else:
                parts.append(ch)
                self.pos += 1

    def read_literal(self) -> Literal:
        lexcol = self.pos + 1
        lexical = self.read_string()
        if self.peek() == "^" and self.peek(1) == "^":
            self.pos += 2
            if self.peek() != "<":
                self._err("expected <IRI> after '^^'")
            return Literal(lexical, self.read_iriref())
        if self.peek() == "@":
            col = self.pos + 1
            self.pos += 1
            start = self.pos
            while self.peek() and (self.peek().isalnum() or self.peek() == "-"):
                self.pos += 1
            tag = self.line[start:self.pos]
            if not _LANGTAG_SHAPE_RE.match(tag):
                self._err(f"malformed language tag {tag!r}", col)
            try:
                return Literal(lexical, lang=tag)
            except ValueError as e:
                raise ParseError(str(e), self.lineno, col) from None
        _ = lexcol
        return Literal(lexical)


def parse_ntriples(doc: Union[str, bytes]) -> Graph:
    """Parse an N-Triples document. Blank lines and `#` comment lines skip."""
    text = _coerce_text(doc)
    triples: set[Triple] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        cur = _LineCursor(line, lineno)
        cur.skip_ws()
        if cur.at_end() or cur.peek() == "#":
            continue

        ch = cur.peek()
        if ch == "<":
            subject: Union[Iri, BlankNode] = cur.read_iriref()
        elif ch == "_":
            subject = cur.read_blank()
        elif ch == '"':
            cur._err("a literal cannot be the subject of a triple")
        else:
            cur._err(f"expected subject, found {ch!r}")

        cur.skip_ws()
        if cur.peek() != "<":
            cur._err("expected predicate IRI")
        predicate = cur.read_iriref()

        cur.skip_ws()
        ch = cur.peek()
        if ch == "<":
            obj: Term = cur.read_iriref()
        elif ch == "_":
            obj = cur.read_blank()
        elif ch == '"':
            obj = cur.read_literal()
        else:
            cur._err(f"expected object, found {ch!r}")

        cur.skip_ws()
        if cur.peek() != ".":
            cur._err("expected '.' at end of triple")
        cur.pos += 1
        cur.skip_ws()
        if not cur.at_end() and cur.peek() != "#":
            cur._err("unexpected trailing content after '.'")

        triples.add(Triple(subject, predicate, obj))
    return Graph(triples)


def _render_term_nt(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    lit: Literal = term
    body = f'"{escape_string_literal(lit.lexical)}"'
    if lit.lang is not None:
        return f"{body}@{lit.lang}"
    if lit.datatype == XSD_STRING:
        return body
    return f"{body}^^<{lit.datatype.value}>"


def serialize_ntriples_canonical(g: Graph) -> str:
    """One triple per line, full IRIs, lines sorted bytewise, LF endings."""
    if g.has_blank_nodes():
        raise BlankNodePresentError(
            "canonical N-Triples is defined for skolemized graphs; call skolemize() first")
    lines = sorted(
        f"{_render_term_nt(t.subject)} {_render_term_nt(t.predicate)} {_render_term_nt(t.object)} ."
        for t in g
    )
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


__all__ = ["parse_ntriples", "serialize_ntriples_canonical", "MAX_DOCUMENT_BYTES"]

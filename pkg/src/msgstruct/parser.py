"""Reader and writer for the message-structure textual notation.

``parse`` turns UTF-8 text into a :class:`~msgstruct.core.MessageStructure`
with source spans attached, accepting the sugared surface forms (omitted
complex-substructure names, implicit aggregations inside iterations and
specialisation variants) plus per-field property annotations in parentheses:

    Quantity (op=i; domain=number; example="35")

``to_text`` renders a structure back to text, either as a one-line compact
form or as the vertical tabular layout with OP / DOMAIN / EXAMPLE columns.
Both renderings re-parse to an equivalent structure with identical field
properties.

Errors are raised as :class:`ParseError` carrying diagnostics:

    P001  unbalanced bracket
    P002  ``name =`` not followed by ``<``, ``{``, or ``[``
    P003  empty substructure list
    P004  specialisation at initial-substructure position
    P005  malformed property annotation
    P006  unknown acquisition-operation letter
    P007  unexpected character or token
"""

from __future__ import annotations

import re
from dataclasses import replace

from .core import (
    Acquisition,
    Aggregation,
    BASIC_DOMAIN_KINDS,
    BinaryOp,
    Call,
    Domain,
    BasicDomain,
    EnumeratedDomain,
    Field,
    FieldProperties,
    FieldRef,
    Formula,
    Iteration,
    MEMORY_LINK_RE,
    MessageStructure,
    Number,
    ReferenceDomain,
    Specialisation,
    Substructure,
    Text,
    is_identifier,
)
from .diagnostics import Diagnostic, Severity, SourceSpan

__all__ = ["parse", "parse_formula", "to_text", "structure_to_json_obj", "ParseError"]


class ParseError(Exception):
    """Raised when the input cannot be parsed; carries the diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.message for d in diagnostics))
        self.diagnostics = diagnostics


_NAME_RE = re.compile(r"[A-Za-z](?:[A-Za-z0-9-]|[ \t]+(?=[A-Za-z0-9]))*")
_ANNOT_KEY_RE = re.compile(r"[a-z]+")
_WS_RE = re.compile(r"[ \t\n]+")

_OPENERS = "<{["
_CLOSERS = ">}]"
_MATCHING = {"<": ">", "{": "}", "[": "]"}

_TAB_HEADER = ("FIELD", "OP", "DOMAIN", "EXAMPLE VALUE")

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", '"': '"', "'": "'", "t": "\t", "n": "\n", "r": "\r"}


def _escape(value: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def parse(text: str) -> MessageStructure:
    """Parse one message structure from text (compact or tabular layout)."""
    text = text.lstrip("﻿").replace("\r\n", "\n").replace("\r", "\n")
    text = _detabulate(text)
    return _Parser(text).parse_structure()


def parse_formula(text: str) -> Formula:
    """Parse a derivation/initialisation formula, e.g. ``:Price * :Quantity``."""
    return _FormulaParser(text).parse()


# ---------------------------------------------------------------------------
# Scanner / recursive descent
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    # -- character machinery ------------------------------------------------

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos >= len(self.text):
                return
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _here(self) -> tuple[int, int]:
        return (self.line, self.col)

    def _char_span(self) -> SourceSpan:
        return SourceSpan(self.line, self.col, self.line, self.col)

    def _span_from(self, start: tuple[int, int]) -> SourceSpan:
        end_line, end_col = self.line, max(1, self.col - 1)
        if (end_line, end_col) < start:
            end_line, end_col = start
        return SourceSpan(start[0], start[1], end_line, end_col)

    def _skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\n":
                self._advance()
            elif ch == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            else:
                return

    def _fail(self, code: str, message: str, span: SourceSpan | None = None) -> None:
        raise ParseError(
            [Diagnostic(Severity.ERROR, code, message, span or self._char_span())]
        )

    # -- tokens --------------------------------------------------------------

    def _read_name(self, context: str) -> tuple[str, SourceSpan]:
        m = _NAME_RE.match(self.text, self.pos)
        if m is None:
            ch = self._peek()
            if ch == "":
                self._fail("P007", f"unexpected end of input, expected {context}")
            self._fail("P007", f"unexpected character {ch!r}, expected {context}")
        start = self._here()
        self._advance(len(m.group(0)))
        value = _WS_RE.sub(" ", m.group(0))
        return value, self._span_from(start)

    # -- grammar ---------------------------------------------------------------

    def parse_structure(self) -> MessageStructure:
        self._skip_ws()
        name, name_span = self._read_name("a structure name")
        self._skip_ws()
        if self._peek() != "=":
            self._fail("P007", f"expected '=' after structure name {name!r}")
        self._advance()
        items = self._parse_list()
        self._skip_ws()
        if self._peek() != "":
            ch = self._peek()
            if ch in _CLOSERS:
                self._fail("P001", f"unbalanced bracket: stray {ch!r}")
            self._fail("P007", f"unexpected trailing input {ch!r}")
        root = self._resolve_root(items, name_span)
        end = items[-1].span or name_span
        span = SourceSpan(
            name_span.start_line, name_span.start_col, end.end_line, end.end_col
        )
        return MessageStructure(name, root, span=span)

    def _resolve_root(self, items: list[Substructure], at: SourceSpan) -> Aggregation | Iteration:
        if len(items) == 1:
            only = items[0]
            if isinstance(only, (Aggregation, Iteration)) and only.name is None:
                return only
            if isinstance(only, Specialisation) and only.name is None:
                self._fail(
                    "P004",
                    "a specialisation cannot be the initial substructure",
                    only.span,
                )
        # Unbracketed top level: the initial aggregation is left implicit.
        span = SourceSpan(
            items[0].span.start_line if items[0].span else at.start_line,
            items[0].span.start_col if items[0].span else at.start_col,
            items[-1].span.end_line if items[-1].span else at.end_line,
            items[-1].span.end_col if items[-1].span else at.end_col,
        )
        return Aggregation(None, tuple(items), span=span)

    def _parse_list(self) -> list[Substructure]:
        items: list[Substructure] = []
        while True:
            self._skip_ws()
            ch = self._peek()
            if ch == "" or ch in _CLOSERS or ch == "|" or ch == "+":
                # Nothing where a substructure is required: at list start,
                # or right after a '+' separator.
                self._fail("P003", "empty substructure list")
            items.append(self._parse_element())
            self._skip_ws()
            if self._peek() == "+":
                self._advance()
                continue
            return items

    def _parse_element(self) -> Substructure:
        ch = self._peek()
        if ch in _OPENERS:
            return self._parse_complex(None, None)
        name, name_span = self._read_name("a substructure")
        self._skip_ws()
        if self._peek() == "(":
            properties = self._parse_annotation(name_span)
            span = self._span_from((name_span.start_line, name_span.start_col))
            self._skip_ws()
            if self._peek() == "=":
                self._fail(
                    "P007",
                    f"annotated name {name!r} cannot introduce a complex substructure",
                )
            return Field(name, properties, span=span)
        if self._peek() == "=":
            eq_start = self._here()
            self._advance()
            head_span = SourceSpan(
                name_span.start_line, name_span.start_col, eq_start[0], eq_start[1]
            )
            self._skip_ws()
            if self._peek() not in _OPENERS:
                self._fail(
                    "P002",
                    f"{name!r} = must be followed by '<', '{{', or '[' "
                    "(a bare name is always a field)",
                    head_span,
                )
            return self._parse_complex(name, name_span)
        return Field(name, span=name_span)

    def _parse_complex(self, name: str | None, name_span: SourceSpan | None) -> Substructure:
        opener = self._peek()
        opener_span = self._char_span()
        start = (
            (name_span.start_line, name_span.start_col)
            if name_span is not None
            else self._here()
        )
        self._advance()
        closer = _MATCHING[opener]
        if opener == "[":
            variants = [tuple(self._parse_list())]
            self._skip_ws()
            while self._peek() == "|":
                self._advance()
                variants.append(tuple(self._parse_list()))
                self._skip_ws()
            self._expect_closer(closer, opener, opener_span)
            return Specialisation(name, tuple(variants), span=self._span_from(start))
        children = tuple(self._parse_list())
        self._skip_ws()
        self._expect_closer(closer, opener, opener_span)
        node_type = Aggregation if opener == "<" else Iteration
        return node_type(name, children, span=self._span_from(start))

    def _expect_closer(self, closer: str, opener: str, opener_span: SourceSpan) -> None:
        ch = self._peek()
        if ch == closer:
            self._advance()
            return
        if ch == "":
            self._fail("P001", f"unbalanced bracket: {opener!r} is never closed", opener_span)
        if ch in _CLOSERS:
            self._fail("P001", f"unbalanced bracket: expected {closer!r}, found {ch!r}")
        self._fail("P007", f"expected '+' or {closer!r}, found {ch!r}")

    # -- property annotations --------------------------------------------------

    def _parse_annotation(self, name_span: SourceSpan) -> FieldProperties:
        open_span = self._char_span()
        self._advance()  # consume '('
        entries: list[tuple[str, str, SourceSpan]] = []
        while True:
            self._skip_ws()
            ch = self._peek()
            if ch == ")":
                self._advance()
                break
            if ch == "":
                self._fail("P005", "unterminated property annotation", open_span)
            key_match = _ANNOT_KEY_RE.match(self.text, self.pos)
            if key_match is None:
                self._fail("P005", f"expected a property key, found {ch!r}")
            key_start = self._here()
            self._advance(len(key_match.group(0)))
            key = key_match.group(0)
            key_span = self._span_from(key_start)
            self._skip_ws()
            if self._peek() != "=":
                self._fail("P005", f"expected '=' after property key {key!r}")
            self._advance()
            self._skip_ws()
            value, value_span = self._read_annotation_value(key)
            entries.append((key, value, value_span))
            if any(e[0] == key for e in entries[:-1]):
                self._fail("P005", f"duplicate property key {key!r}", key_span)
            self._skip_ws()
            if self._peek() == ";":
                self._advance()
                continue
            if self._peek() == ")":
                self._advance()
                break
            self._fail("P005", f"expected ';' or ')' in annotation, found {self._peek()!r}")
        if not entries:
            self._fail("P005", "empty property annotation", open_span)
        return self._build_properties(entries)

    def _read_annotation_value(self, key: str) -> tuple[str, SourceSpan]:
        start = self._here()
        if self._peek() == '"':
            return self._read_quoted()
        # Bare value (op, domain, required, visible): runs to ';' or ')'.
        chunk = []
        while self._peek() not in (";", ")", "", "\n"):
            chunk.append(self._peek())
            self._advance()
        value = "".join(chunk).strip()
        if not value:
            self._fail("P005", f"missing value for property {key!r}")
        return value, self._span_from(start)

    def _read_quoted(self) -> tuple[str, SourceSpan]:
        start = self._here()
        self._advance()  # opening quote
        out: list[str] = []
        while True:
            ch = self._peek()
            if ch == "" or ch == "\n":
                self._fail("P005", "unterminated string in annotation", self._span_from(start))
            if ch == '"':
                self._advance()
                return "".join(out), self._span_from(start)
            if ch == "\\":
                self._advance()
                esc = self._peek()
                self._advance()
                out.append(_UNESCAPES.get(esc, "\\" + esc))
                continue
            out.append(ch)
            self._advance()

    def _build_properties(self, entries: list[tuple[str, str, SourceSpan]]) -> FieldProperties:
        values = {key: (value, span) for key, value, span in entries}
        op: str | None = None
        formula: Formula | None = None
        kwargs: dict = {}
        for key, (value, span) in values.items():
            if key == "op":
                if value not in ("i", "g", "d"):
                    self._fail("P006", f"unknown acquisition operation {value!r}", span)
                op = value
            elif key == "formula":
                formula = self._parse_formula_value(value, span)
            elif key == "domain":
                kwargs["domain"] = self._parse_domain_value(value, span)
            elif key == "example":
                kwargs["example"] = value
            elif key == "desc":
                kwargs["description"] = value
            elif key == "label":
                kwargs["label"] = value
            elif key == "link":
                if not MEMORY_LINK_RE.fullmatch(value):
                    self._fail("P005", f"link must be 'Entity.attribute': {value!r}", span)
                kwargs["memory_link"] = value
            elif key == "required":
                kwargs["compulsory"] = self._parse_bool(value, span)
            elif key == "visible":
                kwargs["visible"] = self._parse_bool(value, span)
            elif key == "init":
                kwargs["initialisation"] = self._parse_formula_value(value, span)
            else:
                self._fail("P005", f"unknown property key {key!r}", span)
        if formula is not None and op != "d":
            span = values["formula"][1]
            self._fail("P005", "a derivation formula requires op=d", span)
        if op is not None:
            kwargs["acquisition"] = Acquisition(op, formula)
        return FieldProperties(**kwargs)

    def _parse_bool(self, value: str, span: SourceSpan) -> bool:
        if value == "true":
            return True
        if value == "false":
            return False
        self._fail("P005", f"expected true or false, found {value!r}", span)
        raise AssertionError  # unreachable

    def _parse_domain_value(self, value: str, span: SourceSpan) -> Domain:
        try:
            return _domain_from_text(value)
        except ValueError as exc:
            self._fail("P005", str(exc), span)
            raise AssertionError  # unreachable

    def _parse_formula_value(self, value: str, span: SourceSpan) -> Formula:
        try:
            return parse_formula(value)
        except ValueError as exc:
            self._fail("P005", f"bad formula: {exc}", span)
            raise AssertionError  # unreachable


def _domain_from_text(value: str) -> Domain:
    if value in BASIC_DOMAIN_KINDS:
        return BasicDomain(value)
    if value.startswith("ref:"):
        target = value[4:].strip()
        if not is_identifier(target):
            raise ValueError(f"reference domain needs a type name: {value!r}")
        return ReferenceDomain(target)
    if value.startswith("enum:"):
        body = value[5:].strip()
        parts = body.split("|") if "|" in body else body.split()
        literals = tuple(p.strip() for p in parts if p.strip())
        if not literals or not all(is_identifier(lit) for lit in literals):
            raise ValueError(f"bad enumerated domain: {value!r}")
        if len(set(literals)) != len(literals):
            raise ValueError(f"duplicate literals in enumerated domain: {value!r}")
        return EnumeratedDomain(literals)
    raise ValueError(
        f"unknown domain {value!r} (expected one of {', '.join(BASIC_DOMAIN_KINDS)}, "
        "'ref:Type', or 'enum:a|b')"
    )


# ---------------------------------------------------------------------------
# Formula parsing
# ---------------------------------------------------------------------------


class _FormulaParser:
    """Tiny expression grammar: ``+ -`` over ``* /`` over atoms, all
    left-associative; atoms are ``:Field`` references, numbers, quoted
    strings, function calls, and parenthesised groups."""

    _NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")
    _IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> Formula:
        node = self._expr()
        self._skip()
        if self.pos < len(self.text):
            raise ValueError(f"unexpected {self.text[self.pos]!r} at offset {self.pos}")
        return node

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n":
            self.pos += 1

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expr(self) -> Formula:
        node = self._term()
        while True:
            self._skip()
            op = self._peek()
            if op in ("+", "-"):
                self.pos += 1
                node = BinaryOp(op, node, self._term())
            else:
                return node

    def _term(self) -> Formula:
        node = self._atom()
        while True:
            self._skip()
            op = self._peek()
            if op in ("*", "/"):
                self.pos += 1
                node = BinaryOp(op, node, self._atom())
            else:
                return node

    def _atom(self) -> Formula:
        self._skip()
        ch = self._peek()
        if ch == "":
            raise ValueError("formula ends where a value was expected")
        if ch == "(":
            self.pos += 1
            node = self._expr()
            self._skip()
            if self._peek() != ")":
                raise ValueError("missing ')'")
            self.pos += 1
            return node
        if ch == ":":
            self.pos += 1
            m = _NAME_RE.match(self.text, self.pos)
            if m is None:
                raise ValueError("':' must be followed by a field name")
            self.pos = m.end()
            return FieldRef(_WS_RE.sub(" ", m.group(0)))
        if ch in "'\"":
            return Text(self._string(ch))
        m = self._NUMBER_RE.match(self.text, self.pos)
        if m is not None:
            self.pos = m.end()
            raw = m.group(0)
            return Number(float(raw) if "." in raw else int(raw))
        m = self._IDENT_RE.match(self.text, self.pos)
        if m is not None:
            name = m.group(0)
            self.pos = m.end()
            self._skip()
            if self._peek() != "(":
                raise ValueError(f"function name {name!r} must be followed by '('")
            self.pos += 1
            args: list[Formula] = []
            self._skip()
            if self._peek() == ")":
                self.pos += 1
                return Call(name, ())
            while True:
                args.append(self._expr())
                self._skip()
                if self._peek() == ",":
                    self.pos += 1
                    continue
                if self._peek() == ")":
                    self.pos += 1
                    return Call(name, tuple(args))
                raise ValueError("expected ',' or ')' in argument list")
        raise ValueError(f"unexpected {ch!r} in formula")

    def _string(self, quote: str) -> str:
        self.pos += 1
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise ValueError("unterminated string")
            ch = self.text[self.pos]
            if ch == quote:
                self.pos += 1
                return "".join(out)
            if ch == "\\":
                self.pos += 1
                esc = self.text[self.pos] if self.pos < len(self.text) else ""
                self.pos += 1
                out.append(_UNESCAPES.get(esc, "\\" + esc))
                continue
            out.append(ch)
            self.pos += 1


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def to_text(ms: MessageStructure, style: str = "compact") -> str:
    """Render a structure to text. ``compact`` is a single line; ``tabular``
    is the vertical layout with OP / DOMAIN / EXAMPLE columns. Both forms
    parse back to an equivalent structure with the same field properties."""
    # A name on the root complex cannot be written after "Name =" without
    # re-parsing as a nested element, so it is dropped (names are sugar).
    if ms.root.name is not None:
        ms = replace(ms, root=replace(ms.root, name=None))
    if style == "compact":
        return f"{ms.name}={_compact(ms.root)}"
    if style == "tabular":
        return _tabular(ms)
    raise ValueError(f"unknown style {style!r}")


def _annotation_suffix(f: Field) -> str:
    mapping = f.properties.to_mapping()
    if not mapping:
        return ""
    parts = []
    for key, value in mapping.items():
        if key in ("op", "domain", "required", "visible"):
            parts.append(f"{key}={value}")
        else:
            parts.append(f'{key}="{_escape(value)}"')
    return " (" + "; ".join(parts) + ")"


def _compact(node: Substructure) -> str:
    match node:
        case Field():
            return node.name + _annotation_suffix(node)
        case Aggregation(name, children):
            body = "+".join(_compact(c) for c in children)
            return _named(name, f"<{body}>")
        case Iteration(name, children):
            return _named(name, "{" + _list_body(children) + "}")
        case Specialisation(name, variants):
            body = "|".join(_list_body(v) for v in variants)
            return _named(name, f"[{body}]")
    raise TypeError(f"not a substructure: {node!r}")


def _named(name: str | None, body: str) -> str:
    return f"{name}={body}" if name else body


def _list_body(items: tuple[Substructure, ...]) -> str:
    # The single anonymous aggregation implicit in an iteration body or a
    # variant can be left out, except when its own single child is an
    # aggregation (eliding would merge two nesting levels on re-parse).
    if len(items) == 1 and isinstance(items[0], Aggregation) and items[0].name is None:
        inner = items[0].children
        if not (len(inner) == 1 and isinstance(inner[0], Aggregation)):
            return "+".join(_compact(c) for c in inner)
    return "+".join(_compact(c) for c in items)


# -- tabular style -----------------------------------------------------------


class _Row:
    def __init__(self, text: str, fld: Field | None = None, absorb: bool = False):
        self.text = text
        self.field = fld
        self.can_absorb = absorb


def _domain_column(domain: Domain) -> str:
    match domain:
        case BasicDomain(kind):
            return kind
        case ReferenceDomain(target):
            return target
        case EnumeratedDomain(literals):
            return "[" + "|".join(literals) + "]"
    raise TypeError(f"not a domain: {domain!r}")


def _tabular(ms: MessageStructure) -> str:
    rows: list[_Row] = [_Row(f"{ms.name} =")]
    pending = ""

    def emit_complex(node: Substructure, suffix: str) -> None:
        nonlocal pending
        if node.name:
            rows.append(_Row(pending + node.name + " ="))
            pending = ""
        opener = {"Aggregation": "<", "Iteration": "{", "Specialisation": "["}[
            type(node).__name__
        ]
        pending += opener + " "
        if isinstance(node, Specialisation):
            for i, variant in enumerate(node.variants):
                emit_list(variant)
                if i < len(node.variants) - 1:
                    rows[-1].text += " |"
                    rows[-1].can_absorb = False
        else:
            emit_list(node.children)
        closer = _MATCHING[opener]
        if rows[-1].can_absorb:
            rows[-1].text += " " + closer
            rows[-1].can_absorb = False
        else:
            rows.append(_Row(closer))
        if suffix:
            rows[-1].text += suffix
            rows[-1].can_absorb = False

    def emit_list(items: tuple[Substructure, ...]) -> None:
        nonlocal pending
        for i, item in enumerate(items):
            suffix = " +" if i < len(items) - 1 else ""
            if isinstance(item, Field):
                rows.append(_Row(pending + item.name + suffix, item, absorb=not suffix))
                pending = ""
            else:
                emit_complex(item, suffix)

    emit_complex(ms.root, "")

    lines = ["\t".join(_TAB_HEADER)]
    for row in rows:
        cells = [row.text]
        if row.field is not None:
            mapping = row.field.properties.to_mapping()
            extras = {
                k: v for k, v in mapping.items() if k not in ("op", "domain", "example")
            }
            op = mapping.get("op", "")
            domain = (
                _domain_column(row.field.properties.domain)
                if row.field.properties.domain is not None
                else ""
            )
            example = _escape(mapping["example"]) if "example" in mapping else ""
            if mapping.get("example") == "":
                # An empty cell reads back as "absent", so an empty example
                # has to travel in the annotation column instead.
                example = ""
                extras = {"example": "", **extras}
            extra_cell = ""
            if extras:
                parts = []
                for key, value in extras.items():
                    if key in ("required", "visible"):
                        parts.append(f"{key}={value}")
                    else:
                        parts.append(f'{key}="{_escape(value)}"')
                extra_cell = "(" + "; ".join(parts) + ")"
            cells += [op, domain, example, extra_cell]
            while cells and cells[-1] == "":
                cells.pop()
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def _detabulate(text: str) -> str:
    """Rewrite the tabular layout into plain notation (no-op otherwise).

    The first content line must be the column header. Property cells are
    folded into a parenthesised annotation after the row's field name, so
    line numbers in spans stay accurate."""
    lines = text.split("\n")
    first_content = next(
        (ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")), ""
    )
    head = [c.strip() for c in first_content.split("\t")]
    if not head or head[0] != _TAB_HEADER[0] or len(head) < 2:
        return text
    out: list[str] = []
    seen_header = False
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not seen_header and stripped and not stripped.startswith("#"):
            seen_header = True
            out.append("")  # keep the header's line number occupied
            continue
        if "\t" not in line or not stripped or stripped.startswith("#"):
            out.append(line)
            continue
        cells = line.split("\t")
        struct_text = cells[0]
        op = cells[1].strip() if len(cells) > 1 else ""
        domain = cells[2].strip() if len(cells) > 2 else ""
        example = cells[3] if len(cells) > 3 else ""  # kept verbatim: escaped form
        extras = cells[4].strip() if len(cells) > 4 else ""
        parts: list[str] = []
        if op:
            parts.append(f"op={op}")
        if domain:
            parts.append("domain=" + _domain_column_to_annotation(domain))
        if example:
            parts.append(f'example="{example}"')
        if extras:
            if not (extras.startswith("(") and extras.endswith(")")):
                raise ParseError(
                    [
                        Diagnostic(
                            Severity.ERROR,
                            "P005",
                            "extra properties cell must be a parenthesised annotation",
                            SourceSpan(lineno, 1, lineno, max(1, len(line))),
                        )
                    ]
                )
            parts.append(extras[1:-1])
        if not parts:
            out.append(struct_text)
            continue
        annotated = _inject_annotation(struct_text, "; ".join(parts), lineno)
        out.append(annotated)
    return "\n".join(out)


def _inject_annotation(struct_text: str, annotation: str, lineno: int) -> str:
    head = struct_text.rstrip()
    trailer_start = len(head)
    while head and (head[-1] in "+|>}]" or head[-1] in " \t"):
        head = head[:-1]
        trailer_start = len(head)
    lead = head
    while lead and (lead[0] in "<{[|" or lead[0] in " \t"):
        lead = lead[1:]
    if not lead or lead.endswith("="):
        raise ParseError(
            [
                Diagnostic(
                    Severity.ERROR,
                    "P005",
                    "property columns are only allowed on field rows",
                    SourceSpan(lineno, 1, lineno, max(1, len(struct_text))),
                )
            ]
        )
    return struct_text[:trailer_start] + f" ({annotation})" + struct_text[trailer_start:]


def _domain_column_to_annotation(value: str) -> str:
    if value in BASIC_DOMAIN_KINDS:
        return value
    if value.startswith("[") and value.endswith("]"):
        return "enum:" + value[1:-1].strip()
    if value.startswith(("ref:", "enum:")):
        return value
    return f"ref:{value}"


# ---------------------------------------------------------------------------
# JSON view of the tree
# ---------------------------------------------------------------------------


def structure_to_json_obj(ms: MessageStructure) -> dict:
    """Plain-data view of the tree; property values use the annotation
    vocabulary (op/domain/example/...)."""
    return {"name": ms.name, "root": _node_to_json(ms.root)}


def _node_to_json(node: Substructure) -> dict:
    match node:
        case Field():
            return {
                "kind": "field",
                "name": node.name,
                "properties": node.properties.to_mapping(),
            }
        case Aggregation(name, children):
            return {
                "kind": "aggregation",
                "name": name,
                "children": [_node_to_json(c) for c in children],
            }
        case Iteration(name, children):
            return {
                "kind": "iteration",
                "name": name,
                "children": [_node_to_json(c) for c in children],
            }
        case Specialisation(name, variants):
            return {
                "kind": "specialisation",
                "name": name,
                "variants": [[_node_to_json(c) for c in v] for v in variants],
            }
    raise TypeError(f"not a substructure: {node!r}")

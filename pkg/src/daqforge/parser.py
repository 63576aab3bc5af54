"""Recursive-descent parser for the textual architecture DSL.

Produces an ArchitectureModel plus span-tagged diagnostics.  The parser
recovers at statement boundaries so several errors can be reported in one
run; a model value is only returned when no error was seen.

Cross-references (connection endpoints, via-ports, rule sources) are kept
by name and checked by the semantic validator, but purely lexical matters
are settled here: vocabulary words must come from their closed sets,
names must be unique in their scope, links must point at declared
elements, and sources must carry the connection keys their kind needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from daqforge import mapper
from daqforge.diagnostics import Diagnostic, Span, error, has_errors
from daqforge.lexer import Token, TokenKind, tokenize
from daqforge.model import (
    Action,
    ActionKind,
    ArchitectureModel,
    ColumnMeta,
    ColumnType,
    Connection,
    DataFormat,
    DataNode,
    DataRepresentation,
    Dimension,
    Direction,
    Level,
    Link,
    Location,
    MessagePattern,
    NodeBehavior,
    ParamValue,
    Port,
    Processing,
    QualityRule,
    QualitySpec,
    REQUIRED_CONNECTION_KEYS,
    ReceiveEvent,
    SourceBinding,
    SourceKind,
    StorageFamily,
    StorageTech,
    SUB_KINDS,
    TransferMode,
)


@dataclass
class ParseResult:
    """Outcome of a frontend run: a model unless errors were reported."""

    model: Optional[ArchitectureModel]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.model is not None


_ACTION_WORDS = {kind.value: kind for kind in ActionKind}
_DIMENSION_WORDS = {dim.value: dim for dim in Dimension}

_SOURCE_PROPERTIES = ("host", "database", "table", "path")


class _Bail(Exception):
    """Internal signal: syntax error already recorded, resynchronize."""


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[Diagnostic] = []
        self.connection_seq = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def at(self, kind: TokenKind, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind is kind and (text is None or tok.text == text)

    def accept(self, kind: TokenKind, text: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: TokenKind, text: Optional[str] = None,
               what: Optional[str] = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        expected = what or (f"'{text}'" if text else kind.value)
        self.error("P005", f"expected {expected}, found {self._describe(self.peek())}")
        raise _Bail

    def _describe(self, tok: Token) -> str:
        if tok.kind is TokenKind.EOF:
            return "end of input"
        return f"'{tok.text}'"

    def error(self, code: str, message: str, span: Optional[Span] = None) -> None:
        self.diags.append(error(code, message, span or self.peek().span))

    def ident(self, what: str) -> Token:
        if self.at(TokenKind.IDENT):
            return self.advance()
        self.error("P005", f"expected {what}, found {self._describe(self.peek())}")
        raise _Bail

    def word(self, what: str) -> Token:
        # Vocabulary position: keywords double as plain words here.
        if self.peek().is_word():
            return self.advance()
        self.error("P005", f"expected {what}, found {self._describe(self.peek())}")
        raise _Bail

    def sync_statement(self) -> None:
        # Skip to just past the next ';', or stop before '}' / EOF.
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.EOF:
                return
            if tok.kind is TokenKind.PUNCT:
                if tok.text == "{":
                    depth += 1
                elif tok.text == "}":
                    if depth == 0:
                        return
                    depth -= 1
                elif tok.text == ";" and depth == 0:
                    self.advance()
                    return
            self.advance()

    # -- vocabulary helpers --------------------------------------------------

    def enum_word(self, enum_cls, what: str):
        tok = self.word(what)
        try:
            return enum_cls(tok.text), tok
        except ValueError:
            options = ", ".join(member.value for member in enum_cls)
            self.error("P006", f"unknown {what} '{tok.text}' (one of: {options})",
                       tok.span)
            raise _Bail from None

    # -- grammar ---------------------------------------------------------------

    def parse(self) -> Optional[ArchitectureModel]:
        try:
            self.expect(TokenKind.KEYWORD, "architecture")
            name = self.ident("architecture name").text
            self.expect(TokenKind.KEYWORD, "level")
            level_tok = self.word("abstraction level")
            try:
                level = Level(level_tok.text)
            except ValueError:
                self.error("P006", f"unknown level '{level_tok.text}' (HLA or LLA)",
                           level_tok.span)
                raise _Bail from None
            self.expect(TokenKind.PUNCT, "{")
        except _Bail:
            return None

        model = ArchitectureModel(name=name, level=level)
        node_spans: dict[str, Span] = {}
        source_spans: dict[str, Span] = {}

        while not self.at(TokenKind.PUNCT, "}") and not self.at(TokenKind.EOF):
            try:
                if self.at(TokenKind.KEYWORD, "node"):
                    node = self.parse_node()
                    if node.name in node_spans:
                        self.error("P010", f"duplicate node name '{node.name}'",
                                   node.span)
                    else:
                        node_spans[node.name] = node.span
                        model.nodes.append(node)
                elif self.at(TokenKind.KEYWORD, "connect"):
                    model.connections.append(self.parse_connect())
                elif self.at(TokenKind.KEYWORD, "source"):
                    src = self.parse_source()
                    if src.name in source_spans:
                        self.error("P010", f"duplicate source name '{src.name}'",
                                   src.span)
                    else:
                        source_spans[src.name] = src.span
                        model.sources.append(src)
                else:
                    self.error("P005",
                               "expected 'node', 'connect' or 'source', found "
                               + self._describe(self.peek()))
                    raise _Bail
            except _Bail:
                self.sync_statement()

        try:
            self.expect(TokenKind.PUNCT, "}")
            self.expect(TokenKind.EOF, what="end of input")
        except _Bail:
            pass

        return model if not has_errors(self.diags) else None

    def parse_node(self) -> DataNode:
        self.expect(TokenKind.KEYWORD, "node")
        name_tok = self.ident("node name")
        node = DataNode(name=name_tok.text, span=name_tok.span)
        self.expect(TokenKind.PUNCT, "{")
        port_spans: dict[str, Span] = {}

        while not self.at(TokenKind.PUNCT, "}") and not self.at(TokenKind.EOF):
            try:
                if self.at(TokenKind.KEYWORD, "represent"):
                    node.representation = self.parse_represent()
                elif self.at(TokenKind.KEYWORD, "port"):
                    port = self.parse_port(node.name)
                    if port.name in port_spans:
                        self.error("P010",
                                   f"duplicate port name '{port.name}' in node "
                                   f"'{node.name}'", port.span)
                    else:
                        port_spans[port.name] = port.span
                        node.ports.append(port)
                elif self.at(TokenKind.KEYWORD, "behavior"):
                    node.behavior = self.parse_behavior(node.name)
                else:
                    self.error("P005",
                               "expected 'represent', 'port' or 'behavior', found "
                               + self._describe(self.peek()))
                    raise _Bail
            except _Bail:
                self.sync_statement()

        self.expect(TokenKind.PUNCT, "}")
        return node

    def parse_represent(self) -> DataRepresentation:
        self.expect(TokenKind.KEYWORD, "represent")
        self.expect(TokenKind.PUNCT, "{")
        rep = DataRepresentation()
        seen: set[str] = set()

        while not self.at(TokenKind.PUNCT, "}") and not self.at(TokenKind.EOF):
            try:
                tok = self.peek()
                if tok.kind is TokenKind.KEYWORD and tok.text in (
                        "format", "processing", "storage", "location"):
                    if tok.text in seen:
                        self.error("P010", f"duplicate '{tok.text}' declaration",
                                   tok.span)
                        raise _Bail
                    seen.add(tok.text)
                    self.advance()
                    if tok.text == "format":
                        rep.formats = self.parse_enum_list(DataFormat, "data format")
                    elif tok.text == "processing":
                        rep.processing = self.parse_enum_list(Processing,
                                                              "processing type")
                    elif tok.text == "storage":
                        family, family_tok = self.enum_word(StorageFamily,
                                                            "storage family")
                        tech, tech_tok = self.enum_word(StorageTech, "storage kind")
                        if tech.family is not family:
                            self.error(
                                "P006",
                                f"storage kind '{tech.value}' belongs to family "
                                f"'{tech.family.value}', not '{family.value}'",
                                tech_tok.span)
                            raise _Bail
                        rep.storage = tech
                    else:
                        rep.location, _ = self.enum_word(Location, "location")
                    self.expect(TokenKind.PUNCT, ";")
                else:
                    self.error("P005",
                               "expected 'format', 'processing', 'storage' or "
                               "'location', found " + self._describe(tok))
                    raise _Bail
            except _Bail:
                self.sync_statement()

        self.expect(TokenKind.PUNCT, "}")
        return rep

    def parse_enum_list(self, enum_cls, what: str) -> list:
        values = []
        while True:
            value, tok = self.enum_word(enum_cls, what)
            if value in values:
                self.error("P010", f"duplicate {what} '{tok.text}'", tok.span)
            else:
                values.append(value)
            if not self.accept(TokenKind.PUNCT, ","):
                break
        return values

    def parse_port(self, owner: str) -> Port:
        self.expect(TokenKind.KEYWORD, "port")
        if self.accept(TokenKind.KEYWORD, "in"):
            direction = Direction.IN
        elif self.accept(TokenKind.KEYWORD, "out"):
            direction = Direction.OUT
        else:
            self.error("P005", "expected 'in' or 'out', found "
                       + self._describe(self.peek()))
            raise _Bail
        name_tok = self.ident("port name")
        self.expect(TokenKind.PUNCT, ";")
        return Port(name=name_tok.text, direction=direction, owner=owner,
                    span=name_tok.span)

    def parse_behavior(self, node_name: str) -> NodeBehavior:
        self.expect(TokenKind.KEYWORD, "behavior")
        self.expect(TokenKind.PUNCT, "{")
        behavior = NodeBehavior()
        element_spans: dict[str, Span] = {}
        pending_links: list[Link] = []

        while not self.at(TokenKind.PUNCT, "}") and not self.at(TokenKind.EOF):
            try:
                if self.at(TokenKind.KEYWORD, "action"):
                    element = self.parse_action()
                elif self.at(TokenKind.KEYWORD, "event"):
                    element = self.parse_event()
                elif self.at(TokenKind.KEYWORD, "link"):
                    pending_links.append(self.parse_link())
                    continue
                else:
                    self.error("P005",
                               "expected 'action', 'event' or 'link', found "
                               + self._describe(self.peek()))
                    raise _Bail
                if element.name in element_spans:
                    self.error("P010",
                               f"duplicate element name '{element.name}' in node "
                               f"'{node_name}'", element.span)
                else:
                    element_spans[element.name] = element.span
                    behavior.elements.append(element)
            except _Bail:
                self.sync_statement()

        self.expect(TokenKind.PUNCT, "}")

        for link in pending_links:
            missing = [n for n in (link.src, link.dst) if n not in element_spans]
            if missing:
                self.error("P011",
                           f"link references undeclared element(s): "
                           + ", ".join(f"'{m}'" for m in missing), link.span)
            else:
                behavior.links.append(link)
        return behavior

    def parse_action(self) -> Action:
        self.expect(TokenKind.KEYWORD, "action")
        kind_tok = self.word("action kind")
        kind = _ACTION_WORDS.get(kind_tok.text)
        if kind is None:
            options = ", ".join(sorted(_ACTION_WORDS))
            self.error("P006", f"unknown action kind '{kind_tok.text}' "
                       f"(one of: {options})", kind_tok.span)
            raise _Bail

        sub_kind = None
        if self.accept(TokenKind.PUNCT, "."):
            sub_tok = self.word("sub-kind")
            allowed = SUB_KINDS.get(kind)
            if allowed is None:
                self.error("P006", f"action kind '{kind.value}' takes no sub-kind",
                           sub_tok.span)
                raise _Bail
            if sub_tok.text not in allowed:
                self.error("P006", f"unknown sub-kind '{sub_tok.text}' for "
                           f"'{kind.value}' (one of: {', '.join(allowed)})",
                           sub_tok.span)
                raise _Bail
            sub_kind = sub_tok.text

        name_tok = self.ident("action name")
        action = Action(name=name_tok.text, kind=kind, sub_kind=sub_kind,
                        span=name_tok.span)

        if self.accept(TokenKind.KEYWORD, "via"):
            action.port = self.ident("port name").text

        if self.at(TokenKind.KEYWORD, "on"):
            on_tok = self.advance()
            self.expect(TokenKind.KEYWORD, "source")
            source_tok = self.ident("source name")
            if kind is not ActionKind.VERIFY_DATA:
                self.error("P009", "only verify actions take a source clause",
                           on_tok.span)
                raise _Bail
            self.expect(TokenKind.PUNCT, "{")
            rules = self.parse_rules()
            self.expect(TokenKind.PUNCT, "}")
            action.quality = QualitySpec(source=source_tok.text, rules=rules)

        self.expect(TokenKind.PUNCT, ";")
        return action

    def parse_rules(self) -> list[QualityRule]:
        rules: list[QualityRule] = []
        while not self.at(TokenKind.PUNCT, "}") and not self.at(TokenKind.EOF):
            try:
                self.expect(TokenKind.KEYWORD, "column")
                column = self.word("column name").text
                self.expect(TokenKind.PUNCT, "{")
                while not self.at(TokenKind.PUNCT, "}") and not self.at(TokenKind.EOF):
                    try:
                        rules.append(self.parse_rule(column))
                    except _Bail:
                        self.sync_statement()
                self.expect(TokenKind.PUNCT, "}")
            except _Bail:
                self.sync_statement()
        return rules

    def parse_rule(self, column: str) -> QualityRule:
        dim_tok = self.word("quality dimension")
        dimension = _DIMENSION_WORDS.get(dim_tok.text)
        if dimension is None:
            options = ", ".join(sorted(_DIMENSION_WORDS))
            self.error("P006", f"unknown quality dimension '{dim_tok.text}' "
                       f"(one of: {options})", dim_tok.span)
            raise _Bail

        expectation = None
        # A bare ident is the expectation unless it opens a key=value pair.
        if self.peek().is_word() and not (self.peek(1).kind is TokenKind.PUNCT
                                          and self.peek(1).text == "="):
            exp_tok = self.advance()
            expectation = mapper.expand_expectation(exp_tok.text)
            if expectation is None:
                self.error("P007", f"unknown expectation '{exp_tok.text}'",
                           exp_tok.span)
                raise _Bail
        if expectation is None:
            expectation = mapper.default_expectation(dimension)

        params: dict[str, ParamValue] = {}
        while self.peek().is_word():
            key_tok = self.advance()
            self.expect(TokenKind.PUNCT, "=")
            value = self.parse_value()
            if key_tok.text in params:
                self.error("P010", f"duplicate parameter '{key_tok.text}'",
                           key_tok.span)
                raise _Bail
            params[key_tok.text] = value
        self.expect(TokenKind.PUNCT, ";")
        return QualityRule(column=column, dimension=dimension,
                           expectation=expectation, params=params,
                           span=dim_tok.span)

    def parse_value(self) -> ParamValue:
        if self.accept(TokenKind.PUNCT, "["):
            items: list = []
            if not self.at(TokenKind.PUNCT, "]"):
                items.append(self.parse_scalar())
                while self.accept(TokenKind.PUNCT, ","):
                    items.append(self.parse_scalar())
            self.expect(TokenKind.PUNCT, "]")
            return items
        return self.parse_scalar()

    def parse_scalar(self):
        tok = self.peek()
        if tok.kind is TokenKind.STRING:
            return self.advance().value
        if tok.kind is TokenKind.PUNCT and tok.text == "-":
            self.advance()
            num = self.peek()
            if num.kind in (TokenKind.INTEGER, TokenKind.NUMBER):
                return -self.advance().value
            self.error("P008", "expected a number after '-'", num.span)
            raise _Bail
        if tok.kind in (TokenKind.INTEGER, TokenKind.NUMBER):
            return self.advance().value
        if tok.kind is TokenKind.IDENT and tok.text in ("true", "false"):
            return self.advance().text == "true"
        self.error("P008", f"expected a string, number, boolean or list, found "
                   + self._describe(tok), tok.span)
        raise _Bail

    def parse_event(self) -> ReceiveEvent:
        self.expect(TokenKind.KEYWORD, "event")
        self.expect(TokenKind.KEYWORD, "receive")
        name_tok = self.ident("event name")
        self.expect(TokenKind.KEYWORD, "via")
        port_tok = self.ident("port name")
        self.expect(TokenKind.PUNCT, ";")
        return ReceiveEvent(name=name_tok.text, port=port_tok.text,
                            span=name_tok.span)

    def parse_link(self) -> Link:
        kw = self.expect(TokenKind.KEYWORD, "link")
        src = self.ident("element name").text
        self.expect(TokenKind.PUNCT, "->")
        dst = self.ident("element name").text
        self.expect(TokenKind.PUNCT, ";")
        return Link(src=src, dst=dst, span=kw.span)

    def parse_connect(self) -> Connection:
        kw = self.expect(TokenKind.KEYWORD, "connect")
        from_node = self.ident("node name").text
        self.expect(TokenKind.PUNCT, ".")
        from_port = self.ident("port name").text
        self.expect(TokenKind.PUNCT, "->")
        to_node = self.ident("node name").text
        self.expect(TokenKind.PUNCT, ".")
        to_port = self.ident("port name").text

        pattern = MessagePattern.SEND_RECEIVE
        mode = TransferMode.ASYNC
        if self.accept(TokenKind.KEYWORD, "pattern"):
            pattern, _ = self.enum_word(MessagePattern, "message pattern")
        if self.accept(TokenKind.KEYWORD, "mode"):
            mode, _ = self.enum_word(TransferMode, "transfer mode")
        self.expect(TokenKind.PUNCT, ";")

        self.connection_seq += 1
        return Connection(id=f"c{self.connection_seq}",
                          from_node=from_node, from_port=from_port,
                          to_node=to_node, to_port=to_port,
                          pattern=pattern, mode=mode, span=kw.span)

    def parse_source(self) -> SourceBinding:
        self.expect(TokenKind.KEYWORD, "source")
        name_tok = self.ident("source name")
        self.expect(TokenKind.PUNCT, "{")

        kind_value: Optional[SourceKind] = None
        connection: dict[str, str] = {}
        columns: list[ColumnMeta] = []
        column_spans: dict[str, Span] = {}

        while not self.at(TokenKind.PUNCT, "}") and not self.at(TokenKind.EOF):
            try:
                tok = self.peek()
                if self.at(TokenKind.KEYWORD, "kind"):
                    if kind_value is not None:
                        self.error("P010", "duplicate 'kind' declaration", tok.span)
                        raise _Bail
                    self.advance()
                    kind_value, _ = self.enum_word(SourceKind, "source kind")
                    self.expect(TokenKind.PUNCT, ";")
                elif tok.kind is TokenKind.KEYWORD and tok.text in _SOURCE_PROPERTIES:
                    if tok.text in connection:
                        self.error("P010", f"duplicate '{tok.text}' declaration",
                                   tok.span)
                        raise _Bail
                    self.advance()
                    value_tok = self.expect(TokenKind.STRING, what="a quoted string")
                    connection[tok.text] = value_tok.value
                    self.expect(TokenKind.PUNCT, ";")
                elif self.at(TokenKind.KEYWORD, "column"):
                    self.advance()
                    col_tok = self.word("column name")
                    self.expect(TokenKind.PUNCT, ":")
                    col_type, _ = self.enum_word(ColumnType, "column type")
                    self.expect(TokenKind.PUNCT, ";")
                    if col_tok.text in column_spans:
                        self.error("P010", f"duplicate column name '{col_tok.text}'",
                                   col_tok.span)
                    else:
                        column_spans[col_tok.text] = col_tok.span
                        columns.append(ColumnMeta(col_tok.text, col_type))
                else:
                    self.error("P005",
                               "expected 'kind', 'host', 'database', 'table', "
                               "'path' or 'column', found " + self._describe(tok))
                    raise _Bail
            except _Bail:
                self.sync_statement()

        self.expect(TokenKind.PUNCT, "}")

        if kind_value is None:
            self.error("P012", f"source '{name_tok.text}' declares no kind",
                       name_tok.span)
            raise _Bail
        for key in REQUIRED_CONNECTION_KEYS[kind_value]:
            if key not in connection:
                self.error("P012", f"source '{name_tok.text}' of kind "
                           f"'{kind_value.value}' requires '{key}'", name_tok.span)
        for key in connection:
            if key not in REQUIRED_CONNECTION_KEYS[kind_value]:
                self.error("P009", f"property '{key}' does not apply to kind "
                           f"'{kind_value.value}'", name_tok.span)

        return SourceBinding(name=name_tok.text, kind=kind_value,
                             connection=connection, columns=columns,
                             span=name_tok.span)


def parse_model(text: str) -> ParseResult:
    """Parse DSL text; returns the model only when no error was reported."""
    tokens, diags = tokenize(text)
    parser = _Parser(tokens)
    parser.diags.extend(diags)
    model = parser.parse() if not has_errors(diags) else None
    if has_errors(parser.diags):
        model = None
    return ParseResult(model=model, diagnostics=parser.diags)

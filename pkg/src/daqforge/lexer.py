"""Tokenizer for the textual architecture DSL.

Token texts are exact source slices, so concatenating them together with
the skipped whitespace and comments reconstructs the input.  Strings decode
a small closed escape set; numbers keep their parsed value alongside the
raw lexeme.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from daqforge.diagnostics import Diagnostic, Span, error


class TokenKind(Enum):
    IDENT = "ident"
    STRING = "string"
    INTEGER = "integer"
    NUMBER = "number"
    KEYWORD = "keyword"
    PUNCT = "punct"
    EOF = "eof"


KEYWORDS = frozenset({
    "architecture", "level", "node", "represent", "format", "processing",
    "storage", "location", "port", "behavior", "action", "event", "receive",
    "link", "via", "on", "source", "connect", "pattern", "mode", "kind",
    "host", "database", "table", "path", "column", "in", "out",
})

_PUNCT_SINGLE = set("{}();:,=.[]-")

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: Span
    value: object = field(default=None, compare=False)

    def is_word(self) -> bool:
        return self.kind in (TokenKind.IDENT, TokenKind.KEYWORD)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0          # character index
        self.byte = 0         # UTF-8 byte offset
        self.line = 1
        self.col = 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.text[i] if i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        self.byte += len(ch.encode("utf-8"))
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def mark(self) -> tuple[int, int, int, int]:
        return (self.line, self.col, self.byte, self.pos)

    def span_from(self, mark: tuple[int, int, int, int]) -> Span:
        line, col, byte, _ = mark
        return Span(line, col, byte, self.byte - byte)

    def text_from(self, mark: tuple[int, int, int, int]) -> str:
        return self.text[mark[3]:self.pos]


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    """Scan ``text`` into tokens; lexical errors are reported, not raised."""
    sc = _Scanner(text)
    tokens: list[Token] = []
    diags: list[Diagnostic] = []

    while not sc.at_end():
        ch = sc.peek()
        if ch in " \t\r\n":
            sc.advance()
            continue
        if ch == "/" and sc.peek(1) == "/":
            while not sc.at_end() and sc.peek() != "\n":
                sc.advance()
            continue
        if ch == "/" and sc.peek(1) == "*":
            mark = sc.mark()
            sc.advance()
            sc.advance()
            closed = False
            while not sc.at_end():
                if sc.peek() == "*" and sc.peek(1) == "/":
                    sc.advance()
                    sc.advance()
                    closed = True
                    break
                sc.advance()
            if not closed:
                diags.append(error("P003", "unterminated block comment",
                                   sc.span_from(mark)))
            continue

        mark = sc.mark()
        if ch == '"':
            tok = _scan_string(sc, mark, diags)
            if tok is not None:
                tokens.append(tok)
            continue
        if ch.isdigit():
            tokens.append(_scan_number(sc, mark))
            continue
        if ch.isalpha() or ch == "_":
            sc.advance()
            while sc.peek().isalnum() or sc.peek() == "_":
                sc.advance()
            word = sc.text_from(mark)
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, sc.span_from(mark)))
            continue
        if ch == "-" and sc.peek(1) == ">":
            sc.advance()
            sc.advance()
            tokens.append(Token(TokenKind.PUNCT, "->", sc.span_from(mark)))
            continue
        if ch in _PUNCT_SINGLE:
            sc.advance()
            tokens.append(Token(TokenKind.PUNCT, ch, sc.span_from(mark)))
            continue

        sc.advance()
        diags.append(error("P002", f"illegal character {ch!r}", sc.span_from(mark)))

    tokens.append(Token(TokenKind.EOF, "",
                        Span(sc.line, sc.col, sc.byte, 0)))
    return tokens, diags


def _scan_string(sc: _Scanner, mark, diags: list[Diagnostic]) -> Optional[Token]:
    sc.advance()  # opening quote
    parts: list[str] = []
    while True:
        if sc.at_end() or sc.peek() == "\n":
            diags.append(error("P001", "unterminated string", sc.span_from(mark)))
            return None
        ch = sc.advance()
        if ch == '"':
            break
        if ch == "\\":
            if sc.at_end():
                diags.append(error("P001", "unterminated string", sc.span_from(mark)))
                return None
            esc = sc.advance()
            if esc in _ESCAPES:
                parts.append(_ESCAPES[esc])
            else:
                diags.append(error("P004", f"invalid escape '\\{esc}'",
                                   sc.span_from(mark)))
        else:
            parts.append(ch)
    return Token(TokenKind.STRING, sc.text_from(mark), sc.span_from(mark),
                 value="".join(parts))


def _scan_number(sc: _Scanner, mark) -> Token:
    while sc.peek().isdigit():
        sc.advance()
    if sc.peek() == "." and sc.peek(1).isdigit():
        sc.advance()
        while sc.peek().isdigit():
            sc.advance()
        text = sc.text_from(mark)
        return Token(TokenKind.NUMBER, text, sc.span_from(mark), value=float(text))
    text = sc.text_from(mark)
    return Token(TokenKind.INTEGER, text, sc.span_from(mark), value=int(text))

"""Canonical pretty-printer for architecture models.

Output is the DSL's normal form: two-space indents, one declaration per
line, nodes before connections before sources, attributes in declaration
order.  Re-parsing the output reconstructs a structurally identical model,
and printing is idempotent.
"""

from __future__ import annotations

import math

from daqforge import mapper
from daqforge.model import (
    Action,
    ArchitectureModel,
    Connection,
    DataNode,
    DataRepresentation,
    NodeBehavior,
    ParamValue,
    QualityRule,
    ReceiveEvent,
    SourceBinding,
)

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def quote(text: str) -> str:
    return '"' + "".join(_STRING_ESCAPES.get(ch, ch) for ch in text) + '"'


def format_value(value: ParamValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"non-finite number {value!r} has no DSL spelling")
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return quote(value)
    if isinstance(value, list):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    raise TypeError(f"unsupported parameter value: {value!r}")


class _Writer:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def line(self, text: str) -> None:
        self.lines.append("  " * self.depth + text)

    def block(self, header: str):
        return _Block(self, header)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


class _Block:
    def __init__(self, writer: _Writer, header: str):
        self.writer = writer
        self.header = header

    def __enter__(self):
        self.writer.line(self.header + " {")
        self.writer.depth += 1
        return self

    def __exit__(self, *exc):
        self.writer.depth -= 1
        return False


def pretty_print(model: ArchitectureModel) -> str:
    w = _Writer()
    with w.block(f"architecture {model.name} level {model.level.value}"):
        for node in model.nodes:
            _print_node(w, node)
        for conn in model.connections:
            _print_connection(w, conn)
        for source in model.sources:
            _print_source(w, source)
    w.line("}")
    return w.text()


def _print_node(w: _Writer, node: DataNode) -> None:
    with w.block(f"node {node.name}"):
        if not node.representation.is_empty():
            _print_representation(w, node.representation)
        for port in node.ports:
            w.line(f"port {port.direction.value} {port.name};")
        if node.behavior is not None:
            _print_behavior(w, node.behavior)
    w.line("}")


def _print_representation(w: _Writer, rep: DataRepresentation) -> None:
    with w.block("represent"):
        if rep.formats:
            w.line("format " + ", ".join(f.value for f in rep.formats) + ";")
        if rep.processing:
            w.line("processing " + ", ".join(p.value for p in rep.processing) + ";")
        if rep.storage is not None:
            w.line(f"storage {rep.storage.family.value} {rep.storage.value};")
        if rep.location is not None:
            w.line(f"location {rep.location.value};")
    w.line("}")


def _print_behavior(w: _Writer, behavior: NodeBehavior) -> None:
    with w.block("behavior"):
        for element in behavior.elements:
            if isinstance(element, ReceiveEvent):
                w.line(f"event receive {element.name} via {element.port};")
            else:
                _print_action(w, element)
        for link in behavior.links:
            w.line(f"link {link.src} -> {link.dst};")
    w.line("}")


def _print_action(w: _Writer, action: Action) -> None:
    head = "action " + action.kind.value
    if action.sub_kind is not None:
        head += "." + action.sub_kind
    head += " " + action.name
    if action.port is not None:
        head += " via " + action.port
    if action.quality is None:
        w.line(head + ";")
        return
    with w.block(head + f" on source {action.quality.source}"):
        column = None
        block = None
        for rule in action.quality.rules:
            if rule.column != column:
                if block is not None:
                    block.__exit__()
                    w.line("}")
                column = rule.column
                block = w.block(f"column {column}")
                block.__enter__()
            w.line(_rule_text(rule))
        if block is not None:
            block.__exit__()
            w.line("}")
    w.line("};")


def _rule_text(rule: QualityRule) -> str:
    parts = [rule.dimension.value, mapper.compress_expectation(rule.expectation)]
    for key, value in rule.params.items():
        parts.append(f"{key}={format_value(value)}")
    return " ".join(parts) + ";"


def _print_connection(w: _Writer, conn: Connection) -> None:
    w.line(
        f"connect {conn.from_node}.{conn.from_port} -> "
        f"{conn.to_node}.{conn.to_port} "
        f"pattern {conn.pattern.value} mode {conn.mode.value};"
    )


def _print_source(w: _Writer, source: SourceBinding) -> None:
    with w.block(f"source {source.name}"):
        w.line(f"kind {source.kind.value};")
        for key, value in source.connection.items():
            w.line(f"{key} {quote(value)};")
        for col in source.columns:
            w.line(f"column {col.name}: {col.type.value};")
    w.line("}")

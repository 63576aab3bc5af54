"""DOT graph rendering of architecture models.

The high-level view draws one graph node per data node, labeled with a
representation summary, and one labeled edge per connection.  The
low-level view turns every data node into a cluster subgraph holding its
behavior elements with link edges.  No layout is computed; output is
deterministic and all identifiers are quoted, sanitized, and kept
collision-free by suffix numbering.
"""

from __future__ import annotations

import re

from daqforge.diagnostics import Diagnostic, error
from daqforge.model import Action, ArchitectureModel, Level, ReceiveEvent

_SANITIZE_RE = re.compile(r"[^A-Za-z0-9]")


class LevelMismatchError(Exception):
    """The requested view needs more detail than the model declares."""

    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(diagnostic.message)


class _Names:
    """Sanitized, unique graph identifiers for model names."""

    def __init__(self):
        self.by_key: dict[str, str] = {}
        self.taken: set[str] = set()

    def identifier(self, key: str) -> str:
        if key in self.by_key:
            return self.by_key[key]
        base = _SANITIZE_RE.sub("_", key) or "_"
        candidate = base
        serial = 1
        while candidate in self.taken:
            serial += 1
            candidate = f"{base}_{serial}"
        self.taken.add(candidate)
        self.by_key[key] = candidate
        return candidate


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _multiline_label(parts: list[str]) -> str:
    # Escape each part, then join with DOT's two-character newline escape.
    escaped = [p.replace("\\", "\\\\").replace('"', '\\"') for p in parts]
    return '"' + "\\n".join(escaped) + '"'


def _representation_parts(node) -> list[str]:
    rep = node.representation
    parts = [node.name]
    if rep.formats:
        parts.append(", ".join(f.value for f in rep.formats))
    if rep.processing:
        parts.append(", ".join(p.value for p in rep.processing))
    if rep.storage is not None:
        parts.append(f"{rep.storage.family.value} {rep.storage.value}")
    if rep.location is not None:
        parts.append(rep.location.value)
    return parts


def to_dot(model: ArchitectureModel, level: Level) -> str:
    """Render the model as a DOT digraph at the requested view level."""
    if level is Level.LLA and model.level is Level.HLA:
        raise LevelMismatchError(error(
            "D001", f"model '{model.name}' is declared at HLA and has no "
            "behavioral detail to draw"))
    names = _Names()
    lines = [f"digraph {_quote(names.identifier(model.name))} {{"]
    if level is Level.HLA:
        _hla_body(model, names, lines)
    else:
        _lla_body(model, names, lines)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _hla_body(model: ArchitectureModel, names: _Names, lines: list[str]) -> None:
    for node in model.nodes:
        ident = names.identifier(f"node:{node.name}")
        lines.append(f"  {_quote(ident)} [shape=box, "
                     f"label={_multiline_label(_representation_parts(node))}];")
    for conn in model.connections:
        src = names.identifier(f"node:{conn.from_node}")
        dst = names.identifier(f"node:{conn.to_node}")
        label = f"{conn.pattern.value}/{conn.mode.value}"
        lines.append(f"  {_quote(src)} -> {_quote(dst)} "
                     f"[label={_quote(label)}];")


def _lla_body(model: ArchitectureModel, names: _Names, lines: list[str]) -> None:
    for node in model.nodes:
        cluster = names.identifier(f"cluster:{node.name}")
        lines.append(f"  subgraph {_quote(cluster)} {{")
        lines.append(f"    label={_quote(node.name)};")
        if node.behavior is not None:
            for element in node.behavior.elements:
                ident = names.identifier(f"element:{node.name}:{element.name}")
                lines.append(f"    {_quote(ident)} "
                             f"[label={_quote(_element_label(element))}];")
            for link in node.behavior.links:
                src = names.identifier(f"element:{node.name}:{link.src}")
                dst = names.identifier(f"element:{node.name}:{link.dst}")
                lines.append(f"    {_quote(src)} -> {_quote(dst)};")
        lines.append("  }")


def _element_label(element) -> str:
    if isinstance(element, ReceiveEvent):
        return f"receive {element.name}"
    assert isinstance(element, Action)
    kind = element.kind.value
    if element.sub_kind is not None:
        kind += "." + element.sub_kind
    return f"{kind} {element.name}"

"""XMI subset import and export for architecture models.

The schema is a flat element-per-metaclass mapping with name-based
cross-references: ``architecture, node, represent, port, behavior, action,
event, link, connection, source, column, rule``.  Attribute values mirror
the DSL keywords; rule parameters ride along as extra attributes on the
``rule`` element with JSON-encoded values (plain strings fall back to
themselves), which keeps scalar types exact across a round trip.

Anything outside the subset is filtered: unrecognized elements and
attributes are skipped with an X020 warning each.  Diagnostics from this
frontend carry no source spans.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from typing import Optional

from daqforge.diagnostics import Diagnostic, error, has_errors, warning
from daqforge.lexer import KEYWORDS
from daqforge.parser import ParseResult
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
    StorageTech,
    SUB_KINDS,
    TransferMode,
)

_RULE_FIXED_ATTRS = ("column", "dimension", "expectation")

# Imported names must survive a trip through the textual syntax, so they
# are held to the DSL identifier shape; positions the DSL parses as bare
# words (rule columns, parameter keys) may also use keyword spellings.
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _reject_constant(name: str):
    raise ValueError(f"non-finite constant {name}")


def export_xmi(model: ArchitectureModel) -> str:
    """Serialize a model into the XMI subset (UTF-8, LF, trailing newline)."""
    root = ET.Element("architecture",
                      {"name": model.name, "level": model.level.value})
    for node in model.nodes:
        root.append(_node_element(node))
    for conn in model.connections:
        root.append(ET.Element("connection", {
            "id": conn.id,
            "from": f"{conn.from_node}.{conn.from_port}",
            "to": f"{conn.to_node}.{conn.to_port}",
            "pattern": conn.pattern.value,
            "mode": conn.mode.value,
        }))
    for source in model.sources:
        root.append(_source_element(source))

    ET.indent(root, space="  ")
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


def _node_element(node: DataNode) -> ET.Element:
    el = ET.Element("node", {"name": node.name})
    rep = node.representation
    if not rep.is_empty():
        attrs: dict[str, str] = {}
        if rep.formats:
            attrs["format"] = ",".join(f.value for f in rep.formats)
        if rep.processing:
            attrs["processing"] = ",".join(p.value for p in rep.processing)
        if rep.storage is not None:
            attrs["storage"] = f"{rep.storage.family.value} {rep.storage.value}"
        if rep.location is not None:
            attrs["location"] = rep.location.value
        el.append(ET.Element("represent", attrs))
    for port in node.ports:
        el.append(ET.Element("port", {"name": port.name,
                                      "direction": port.direction.value}))
    if node.behavior is not None:
        beh = ET.SubElement(el, "behavior")
        for element in node.behavior.elements:
            if isinstance(element, ReceiveEvent):
                beh.append(ET.Element("event", {"name": element.name,
                                                "port": element.port}))
            else:
                beh.append(_action_element(element))
        for link in node.behavior.links:
            beh.append(ET.Element("link", {"from": link.src, "to": link.dst}))
    return el


def _action_element(action: Action) -> ET.Element:
    attrs = {"name": action.name, "kind": action.kind.value}
    if action.sub_kind is not None:
        attrs["subkind"] = action.sub_kind
    if action.port is not None:
        attrs["port"] = action.port
    if action.quality is not None:
        attrs["source"] = action.quality.source
    el = ET.Element("action", attrs)
    if action.quality is not None:
        for rule in action.quality.rules:
            rattrs = {"column": rule.column,
                      "dimension": rule.dimension.value,
                      "expectation": rule.expectation}
            for key, value in rule.params.items():
                rattrs[key] = json.dumps(value)
            el.append(ET.Element("rule", rattrs))
    return el


def _source_element(source: SourceBinding) -> ET.Element:
    attrs = {"name": source.name, "kind": source.kind.value}
    for key in ("host", "database", "table", "path"):
        if key in source.connection:
            attrs[key] = source.connection[key]
    el = ET.Element("source", attrs)
    for col in source.columns:
        el.append(ET.Element("column", {"name": col.name,
                                        "type": col.type.value}))
    return el


class _Importer:
    def __init__(self):
        self.diags: list[Diagnostic] = []

    def fail(self, code: str, message: str) -> None:
        self.diags.append(error(code, message))

    def skip(self, what: str) -> None:
        self.diags.append(warning("X020", f"skipped {what}"))

    def attr(self, el: ET.Element, name: str, used: set[str]) -> Optional[str]:
        used.add(name)
        return el.get(name)

    def require(self, el: ET.Element, name: str, used: set[str]) -> Optional[str]:
        value = self.attr(el, name, used)
        if value is None:
            self.fail("X010", f"{el.tag} requires {name}")
        return value

    def ident(self, el: ET.Element, name: str, used: set[str],
              required: bool = True,
              allow_keyword: bool = False) -> Optional[str]:
        value = (self.require(el, name, used) if required
                 else self.attr(el, name, used))
        if value is None:
            return None
        if not self.check_word(value, allow_keyword):
            self.fail("X011", f"{name} '{value}' on {el.tag} is not a "
                      "usable identifier")
            return None
        return value

    def check_word(self, value: str, allow_keyword: bool = False) -> bool:
        if not _IDENT_RE.match(value):
            return False
        return allow_keyword or value not in KEYWORDS

    def finish_attrs(self, el: ET.Element, used: set[str]) -> None:
        for name in el.attrib:
            if name not in used:
                self.skip(f"attribute '{name}' on {el.tag}")

    def enum(self, el: ET.Element, name: str, enum_cls, used: set[str],
             default=None, required: bool = False):
        raw = (self.require(el, name, used) if required
               else self.attr(el, name, used))
        if raw is None:
            return default
        try:
            return enum_cls(raw)
        except ValueError:
            self.fail("X011", f"invalid {name} '{raw}' on {el.tag}")
            return default

    # -- tree walk ----------------------------------------------------------

    def architecture(self, root: ET.Element) -> Optional[ArchitectureModel]:
        if root.tag != "architecture":
            self.fail("X010", f"expected root element 'architecture', "
                      f"found '{root.tag}'")
            return None
        used: set[str] = set()
        name = self.ident(root, "name", used)
        level = self.enum(root, "level", Level, used, required=True)
        self.finish_attrs(root, used)
        if name is None or level is None:
            return None

        model = ArchitectureModel(name=name, level=level)
        node_names: set[str] = set()
        source_names: set[str] = set()
        connection_ids: set[str] = set()
        seq = 0
        for child in root:
            if child.tag == "node":
                node = self.node(child)
                if node is None:
                    continue
                if node.name in node_names:
                    self.fail("P010", f"duplicate node name '{node.name}'")
                else:
                    node_names.add(node.name)
                    model.nodes.append(node)
            elif child.tag == "connection":
                seq += 1
                conn = self.connection(child, seq)
                if conn is None:
                    continue
                if conn.id in connection_ids:
                    self.fail("P010", f"duplicate connection id '{conn.id}'")
                else:
                    connection_ids.add(conn.id)
                    model.connections.append(conn)
            elif child.tag == "source":
                source = self.source(child)
                if source is None:
                    continue
                if source.name in source_names:
                    self.fail("P010", f"duplicate source name '{source.name}'")
                else:
                    source_names.add(source.name)
                    model.sources.append(source)
            else:
                self.skip(child.tag)
        return model

    def node(self, el: ET.Element) -> Optional[DataNode]:
        used: set[str] = set()
        name = self.ident(el, "name", used)
        self.finish_attrs(el, used)
        if name is None:
            return None
        node = DataNode(name=name)
        port_names: set[str] = set()
        for child in el:
            if child.tag == "represent":
                node.representation = self.represent(child)
            elif child.tag == "port":
                port = self.port(child, name)
                if port is None:
                    continue
                if port.name in port_names:
                    self.fail("P010", f"duplicate port name '{port.name}' "
                              f"in node '{name}'")
                else:
                    port_names.add(port.name)
                    node.ports.append(port)
            elif child.tag == "behavior":
                node.behavior = self.behavior(child, name)
            else:
                self.skip(child.tag)
        return node

    def represent(self, el: ET.Element) -> DataRepresentation:
        used: set[str] = set()
        rep = DataRepresentation()
        raw_formats = self.attr(el, "format", used)
        if raw_formats:
            for word in raw_formats.split(","):
                try:
                    fmt = DataFormat(word.strip())
                except ValueError:
                    self.fail("X011", f"invalid format '{word.strip()}' on represent")
                    continue
                if fmt not in rep.formats:
                    rep.formats.append(fmt)
        raw_processing = self.attr(el, "processing", used)
        if raw_processing:
            for word in raw_processing.split(","):
                try:
                    proc = Processing(word.strip())
                except ValueError:
                    self.fail("X011",
                              f"invalid processing '{word.strip()}' on represent")
                    continue
                if proc not in rep.processing:
                    rep.processing.append(proc)
        raw_storage = self.attr(el, "storage", used)
        if raw_storage:
            parts = raw_storage.split()
            try:
                tech = StorageTech(parts[-1])
                if len(parts) != 2 or tech.family.value != parts[0]:
                    raise ValueError
                rep.storage = tech
            except (ValueError, IndexError):
                self.fail("X011", f"invalid storage '{raw_storage}' on represent")
        rep.location = self.enum(el, "location", Location, used)
        self.finish_attrs(el, used)
        for child in el:
            self.skip(child.tag)
        return rep

    def port(self, el: ET.Element, owner: str) -> Optional[Port]:
        used: set[str] = set()
        name = self.ident(el, "name", used)
        direction = self.enum(el, "direction", Direction, used, required=True)
        self.finish_attrs(el, used)
        if name is None or direction is None:
            return None
        return Port(name=name, direction=direction, owner=owner)

    def behavior(self, el: ET.Element, node_name: str) -> NodeBehavior:
        behavior = NodeBehavior()
        element_names: set[str] = set()
        self.finish_attrs(el, set())
        for child in el:
            element: Optional[object] = None
            if child.tag == "action":
                element = self.action(child)
            elif child.tag == "event":
                element = self.event(child)
            elif child.tag == "link":
                used: set[str] = set()
                src = self.ident(child, "from", used)
                dst = self.ident(child, "to", used)
                self.finish_attrs(child, used)
                if src is not None and dst is not None:
                    behavior.links.append(Link(src=src, dst=dst))
                continue
            else:
                self.skip(child.tag)
                continue
            if element is None:
                continue
            if element.name in element_names:
                self.fail("P010", f"duplicate element name '{element.name}' "
                          f"in node '{node_name}'")
            else:
                element_names.add(element.name)
                behavior.elements.append(element)
        return behavior

    def action(self, el: ET.Element) -> Optional[Action]:
        used: set[str] = set()
        name = self.ident(el, "name", used)
        raw_kind = self.require(el, "kind", used)
        if name is None or raw_kind is None:
            return None
        try:
            kind = ActionKind(raw_kind)
        except ValueError:
            self.fail("X011", f"invalid kind '{raw_kind}' on action")
            return None
        sub_kind = self.attr(el, "subkind", used)
        if sub_kind is not None and sub_kind not in SUB_KINDS.get(kind, ()):
            self.fail("X011", f"invalid subkind '{sub_kind}' for '{kind.value}'")
            return None
        port = self.ident(el, "port", used, required=False)
        source = self.ident(el, "source", used, required=False)
        self.finish_attrs(el, used)

        action = Action(name=name, kind=kind, sub_kind=sub_kind, port=port)
        rules: list[QualityRule] = []
        for child in el:
            if child.tag == "rule":
                rule = self.rule(child)
                if rule is not None:
                    rules.append(rule)
            else:
                self.skip(child.tag)
        if source is not None:
            if kind is not ActionKind.VERIFY_DATA:
                self.fail("X011", "only verify actions take a source attribute")
                return None
            action.quality = QualitySpec(source=source, rules=rules)
        elif rules:
            self.fail("X010", "action with rules requires source")
            return None
        return action

    def rule(self, el: ET.Element) -> Optional[QualityRule]:
        used: set[str] = set()
        column = self.ident(el, "column", used, allow_keyword=True)
        dimension = self.enum(el, "dimension", Dimension, used, required=True)
        expectation = self.require(el, "expectation", used)
        if column is None or dimension is None or expectation is None:
            return None
        params: dict[str, ParamValue] = {}
        for key, raw in el.attrib.items():
            if key in _RULE_FIXED_ATTRS:
                continue
            if not self.check_word(key, allow_keyword=True):
                self.fail("X011", f"parameter name '{key}' on rule is not a "
                          "usable identifier")
                continue
            try:
                # Non-finite constants have no textual-syntax spelling;
                # let them fall back to plain strings.
                params[key] = json.loads(raw, parse_constant=_reject_constant)
            except (json.JSONDecodeError, ValueError):
                params[key] = raw
        for child in el:
            self.skip(child.tag)
        return QualityRule(column=column, dimension=dimension,
                           expectation=expectation, params=params)

    def event(self, el: ET.Element) -> Optional[ReceiveEvent]:
        used: set[str] = set()
        name = self.ident(el, "name", used)
        port = self.ident(el, "port", used)
        self.finish_attrs(el, used)
        if name is None or port is None:
            return None
        return ReceiveEvent(name=name, port=port)

    def connection(self, el: ET.Element, seq: int) -> Optional[Connection]:
        used: set[str] = set()
        raw_from = self.require(el, "from", used)
        raw_to = self.require(el, "to", used)
        conn_id = self.attr(el, "id", used) or f"c{seq}"
        pattern = self.enum(el, "pattern", MessagePattern, used,
                            default=MessagePattern.SEND_RECEIVE)
        mode = self.enum(el, "mode", TransferMode, used,
                         default=TransferMode.ASYNC)
        self.finish_attrs(el, used)
        if raw_from is None or raw_to is None:
            return None
        endpoints = []
        for raw in (raw_from, raw_to):
            node, sep, port = raw.partition(".")
            if (not sep or not self.check_word(node)
                    or not self.check_word(port)):
                self.fail("X011", f"invalid endpoint '{raw}' on connection "
                          "(expected node.port)")
                return None
            endpoints.append((node, port))
        for child in el:
            self.skip(child.tag)
        return Connection(id=conn_id,
                          from_node=endpoints[0][0], from_port=endpoints[0][1],
                          to_node=endpoints[1][0], to_port=endpoints[1][1],
                          pattern=pattern, mode=mode)

    def source(self, el: ET.Element) -> Optional[SourceBinding]:
        used: set[str] = set()
        name = self.ident(el, "name", used)
        kind = self.enum(el, "kind", SourceKind, used, required=True)
        if name is None or kind is None:
            return None
        connection: dict[str, str] = {}
        for key in ("host", "database", "table", "path"):
            value = self.attr(el, key, used)
            if value is not None:
                connection[key] = value
        self.finish_attrs(el, used)
        for key in REQUIRED_CONNECTION_KEYS[kind]:
            if key not in connection:
                self.fail("X010", f"source of kind '{kind.value}' requires {key}")
        for key in list(connection):
            if key not in REQUIRED_CONNECTION_KEYS[kind]:
                self.skip(f"attribute '{key}' on source of kind '{kind.value}'")
                del connection[key]

        columns: list[ColumnMeta] = []
        column_names: set[str] = set()
        for child in el:
            if child.tag == "column":
                cused: set[str] = set()
                cname = self.ident(child, "name", cused, allow_keyword=True)
                ctype = self.enum(child, "type", ColumnType, cused, required=True)
                self.finish_attrs(child, cused)
                if cname is None or ctype is None:
                    continue
                if cname in column_names:
                    self.fail("P010", f"duplicate column name '{cname}'")
                else:
                    column_names.add(cname)
                    columns.append(ColumnMeta(cname, ctype))
            else:
                self.skip(child.tag)
        return SourceBinding(name=name, kind=kind, connection=connection,
                             columns=columns)


def import_xmi(xml_text: str) -> ParseResult:
    """Parse an XMI document into a model; filtering yields X020 warnings."""
    importer = _Importer()
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        importer.fail("X001", f"malformed XML: {exc}")
        return ParseResult(model=None, diagnostics=importer.diags)

    model = importer.architecture(root)
    if has_errors(importer.diags):
        model = None
    return ParseResult(model=model, diagnostics=importer.diags)

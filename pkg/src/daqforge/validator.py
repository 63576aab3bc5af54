"""Semantic validation of architecture models.

Eight rules, applied according to the model's declared abstraction level.
Structural rules always run; behavioral rules only run at LLA, where node
behaviors are mandatory and feed the downstream stages.

  R001 error   connection endpoints resolve, Out on the from side, In on to
  R002 error   a connection joins two different nodes
  R003 error   every LLA node declares a behavior
  R004 error   behavior link graphs are acyclic (and name declared elements)
  R005 error   receive events use own In-ports; send actions own Out-ports
  R006 error   verify rules are non-empty, reference a declared source, and
               resolve against the dimension and signature tables
  R007 warning a node both generates data and receives it
  R008 warning connected nodes declare disjoint non-empty format sets

Diagnostics come back sorted by (code, span) and are deterministic.
"""

from __future__ import annotations

from enum import Enum
from typing import Union

from daqforge import mapper
from daqforge.diagnostics import (
    Diagnostic,
    error,
    has_errors,
    sort_diagnostics,
    warning,
)
from daqforge.model import (
    Action,
    ActionKind,
    ArchitectureModel,
    CycleError,
    Direction,
    Level,
    ReceiveEvent,
    behavior_order,
)

R1, R2, R3, R4 = "R001", "R002", "R003", "R004"
R5, R6, R7, R8 = "R005", "R006", "R007", "R008"


def validate(model: ArchitectureModel) -> list[Diagnostic]:
    """All rule violations for the model, empty when valid."""
    diags: list[Diagnostic] = []
    _check_connections(model, diags)
    if model.level is Level.LLA:
        _check_behaviors(model, diags)
    return sort_diagnostics(diags)


class LevelResult(Enum):
    HLA_OK = "HLA_ok"
    LLA_OK = "LLA_ok"


def validate_level(model: ArchitectureModel) -> Union[LevelResult, list[Diagnostic]]:
    """Classify a model at its declared level, or report why it fails.

    Warnings alone do not block classification; any error returns the full
    diagnostic list instead.
    """
    diags = validate(model)
    if has_errors(diags):
        return diags
    return LevelResult.HLA_OK if model.level is Level.HLA else LevelResult.LLA_OK


def _check_connections(model: ArchitectureModel, diags: list[Diagnostic]) -> None:
    for conn in model.connections:
        problems = []
        endpoints = {}
        for label, node_name, port_name, want in (
                ("from", conn.from_node, conn.from_port, Direction.OUT),
                ("to", conn.to_node, conn.to_port, Direction.IN)):
            node = model.node(node_name)
            if node is None:
                problems.append(f"{label} endpoint names unknown node "
                                f"'{node_name}'")
                continue
            port = node.port(port_name)
            if port is None:
                problems.append(f"{label} endpoint names unknown port "
                                f"'{node_name}.{port_name}'")
                continue
            if port.direction is not want:
                problems.append(f"{label} endpoint '{node_name}.{port_name}' "
                                f"is not an {want.value}-port")
                continue
            endpoints[label] = node
        if problems:
            diags.append(error(R1, f"connection {conn.id}: "
                               + "; ".join(problems), conn.span))
            continue

        src, dst = endpoints["from"], endpoints["to"]
        if src.name == dst.name:
            diags.append(error(R2, f"connection {conn.id} joins node "
                               f"'{src.name}' to itself", conn.span))
            continue

        src_formats = set(src.representation.formats)
        dst_formats = set(dst.representation.formats)
        if src_formats and dst_formats and not (src_formats & dst_formats):
            diags.append(warning(
                R8,
                f"connection {conn.id}: nodes '{src.name}' and '{dst.name}' "
                "share no data format",
                conn.span))


def _check_behaviors(model: ArchitectureModel, diags: list[Diagnostic]) -> None:
    for node in model.nodes:
        if node.behavior is None:
            diags.append(error(R3, f"node '{node.name}' declares no behavior "
                               "at level LLA", node.span))
            continue
        behavior = node.behavior

        declared = set(behavior.element_names())
        broken_links = False
        for link in behavior.links:
            missing = [n for n in (link.src, link.dst) if n not in declared]
            if missing:
                broken_links = True
                diags.append(error(
                    R4,
                    f"node '{node.name}': link references undeclared "
                    "element(s): " + ", ".join(f"'{m}'" for m in missing),
                    link.span))
        if not broken_links:
            try:
                behavior_order(behavior)
            except CycleError as exc:
                diags.append(error(
                    R4,
                    f"node '{node.name}': behavior links form a cycle: "
                    + " -> ".join(exc.cycle),
                    node.span))

        has_generation = False
        has_receive = False
        for element in behavior.elements:
            if isinstance(element, ReceiveEvent):
                has_receive = True
                _check_element_port(node, element.name, "receive event",
                                    element.port, Direction.IN, element.span,
                                    diags)
            elif isinstance(element, Action):
                if element.kind is ActionKind.GENERATION:
                    has_generation = True
                if element.kind is ActionKind.SEND_DATA:
                    _check_element_port(node, element.name, "send action",
                                        element.port, Direction.OUT,
                                        element.span, diags)
                if element.kind is ActionKind.VERIFY_DATA:
                    _check_quality(model, node, element, diags)
        if has_generation and has_receive:
            diags.append(warning(
                R7,
                f"node '{node.name}' both generates data and receives it",
                node.span))


def _check_element_port(node, element_name, what, port_name, want, span,
                        diags: list[Diagnostic]) -> None:
    if port_name is None:
        diags.append(error(R5, f"node '{node.name}': {what} '{element_name}' "
                           "names no port", span))
        return
    port = node.port(port_name)
    if port is None:
        diags.append(error(R5, f"node '{node.name}': {what} '{element_name}' "
                           f"names unknown port '{port_name}'", span))
    elif port.direction is not want:
        diags.append(error(R5, f"node '{node.name}': {what} '{element_name}' "
                           f"names port '{port_name}', which is not an "
                           f"{want.value}-port", span))


def _check_quality(model, node, action: Action, diags: list[Diagnostic]) -> None:
    if action.quality is None or not action.quality.rules:
        diags.append(error(R6, f"node '{node.name}': verify action "
                           f"'{action.name}' declares no quality rules",
                           action.span))
        return
    binding = model.source(action.quality.source)
    if binding is None:
        diags.append(error(R6, f"node '{node.name}': verify action "
                           f"'{action.name}' references undeclared source "
                           f"'{action.quality.source}'", action.span))
        return
    for rule in action.quality.rules:
        resolved = mapper.resolve_rule(rule, binding)
        if isinstance(resolved, Diagnostic):
            diags.append(error(R6, f"node '{node.name}': [{resolved.code}] "
                               + resolved.message,
                               resolved.span or action.span))

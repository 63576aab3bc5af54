"""Dimension-to-expectation mapping and quality-rule resolution.

The dimension table below fixes which named expectations may be declared
under each of the six quality dimensions; the per-expectation parameter
signatures live in ``data/expectations.cfg`` so they stay diffable.
Resolution turns a declared rule into a fully bound, canonically ordered
expectation call, grouped per data source for the code generator and the
native checker.
"""

from __future__ import annotations

import configparser
import datetime
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Optional, Union

from daqforge.diagnostics import Diagnostic, error
from daqforge.model import (
    ActionKind,
    ArchitectureModel,
    Dimension,
    Level,
    ParamValue,
    QualityRule,
    SourceBinding,
)

_U = Dimension.UNIQUENESS
_CO = Dimension.COMPLETENESS
_V = Dimension.VALIDITY
_CN = Dimension.CONSISTENCY
_T = Dimension.TIMELINESS
_A = Dimension.ACCURACY

# Full dimension table, in canonical order: Uniqueness 1, Completeness 2,
# Validity 17, Consistency 12, Timeliness 6, Accuracy 34 - 72 pairs.
MAPPER_TABLE: tuple[tuple[Dimension, str], ...] = (
    (_U, "expect_column_values_to_be_unique"),
    (_CO, "expect_column_values_to_not_be_null"),
    (_CO, "expect_column_values_to_be_null"),
    (_V, "expect_column_values_to_be_of_type"),
    (_V, "expect_column_values_to_be_in_type_list"),
    (_V, "expect_column_values_to_be_in_set"),
    (_V, "expect_column_values_to_not_be_in_set"),
    (_V, "expect_column_values_to_be_between"),
    (_V, "expect_column_values_to_be_increasing"),
    (_V, "expect_column_values_to_be_decreasing"),
    (_V, "expect_column_distinct_values_to_equal_set"),
    (_V, "expect_column_distinct_values_to_contain_set"),
    (_V, "expect_column_mean_to_be_between"),
    (_V, "expect_column_median_to_be_between"),
    (_V, "expect_column_stdev_to_be_between"),
    (_V, "expect_column_unique_value_count_to_be_between"),
    (_V, "expect_column_most_common_value_to_be_in_set"),
    (_V, "expect_column_sum_to_be_between"),
    (_V, "expect_column_min_to_be_between"),
    (_V, "expect_column_max_to_be_between"),
    (_CN, "expect_column_value_lengths_to_be_between"),
    (_CN, "expect_column_value_lengths_to_equal"),
    (_CN, "expect_column_values_to_match_regex"),
    (_CN, "expect_column_values_to_match_regex_list"),
    (_CN, "expect_column_values_to_match_like_pattern"),
    (_CN, "expect_column_values_to_not_match_like_pattern"),
    (_CN, "expect_column_values_to_match_like_pattern_list"),
    (_CN, "expect_column_values_to_not_match_like_pattern_list"),
    (_CN, "expect_column_values_to_match_strftime_format"),
    (_CN, "expect_column_values_to_be_dateutil_parseable"),
    (_CN, "expect_column_values_to_be_json_parseable"),
    (_CN, "expect_column_values_to_match_json_schema"),
    (_T, "expect_column_values_to_not_be_null"),
    (_T, "expect_column_min_to_be_between"),
    (_T, "expect_column_max_to_be_between"),
    (_T, "expect_column_values_to_be_in_set"),
    (_T, "expect_column_values_to_not_be_in_set"),
    (_T, "expect_column_values_to_be_between"),
    (_A, "expect_column_values_to_not_be_null"),
    (_A, "expect_column_values_to_be_null"),
    (_A, "expect_column_values_to_be_of_type"),
    (_A, "expect_column_values_to_be_in_type_list"),
    (_A, "expect_column_values_to_be_in_set"),
    (_A, "expect_column_values_to_not_be_in_set"),
    (_A, "expect_column_values_to_be_between"),
    (_A, "expect_column_values_to_be_increasing"),
    (_A, "expect_column_values_to_be_decreasing"),
    (_A, "expect_column_value_lengths_to_be_between"),
    (_A, "expect_column_value_lengths_to_equal"),
    (_A, "expect_column_values_to_match_regex"),
    (_A, "expect_column_values_to_not_match_regex"),
    (_A, "expect_column_values_to_match_regex_list"),
    (_A, "expect_column_values_to_not_match_regex_list"),
    (_A, "expect_column_values_to_match_like_pattern"),
    (_A, "expect_column_values_to_not_match_like_pattern"),
    (_A, "expect_column_values_to_match_like_pattern_list"),
    (_A, "expect_column_values_to_not_match_like_pattern_list"),
    (_A, "expect_column_values_to_match_strftime_format"),
    (_A, "expect_column_values_to_be_dateutil_parseable"),
    (_A, "expect_column_values_to_be_json_parseable"),
    (_A, "expect_column_values_to_match_json_schema"),
    (_A, "expect_column_distinct_values_to_equal_set"),
    (_A, "expect_column_distinct_values_to_contain_set"),
    (_A, "expect_column_mean_to_be_between"),
    (_A, "expect_column_median_to_be_between"),
    (_A, "expect_column_stdev_to_be_between"),
    (_A, "expect_column_unique_value_count_to_be_between"),
    (_A, "expect_column_most_common_value_to_be_in_set"),
    (_A, "expect_column_sum_to_be_between"),
    (_A, "expect_column_min_to_be_between"),
    (_A, "expect_column_max_to_be_between"),
    (_A, "expect_column_kl_divergence_to_be_less_than"),
)

_PAIR_SET = frozenset(MAPPER_TABLE)


def mapper_table() -> list[tuple[Dimension, str]]:
    """The 72 (dimension, expectation) pairs, in canonical table order."""
    return list(MAPPER_TABLE)


def default_expectation(dimension: Dimension) -> str:
    """First table row for a dimension; used when a rule omits the name."""
    for dim, name in MAPPER_TABLE:
        if dim is dimension:
            return name
    raise AssertionError(f"dimension {dimension} missing from table")


class ParamType(Enum):
    STRING = "string"
    INTEGER = "integer"
    NUMBER = "number"
    BOOLEAN = "boolean"
    LIST = "list"
    BOUND = "bound"  # number, or ISO-8601 calendar date string


@dataclass(frozen=True)
class ExpectationSignature:
    name: str
    dimensions: frozenset[Dimension]
    required: tuple[tuple[str, ParamType], ...] = ()
    optional: tuple[tuple[str, ParamType], ...] = ()
    aliases: tuple[tuple[str, str], ...] = ()
    core: bool = False

    def param_order(self) -> list[str]:
        return [kw for kw, _ in self.required] + [kw for kw, _ in self.optional]

    def param_type(self, keyword: str) -> Optional[ParamType]:
        for kw, ptype in self.required + self.optional:
            if kw == keyword:
                return ptype
        return None

    def canonical_keyword(self, keyword: str) -> str:
        for short, full in self.aliases:
            if short == keyword:
                return full
        return keyword


def _parse_params(raw: str) -> tuple[tuple[str, ParamType], ...]:
    out = []
    for part in filter(None, (p.strip() for p in raw.split(","))):
        kw, _, tname = part.partition(":")
        out.append((kw.strip(), ParamType(tname.strip())))
    return tuple(out)


def _parse_aliases(raw: str) -> tuple[tuple[str, str], ...]:
    out = []
    for part in filter(None, (p.strip() for p in raw.split(","))):
        short, _, full = part.partition("->")
        out.append((short.strip(), full.strip()))
    return tuple(out)


def _load_signatures() -> dict[str, ExpectationSignature]:
    cfg = configparser.ConfigParser()
    cfg.optionxform = str  # keep parameter keyword case
    text = resources.files("daqforge").joinpath("data/expectations.cfg").read_text(
        encoding="utf-8")
    cfg.read_string(text)
    sigs: dict[str, ExpectationSignature] = {}
    for name in cfg.sections():
        sec = cfg[name]
        dims = frozenset(Dimension(w.strip())
                         for w in sec.get("dimensions", "").split(",") if w.strip())
        sigs[name] = ExpectationSignature(
            name=name,
            dimensions=dims,
            required=_parse_params(sec.get("required", "")),
            optional=_parse_params(sec.get("optional", "")),
            aliases=_parse_aliases(sec.get("aliases", "")),
            core=sec.getboolean("core", fallback=False),
        )
    return sigs


SIGNATURES: dict[str, ExpectationSignature] = _load_signatures()

KNOWN_EXPECTATIONS = frozenset(SIGNATURES)

# Prefixes tried, longest first, when expanding a rule's short spelling
# (e.g. "be_unique" -> expect_column_values_to_be_unique).
_EXPANSION_PREFIXES = ("expect_column_values_to_", "expect_column_values_",
                       "expect_column_")


def expand_expectation(word: str) -> Optional[str]:
    """Expand a short expectation spelling to its full table name.

    Full names pass through; otherwise the standard prefixes are tried and
    the expansion must be unique.  Returns None when nothing matches.
    """
    if word in KNOWN_EXPECTATIONS:
        return word
    hits = {prefix + word for prefix in _EXPANSION_PREFIXES} & KNOWN_EXPECTATIONS
    if len(hits) == 1:
        return next(iter(hits))
    return None


def compress_expectation(name: str) -> str:
    """Shortest spelling that expands back to ``name``; printer helper."""
    for prefix in _EXPANSION_PREFIXES:
        if name.startswith(prefix):
            short = name[len(prefix):]
            if expand_expectation(short) == name:
                return short
    return name


@dataclass
class ExpectationCall:
    """One named expectation bound to a column with canonical kwargs."""

    name: str
    column: str
    kwargs: dict[str, ParamValue] = field(default_factory=dict)


@dataclass
class SuiteBundle:
    source: SourceBinding
    calls: list[ExpectationCall] = field(default_factory=list)


def _value_matches(value: ParamValue, ptype: ParamType) -> bool:
    if ptype is ParamType.BOOLEAN:
        return isinstance(value, bool)
    if ptype is ParamType.STRING:
        return isinstance(value, str)
    if ptype is ParamType.INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if ptype is ParamType.NUMBER:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if ptype is ParamType.LIST:
        return isinstance(value, list)
    if ptype is ParamType.BOUND:
        if isinstance(value, bool):
            return False
        if isinstance(value, (int, float)):
            return True
        if isinstance(value, str):
            try:
                datetime.date.fromisoformat(value)
                return True
            except ValueError:
                return False
        return False
    raise AssertionError(ptype)


def resolve_rule(rule: QualityRule,
                 source: SourceBinding) -> Union[ExpectationCall, Diagnostic]:
    """Check a rule against the tables and bind it into an ExpectationCall.

    Errors: M001 unknown (dimension, expectation) pair, M002 parameter
    mismatch, M003 unknown column.  Bound kwargs come out in signature
    order regardless of how the rule spelled them.
    """
    if (rule.dimension, rule.expectation) not in _PAIR_SET:
        return error(
            "M001",
            f"expectation '{rule.expectation}' is not mapped to dimension "
            f"'{rule.dimension.value}'",
            rule.span,
        )
    sig = SIGNATURES[rule.expectation]

    bound: dict[str, ParamValue] = {}
    for keyword, value in rule.params.items():
        canon = sig.canonical_keyword(keyword)
        ptype = sig.param_type(canon)
        if ptype is None:
            return error("M002",
                         f"unknown parameter '{keyword}' for {rule.expectation}",
                         rule.span)
        if canon in bound:
            return error("M002",
                         f"parameter '{canon}' given more than once",
                         rule.span)
        if not _value_matches(value, ptype):
            return error(
                "M002",
                f"parameter '{keyword}' of {rule.expectation} expects "
                f"{ptype.value}, got {value!r}",
                rule.span,
            )
        bound[canon] = value

    missing = [kw for kw, _ in sig.required if kw not in bound]
    if missing:
        return error(
            "M002",
            f"{rule.expectation} is missing required parameter(s) "
            + ", ".join(f"'{m}'" for m in missing),
            rule.span,
        )

    if source.column(rule.column) is None:
        return error(
            "M003",
            f"column '{rule.column}' is not declared by source '{source.name}'",
            rule.span,
        )

    kwargs = {kw: bound[kw] for kw in sig.param_order() if kw in bound}
    return ExpectationCall(rule.expectation, rule.column, kwargs)


class QualityMapError(Exception):
    """Rule resolution failed while collecting suites."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.message for d in diagnostics))


def collect_suites(model: ArchitectureModel) -> list[SuiteBundle]:
    """Resolve every verify action into per-source expectation suites.

    Bundles come out in source declaration order; calls within a bundle in
    (node declaration, rule declaration) order.  High-level models carry no
    executable behavior, so they yield no suites.
    """
    if model.level is not Level.LLA:
        return []

    calls_by_source: dict[str, list[ExpectationCall]] = {}
    diags: list[Diagnostic] = []
    for node in model.nodes:
        if node.behavior is None:
            continue
        for element in node.behavior.elements:
            quality = getattr(element, "quality", None)
            if quality is None or element.kind is not ActionKind.VERIFY_DATA:
                continue
            binding = model.source(quality.source)
            if binding is None:
                diags.append(error(
                    "M003",
                    f"node '{node.name}': verify action '{element.name}' "
                    f"references undeclared source '{quality.source}'",
                    element.span,
                ))
                continue
            for rule in quality.rules:
                resolved = resolve_rule(rule, binding)
                if isinstance(resolved, Diagnostic):
                    diags.append(error(
                        resolved.code,
                        f"node '{node.name}': {resolved.message}",
                        resolved.span,
                    ))
                else:
                    calls_by_source.setdefault(binding.name, []).append(resolved)

    if diags:
        raise QualityMapError(diags)

    return [SuiteBundle(source=model.source(name), calls=calls_by_source[name])
            for name in (s.name for s in model.sources)
            if name in calls_by_source]

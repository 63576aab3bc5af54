"""Native execution of the core expectation subset against loaded tables.

This is the semantic oracle for the generated scripts and a standalone
check runner.  Core subset semantics:

* Row-level expectations skip null cells, except the null family
  (``to_be_null`` / ``to_not_be_null``), which evaluates every row.
  Zero evaluated elements is a vacuous pass.
* ``to_be_unique`` counts every occurrence of a duplicated value as
  unexpected.
* Type checks compare runtime type tags (string, integer, number,
  boolean, date); an integer counts as a number when number is expected,
  booleans never do.
* ``to_be_between`` is inclusive and applies to numbers and dates; cells
  that cannot be compared with the bounds are unexpected.  Bounds may be
  numbers or ISO-8601 date strings.
* Length and regex checks run on a cell's canonical text: text cells use
  their own value, other cells their canonical rendering (ISO dates,
  ``true``/``false`` booleans, repr'd numbers).  Lengths count Unicode
  scalar values.  Regexes are searched, and a regex list matches if any
  of its entries does.
* ``to_be_increasing`` / ``to_be_decreasing`` are non-strict; each
  non-null element is compared with the previous non-null element, and an
  element breaking monotonicity (or not comparable with its predecessor)
  is unexpected.
* ``min_to_be_between`` / ``max_to_be_between`` aggregate over non-null
  values; with zero values they fail with note "no data", and a failed
  aggregate keeps unexpected_count at zero.

Everything else in the expectation table is generate-only and rejected
with C020 when a suite is run natively.
"""

from __future__ import annotations

import datetime
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from daqforge.dataset import Cell, Dataset
from daqforge.mapper import SIGNATURES, ExpectationCall, SuiteBundle

CORE_EXPECTATIONS = frozenset(name for name, sig in SIGNATURES.items() if sig.core)

_PARTIAL_LIMIT = 20


class CheckerError(Exception):
    """Evaluation could not run: C001 missing column, C010 bad regex,
    C011 type-incompatible params, C020 generate-only expectation."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass
class ExpectationResult:
    call: ExpectationCall
    success: bool
    element_count: int
    unexpected_count: int
    partial_unexpected_list: list[Cell] = field(default_factory=list)
    note: Optional[str] = None


@dataclass
class CheckReport:
    suite: str
    results: list[ExpectationResult] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return all(r.success for r in self.results)

    def to_json(self) -> str:
        def cell_value(cell: Cell):
            if isinstance(cell, datetime.date):
                return cell.isoformat()
            return cell

        records = []
        for r in self.results:
            rec = {
                "expectation": r.call.name,
                "column": r.call.column,
                "success": r.success,
                "element_count": r.element_count,
                "unexpected_count": r.unexpected_count,
                "partial_unexpected_list": [cell_value(c)
                                            for c in r.partial_unexpected_list],
            }
            if r.note is not None:
                rec["note"] = r.note
            records.append(rec)
        return json.dumps({"suite": self.suite, "success": self.success,
                           "results": records}, indent=2)


# -- value plumbing ---------------------------------------------------------

def _is_number(value: Cell) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _type_class(value: Cell) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, datetime.date):
        return "date"
    raise AssertionError(f"unexpected cell {value!r}")


def _comparable(a: Cell, b: Cell) -> bool:
    return _type_class(a) == _type_class(b)


def _type_matches(cell: Cell, type_name: str) -> bool:
    if type_name == "boolean":
        return isinstance(cell, bool)
    if type_name == "integer":
        return isinstance(cell, int) and not isinstance(cell, bool)
    if type_name == "number":
        return _is_number(cell)
    if type_name == "string":
        return isinstance(cell, str)
    if type_name == "date":
        return isinstance(cell, datetime.date)
    raise CheckerError("C011", f"unknown type name {type_name!r}")


def _cell_text(cell: Cell) -> str:
    if isinstance(cell, bool):
        return "true" if cell else "false"
    if isinstance(cell, str):
        return cell
    if isinstance(cell, datetime.date):
        return cell.isoformat()
    return repr(cell)


def _normalize_bound(value, keyword: str):
    if value is None:
        return None
    if isinstance(value, bool):
        raise CheckerError("C011", f"{keyword} must be a number or date")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        try:
            return datetime.date.fromisoformat(value)
        except ValueError:
            raise CheckerError(
                "C011", f"{keyword} {value!r} is not an ISO date") from None
    raise CheckerError("C011", f"{keyword} must be a number or date")


def _int_bound(value, keyword: str):
    if value is None:
        return None
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise CheckerError("C011", f"{keyword} must be an integer")


def _within(value: Cell, lo, hi) -> bool:
    if lo is not None and (not _comparable(value, lo) or value < lo):
        return False
    if hi is not None and (not _comparable(value, hi) or value > hi):
        return False
    return True


# -- evaluators --------------------------------------------------------------

def _row_result(call: ExpectationCall, evaluated: list[Cell],
                unexpected: list[Cell]) -> ExpectationResult:
    return ExpectationResult(
        call=call,
        success=not unexpected,
        element_count=len(evaluated),
        unexpected_count=len(unexpected),
        partial_unexpected_list=unexpected[:_PARTIAL_LIMIT],
    )


def _eval_unique(call, cells):
    evaluated = [c for c in cells if c is not None]
    counts = Counter(evaluated)
    unexpected = [c for c in evaluated if counts[c] > 1]
    return _row_result(call, evaluated, unexpected)


def _eval_not_null(call, cells):
    return _row_result(call, list(cells), [c for c in cells if c is None])


def _eval_null(call, cells):
    return _row_result(call, list(cells), [c for c in cells if c is not None])


def _eval_of_type(call, cells):
    type_name = call.kwargs.get("type_")
    if not isinstance(type_name, str):
        raise CheckerError("C011", "type_ must be a type name string")
    evaluated = [c for c in cells if c is not None]
    unexpected = [c for c in evaluated if not _type_matches(c, type_name)]
    return _row_result(call, evaluated, unexpected)


def _eval_in_type_list(call, cells):
    type_list = call.kwargs.get("type_list")
    if (not isinstance(type_list, list)
            or not all(isinstance(t, str) for t in type_list)):
        raise CheckerError("C011", "type_list must be a list of type names")
    evaluated = [c for c in cells if c is not None]
    unexpected = [c for c in evaluated
                  if not any(_type_matches(c, t) for t in type_list)]
    return _row_result(call, evaluated, unexpected)


def _eval_between(call, cells):
    lo = _normalize_bound(call.kwargs.get("min_value"), "min_value")
    hi = _normalize_bound(call.kwargs.get("max_value"), "max_value")
    evaluated = [c for c in cells if c is not None]
    unexpected = [c for c in evaluated if not _within(c, lo, hi)]
    return _row_result(call, evaluated, unexpected)


def _eval_in_set(call, cells):
    value_set = call.kwargs.get("value_set")
    if not isinstance(value_set, list):
        raise CheckerError("C011", "value_set must be a list")
    evaluated = [c for c in cells if c is not None]
    unexpected = [c for c in evaluated if c not in value_set]
    return _row_result(call, evaluated, unexpected)


def _eval_not_in_set(call, cells):
    value_set = call.kwargs.get("value_set")
    if not isinstance(value_set, list):
        raise CheckerError("C011", "value_set must be a list")
    evaluated = [c for c in cells if c is not None]
    unexpected = [c for c in evaluated if c in value_set]
    return _row_result(call, evaluated, unexpected)


def _eval_lengths_between(call, cells):
    lo = _int_bound(call.kwargs.get("min_value"), "min_value")
    hi = _int_bound(call.kwargs.get("max_value"), "max_value")
    evaluated = [c for c in cells if c is not None]
    unexpected = []
    for cell in evaluated:
        length = len(_cell_text(cell))
        if (lo is not None and length < lo) or (hi is not None and length > hi):
            unexpected.append(cell)
    return _row_result(call, evaluated, unexpected)


def _eval_lengths_equal(call, cells):
    wanted = _int_bound(call.kwargs.get("value"), "value")
    if wanted is None:
        raise CheckerError("C011", "value must be an integer")
    evaluated = [c for c in cells if c is not None]
    unexpected = [c for c in evaluated if len(_cell_text(c)) != wanted]
    return _row_result(call, evaluated, unexpected)


def _compile_regex(pattern) -> re.Pattern:
    if not isinstance(pattern, str):
        raise CheckerError("C011", "regex must be a string")
    try:
        return re.compile(pattern)
    except re.error as exc:
        raise CheckerError("C010", f"bad regex {pattern!r}: {exc}") from exc


def _eval_match_regex(call, cells):
    pattern = _compile_regex(call.kwargs.get("regex"))
    evaluated = [c for c in cells if c is not None]
    unexpected = [c for c in evaluated if not pattern.search(_cell_text(c))]
    return _row_result(call, evaluated, unexpected)


def _eval_match_regex_list(call, cells):
    regex_list = call.kwargs.get("regex_list")
    if not isinstance(regex_list, list) or not regex_list:
        raise CheckerError("C011", "regex_list must be a non-empty list")
    patterns = [_compile_regex(p) for p in regex_list]
    evaluated = [c for c in cells if c is not None]
    unexpected = [c for c in evaluated
                  if not any(p.search(_cell_text(c)) for p in patterns)]
    return _row_result(call, evaluated, unexpected)


def _eval_monotonic(call, cells, increasing: bool):
    evaluated = [c for c in cells if c is not None]
    unexpected = []
    prev: Optional[Cell] = None
    for i, cell in enumerate(evaluated):
        if i > 0:
            if not _comparable(cell, prev):
                unexpected.append(cell)
            elif increasing and cell < prev:
                unexpected.append(cell)
            elif not increasing and cell > prev:
                unexpected.append(cell)
        prev = cell
    return _row_result(call, evaluated, unexpected)


def _eval_increasing(call, cells):
    return _eval_monotonic(call, cells, increasing=True)


def _eval_decreasing(call, cells):
    return _eval_monotonic(call, cells, increasing=False)


def _eval_aggregate(call, cells, label: str, agg: Callable):
    lo = _normalize_bound(call.kwargs.get("min_value"), "min_value")
    hi = _normalize_bound(call.kwargs.get("max_value"), "max_value")
    values = [c for c in cells if c is not None]
    result = ExpectationResult(call=call, success=False,
                               element_count=len(values), unexpected_count=0)
    if not values:
        result.note = "no data"
        return result
    if len({_type_class(v) for v in values}) > 1:
        result.note = "mixed types"
        return result
    observed = agg(values)
    result.success = _within(observed, lo, hi)
    result.note = f"observed {label} {_cell_text(observed)}"
    return result


def _eval_min_between(call, cells):
    return _eval_aggregate(call, cells, "min", min)


def _eval_max_between(call, cells):
    return _eval_aggregate(call, cells, "max", max)


_EVALUATORS: dict[str, Callable] = {
    "expect_column_values_to_be_unique": _eval_unique,
    "expect_column_values_to_not_be_null": _eval_not_null,
    "expect_column_values_to_be_null": _eval_null,
    "expect_column_values_to_be_of_type": _eval_of_type,
    "expect_column_values_to_be_in_type_list": _eval_in_type_list,
    "expect_column_values_to_be_between": _eval_between,
    "expect_column_values_to_be_in_set": _eval_in_set,
    "expect_column_values_to_not_be_in_set": _eval_not_in_set,
    "expect_column_value_lengths_to_be_between": _eval_lengths_between,
    "expect_column_value_lengths_to_equal": _eval_lengths_equal,
    "expect_column_values_to_match_regex": _eval_match_regex,
    "expect_column_values_to_match_regex_list": _eval_match_regex_list,
    "expect_column_values_to_be_increasing": _eval_increasing,
    "expect_column_values_to_be_decreasing": _eval_decreasing,
    "expect_column_min_to_be_between": _eval_min_between,
    "expect_column_max_to_be_between": _eval_max_between,
}

assert frozenset(_EVALUATORS) == CORE_EXPECTATIONS


def eval_expectation(call: ExpectationCall, data: Dataset) -> ExpectationResult:
    """Evaluate one core expectation against a loaded table."""
    if call.name not in _EVALUATORS:
        raise CheckerError("C020", f"{call.name} is a generate-only expectation")
    if call.column not in data.columns:
        raise CheckerError("C001", f"column '{call.column}' not present in "
                           f"dataset '{data.name}'")
    return _EVALUATORS[call.name](call, data.column(call.column))


def run_suite(bundle: SuiteBundle, data: Dataset) -> CheckReport:
    """Evaluate every call of a bundle, in order, against one table."""
    for call in bundle.calls:
        if call.name not in CORE_EXPECTATIONS:
            raise CheckerError("C020",
                               f"{call.name} is a generate-only expectation")
    report = CheckReport(suite=bundle.source.name)
    for call in bundle.calls:
        report.results.append(eval_expectation(call, data))
    return report

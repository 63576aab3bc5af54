import datetime
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_eval, random_case
from daqforge.checker import (
    CORE_EXPECTATIONS,
    CheckerError,
    eval_expectation,
    run_suite,
)
from daqforge.dataset import Dataset
from daqforge.mapper import ExpectationCall, SuiteBundle
from daqforge.model import ColumnMeta, ColumnType, SourceBinding, SourceKind


def ds(cells, name="t", column="c"):
    return Dataset(name=name, columns={column: cells})


def call(name, column="c", **kwargs):
    return ExpectationCall(name=name, column=column, kwargs=kwargs)


def run_one(name, cells, **kwargs):
    return eval_expectation(call(name, **kwargs), ds(cells))


class TestRowLevelSemantics:
    def test_unique_counts_both_occurrences(self):
        result = run_one("expect_column_values_to_be_unique", ["a", "b", "a"])
        assert (result.success, result.element_count,
                result.unexpected_count) == (False, 3, 2)
        assert result.partial_unexpected_list == ["a", "a"]

    def test_not_null_on_empty_is_vacuous_pass(self):
        result = run_one("expect_column_values_to_not_be_null", [])
        assert (result.success, result.element_count,
                result.unexpected_count) == (True, 0, 0)

    def test_between_skips_nulls(self):
        result = run_one("expect_column_values_to_be_between",
                         [5, 11, None], min_value=0, max_value=10)
        assert (result.element_count, result.unexpected_count) == (2, 1)
        assert result.partial_unexpected_list == [11]

    def test_between_is_inclusive(self):
        result = run_one("expect_column_values_to_be_between",
                         [0, 10], min_value=0, max_value=10)
        assert result.success

    def test_between_with_date_bounds(self):
        cells = [datetime.date(2022, 5, 1), datetime.date(2030, 1, 1), None]
        result = run_one("expect_column_values_to_be_between", cells,
                         min_value="2020-01-01", max_value="2025-01-01")
        assert (result.element_count, result.unexpected_count) == (2, 1)

    def test_incomparable_cells_are_unexpected_under_between(self):
        result = run_one("expect_column_values_to_be_between",
                         ["word", 5], min_value=0, max_value=10)
        assert result.unexpected_count == 1
        assert result.partial_unexpected_list == ["word"]

    def test_type_checks(self):
        cells = [1, 2.5, "x", True, datetime.date(2024, 1, 1), None]
        result = run_one("expect_column_values_to_be_of_type", cells,
                         type_="number")
        # int and float count as number; bool does not.
        assert (result.element_count, result.unexpected_count) == (5, 3)
        listed = run_one("expect_column_values_to_be_in_type_list", cells,
                         type_list=["number", "boolean"])
        assert listed.unexpected_count == 2

    def test_null_family_evaluates_every_row(self):
        cells = ["a", None, "b"]
        not_null = run_one("expect_column_values_to_not_be_null", cells)
        be_null = run_one("expect_column_values_to_be_null", cells)
        assert not_null.element_count == be_null.element_count == 3
        assert not_null.unexpected_count == 1
        assert be_null.unexpected_count == 2

    def test_lengths_use_canonical_text(self):
        cells = ["abc", 1234, True, datetime.date(2024, 1, 2), None]
        result = run_one("expect_column_value_lengths_to_equal", cells, value=4)
        # "abc" no, "1234" yes, "true" yes, "2024-01-02" no
        assert (result.element_count, result.unexpected_count) == (4, 2)

    def test_regex_searches_anywhere(self):
        result = run_one("expect_column_values_to_match_regex",
                         ["abc", "xbx", "zzz", None], regex="b")
        assert result.unexpected_count == 1
        any_of = run_one("expect_column_values_to_match_regex_list",
                         ["abc", "xbx", "zzz", None],
                         regex_list=["^a", "z$"])
        assert any_of.unexpected_count == 1

    def test_monotonic_chain_vs_previous_retained(self):
        result = run_one("expect_column_values_to_be_increasing",
                         [1, 5, None, 3, 4])
        # 3 breaks against 5; 4 then compares against 3 and passes.
        assert (result.element_count, result.unexpected_count) == (4, 1)
        assert result.partial_unexpected_list == [3]

    def test_monotonic_non_strict(self):
        assert run_one("expect_column_values_to_be_increasing",
                       [1, 1, 2]).success
        assert run_one("expect_column_values_to_be_decreasing",
                       [2, 2, 1]).success

    def test_partial_list_capped_at_20(self):
        result = run_one("expect_column_values_to_be_null", list(range(50)))
        assert result.unexpected_count == 50
        assert len(result.partial_unexpected_list) == 20


class TestAggregates:
    def test_min_between(self):
        result = run_one("expect_column_min_to_be_between", [5, 9, None],
                         min_value=1, max_value=6)
        assert result.success
        assert result.element_count == 2
        assert result.unexpected_count == 0
        assert "observed min 5" in result.note

    def test_failed_aggregate_keeps_unexpected_zero(self):
        result = run_one("expect_column_max_to_be_between", [5, 90],
                         max_value=10)
        assert not result.success
        assert result.unexpected_count == 0

    def test_no_data_fails_with_note(self):
        result = run_one("expect_column_min_to_be_between", [None, None],
                         min_value=0)
        assert not result.success
        assert result.note == "no data"
        assert result.element_count == 0

    def test_mixed_types_fail_with_note(self):
        result = run_one("expect_column_min_to_be_between", [1, "a"],
                         min_value=0)
        assert not result.success
        assert result.note == "mixed types"


class TestErrors:
    def test_bad_regex_is_c010(self):
        with pytest.raises(CheckerError) as exc:
            run_one("expect_column_values_to_match_regex", ["a"], regex="(")
        assert exc.value.code == "C010"

    def test_type_incompatible_params_are_c011(self):
        with pytest.raises(CheckerError) as exc:
            run_one("expect_column_values_to_be_between", [1],
                    min_value="not-a-date")
        assert exc.value.code == "C011"
        with pytest.raises(CheckerError) as exc:
            run_one("expect_column_values_to_be_of_type", [1], type_="float64")
        assert exc.value.code == "C011"

    @pytest.mark.parametrize("name,kwargs", [
        ("expect_column_values_to_be_of_type", {"type_": 3}),
        ("expect_column_values_to_be_in_type_list", {"type_list": "string"}),
        ("expect_column_values_to_be_in_type_list", {"type_list": [1]}),
        ("expect_column_values_to_be_in_set", {"value_set": "abc"}),
        ("expect_column_values_to_not_be_in_set", {"value_set": 5}),
        ("expect_column_values_to_be_between", {"min_value": True}),
        ("expect_column_value_lengths_to_be_between", {"min_value": 1.5}),
        ("expect_column_value_lengths_to_equal", {"value": "four"}),
        ("expect_column_value_lengths_to_equal", {}),
        ("expect_column_values_to_match_regex", {"regex": 9}),
        ("expect_column_values_to_match_regex_list", {"regex_list": []}),
        ("expect_column_min_to_be_between", {"max_value": [1]}),
    ])
    def test_c011_family(self, name, kwargs):
        with pytest.raises(CheckerError) as exc:
            run_one(name, ["a"], **kwargs)
        assert exc.value.code == "C011"

    def test_bad_regex_inside_list_is_c010(self):
        with pytest.raises(CheckerError) as exc:
            run_one("expect_column_values_to_match_regex_list", ["a"],
                    regex_list=["ok", "("])
        assert exc.value.code == "C010"

    def test_missing_column_is_c001(self):
        with pytest.raises(CheckerError) as exc:
            eval_expectation(call("expect_column_values_to_be_unique",
                                  column="ghost"), ds(["a"]))
        assert exc.value.code == "C001"

    def test_generate_only_expectation_is_c020(self):
        source = SourceBinding(name="s", kind=SourceKind.CSVFILE,
                               connection={"path": "x.csv"},
                               columns=[ColumnMeta("c", ColumnType.STRING)])
        bundle = SuiteBundle(source=source, calls=[call(
            "expect_column_kl_divergence_to_be_less_than",
            partition_object="{}", threshold=0.1)])
        with pytest.raises(CheckerError) as exc:
            run_suite(bundle, ds(["a"]))
        assert exc.value.code == "C020"

    def test_suite_rejected_before_any_evaluation(self):
        # A generate-only call later in the suite blocks the whole run,
        # even though an earlier call would itself raise C010.
        source = SourceBinding(name="s", kind=SourceKind.CSVFILE,
                               connection={"path": "x.csv"},
                               columns=[ColumnMeta("c", ColumnType.STRING)])
        bundle = SuiteBundle(source=source, calls=[
            call("expect_column_values_to_match_regex", regex="("),
            call("expect_column_mean_to_be_between", min_value=0),
        ])
        with pytest.raises(CheckerError) as exc:
            run_suite(bundle, ds(["a"]))
        assert exc.value.code == "C020"


class TestRunSuite:
    def _bundle(self, calls):
        source = SourceBinding(name="users", kind=SourceKind.CSVFILE,
                               connection={"path": "u.csv"},
                               columns=[ColumnMeta("c", ColumnType.STRING)])
        return SuiteBundle(source=source, calls=calls)

    def test_empty_bundle_passes(self):
        report = run_suite(self._bundle([]), ds([]))
        assert report.success
        assert report.results == []

    def test_report_orders_results_by_call_order(self):
        calls = [call("expect_column_values_to_not_be_null"),
                 call("expect_column_values_to_be_unique")]
        report = run_suite(self._bundle(calls), ds(["a", "a"]))
        assert [r.call.name for r in report.results] == [c.name for c in calls]
        assert not report.success

    def test_json_serialization_schema(self):
        calls = [call("expect_column_values_to_be_unique")]
        report = run_suite(self._bundle(calls),
                           ds([datetime.date(2024, 1, 1),
                               datetime.date(2024, 1, 1)]))
        import json

        doc = json.loads(report.to_json())
        assert set(doc) == {"suite", "success", "results"}
        entry = doc["results"][0]
        assert entry["partial_unexpected_list"] == ["2024-01-01", "2024-01-01"]
        assert set(entry) >= {"expectation", "column", "success",
                              "element_count", "unexpected_count",
                              "partial_unexpected_list"}


SCALARS = st.one_of(
    st.integers(-5, 5),
    st.text(alphabet="abcxyz", max_size=3),
    st.booleans(),
    st.dates(min_value=datetime.date(2020, 1, 1),
             max_value=datetime.date(2024, 12, 31)),
)
CELLS = st.lists(st.one_of(st.none(), SCALARS), max_size=40)


@settings(max_examples=200, deadline=None)
@given(CELLS)
def test_complement_law_null_family(cells):
    be_null = run_one("expect_column_values_to_be_null", cells)
    not_null = run_one("expect_column_values_to_not_be_null", cells)
    assert be_null.unexpected_count + not_null.unexpected_count == len(cells)


@settings(max_examples=200, deadline=None)
@given(st.lists(SCALARS, max_size=30),
       st.lists(st.one_of(st.integers(-5, 5),
                          st.text(alphabet="abcxyz", max_size=3)), max_size=5))
def test_set_law_on_null_free_columns(cells, members):
    in_set = run_one("expect_column_values_to_be_in_set", cells,
                     value_set=members)
    not_in = run_one("expect_column_values_to_not_be_in_set", cells,
                     value_set=members)
    assert in_set.element_count == not_in.element_count == len(cells)
    assert in_set.unexpected_count + not_in.unexpected_count == len(cells)


@settings(max_examples=150, deadline=None)
@given(CELLS, st.integers(0, 4))
def test_monotone_pass_appending_satisfying_row(cells, fill):
    # A row satisfying a row-level expectation never flips it to failing.
    result_before = run_one("expect_column_value_lengths_to_be_between",
                            cells, min_value=0, max_value=30)
    appended = cells + ["x" * fill]
    result_after = run_one("expect_column_value_lengths_to_be_between",
                           appended, min_value=0, max_value=30)
    if result_before.success:
        assert result_after.success


def test_oracle_equivalence_sample():
    # A fast slice of the full acceptance sweep.
    rng = random.Random(1)
    for name in sorted(CORE_EXPECTATIONS):
        for _ in range(10):
            kwargs, cells = random_case(name, rng)
            mine = run_one(name, cells, **kwargs)
            expected = oracle_eval(name, kwargs, cells)
            assert (mine.success, mine.element_count,
                    mine.unexpected_count) == expected, (name, kwargs, cells)

import json
import re

import pytest

from daqforge.codegen import (
    GeneratedFile,
    MissingBinding,
    Template,
    TemplateError,
    ValidationFailed,
    generate_all,
    generate_suite,
    py_literal,
    render,
)
from daqforge.mapper import collect_suites
from daqforge.parser import parse_model


class TestRender:
    def test_single_placeholder(self):
        assert render(Template("t", "{table}"), {"table": "userinfo"}) == "userinfo"

    def test_no_slots_is_identity(self):
        assert render(Template("t", "no slots"), {}) == "no slots"

    def test_missing_binding_lists_all_unresolved(self):
        with pytest.raises(MissingBinding) as exc:
            render(Template("t", "{a}{missing}{also_missing}"), {"a": "x"})
        assert exc.value.names == ["missing", "also_missing"]

    def test_brace_escapes(self):
        assert render(Template("t", "a {{b}} {x} {{{x}}}"), {"x": "1"}) \
            == "a {b} 1 {1}"

    def test_stray_brace_is_an_error(self):
        with pytest.raises(TemplateError):
            render(Template("t", "oops }"), {})
        with pytest.raises(TemplateError):
            render(Template("t", "{Bad}"), {})  # uppercase is not a placeholder

    def test_no_placeholder_syntax_survives(self):
        out = render(Template("t", "{a} and {b}"), {"a": "{c}", "b": "y"})
        # Bindings are not re-scanned; the substituted text is literal.
        assert out == "{c} and y"


@pytest.mark.parametrize("value,expected", [
    (True, "True"),
    (5, "5"),
    (2.5, "2.5"),
    ("x", '"x"'),
    ('say "hi"', '"say \\"hi\\""'),
    ([1, "a"], '[1, "a"]'),
])
def test_py_literal(value, expected):
    assert py_literal(value) == expected


def _users_bundle(adw_model):
    return collect_suites(adw_model)[0]


class TestGenerateSuite:
    def test_worked_example_fragments(self, adw_model):
        gen = generate_suite(_users_bundle(adw_model))
        assert gen.path == "check_users.py"
        assert 'expect_column_values_to_be_unique(column="username")' \
            in gen.contents
        assert '"userinfo"' in gen.contents

    def test_calls_appear_exactly_once_in_order(self, adw_model):
        bundle = _users_bundle(adw_model)
        gen = generate_suite(bundle)
        positions = []
        for call in bundle.calls:
            needle = f"batch.{call.name}(column=\"{call.column}\""
            assert gen.contents.count(needle) == 1
            positions.append(gen.contents.index(needle))
        assert positions == sorted(positions)

    def test_zero_call_bundle_is_vacuous_script(self, adw_model):
        bundle = _users_bundle(adw_model)
        empty = type(bundle)(source=bundle.source, calls=[])
        gen = generate_suite(empty)
        assert "results = []" in gen.contents
        assert "results.append" not in gen.contents
        compile(gen.contents, gen.path, "exec")  # still a valid script

    def test_deterministic_checksums(self, adw_model):
        first = generate_suite(_users_bundle(adw_model))
        second = generate_suite(_users_bundle(adw_model))
        assert first.checksum == second.checksum
        assert first == second

    def test_no_placeholder_syntax_survives(self, adw_model, quality_gate_model):
        for model in (adw_model, quality_gate_model):
            for bundle in collect_suites(model):
                gen = generate_suite(bundle)
                assert re.search(r"\{[a-z_][a-z0-9_]*\}", gen.contents) is None

    def test_single_trailing_newline_and_lf_only(self, adw_model):
        gen = generate_suite(_users_bundle(adw_model))
        assert gen.contents.endswith("\n")
        assert not gen.contents.endswith("\n\n")
        assert "\r" not in gen.contents

    def test_generated_scripts_are_valid_python(self, adw_model,
                                                quality_gate_model,
                                                event_log_model):
        for model in (adw_model, quality_gate_model, event_log_model):
            for bundle in collect_suites(model):
                gen = generate_suite(bundle)
                compile(gen.contents, gen.path, "exec")

    def test_control_characters_in_params_stay_valid_python(self):
        from daqforge.mapper import ExpectationCall, SuiteBundle
        from daqforge.model import ColumnMeta, ColumnType, SourceBinding, SourceKind

        source = SourceBinding(name="s", kind=SourceKind.CSVFILE,
                               connection={"path": 'we"ird\npath'},
                               columns=[ColumnMeta("c", ColumnType.STRING)])
        bundle = SuiteBundle(source=source, calls=[ExpectationCall(
            "expect_column_values_to_match_regex", "c",
            {"regex": 'a\nb\t"c\\d'})])
        gen = generate_suite(bundle)
        compile(gen.contents, gen.path, "exec")
        assert "\\n" in gen.contents

    def test_random_model_scripts_compile(self):
        import random

        from genmodels import random_model
        from daqforge.model import Level

        rng = random.Random(606)
        seen = 0
        for i in range(40):
            model = random_model(rng, i)
            if model.level is not Level.LLA:
                continue
            for bundle in collect_suites(model):
                gen = generate_suite(bundle)
                compile(gen.contents, gen.path, "exec")
                seen += 1
        assert seen > 10

    def test_batch_acquisition_matches_source_kind(self, adw_model,
                                                   quality_gate_model,
                                                   event_log_model):
        mysql = generate_suite(collect_suites(adw_model)[0])
        assert "create_engine" in mysql.contents
        assert 'table_name="userinfo"' in mysql.contents
        csv = generate_suite(collect_suites(quality_gate_model)[0])
        assert 'ge.read_csv("orders.csv")' in csv.contents
        jsonf = generate_suite(collect_suites(event_log_model)[0])
        assert 'ge.read_json("events.json")' in jsonf.contents


class TestGenerateAll:
    def test_golden_tree(self, adw_model, golden_dir, tmp_path):
        files = generate_all(adw_model, tmp_path)
        assert [f.path for f in files] == ["check_users.py"]
        for name in ("check_users.py", "manifest.json"):
            assert (tmp_path / name).read_bytes() == \
                (golden_dir / "gen_adw" / name).read_bytes()

    def test_manifest_schema(self, adw_model, tmp_path):
        generate_all(adw_model, tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert set(manifest) == {"files"}
        for entry in manifest["files"]:
            assert set(entry) == {"path", "sha256"}
            assert re.fullmatch("[0-9a-f]{64}", entry["sha256"])

    def test_no_verify_model_yields_empty_manifest(self, odw_model, tmp_path):
        files = generate_all(odw_model, tmp_path)
        assert files == []
        assert sorted(p.name for p in tmp_path.iterdir()) == ["manifest.json"]
        assert json.loads((tmp_path / "manifest.json").read_text()) == \
            {"files": []}

    def test_rerun_rewrites_nothing(self, adw_model, tmp_path):
        generate_all(adw_model, tmp_path)
        before = {p.name: (p.stat().st_mtime_ns, p.stat().st_ino)
                  for p in tmp_path.iterdir()}
        generate_all(adw_model, tmp_path)
        after = {p.name: (p.stat().st_mtime_ns, p.stat().st_ino)
                 for p in tmp_path.iterdir()}
        assert before == after

    def test_two_runs_produce_identical_trees(self, adw_model, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        generate_all(adw_model, a_dir)
        generate_all(adw_model, b_dir)
        a_files = sorted(p.name for p in a_dir.iterdir())
        assert a_files == sorted(p.name for p in b_dir.iterdir())
        for name in a_files:
            assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()

    def test_validation_errors_abort_before_any_write(self, tmp_path):
        model = parse_model(
            "architecture m level LLA { node a { port in p; } }").model
        out = tmp_path / "never"
        with pytest.raises(ValidationFailed) as exc:
            generate_all(model, out)
        assert [d.code for d in exc.value.diagnostics] == ["R003"]
        assert not out.exists()

    def test_template_directory_override(self, adw_model, tmp_path):
        custom = tmp_path / "templates"
        custom.mkdir()
        for name in ("check_suite.py.tmpl", "batch_mysql.tmpl",
                     "batch_csvfile.tmpl", "batch_jsonfile.tmpl",
                     "expectation_call.tmpl"):
            src = (__import__("daqforge.codegen", fromlist=["x"])
                   .DEFAULT_TEMPLATE_DIR / name).read_text()
            (custom / name).write_text(src.replace(
                "Generated by daqforge", "Generated by a custom template"))
        out = tmp_path / "out"
        files = generate_all(adw_model, out, templates_dir=custom)
        assert "Generated by a custom template" in files[0].contents


def test_generated_file_checksum_matches_contents(adw_model):
    import hashlib

    gen = generate_suite(_users_bundle(adw_model))
    assert isinstance(gen, GeneratedFile)
    assert gen.checksum == hashlib.sha256(
        gen.contents.encode("utf-8")).hexdigest()

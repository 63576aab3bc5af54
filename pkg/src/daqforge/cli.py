"""Command-line interface: the whole pipeline behind one binary.

Subcommands mirror the pipeline stages: ``check`` (parse + validate),
``gen`` (generate check scripts), ``run`` (execute a suite natively
against a table), ``dot`` (diagram), ``import-xmi`` / ``export-xmi``
(model interchange), and ``mapper`` (print the dimension table).

Contract: diagnostics go to stderr, payload to stdout when ``-o`` is
omitted; exit status is 0 on success, 1 when executed checks fail, and 2
on usage or validation errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

from daqforge import codegen, diagnostics, dot, mapper, printer, validator, xmi
from daqforge.checker import CheckerError, run_suite
from daqforge.dataset import DataError, load_table
from daqforge.mapper import QualityMapError, collect_suites
from daqforge.model import ArchitectureModel, Level, SourceKind
from daqforge.parser import parse_model

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class _Output:
    def __init__(self, args: argparse.Namespace):
        self.as_json = getattr(args, "json", False)
        self.quiet = getattr(args, "quiet", False)

    def diagnostics(self, diags, filename: str) -> None:
        shown = diags if not self.quiet else [
            d for d in diags if d.severity is diagnostics.Severity.ERROR]
        if not shown:
            return
        if self.as_json:
            print(diagnostics.to_json(shown, filename), file=sys.stderr)
        else:
            for line in diagnostics.render_all(shown, filename):
                print(line, file=sys.stderr)

    def info(self, message: str) -> None:
        if not self.quiet:
            print(message)

    def fail(self, message: str) -> None:
        print(f"error: {message}", file=sys.stderr)


def _read_text(path: str, out: _Output) -> Optional[str]:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        out.fail(str(exc))
        return None


def _load_model(path: str, out: _Output) -> Optional[ArchitectureModel]:
    text = _read_text(path, out)
    if text is None:
        return None
    result = parse_model(text)
    out.diagnostics(result.diagnostics, path)
    return result.model


def _validated_model(path: str, out: _Output) -> Optional[ArchitectureModel]:
    model = _load_model(path, out)
    if model is None:
        return None
    diags = validator.validate(model)
    out.diagnostics(diags, path)
    if diagnostics.has_errors(diags):
        return None
    return model


def _write_payload(text: str, out_path: Optional[str]) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


# -- subcommands -------------------------------------------------------------

def _cmd_check(args) -> int:
    out = _Output(args)
    model = _validated_model(args.file, out)
    if model is None:
        return EXIT_USAGE
    counts = f"{len(model.nodes)} node(s), {len(model.connections)} connection(s)"
    out.info(f"{args.file}: ok ({model.level.value}, {counts})")
    return EXIT_OK


def _cmd_gen(args) -> int:
    out = _Output(args)
    model = _load_model(args.file, out)
    if model is None:
        return EXIT_USAGE
    templates = args.templates or os.environ.get("DAQFORGE_TEMPLATES")
    try:
        files = codegen.generate_all(model, Path(args.out),
                                     Path(templates) if templates else None)
    except codegen.ValidationFailed as exc:
        out.diagnostics(exc.diagnostics, args.file)
        return EXIT_USAGE
    except (QualityMapError,) as exc:
        out.diagnostics(exc.diagnostics, args.file)
        return EXIT_USAGE
    except (codegen.TemplateError, OSError) as exc:
        out.fail(str(exc))
        return EXIT_USAGE
    for gen in files:
        out.info(f"generated {Path(args.out) / gen.path}")
    out.info(f"generated {Path(args.out) / 'manifest.json'}")
    return EXIT_OK


def _infer_table_kind(data_path: str, source_kind: SourceKind) -> SourceKind:
    suffix = Path(data_path).suffix.lower()
    if suffix == ".csv":
        return SourceKind.CSVFILE
    if suffix == ".json":
        return SourceKind.JSONFILE
    return source_kind


def _cmd_run(args) -> int:
    out = _Output(args)
    model = _validated_model(args.file, out)
    if model is None:
        return EXIT_USAGE
    binding = model.source(args.source)
    if binding is None:
        out.fail(f"model declares no source named '{args.source}'")
        return EXIT_USAGE
    try:
        bundles = collect_suites(model)
    except QualityMapError as exc:
        out.diagnostics(exc.diagnostics, args.file)
        return EXIT_USAGE
    bundle = next((b for b in bundles if b.source.name == args.source), None)
    if bundle is None:
        out.fail(f"no verify rules target source '{args.source}'")
        return EXIT_USAGE

    kind = _infer_table_kind(args.data, binding.kind)
    try:
        data = load_table(args.data, kind, binding.columns, name=binding.name)
        report = run_suite(bundle, data)
    except (DataError, CheckerError) as exc:
        out.fail(f"[{exc.code}] {exc}")
        return EXIT_USAGE
    sys.stdout.write(report.to_json() + "\n")
    return EXIT_OK if report.success else EXIT_CHECK_FAILED


def _cmd_dot(args) -> int:
    out = _Output(args)
    model = _load_model(args.file, out)
    if model is None:
        return EXIT_USAGE
    level = Level(args.level.upper()) if args.level else model.level
    diags = validator.validate(model)
    out.diagnostics(diags, args.file)
    if diagnostics.has_errors(diags):
        return EXIT_USAGE
    try:
        text = dot.to_dot(model, level)
    except dot.LevelMismatchError as exc:
        out.diagnostics([exc.diagnostic], args.file)
        return EXIT_USAGE
    _write_payload(text, args.out)
    return EXIT_OK


def _cmd_import_xmi(args) -> int:
    out = _Output(args)
    text = _read_text(args.file, out)
    if text is None:
        return EXIT_USAGE
    result = xmi.import_xmi(text)
    out.diagnostics(result.diagnostics, args.file)
    if result.model is None:
        return EXIT_USAGE
    _write_payload(printer.pretty_print(result.model), args.out)
    return EXIT_OK


def _cmd_export_xmi(args) -> int:
    out = _Output(args)
    model = _load_model(args.file, out)
    if model is None:
        return EXIT_USAGE
    _write_payload(xmi.export_xmi(model), args.out)
    return EXIT_OK


def _cmd_mapper(args) -> int:
    out = _Output(args)
    pairs = mapper.mapper_table()
    if out.as_json:
        import json

        sys.stdout.write(json.dumps(
            [{"dimension": dim.value, "expectation": name}
             for dim, name in pairs], indent=2) + "\n")
    else:
        for dim, name in pairs:
            sys.stdout.write(f"{dim.value}\t{name}\n")
    return EXIT_OK


# -- wiring -------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="emit machine-readable diagnostics")
    common.add_argument("--quiet", action="store_true",
                        help="suppress informational output and warnings")

    parser = argparse.ArgumentParser(
        prog="daqforge",
        description="Data-architecture modeling and data-quality toolchain.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common],
                       help="parse and validate a model")
    p.add_argument("file")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("gen", parents=[common],
                       help="generate check scripts for every data source")
    p.add_argument("file")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--templates", help="override the template directory")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("run", parents=[common],
                       help="run a source's checks natively against a table")
    p.add_argument("file")
    p.add_argument("--source", required=True)
    p.add_argument("--data", required=True, help="CSV or JSON table file")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("dot", parents=[common],
                       help="render the model as a DOT graph")
    p.add_argument("file")
    p.add_argument("--level", choices=["hla", "lla"])
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_dot)

    p = sub.add_parser("import-xmi", parents=[common],
                       help="convert an XMI document to DSL text")
    p.add_argument("file")
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_import_xmi)

    p = sub.add_parser("export-xmi", parents=[common],
                       help="convert a DSL model to an XMI document")
    p.add_argument("file")
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_export_xmi)

    p = sub.add_parser("mapper", parents=[common],
                       help="print the dimension-to-expectation table")
    p.set_defaults(func=_cmd_mapper)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return args.func(args)


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()

"""Template-based generation of runnable check scripts.

One script per suite bundle, in the Great Expectations dialect, plus a
``manifest.json`` listing every generated path with its SHA-256.  Output
is byte-deterministic: LF line endings, exactly one trailing newline,
call keyword arguments in signature-table order.  Writes are idempotent,
so unchanged files keep their timestamps.

Templates are plain text with ``{placeholder}`` slots; ``{{`` and ``}}``
escape literal braces.  The shipped set can be overridden by pointing at
a directory with the same file names.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from daqforge.diagnostics import Diagnostic, has_errors
from daqforge.mapper import SIGNATURES, SuiteBundle, collect_suites
from daqforge.model import ArchitectureModel, ParamValue, SourceKind
from daqforge.validator import validate

DEFAULT_TEMPLATE_DIR = Path(__file__).parent / "templates"

_PLACEHOLDER_RE = re.compile(r"\{\{|\}\}|\{[a-z_][a-z0-9_]*\}|[{}]")


@dataclass(frozen=True)
class Template:
    name: str
    body: str


@dataclass(frozen=True)
class GeneratedFile:
    path: str
    contents: str
    checksum: str


class TemplateError(Exception):
    pass


class MissingBinding(TemplateError):
    """A placeholder had no binding; names every unresolved one."""

    def __init__(self, template: str, names: list[str]):
        self.names = names
        super().__init__(
            f"template '{template}' has unbound placeholder(s): "
            + ", ".join(names))


class ValidationFailed(Exception):
    """Generation refused because the model has validation errors."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__(f"{len(diagnostics)} diagnostic(s)")


def render(template: Template, bindings: dict[str, str]) -> str:
    """Substitute every placeholder; missing names raise MissingBinding."""
    out: list[str] = []
    missing: list[str] = []
    pos = 0
    for match in _PLACEHOLDER_RE.finditer(template.body):
        out.append(template.body[pos:match.start()])
        pos = match.end()
        piece = match.group()
        if piece == "{{":
            out.append("{")
        elif piece == "}}":
            out.append("}")
        elif piece in ("{", "}"):
            raise TemplateError(
                f"template '{template.name}': stray '{piece}' at offset "
                f"{match.start()} (use '{piece}{piece}' for a literal brace)")
        else:
            name = piece[1:-1]
            if name in bindings:
                out.append(bindings[name])
            elif name not in missing:
                missing.append(name)
    out.append(template.body[pos:])
    if missing:
        raise MissingBinding(template.name, missing)
    return "".join(out)


def load_template(name: str, templates_dir: Optional[Path] = None) -> Template:
    directory = Path(templates_dir) if templates_dir else DEFAULT_TEMPLATE_DIR
    return Template(name, (directory / name).read_text(encoding="utf-8"))


_PY_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t",
                      "\r": "\\r"}


def _escape_py_string(text: str) -> str:
    return "".join(_PY_STRING_ESCAPES.get(ch, ch) for ch in text)


def py_literal(value: ParamValue) -> str:
    """Python source literal for an expectation kwarg; strings use double
    quotes so generated calls match the batch-argument style."""
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"non-finite number {value!r} cannot be emitted")
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return '"' + _escape_py_string(value) + '"'
    if isinstance(value, list):
        return "[" + ", ".join(py_literal(v) for v in value) + "]"
    raise TypeError(f"unsupported kwarg value: {value!r}")


_BATCH_TEMPLATES = {
    SourceKind.MYSQL: "batch_mysql.tmpl",
    SourceKind.CSVFILE: "batch_csvfile.tmpl",
    SourceKind.JSONFILE: "batch_jsonfile.tmpl",
}


def generate_suite(bundle: SuiteBundle,
                   templates_dir: Optional[Path] = None) -> GeneratedFile:
    """Render one runnable check script for a suite bundle."""
    source = bundle.source
    batch_template = load_template(_BATCH_TEMPLATES[source.kind], templates_dir)
    batch_bindings = {key: _escape_py_string(value)
                      for key, value in source.connection.items()}
    batch_body = render(batch_template, batch_bindings).rstrip("\n")

    call_template = load_template("expectation_call.tmpl", templates_dir)
    lines = []
    for call in bundle.calls:
        sig = SIGNATURES[call.name]
        arguments = [f'column="{_escape_py_string(call.column)}"']
        for keyword in sig.param_order():
            if keyword in call.kwargs:
                arguments.append(f"{keyword}={py_literal(call.kwargs[keyword])}")
        lines.append(render(call_template, {
            "expectation": call.name,
            "arguments": ", ".join(arguments),
        }))
    expectation_lines = "".join(line if line.endswith("\n") else line + "\n"
                                for line in lines)

    suite_template = load_template("check_suite.py.tmpl", templates_dir)
    contents = render(suite_template, {
        "source_name": _escape_py_string(source.name),
        "batch_body": batch_body,
        "expectation_lines": expectation_lines,
    })
    contents = contents.rstrip("\n") + "\n"
    checksum = hashlib.sha256(contents.encode("utf-8")).hexdigest()
    return GeneratedFile(path=f"check_{source.name}.py", contents=contents,
                         checksum=checksum)


def write_if_changed(path: Path, contents: str) -> bool:
    """Write UTF-8/LF text only when it differs; returns True on write."""
    data = contents.encode("utf-8")
    if path.exists() and path.read_bytes() == data:
        return False
    path.write_bytes(data)
    return True


def generate_all(model: ArchitectureModel, out_dir: Path,
                 templates_dir: Optional[Path] = None) -> list[GeneratedFile]:
    """Generate every suite script plus the manifest into ``out_dir``.

    Validation errors abort before anything is written.  Returns the
    manifest as GeneratedFile records, in bundle order.
    """
    diags = validate(model)
    if has_errors(diags):
        raise ValidationFailed(diags)

    files = [generate_suite(bundle, templates_dir)
             for bundle in collect_suites(model)]

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for gen in files:
        write_if_changed(out / gen.path, gen.contents)
    manifest = {"files": [{"path": g.path, "sha256": g.checksum} for g in files]}
    write_if_changed(out / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return files

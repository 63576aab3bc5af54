"""daqforge: data-architecture modeling and data-quality toolchain.

Parse textual or XMI architecture models, validate them against the
two-level metamodel, map declared quality dimensions onto named
expectations, generate runnable check scripts, and execute the core
expectation subset natively against CSV/JSON tables.
"""

from daqforge.model import ArchitectureModel, Level, behavior_order, complexity
from daqforge.parser import ParseResult, parse_model
from daqforge.printer import pretty_print
from daqforge.validator import validate, validate_level
from daqforge.mapper import collect_suites, mapper_table, resolve_rule
from daqforge.codegen import generate_all, generate_suite, render
from daqforge.dataset import Dataset, load_table
from daqforge.checker import eval_expectation, run_suite
from daqforge.dot import to_dot
from daqforge.xmi import export_xmi, import_xmi

__version__ = "0.1.0"

__all__ = [
    "ArchitectureModel",
    "Dataset",
    "Level",
    "ParseResult",
    "behavior_order",
    "collect_suites",
    "complexity",
    "eval_expectation",
    "export_xmi",
    "generate_all",
    "generate_suite",
    "import_xmi",
    "load_table",
    "mapper_table",
    "parse_model",
    "pretty_print",
    "render",
    "resolve_rule",
    "run_suite",
    "to_dot",
    "validate",
    "validate_level",
]

"""
Command line interface: input documents, built-in examples, check suites and
deterministic reports.
"""

from .document import (SpecDocument, SpecError, SpecSyntaxError, UnknownField, RangeError,
                       parse_spec, normalize, dump_document)
from .examples import list_examples, load_example
from .suites import SUITES, InputError
from .main import Report, run_command, main

__all__ = ["SpecDocument", "SpecError", "SpecSyntaxError", "UnknownField", "RangeError",
           "parse_spec", "normalize", "dump_document", "list_examples", "load_example",
           "SUITES", "InputError", "Report", "run_command", "main"]

"""A small proof checker for homotopy type theory with a corpus on 2-adjoint equivalences."""

from .checker import Checker, Context, Report, Signature, TypeCheckError, check_module
from .core import Declaration, Term, alpha_equal, shift
from .evaluator import conv, eval_term, readback
from .surface import LexError, ParseError, SourceModule, parse_file, parse_module, parse_source, print_any, tokenize

__all__ = [
    "Checker",
    "Context",
    "Declaration",
    "LexError",
    "ParseError",
    "Report",
    "Signature",
    "SourceModule",
    "Term",
    "TypeCheckError",
    "alpha_equal",
    "check_module",
    "conv",
    "eval_term",
    "parse_file",
    "parse_module",
    "parse_source",
    "print_any",
    "readback",
    "shift",
    "tokenize",
]

from reqcheck.frontend.diagnostics import ParseDiagnostic, Severity
from reqcheck.frontend.elaborate import elaborate, load_model
from reqcheck.frontend.parser import parse_expression, parse_model, parse_routine
from reqcheck.frontend.printer import print_expression, print_model, print_routine, print_statement

__all__ = [
    "ParseDiagnostic", "Severity", "elaborate", "load_model", "parse_expression",
    "parse_model", "parse_routine", "print_expression", "print_model",
    "print_routine", "print_statement",
]

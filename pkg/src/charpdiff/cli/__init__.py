"""Command-line front end: expression language, rendering, map files."""

from .expr import ParseError, eval_expr, evaluate, parse_expr
from .main import main
from .render import render_value

__all__ = ["ParseError", "eval_expr", "evaluate", "main", "parse_expr", "render_value"]

"""Minimal arithmetic expressions in the single variable n.

Grammar: numbers, the names n / e / pi, the operators + - * / ^ (also **),
unary minus, and the calls exp(...) and log(...).  Anything else is
rejected up front so config files stay auditable.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ArgumentError

_ALLOWED_NAMES = {"n", "e", "pi"}
_ALLOWED_CALLS = {"exp", "log"}
_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)

_ENV = {
    "e": math.e,
    "pi": math.pi,
    "exp": np.exp,
    "log": np.log,
}


def _check_node(node: ast.AST, text: str) -> None:
    if isinstance(node, ast.Expression):
        _check_node(node.body, text)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_BINOPS):
            raise ArgumentError(f"operator not allowed in expression {text!r}")
        _check_node(node.left, text)
        _check_node(node.right, text)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _ALLOWED_UNARY):
            raise ArgumentError(f"operator not allowed in expression {text!r}")
        _check_node(node.operand, text)
    elif isinstance(node, ast.Call):
        if (not isinstance(node.func, ast.Name)
                or node.func.id not in _ALLOWED_CALLS
                or node.keywords or len(node.args) != 1):
            raise ArgumentError(f"only exp(.) and log(.) calls allowed, got {text!r}")
        _check_node(node.args[0], text)
    elif isinstance(node, ast.Name):
        if node.id not in _ALLOWED_NAMES:
            raise ArgumentError(f"unknown name {node.id!r} in expression {text!r}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ArgumentError(f"non-numeric constant in expression {text!r}")
    else:
        raise ArgumentError(f"construct not allowed in expression {text!r}")


@dataclass(frozen=True)
class SymbolicExpr:
    """A compiled expression of n, callable on scalars or arrays."""

    text: str
    _code: Any = field(repr=False, compare=False)

    def __call__(self, n):
        scalar = np.isscalar(n)
        arr = float(n) if scalar else np.asarray(n, dtype=float)
        scope = dict(_ENV)
        scope["n"] = arr
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            out = eval(self._code, {"__builtins__": {}}, scope)
        if scalar:
            return float(out)
        # constant expressions must still broadcast to the input shape
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(arr)).copy()

    def to_config(self) -> str:
        return self.text


def parse_expr(text: str) -> SymbolicExpr:
    if not isinstance(text, str) or not text.strip():
        raise ArgumentError("expression must be a non-empty string")
    rewritten = text.replace("^", "**")
    try:
        tree = ast.parse(rewritten, mode="eval")
    except SyntaxError as exc:
        raise ArgumentError(f"cannot parse expression {text!r}: {exc.msg}") from None
    _check_node(tree, text)
    code = compile(tree, "<expr>", "eval")
    return SymbolicExpr(text=text, _code=code)

"""Tiny arithmetic expression grammar for CLI-supplied functions.

Supports the variable ``x``, numeric literals, ``+ - * /``, powers (``**``
or ``^``), unary sign, parentheses and the functions ``abs``, ``sin``,
``cos``, ``exp``.  Expressions are parsed with :mod:`ast` and validated
against a whitelist, so arbitrary code never executes.
"""

from __future__ import annotations

import ast
import math
from typing import Callable

from .errors import InvalidArgumentError

_FUNCTIONS = {"abs": abs, "sin": math.sin, "cos": math.cos, "exp": math.exp}

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_UNARYOPS = (ast.UAdd, ast.USub)


def _validate(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _BINOPS):
            raise InvalidArgumentError(
                f"operator {type(node.op).__name__} is not part of the grammar"
            )
        _validate(node.left)
        _validate(node.right)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _UNARYOPS):
            raise InvalidArgumentError("only unary plus and minus are allowed")
        _validate(node.operand)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise InvalidArgumentError("only abs, sin, cos and exp may be called")
        if len(node.args) != 1 or node.keywords:
            raise InvalidArgumentError("functions take exactly one argument")
        _validate(node.args[0])
    elif isinstance(node, ast.Name):
        if node.id != "x":
            raise InvalidArgumentError(f"unknown name {node.id!r}; the variable is x")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise InvalidArgumentError("only numeric literals are allowed")
    else:
        raise InvalidArgumentError(
            f"syntax element {type(node).__name__} is not part of the grammar"
        )


def _evaluate(node: ast.AST, x: float) -> float:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, x)
    if isinstance(node, ast.BinOp):
        a = _evaluate(node.left, x)
        b = _evaluate(node.right, x)
        op = node.op
        if isinstance(op, ast.Add):
            return a + b
        if isinstance(op, ast.Sub):
            return a - b
        if isinstance(op, ast.Mult):
            return a * b
        if isinstance(op, ast.Div):
            return a / b
        out = a**b  # Pow
        if isinstance(out, complex):
            raise InvalidArgumentError(
                f"fractional power of a negative number at base {a!r}"
            )
        return out
    if isinstance(node, ast.UnaryOp):
        v = _evaluate(node.operand, x)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call):
        return _FUNCTIONS[node.func.id](_evaluate(node.args[0], x))
    if isinstance(node, ast.Name):
        return x
    return float(node.value)  # Constant


def parse_expression(text: str) -> Callable[[float], float]:
    """Compile an expression in ``x`` into a scalar function."""
    # caret powers follow the usual math precedence, like **
    text = text.replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise InvalidArgumentError(f"cannot parse expression: {exc.msg}") from exc
    _validate(tree)

    def fn(x: float) -> float:
        return float(_evaluate(tree, float(x)))

    return fn

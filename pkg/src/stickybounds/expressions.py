"""Radial weight-profile expressions.

Weight profiles are entered as closed-form expressions in the single radial
variable ``r``, using +, -, *, /, ^ (or **), the functions exp, log, sin,
cos, sqrt, sinh, cosh, tanh, and the constants pi and e.  Parsing goes
through :mod:`ast` against a strict whitelist, after rewriting ``^`` to
``**`` so that ``-r^2`` means ``-(r^2)`` as in mathematical notation rather
than Python's XOR precedence.

Expressions are differentiated symbolically.  This matters for correctness
downstream: the derivative of a constant profile must be exactly 0.0 so that
the logarithmic-gradient profile |beta'|/beta vanishes identically for
constant weights instead of carrying finite-difference noise.
"""

from __future__ import annotations

import ast
import math

import numpy as np

__all__ = ["ExpressionError", "parse", "evaluate", "derivative", "compile_expr"]


class ExpressionError(ValueError):
    """Raised when a profile expression is outside the supported grammar."""


_CONSTANTS = {"pi": math.pi, "e": math.e}

_FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
}

# Derivatives of the unary functions, as expression-tree builders acting on
# the inner tree u (chain rule factor d/du of each function).
_FUNC_DERIVS = {
    "exp": lambda u: ("call", "exp", u),
    "log": lambda u: ("/", ("num", 1.0), u),
    "sin": lambda u: ("call", "cos", u),
    "cos": lambda u: ("neg", ("call", "sin", u)),
    "sqrt": lambda u: ("/", ("num", 0.5), ("call", "sqrt", u)),
    "sinh": lambda u: ("call", "cosh", u),
    "cosh": lambda u: ("call", "sinh", u),
    "tanh": lambda u: ("/", ("num", 1.0), ("pow", ("call", "cosh", u), ("num", 2.0))),
}


def parse(source: str):
    """Parse an expression string into the internal tree form.

    The tree is built from tuples: ("num", c), ("var",), ("neg", a),
    ("+"|"-"|"*"|"/"|"pow", a, b), ("call", name, a).
    """
    if not isinstance(source, str) or not source.strip():
        raise ExpressionError("empty profile expression")
    try:
        node = ast.parse(source.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse profile expression {source!r}: {exc}") from None
    return _convert(node.body, source)


def _convert(node, source):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return ("num", float(node.value))
        raise ExpressionError(f"non-numeric constant in {source!r}")
    if isinstance(node, ast.Name):
        if node.id == "r":
            return ("var",)
        if node.id in _CONSTANTS:
            return ("num", _CONSTANTS[node.id])
        raise ExpressionError(f"unknown name {node.id!r} in {source!r} (only r, pi, e)")
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.USub):
            return ("neg", _convert(node.operand, source))
        if isinstance(node.op, ast.UAdd):
            return _convert(node.operand, source)
        raise ExpressionError(f"unsupported unary operator in {source!r}")
    if isinstance(node, ast.BinOp):
        ops = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/", ast.Pow: "pow"}
        kind = ops.get(type(node.op))
        if kind is None:
            raise ExpressionError(f"unsupported operator in {source!r}")
        return (kind, _convert(node.left, source), _convert(node.right, source))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ExpressionError(f"unsupported function call in {source!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument in {source!r}")
        return ("call", node.func.id, _convert(node.args[0], source))
    raise ExpressionError(f"unsupported syntax in {source!r}")


def evaluate(expr, r):
    """Evaluate a parsed tree at r (scalar or ndarray)."""
    kind = expr[0]
    if kind == "num":
        return expr[1] if np.isscalar(r) else np.full(np.shape(r), expr[1])
    if kind == "var":
        return r
    if kind == "neg":
        return -evaluate(expr[1], r)
    if kind == "call":
        return _FUNCTIONS[expr[1]](evaluate(expr[2], r))
    if kind not in ("+", "-", "*", "/", "pow"):
        raise ExpressionError(f"corrupt expression node {expr!r}")
    a = evaluate(expr[1], r)
    b = evaluate(expr[2], r)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if kind == "/":
        return a / b
    return np.power(a, b)


def _is_num(expr, value=None):
    return expr[0] == "num" and (value is None or expr[1] == value)


def _add(a, b):
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if _is_num(a) and _is_num(b):
        return ("num", a[1] + b[1])
    return ("+", a, b)


def _sub(a, b):
    if _is_num(b, 0.0):
        return a
    if _is_num(a) and _is_num(b):
        return ("num", a[1] - b[1])
    if _is_num(a, 0.0):
        return ("neg", b)
    return ("-", a, b)


def _mul(a, b):
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ("num", 0.0)
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if _is_num(a) and _is_num(b):
        return ("num", a[1] * b[1])
    return ("*", a, b)


def _div(a, b):
    if _is_num(a, 0.0):
        return ("num", 0.0)
    if _is_num(b, 1.0):
        return a
    return ("/", a, b)


def derivative(expr):
    """Symbolic d/dr of a parsed tree, with light constant folding."""
    kind = expr[0]
    if kind == "num":
        return ("num", 0.0)
    if kind == "var":
        return ("num", 1.0)
    if kind == "neg":
        d = derivative(expr[1])
        return ("num", 0.0) if _is_num(d, 0.0) else ("neg", d)
    if kind == "+":
        return _add(derivative(expr[1]), derivative(expr[2]))
    if kind == "-":
        return _sub(derivative(expr[1]), derivative(expr[2]))
    if kind == "*":
        a, b = expr[1], expr[2]
        return _add(_mul(derivative(a), b), _mul(a, derivative(b)))
    if kind == "/":
        a, b = expr[1], expr[2]
        da, db = derivative(a), derivative(b)
        if _is_num(db, 0.0):
            return _div(da, b)
        return _div(_sub(_mul(da, b), _mul(a, db)), ("pow", b, ("num", 2.0)))
    if kind == "pow":
        a, b = expr[1], expr[2]
        da, db = derivative(a), derivative(b)
        if _is_num(db, 0.0):
            # d/dr a^c = c * a^(c-1) * a'
            if _is_num(da, 0.0):
                return ("num", 0.0)
            c = b[1] if _is_num(b) else None
            if c is not None:
                return _mul(_mul(b, ("pow", a, ("num", c - 1.0))), da)
            return _mul(_mul(b, ("pow", a, _sub(b, ("num", 1.0)))), da)
        # general a^b: a^b * (b' log a + b a'/a)
        inner = _add(_mul(db, ("call", "log", a)), _div(_mul(b, da), a))
        return _mul(("pow", a, b), inner)
    if kind == "call":
        u = expr[2]
        du = derivative(u)
        if _is_num(du, 0.0):
            return ("num", 0.0)
        return _mul(_FUNC_DERIVS[expr[1]](u), du)
    raise ExpressionError(f"corrupt expression node {expr!r}")


def compile_expr(expr):
    """Return a vectorized callable r -> value for a parsed tree."""
    return lambda r: evaluate(expr, np.asarray(r, dtype=float) if not np.isscalar(r) else float(r))

"""Safe arithmetic expressions in the disk variable ``z``.

Only numeric literals, the names below and arithmetic operators are accepted;
attribute access, subscripts and arbitrary calls are rejected before any
evaluation happens.
"""
from __future__ import annotations

import ast
import operator
from typing import Callable

import numpy as np

from .errors import DomainError
from .geometry import OBSERVABLE_FUNCTIONS

__all__ = ["compile_expression"]

_FUNCS: dict[str, Callable] = {
    "abs": np.abs,
    "conj": np.conj,
    "re": np.real,
    "im": np.imag,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "tanh": np.tanh,
    "arg": np.angle,
    **OBSERVABLE_FUNCTIONS,
}
_CONSTS = {"pi": np.pi, "e": np.e, "i": 1j}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _validate(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body)
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float, complex)) or isinstance(node.value, bool):
            raise DomainError(f"unsupported literal {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id != "z" and node.id not in _CONSTS:
            raise DomainError(f"unknown name {node.id!r}")
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise DomainError(f"unsupported operator {type(node.op).__name__}")
        _validate(node.left)
        _validate(node.right)
    elif isinstance(node, ast.UnaryOp):
        if type(node.op) not in _UNOPS:
            raise DomainError(f"unsupported operator {type(node.op).__name__}")
        _validate(node.operand)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords or len(node.args) != 1:
            raise DomainError("only one-argument calls of the listed functions are allowed")
        _validate(node.args[0])
    else:
        raise DomainError(f"unsupported syntax {type(node).__name__}")


def _eval(node: ast.AST, z):
    if isinstance(node, ast.Expression):
        return _eval(node.body, z)
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        return z if node.id == "z" else _CONSTS[node.id]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, z), _eval(node.right, z))
    if isinstance(node, ast.UnaryOp):
        return _UNOPS[type(node.op)](_eval(node.operand, z))
    return _FUNCS[node.func.id](_eval(node.args[0], z))


def compile_expression(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Turn ``text`` (e.g. ``"re(z) * (1 - abs(z)**2)"``) into a vectorised function of ``z``."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse expression {text!r}: {exc.msg}") from exc
    _validate(tree)

    def f(z):
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(np.asarray(_eval(tree, z), dtype=complex), z.shape)

    return f

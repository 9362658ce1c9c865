"""A small expression language for analytic functions of one variable.

Grammar (whitespace is ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | number 'i' | 'i' | VAR | call | '(' expr ')'
    call   := 'exp' '(' expr ')' | 'kernel' '(' expr ';' expr ')'

so ``^`` binds tighter than unary minus (``-z^2 == -(z^2)``) and is right
associative (``z^2^3 == z^(2^3)``).  ``VAR`` is ``z`` for analytic
expressions and ``u`` (standing for ``|z|^2``) for radial densities.
``kernel(alpha; a)`` is ``(1 - conj(a) z)^-(alpha + 2)`` for constant
``alpha >= 0`` and constant ``a`` in the disk.

There is no conjugation, modulus or real-part operator, so every analytic
expression is analytic by construction.
"""

from dataclasses import dataclass
import math
from typing import Tuple, Union

import numpy as np

from .errors import BergmanLabError, ParameterError


class ParseError(BergmanLabError, ValueError):
    """Syntax error at byte ``offset``; ``expected`` lists acceptable tokens."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at byte {offset}{detail}")


class EvalError(BergmanLabError, ArithmeticError):
    """Evaluation failure at the node starting at byte ``offset``."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (node at byte {offset})")


# --------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: complex
    offset: int = 0


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = 0


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    offset: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    offset: int = 0


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]
    offset: int = 0


Node = Union[Num, Var, Neg, BinOp, Call]

FUNCTIONS = {"exp": 1, "kernel": 2}


@dataclass(frozen=True)
class Expr:
    """A parsed expression together with its variable name and source."""

    root: Node
    variable: str = "z"
    source: str = ""

    def __call__(self, z):
        return evaluate(self, z)

    def __str__(self):
        return pretty(self)

    @property
    def is_constant(self):
        return not _uses_variable(self.root)


# --------------------------------------------------------------------------
# tokenizer

@dataclass(frozen=True)
class _Token:
    kind: str  # number, imag, name, op, end
    text: str
    offset: int


_OPS = set("+-*/^();")


def _tokenize(src):
    tokens = []
    data = src.encode("utf-8")
    i, n = 0, len(data)
    while i < n:
        c = chr(data[i]) if data[i] < 128 else None
        if c is not None and c.isspace():
            i += 1
            continue
        start = i
        if c is not None and (c.isdigit() or c == "."):
            while i < n and (chr(data[i]).isdigit() or data[i] == ord(".")):
                i += 1
            if i < n and data[i] in b"eE":
                j = i + 1
                if j < n and data[j] in b"+-":
                    j += 1
                if j < n and chr(data[j]).isdigit():
                    i = j
                    while i < n and chr(data[i]).isdigit():
                        i += 1
            text = data[start:i].decode()
            try:
                float(text)
            except ValueError:
                raise ParseError(f"malformed number {text!r}", start, ("number",)) from None
            if i < n and data[i] == ord("i") and not (i + 1 < n and _is_name_char(data[i + 1])):
                i += 1
                tokens.append(_Token("imag", text, start))
            else:
                tokens.append(_Token("number", text, start))
            continue
        if c is not None and (c.isalpha() or c == "_"):
            while i < n and _is_name_char(data[i]):
                i += 1
            tokens.append(_Token("name", data[start:i].decode(), start))
            continue
        if c is not None and c in _OPS:
            tokens.append(_Token("op", c, start))
            i += 1
            continue
        raise ParseError(f"unexpected character {data[start:start + 1]!r}", start,
                         ("number", "name", "operator"))
    tokens.append(_Token("end", "", n))
    return tokens


def _is_name_char(b):
    return b < 128 and (chr(b).isalnum() or b == ord("_"))


# --------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, src, variable):
        self.tokens = _tokenize(src)
        self.pos = 0
        self.variable = variable

    @property
    def tok(self):
        return self.tokens[self.pos]

    def advance(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def at_op(self, ch):
        return self.tok.kind == "op" and self.tok.text == ch

    def expect_op(self, ch):
        if not self.at_op(ch):
            self.fail(f"expected {ch!r}", (repr(ch),))
        return self.advance()

    def fail(self, message, expected):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"{message}, found {found}", t.offset, expected)

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("unexpected token", ("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return node

    def expr(self):
        node = self.term()
        while self.at_op("+") or self.at_op("-"):
            op = self.advance()
            node = BinOp(op.text, node, self.term(), op.offset)
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*") or self.at_op("/"):
            op = self.advance()
            node = BinOp(op.text, node, self.unary(), op.offset)
        return node

    def unary(self):
        if self.at_op("-"):
            op = self.advance()
            return Neg(self.unary(), op.offset)
        return self.power()

    def power(self):
        base = self.atom()
        if self.at_op("^"):
            op = self.advance()
            return BinOp("^", base, self.unary(), op.offset)
        return base

    def atom(self):
        t = self.tok
        atom_tokens = ("number", "'i'", f"'{self.variable}'", "'exp'", "'kernel'", "'('")
        if t.kind == "number":
            self.advance()
            return Num(complex(float(t.text), 0.0), t.offset)
        if t.kind == "imag":
            self.advance()
            return Num(complex(0.0, float(t.text)), t.offset)
        if t.kind == "name":
            if t.text == self.variable:
                self.advance()
                return Var(t.text, t.offset)
            if t.text == "i":
                self.advance()
                return Num(1j, t.offset)
            if t.text in FUNCTIONS:
                return self.call()
            self.fail(f"unknown name {t.text!r}", atom_tokens)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        self.fail("expected an operand", atom_tokens)

    def call(self):
        name = self.advance()
        self.expect_op("(")
        args = [self.expr()]
        if name.text == "kernel":
            self.expect_op(";")
            args.append(self.expr())
        self.expect_op(")")
        node = Call(name.text, tuple(args), name.offset)
        if name.text == "kernel":
            _check_kernel_args(node)
        return node


def _check_kernel_args(node):
    alpha_node, a_node = node.args
    for arg, what in ((alpha_node, "alpha"), (a_node, "a")):
        if _uses_variable(arg):
            raise ParseError(f"kernel {what} must be a constant expression", arg.offset, ("constant",))
    alpha = _eval_node(alpha_node, np.zeros(1, dtype=complex))[0]
    a = _eval_node(a_node, np.zeros(1, dtype=complex))[0]
    if alpha.imag != 0 or alpha.real < 0:
        raise ParseError("kernel alpha must be a real number >= 0", alpha_node.offset, ("constant",))
    if not abs(a) < 1:
        raise ParseError("kernel point a must lie in the open unit disk", a_node.offset,
                         ("constant",))


def _uses_variable(node):
    if isinstance(node, Var):
        return True
    if isinstance(node, Num):
        return False
    if isinstance(node, Neg):
        return _uses_variable(node.operand)
    if isinstance(node, BinOp):
        return _uses_variable(node.left) or _uses_variable(node.right)
    return any(_uses_variable(a) for a in node.args)


def parse(src, variable="z"):
    """Parse ``src`` into an :class:`Expr` in the given variable."""
    if variable not in ("z", "u"):
        raise ParameterError("variable must be 'z' or 'u'")
    return Expr(_Parser(src, variable).parse(), variable, src)


def parse_radial(src):
    """Parse a radial density written in ``u = |z|^2``."""
    return parse(src, variable="u")


# --------------------------------------------------------------------------
# evaluation

def _is_integer_constant(node):
    """The integer value of a variable-free node, or ``None``."""
    if _uses_variable(node):
        return None
    with np.errstate(all="ignore"):
        v = _eval_node(node, np.zeros(1, dtype=complex))[0]
    if v.imag == 0 and math.isfinite(v.real) and float(v.real).is_integer() and abs(v.real) < 2**31:
        return int(v.real)
    return None


def _eval_node(node, z):
    if isinstance(node, Num):
        return np.full(z.shape, node.value, dtype=complex)
    if isinstance(node, Var):
        return z
    if isinstance(node, Neg):
        return -_eval_node(node.operand, z)
    if isinstance(node, BinOp):
        a = _eval_node(node.left, z)
        if node.op == "^":
            k = _is_integer_constant(node.right)
            if k is not None:
                if k < 0 and np.any(a == 0):
                    raise EvalError("zero raised to a negative power", node.offset)
                return a ** k
            b = _eval_node(node.right, z)
            bad = (a.imag == 0) & (a.real <= 0)
            if np.any(bad):
                raise EvalError("non-integer power of a nonpositive real base is ambiguous",
                                node.offset)
            return np.exp(b * np.log(a))
        b = _eval_node(node.right, z)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if np.any(b == 0):
            raise EvalError("division by zero", node.offset)
        return a / b
    if node.name == "exp":
        return np.exp(_eval_node(node.args[0], z))
    alpha = _eval_node(node.args[0], z[:1] if z.size else np.zeros(1, complex))[0].real
    a = _eval_node(node.args[1], z[:1] if z.size else np.zeros(1, complex))[0]
    return (1.0 - np.conj(a) * z) ** (-(alpha + 2.0))


def evaluate(e, z):
    """Evaluate ``e`` at ``z`` (scalar or array) with exact AST semantics."""
    arr = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(arr).ravel()
    with np.errstate(all="ignore"):
        out = _eval_node(e.root, flat)
    out = np.broadcast_to(out, flat.shape)
    if arr.ndim == 0:
        return complex(out[0])
    return out.reshape(arr.shape).copy()


def radial_function(e):
    """Real callable of ``u`` from a radial expression; rejects complex values."""
    if e.variable != "u":
        raise ParameterError("radial densities must be written in the variable u")

    def func(u):
        vals = evaluate(e, np.asarray(u, dtype=float))
        vals = np.asarray(vals)
        if np.any(np.abs(vals.imag) > 1e-12 * np.maximum(1.0, np.abs(vals.real))):
            raise EvalError("radial density took a non-real value", e.root.offset)
        return vals.real

    return func


# --------------------------------------------------------------------------
# pretty printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_UNARY, _POWER, _ATOM = 3, 4, 5


def _format_real(x):
    text = repr(float(x))
    return text


def _num_text(v):
    if v.imag == 0:
        text = _format_real(v.real)
        return (text, _ATOM) if v.real >= 0 else (f"({text})", _ATOM)
    if v.real == 0:
        if v.imag == 1:
            return "i", _ATOM
        if v.imag > 0:
            return f"{_format_real(v.imag)}i", _ATOM
        return f"(-{_format_real(-v.imag)}i)", _ATOM
    sign = "+" if v.imag >= 0 else "-"
    return f"({_format_real(v.real)}{sign}{_format_real(abs(v.imag))}i)", _ATOM


def _pp(node):
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name, _ATOM
    if isinstance(node, Neg):
        text, prec = _pp(node.operand)
        if prec < _UNARY:
            text = f"({text})"
        return f"-{text}", _UNARY
    if isinstance(node, BinOp):
        lt, lp = _pp(node.left)
        rt, rp = _pp(node.right)
        if node.op == "^":
            if lp < _ATOM:
                lt = f"({lt})"
            if rp < _UNARY:
                rt = f"({rt})"
            return f"{lt}^{rt}", _POWER
        prec = _PREC[node.op]
        if lp < prec:
            lt = f"({lt})"
        if rp <= prec:
            rt = f"({rt})"
        sep = f" {node.op} " if prec == 1 else node.op
        return f"{lt}{sep}{rt}", prec
    args = [_pp(a)[0] for a in node.args]
    return f"{node.name}({'; '.join(args)})", _ATOM


def pretty(e):
    """Canonical text form; ``parse(pretty(e))`` has the same AST shape."""
    root = e.root if isinstance(e, Expr) else e
    return _pp(root)[0]


def strip_offsets(node):
    """The AST with all offsets zeroed (for structural comparisons)."""
    if isinstance(node, Expr):
        node = node.root
    if isinstance(node, Num):
        return Num(node.value)
    if isinstance(node, Var):
        return Var(node.name)
    if isinstance(node, Neg):
        return Neg(strip_offsets(node.operand))
    if isinstance(node, BinOp):
        return BinOp(node.op, strip_offsets(node.left), strip_offsets(node.right))
    return Call(node.name, tuple(strip_offsets(a) for a in node.args))

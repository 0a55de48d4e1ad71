"""Function expressions: AST, recursive-descent parser, printer, catalog.

The grammar (whitespace insignificant)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')' | '-' factor
    VAR    := 'x' DIGIT+          (x1 is the first coordinate)
    FUNC   in {sin, cos, exp, log, abs, pow, min, max, sqrt}

The named constants ``pi`` and ``e`` are additionally accepted wherever a
number may appear.  Evaluation is vectorized over point arrays and raises
:class:`~bmolab.errors.EvalDomainError` instead of propagating NaN.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvalDomainError, ParseError

__all__ = [
    "FunctionSpec",
    "parse_function",
    "to_text",
    "catalog",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "RadialPiece",
]

_FUNCS_1 = {"sin", "cos", "exp", "log", "abs", "sqrt"}
_FUNCS_2 = {"pow", "min", "max"}
_FUNCS = _FUNCS_1 | _FUNCS_2
_CONSTANTS = {"pi": math.pi, "e": math.e}


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based coordinate index; "x1" parses to Var(0)


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


@dataclass(frozen=True)
class RadialPiece:
    """Piecewise-by-radius node: ``inner`` where |x - center| < radius,
    ``outer`` elsewhere.  Branches are evaluated only on their own mask, so
    an inner expression singular on the boundary stays evaluable.

    Not produced by the parser; used programmatically by the catalog.
    """

    center: tuple
    radius: float
    inner: "Node"
    outer: "Node"


Node = object


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/(),]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._tokenize()
        self.i = 0

    def _tokenize(self):
        pos = 0
        text = self.text
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                # skip pure whitespace tails
                if text[pos:].strip() == "":
                    break
                raise ParseError(
                    f"unexpected character {text[pos:].lstrip()[0]!r}",
                    len(text) - len(text[pos:].lstrip()),
                    expected=("number", "identifier", "operator"),
                )
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos, expected=(op,))
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {val!r}", pos, expected=("end of input",))
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = BinOp(val, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = BinOp(val, node, self.factor())
            else:
                return node

    def factor(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "-":
            inner = self.factor()
            # fold a negated literal so printing round-trips exactly
            if isinstance(inner, Num):
                return Num(-inner.value)
            return Neg(inner)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "name":
            if re.fullmatch(r"x\d+", val):
                idx = int(val[1:])
                if idx < 1:
                    raise ParseError("variable indices start at x1", pos, expected=("x1", "x2"))
                return Var(idx - 1)
            if val in _CONSTANTS:
                return Num(_CONSTANTS[val])
            if val in _FUNCS:
                self.expect_op("(")
                args = [self.expr()]
                while True:
                    k2, v2, p2 = self.peek()
                    if k2 == "op" and v2 == ",":
                        self.advance()
                        args.append(self.expr())
                    else:
                        break
                self.expect_op(")")
                want = 2 if val in _FUNCS_2 else 1
                if len(args) != want:
                    raise ParseError(
                        f"{val} takes {want} argument(s), got {len(args)}", pos,
                        expected=(f"{want} arguments",),
                    )
                return Call(val, tuple(args))
            raise ParseError(f"unknown identifier {val!r}", pos, expected=sorted(_FUNCS))
        raise ParseError(
            f"unexpected token {val!r}" if val else "unexpected end of input",
            pos,
            expected=("number", "variable", "function", "("),
        )


# ---------------------------------------------------------------------------
# Printer (parse -> print -> parse is the identity on trees)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(node: Node) -> str:
    return _print(node, 0)


def _print(node, parent_prec):
    if isinstance(node, Num):
        v = node.value
        s = repr(v)
        return s
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Neg):
        inner = _print(node.arg, 3)
        return f"-{inner}" if parent_prec < 3 else f"(-{inner})"
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = _print(node.left, prec - 1)
        # right side binds tighter: a-b-c == (a-b)-c
        right = _print(node.right, prec)
        s = f"{left}{node.op}{right}"
        return f"({s})" if parent_prec >= prec else s
    if isinstance(node, Call):
        return f"{node.func}({','.join(_print(a, 0) for a in node.args)})"
    if isinstance(node, RadialPiece):
        raise ValueError("piecewise-by-radius nodes have no textual form")
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Evaluation


def _free_dim(node) -> int:
    if isinstance(node, Num):
        return 0
    if isinstance(node, Var):
        return node.index + 1
    if isinstance(node, Neg):
        return _free_dim(node.arg)
    if isinstance(node, BinOp):
        return max(_free_dim(node.left), _free_dim(node.right))
    if isinstance(node, Call):
        return max(_free_dim(a) for a in node.args)
    if isinstance(node, RadialPiece):
        return max(len(node.center), _free_dim(node.inner), _free_dim(node.outer))
    raise TypeError(f"not an expression node: {node!r}")


def _eval(node, pts):
    # pts: (m, n) float array; returns (m,) float array
    if isinstance(node, Num):
        return np.full(pts.shape[0], node.value)
    if isinstance(node, Var):
        if node.index >= pts.shape[1]:
            raise EvalDomainError(
                f"expression uses x{node.index + 1} but points have dimension {pts.shape[1]}"
            )
        return pts[:, node.index].astype(float, copy=True)
    if isinstance(node, Neg):
        return -_eval(node.arg, pts)
    if isinstance(node, BinOp):
        a = _eval(node.left, pts)
        b = _eval(node.right, pts)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if np.any(b == 0.0):
            raise EvalDomainError("division by zero")
        return a / b
    if isinstance(node, Call):
        a = _eval(node.args[0], pts)
        if node.func == "sin":
            return np.sin(a)
        if node.func == "cos":
            return np.cos(a)
        if node.func == "exp":
            return np.exp(a)
        if node.func == "abs":
            return np.abs(a)
        if node.func == "log":
            if np.any(a <= 0.0):
                raise EvalDomainError("log of a nonpositive number")
            return np.log(a)
        if node.func == "sqrt":
            if np.any(a < 0.0):
                raise EvalDomainError("sqrt of a negative number")
            return np.sqrt(a)
        b = _eval(node.args[1], pts)
        if node.func == "pow":
            with np.errstate(invalid="ignore", divide="ignore"):
                out = np.power(a, b)
            if not np.all(np.isfinite(out)):
                raise EvalDomainError("pow left the real domain")
            return out
        if node.func == "min":
            return np.minimum(a, b)
        if node.func == "max":
            return np.maximum(a, b)
        raise EvalDomainError(f"unknown function {node.func}")
    if isinstance(node, RadialPiece):
        center = np.asarray(node.center, dtype=float)
        d = pts[:, : len(node.center)] - center
        inside = np.sqrt(np.sum(d * d, axis=1)) < node.radius
        out = np.empty(pts.shape[0])
        if np.any(inside):
            out[inside] = _eval(node.inner, pts[inside])
        if np.any(~inside):
            out[~inside] = _eval(node.outer, pts[~inside])
        return out
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class FunctionSpec:
    """A parsed (or programmatically built) real-valued function on R^n."""

    node: Node
    dim: int
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if _free_dim(self.node) > self.dim:
            raise ValueError("expression uses more coordinates than declared dim")

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at an (m, n) point array (n >= dim); scalars and 1-d
        arrays are promoted for n == 1."""
        pts = np.asarray(points, dtype=float)
        scalar = pts.ndim == 0
        if pts.ndim <= 1:
            pts = np.atleast_1d(pts).reshape(-1, 1)
        if pts.shape[1] < self.dim:
            raise EvalDomainError(
                f"points of dimension {pts.shape[1]} for a function on R^{self.dim}"
            )
        out = _eval(self.node, pts)
        if not np.all(np.isfinite(out)):
            raise EvalDomainError("evaluation produced a non-finite value")
        return float(out[0]) if scalar else out

    __call__ = evaluate

    @property
    def text(self) -> str:
        try:
            return to_text(self.node)
        except ValueError:
            return self.name or "<piecewise>"

    def label(self) -> str:
        return self.name or self.text


def parse_function(text: str, dim: int | None = None, name: str = "") -> FunctionSpec:
    """Parse an expression string into a :class:`FunctionSpec`.

    ``dim`` defaults to the highest coordinate index used (at least 1).
    """
    if not isinstance(text, str) or text.strip() == "":
        raise ParseError("empty expression", 0, expected=("expression",))
    node = _Parser(text).parse()
    inferred = max(1, _free_dim(node))
    if dim is None:
        dim = inferred
    return FunctionSpec(node=node, dim=dim, name=name)


# ---------------------------------------------------------------------------
# Catalog of named functions used throughout the test experiments


def _prod_sin_node(dim):
    node = Call("sin", (Var(0),))
    for k in range(1, dim):
        node = BinOp("*", node, Call("sin", (Var(k),)))
    return node


def _radius2_node(dim):
    node = BinOp("*", Var(0), Var(0))
    for k in range(1, dim):
        node = BinOp("+", node, BinOp("*", Var(k), Var(k)))
    return node


def catalog(name: str, dim: int = 1) -> FunctionSpec:
    """Named functions: ``prod_sin``, ``smoothed_log``, ``log_abs``,
    ``bump``, ``sign``, ``zero``, ``one``.

    ``smoothed_log`` is the everywhere-smooth stand-in
    0.5*log(1+|x|^2) for log|x| (equal up to O(|x|^-2) at infinity);
    ``bump`` is exp(-1/(1-|x|^2)) inside the unit ball, 0 outside.
    """
    if name == "prod_sin":
        return FunctionSpec(_prod_sin_node(dim), dim, name=f"prod_sin[n={dim}]")
    if name == "smoothed_log":
        node = BinOp("*", Num(0.5), Call("log", (BinOp("+", Num(1.0), _radius2_node(dim)),)))
        return FunctionSpec(node, dim, name=f"smoothed_log[n={dim}]")
    if name == "log_abs":
        if dim != 1:
            raise ValueError("log_abs is the 1-d catalog entry")
        return FunctionSpec(Call("log", (Call("abs", (Var(0),)),)), 1, name="log_abs")
    if name == "bump":
        inner = Call("exp", (Neg(BinOp("/", Num(1.0), BinOp("-", Num(1.0), _radius2_node(dim)))),))
        node = RadialPiece(center=(0.0,) * dim, radius=1.0, inner=inner, outer=Num(0.0))
        return FunctionSpec(node, dim, name=f"bump[n={dim}]")
    if name == "sign":
        if dim != 1:
            raise ValueError("sign is the 1-d catalog entry")
        # -1 on (-2B, 0), +1 elsewhere; B far beyond any desk-scale scan
        B = 1e9
        node = RadialPiece(center=(-B,), radius=B, inner=Num(-1.0), outer=Num(1.0))
        return FunctionSpec(node, 1, name="sign")
    if name == "zero":
        return FunctionSpec(Num(0.0), dim, name="zero")
    if name == "one":
        return FunctionSpec(Num(1.0), dim, name="one")
    raise KeyError(f"unknown catalog function {name!r}")


def bump_at(center, width, dim: int = 1) -> FunctionSpec:
    """Translated/scaled bump: exp(-1/(1-u^2)) with u = |x-center|/width."""
    center = tuple(np.broadcast_to(np.asarray(center, dtype=float), (dim,)).tolist())
    # u^2 = sum ((x_k - c_k)/w)^2
    terms = []
    for k in range(dim):
        d = BinOp("/", BinOp("-", Var(k), Num(center[k])), Num(float(width)))
        terms.append(BinOp("*", d, d))
    u2 = terms[0]
    for t in terms[1:]:
        u2 = BinOp("+", u2, t)
    inner = Call("exp", (Neg(BinOp("/", Num(1.0), BinOp("-", Num(1.0), u2))),))
    node = RadialPiece(center=center, radius=float(width), inner=inner, outer=Num(0.0))
    return FunctionSpec(node, dim, name=f"bump(c={center},w={width})")

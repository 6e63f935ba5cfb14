"""Reading and writing a small OPENQASM 2.0 subset.

The reader accepts the gate vocabulary the router works with (cx, swap,
and the common one-qubit gates), flat qreg declarations, and constant
angle expressions built from numbers, pi, + - * /, and parentheses.
Measurements and barriers are dropped with a warning since routing never
moves them; classical control, custom gate bodies, and anything with
three or more operands are hard errors.  Angles keep the text they were
written as (see Angle) so files survive a parse/emit round trip without
reformatting.
"""

from __future__ import annotations

import math
import re
import warnings
from bisect import bisect_right
from dataclasses import dataclass

from .circuits import Circuit, Gate, circuit, cnot, single, swap


class QasmError(ValueError):
    """Parse failure, carrying the 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class QasmWarning(UserWarning):
    pass


class Angle(float):
    """A float that remembers its source spelling (e.g. "pi/2")."""

    def __new__(cls, value: float, text: str | None = None):
        self = super().__new__(cls, value)
        self.text = text if text is not None else repr(float(value))
        return self


# Parameter count expected for each accepted 1-qubit gate.
_PARAM_ARITY = {
    "u1": 1, "u2": 2, "u3": 3, "rx": 1, "ry": 1, "rz": 1,
    "h": 0, "x": 0, "y": 0, "z": 0, "s": 0, "sdg": 0,
    "t": 0, "tdg": 0, "id": 0,
}
_THREE_QUBIT_NAMES = {"ccx", "cswap", "ccz"}

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>//[^\n]*)
    | (?P<real>(\d+\.\d*|\.\d+)([eE][+-]?\d+)?|\d+[eE][+-]?\d+)
    | (?P<int>\d+)
    | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<string>"[^"\n]*")
    | (?P<arrow>->|==|!=|<=|>=)
    | (?P<sym>[\[\](){};,+\-*/=<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str          # real | int | name | string | sym (arrow folds into sym)
    text: str
    line: int
    col: int
    start: int
    end: int


def _tokenize(src: str) -> list[_Token]:
    line_starts = [0] + [i + 1 for i, ch in enumerate(src) if ch == "\n"]

    def position(offset: int) -> tuple[int, int]:
        ln = bisect_right(line_starts, offset) - 1
        return ln + 1, offset - line_starts[ln] + 1

    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            ln, col = position(pos)
            raise QasmError(f"unexpected character {src[pos]!r}", ln, col)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            ln, col = position(m.start())
            if kind == "arrow":
                kind = "sym"
            tokens.append(_Token(kind, m.group(), ln, col, m.start(), m.end()))
        pos = m.end()
    ln, col = position(len(src))
    tokens.append(_Token("eof", "", ln, col, len(src), len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0
        self.registers: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.num_qubits = 0
        self.gates: list[Gate] = []

    # ---- token plumbing

    def _peek(self) -> _Token:
        return self.tokens[self.pos]

    def _next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def _error(self, message: str, tok: _Token | None = None) -> QasmError:
        tok = tok or self._peek()
        return QasmError(message, tok.line, tok.col)

    def _expect(self, text: str) -> _Token:
        tok = self._next()
        if tok.text != text:
            raise self._error(f"expected {text!r}, got {tok.text!r}", tok)
        return tok

    def _skip_statement(self) -> None:
        while self._peek().text not in (";", ""):
            self._next()
        self._expect(";")

    # ---- grammar

    def parse(self) -> Circuit:
        self._header()
        while self._peek().kind != "eof":
            self._statement()
        return circuit(self.num_qubits, self.gates)

    def _header(self) -> None:
        self._expect("OPENQASM")
        version = self._next()
        if version.text != "2.0":
            raise self._error(f"unsupported version {version.text!r}", version)
        self._expect(";")

    def _statement(self) -> None:
        tok = self._peek()
        if tok.text == "include":
            self._next()
            name = self._next()
            if name.kind != "string":
                raise self._error("expected a quoted filename", name)
            self._expect(";")
        elif tok.text in ("qreg", "creg"):
            self._register(tok.text)
        elif tok.text in ("measure", "barrier"):
            self._next()
            self._skip_statement()
            warnings.warn(
                f"line {tok.line}: {tok.text} dropped (routing ignores it)",
                QasmWarning,
                stacklevel=4,
            )
        elif tok.text == "if":
            raise self._error("classically controlled gates are not supported", tok)
        elif tok.text in ("gate", "opaque"):
            raise self._error("custom gate definitions are not supported", tok)
        elif tok.text == "reset":
            raise self._error("reset is not supported", tok)
        elif tok.kind == "name":
            self._application()
        else:
            raise self._error(f"unexpected {tok.text!r}", tok)

    def _register(self, kind: str) -> None:
        self._next()
        name = self._next()
        if name.kind != "name":
            raise self._error("expected a register name", name)
        self._expect("[")
        size = self._next()
        if size.kind != "int" or int(size.text) < 1:
            raise self._error("register size must be a positive integer", size)
        self._expect("]")
        self._expect(";")
        if kind == "qreg":
            if name.text in self.registers:
                raise self._error(f"duplicate register {name.text!r}", name)
            self.registers[name.text] = (self.num_qubits, int(size.text))
            self.num_qubits += int(size.text)

    def _application(self) -> None:
        name = self._next()
        params: list[Angle] = []
        if self._peek().text == "(":
            self._next()
            params.append(self._expr())
            while self._peek().text == ",":
                self._next()
                params.append(self._expr())
            self._expect(")")
        operands = [self._operand()]
        while self._peek().text == ",":
            self._next()
            operands.append(self._operand())
        self._expect(";")

        if name.text in ("cx", "swap"):
            if params:
                raise self._error(f"{name.text} takes no parameters", name)
            if len(operands) != 2:
                raise self._error(f"{name.text} takes 2 qubits", name)
            if operands[0] == operands[1]:
                raise self._error(f"{name.text} operands must be distinct", name)
            maker = cnot if name.text == "cx" else swap
            self.gates.append(maker(operands[0], operands[1]))
        elif name.text in _PARAM_ARITY:
            want = _PARAM_ARITY[name.text]
            if len(params) != want:
                raise self._error(
                    f"{name.text} takes {want} parameter(s), got {len(params)}", name
                )
            if len(operands) != 1:
                raise self._error(f"{name.text} takes 1 qubit", name)
            self.gates.append(single(name.text, operands[0], *params))
        elif name.text in _THREE_QUBIT_NAMES:
            raise self._error(
                f"{name.text} is not supported; decompose it to 1- and 2-qubit gates",
                name,
            )
        else:
            raise self._error(f"unknown gate {name.text!r}", name)

    def _operand(self) -> int:
        name = self._next()
        if name.kind != "name":
            raise self._error("expected a register reference", name)
        if name.text not in self.registers:
            raise self._error(f"undeclared register {name.text!r}", name)
        self._expect("[")
        idx = self._next()
        if idx.kind != "int":
            raise self._error("expected a qubit index", idx)
        self._expect("]")
        offset, size = self.registers[name.text]
        if int(idx.text) >= size:
            raise self._error(
                f"index {idx.text} out of range for {name.text}[{size}]", idx
            )
        return offset + int(idx.text)

    # ---- constant angle expressions

    def _expr(self) -> Angle:
        start = self._peek().start
        value = self._sum()
        end = self.tokens[self.pos - 1].end
        return Angle(value, self.src[start:end].strip())

    def _sum(self) -> float:
        value = self._product()
        while self._peek().text in ("+", "-"):
            op = self._next().text
            rhs = self._product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _product(self) -> float:
        value = self._factor()
        while self._peek().text in ("*", "/"):
            op = self._next().text
            tok = self._peek()
            rhs = self._factor()
            if op == "/":
                if rhs == 0:
                    raise self._error("division by zero", tok)
                value = value / rhs
            else:
                value = value * rhs
        return value

    def _factor(self) -> float:
        tok = self._next()
        if tok.text == "-":
            return -self._factor()
        if tok.text == "+":
            return self._factor()
        if tok.text == "(":
            value = self._sum()
            self._expect(")")
            return value
        if tok.kind in ("int", "real"):
            return float(tok.text)
        if tok.text == "pi":
            return math.pi
        raise self._error(f"expected a number, got {tok.text!r}", tok)


def parse_qasm(src: str) -> Circuit:
    """Parse OPENQASM 2.0 source into a Circuit over one flat wire space.

    Multiple qregs are laid out end to end in declaration order.
    """
    return _Parser(src).parse()


def read_qasm(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_qasm(fh.read())


def _format_param(p: float) -> str:
    if isinstance(p, Angle):
        return p.text
    return repr(float(p))


def emit_qasm(c: Circuit, *, keep_swaps: bool = True) -> str:
    """Render a circuit back to OPENQASM 2.0 text.

    With keep_swaps=False every swap is expanded into its three CNOTs so
    the output sticks to the plain qelib vocabulary.
    """
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    for g in c.gates:
        if g.is_swap and not keep_swaps:
            a, b = g.qubits
            lines += [f"cx q[{a}],q[{b}];", f"cx q[{b}],q[{a}];", f"cx q[{a}],q[{b}];"]
        elif len(g.qubits) == 2:
            lines.append(f"{g.name} q[{g.qubits[0]}],q[{g.qubits[1]}];")
        elif g.params:
            args = ",".join(_format_param(p) for p in g.params)
            lines.append(f"{g.name}({args}) q[{g.qubits[0]}];")
        else:
            lines.append(f"{g.name} q[{g.qubits[0]}];")
    return "\n".join(lines) + "\n"


def write_qasm(c: Circuit, path, *, keep_swaps: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_qasm(c, keep_swaps=keep_swaps))

"""Parser for the line-oriented program description format.

Example::

    # flip a qubit
    dims m=2 n=2 p=1
    gate u1 = X
    state |0>
    program 1
    target X

Gates are numbered in definition order starting at 1; index 0 is always the
identity (also reachable as ``I`` or ``u0`` in ``program`` lines). Programs
shorter than ``p`` are padded with no-op steps.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .controller import InstructionSet
from .errors import ContractError
from .program_bus import BusConfig, Program

FILE_UNITARITY_TOL = 1e-8
FILE_NORM_TOL = 1e-8

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_CALL = re.compile(r"([A-Za-z]+)\s*\((.*)\)\Z")

_FIXED_GATES = {
    "I": linalg.I2,
    "X": linalg.SIGMA_X,
    "Y": linalg.SIGMA_Y,
    "Z": linalg.SIGMA_Z,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * math.pi / 4)]),
}
_ROTATION_AXES = {"RX": linalg.SIGMA_X, "RY": linalg.SIGMA_Y, "RZ": linalg.SIGMA_Z}
BUILTINS = frozenset(_FIXED_GATES) | frozenset(_ROTATION_AXES)


class ProgramFileError(ContractError):
    """Syntax or semantic error, located by 1-based line and column."""

    def __init__(self, message, line=None, column=None, kind="syntax"):
        self.line = line
        self.column = column
        self.kind = kind
        self.message = message
        loc = f"line {line}" if line is not None else "input"
        if column is not None:
            loc += f", column {column}"
        super().__init__(f"{loc}: {kind} error: {message}")


def rotation(axis: str, theta: float) -> np.ndarray:
    """``exp(-i sigma_axis theta / 2)``."""
    sigma = _ROTATION_AXES[axis]
    return math.cos(theta / 2) * linalg.I2 - 1j * math.sin(theta / 2) * sigma


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_real(text: str) -> float:
    """Evaluate a real arithmetic expression over numbers and ``pi``."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        tree = ast.parse(text.strip(), mode="eval")
        value = ev(tree.body)
    except (SyntaxError, ZeroDivisionError, ValueError) as exc:
        raise ValueError(f"bad real number {text!r}") from exc
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {text!r}")
    return value


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` style literals (``i`` or ``j`` as imaginary unit)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    s = s.replace("i", "j")
    # bare unit: "j", "-j", "1+j"
    s = re.sub(r"(^|[+-])j", r"\g<1>1j", s)
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"bad complex literal {text!r}") from None


def parse_matrix(text: str) -> np.ndarray:
    s = re.sub(r"\s+", "", text)
    if not (s.startswith("[[") and s.endswith("]]")):
        raise ValueError("matrix must look like [[a+bi, ...], ...]")
    rows = [row.split(",") for row in s[2:-2].split("],[")]
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square")
    return np.array([[parse_complex(e) for e in r] for r in rows], dtype=complex)


def parse_amplitudes(text: str) -> np.ndarray:
    s = re.sub(r"\s+", "", text)
    if not (s.startswith("[") and s.endswith("]")) or len(s) < 3:
        raise ValueError("amplitudes must look like [a+bi, ...]")
    return np.array([parse_complex(e) for e in s[1:-1].split(",")], dtype=complex)


@dataclass
class ProgramFile:
    config: BusConfig
    gate_names: list
    iset: InstructionSet
    initial_state: np.ndarray
    program: Program
    target: np.ndarray | None = None
    hamiltonians: list = field(default_factory=list)

    def gate(self, name: str) -> np.ndarray:
        return self.iset.gates[self.gate_names.index(name)]


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.dims = None
        self.dims_line = None
        self.gates = {}  # name -> (index, matrix)
        self.order = ["u0"]
        self.matrices = [None]
        self.state = None
        self.program = None
        self.program_line = None
        self.target = None
        self.hamiltonians = []

    def error(self, msg, lineno, col=None, kind="syntax"):
        return ProgramFileError(msg, lineno, col, kind)

    def gate_expr(self, expr: str, lineno: int, col: int, allow_defined=True) -> np.ndarray:
        expr = expr.strip()
        if not expr:
            raise self.error("missing gate expression", lineno, col)
        if expr.startswith("matrix"):
            try:
                mat = parse_matrix(expr[len("matrix"):])
            except ValueError as exc:
                raise self.error(str(exc), lineno, col) from None
            return mat
        if expr in _FIXED_GATES:
            return _FIXED_GATES[expr].copy()
        call = _CALL.match(expr)
        if call:
            name, arg = call.groups()
            if name not in _ROTATION_AXES:
                raise self.error(f"unknown parametric gate {name!r}", lineno, col, "semantic")
            try:
                theta = parse_real(arg)
            except ValueError as exc:
                raise self.error(str(exc), lineno, col) from None
            return rotation(name, theta)
        if _NAME.match(expr):
            if allow_defined and expr in self.gates:
                return self.gates[expr][1]
            raise self.error(f"undefined gate {expr!r}", lineno, col, "semantic")
        raise self.error(f"cannot parse gate expression {expr!r}", lineno, col)

    def parse_dims(self, rest, lineno, col):
        if self.dims is not None:
            raise self.error("duplicate dims line", lineno, 1, "semantic")
        values = {}
        for tok in rest.split():
            key, eq, val = tok.partition("=")
            if not eq or key not in ("m", "n", "p") or key in values:
                raise self.error(f"bad dims field {tok!r}", lineno, col)
            try:
                values[key] = int(val)
            except ValueError:
                raise self.error(f"dims field {key} must be an integer", lineno, col) from None
            if values[key] < 1:
                raise self.error(f"dims field {key} must be positive", lineno, col, "semantic")
        if set(values) != {"m", "n", "p"}:
            raise self.error("dims needs m=, n= and p=", lineno, col)
        self.dims = BusConfig(values["m"], values["n"], values["p"])
        self.dims_line = lineno

    def parse_named(self, keyword, rest, lineno, col):
        name, eq, expr = rest.partition("=")
        name = name.strip()
        if not eq or not _NAME.match(name):
            raise self.error(f"expected '{keyword} <name> = <expr>'", lineno, col)
        if name in BUILTINS or name == "pi":
            raise self.error(f"name {name!r} shadows a built-in", lineno, col, "semantic")
        expr_col = col + rest.index("=") + 1
        return name, self.gate_expr(expr, lineno, expr_col)

    def require_dims(self, lineno):
        if self.dims is None:
            raise self.error("dims must be declared before use", lineno, 1, "semantic")

    def check_shape(self, mat, what, lineno):
        n = self.dims.n
        if mat.shape != (n, n):
            raise self.error(f"{what} is {mat.shape[0]}x{mat.shape[1]}, data dimension is {n}",
                             lineno, 1, "semantic")

    def parse_gate(self, rest, lineno, col):
        self.require_dims(lineno)
        name, mat = self.parse_named("gate", rest, lineno, col)
        self.check_shape(mat, f"gate {name!r}", lineno)
        if not linalg.is_unitary(mat, FILE_UNITARITY_TOL):
            raise self.error(f"gate {name!r} is not unitary", lineno, 1, "semantic")
        if name in self.gates:
            raise self.error(f"gate {name!r} defined twice", lineno, 1, "semantic")
        if name == "u0":
            if not np.allclose(mat, np.eye(self.dims.n), rtol=0, atol=FILE_UNITARITY_TOL):
                raise self.error("u0 is reserved for the identity", lineno, 1, "semantic")
            self.gates[name] = (0, np.eye(self.dims.n, dtype=complex))
            return
        self.gates[name] = (len(self.order), mat)
        self.order.append(name)
        self.matrices.append(mat)

    def parse_hamiltonian(self, rest, lineno, col):
        self.require_dims(lineno)
        name, mat = self.parse_named("hamiltonian", rest, lineno, col)
        self.check_shape(mat, f"hamiltonian {name!r}", lineno)
        if not linalg.is_hermitian(mat, FILE_UNITARITY_TOL):
            raise self.error(f"hamiltonian {name!r} is not Hermitian", lineno, 1, "semantic")
        self.hamiltonians.append((name, (mat + mat.conj().T) / 2))

    def parse_state(self, rest, lineno, col):
        self.require_dims(lineno)
        n = self.dims.n
        rest = rest.strip()
        basis = re.fullmatch(r"\|\s*(\d+)\s*>", rest)
        if basis:
            index = int(basis.group(1))
            if index >= n:
                raise self.error(f"basis state |{index}> outside data dimension {n}", lineno, col, "semantic")
            psi = linalg.basis_state(n, index)
        elif rest.startswith("amps"):
            try:
                psi = parse_amplitudes(rest[len("amps"):])
            except ValueError as exc:
                raise self.error(str(exc), lineno, col) from None
            if psi.shape[0] != n:
                raise self.error(f"state has {psi.shape[0]} amplitudes, data dimension is {n}",
                                 lineno, col, "semantic")
            if abs(np.linalg.norm(psi) - 1) > FILE_NORM_TOL:
                raise self.error("state amplitudes are not normalized", lineno, col, "semantic")
        else:
            raise self.error("expected 'state |k>' or 'state amps [...]'", lineno, col)
        if self.state is not None:
            raise self.error("duplicate state line", lineno, 1, "semantic")
        self.state = psi

    def parse_program(self, rest, lineno, col):
        self.require_dims(lineno)
        if self.program is not None:
            raise self.error("duplicate program line", lineno, 1, "semantic")
        steps = []
        for match in re.finditer(r"\S+", rest):
            tok = match.group()
            tok_col = col + match.start()
            if tok.isdigit():
                k = int(tok)
                if k >= self.dims.m:
                    raise self.error(f"program index {k} >= m={self.dims.m}", lineno, tok_col, "semantic")
            elif tok in ("I", "u0"):
                k = 0
            elif tok in self.gates:
                k = self.gates[tok][0]
            else:
                raise self.error(f"undefined gate {tok!r}", lineno, tok_col, "semantic")
            steps.append(k)
        if not steps:
            raise self.error("empty program", lineno, col)
        if len(steps) > self.dims.p:
            raise self.error(f"program has {len(steps)} steps, p={self.dims.p}", lineno, col, "semantic")
        self.program = steps
        self.program_line = lineno

    def parse_target(self, rest, lineno, col):
        self.require_dims(lineno)
        mat = self.gate_expr(rest, lineno, col)
        self.check_shape(mat, "target", lineno)
        if not linalg.is_unitary(mat, FILE_UNITARITY_TOL):
            raise self.error("target is not unitary", lineno, col, "semantic")
        self.target = mat

    def run(self) -> ProgramFile:
        handlers = {
            "dims": self.parse_dims,
            "gate": self.parse_gate,
            "hamiltonian": self.parse_hamiltonian,
            "state": self.parse_state,
            "program": self.parse_program,
            "target": self.parse_target,
        }
        for lineno, raw in enumerate(self.lines, start=1):
            line = raw.split("#", 1)[0].rstrip()
            stripped = line.lstrip()
            if not stripped:
                continue
            indent = len(line) - len(stripped)
            keyword, _, rest = stripped.partition(" ")
            handler = handlers.get(keyword)
            if handler is None:
                raise self.error(f"unknown directive {keyword!r}", lineno, indent + 1)
            handler(rest, lineno, indent + len(keyword) + 2)
        return self.finish()

    def finish(self) -> ProgramFile:
        if self.dims is None:
            raise self.error("missing dims line", None)
        if self.state is None:
            raise self.error("missing state line", None, kind="semantic")
        if self.program is None:
            raise self.error("missing program line", None, kind="semantic")
        m = self.dims.m
        if len(self.order) != m:
            raise self.error(f"m={m} but {len(self.order)} instructions are defined (including u0)",
                             self.dims_line, 1, "semantic")
        self.matrices[0] = np.eye(self.dims.n, dtype=complex)
        iset = InstructionSet(tuple(self.matrices))
        program = Program(tuple(self.program), m).padded(self.dims.p)
        return ProgramFile(self.dims, list(self.order), iset, self.state, program, self.target,
                           self.hamiltonians)


def parse_program_file(text: str) -> ProgramFile:
    return _Parser(text).run()


def parse_gate_expression(expr: str, pf: ProgramFile | None = None) -> np.ndarray:
    """Evaluate a gate expression outside a file, optionally seeing ``pf``'s gates."""
    parser = _Parser("")
    if pf is not None:
        parser.dims = pf.config
        for idx, name in enumerate(pf.gate_names):
            parser.gates[name] = (idx, pf.iset.gates[idx])
    return parser.gate_expr(expr, None, None)

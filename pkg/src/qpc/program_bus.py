"""Three-bus machine: program ROM, cyclic shift, and program execution.

The joint space is ``H_p (x) H_c (x) H_d``. A program ``(k_1, ..., k_p)`` is
stored as the basis state ``|k_p, ..., k_2; k_1>`` of ``H_p (x) H_c``, with
``k_1`` in the controller slot (least significant digit). One machine step
applies the controller to ``H_c (x) H_d`` and then cyclically rotates the
digits so that the next index lands in the controller slot; after ``p``
steps the ROM is back where it started and the data register holds
``u_{k_p} ... u_{k_1} psi``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby

import numpy as np

from . import linalg
from .controller import InstructionSet, build_controller
from .errors import ContractError, InvariantViolation


@dataclass(frozen=True)
class Program:
    """Index sequence ``k_1 .. k_p``; ``steps[0]`` runs first."""

    steps: tuple
    m: int

    def __post_init__(self):
        steps = tuple(int(k) for k in self.steps)
        if not steps:
            raise ContractError("program must have at least one step")
        if self.m < 1:
            raise ContractError("alphabet size m must be positive")
        for pos, k in enumerate(steps):
            if not 0 <= k < self.m:
                raise ContractError(f"step {pos} index {k} outside [0, {self.m})")
        object.__setattr__(self, "steps", steps)

    @property
    def p(self) -> int:
        return len(self.steps)

    def padded(self, p: int) -> "Program":
        """Append no-op steps up to length ``p``."""
        if p < self.p:
            raise ContractError(f"program of length {self.p} does not fit in {p} steps")
        return Program(self.steps + (0,) * (p - self.p), self.m)


@dataclass(frozen=True)
class RomState:
    index: int
    m: int
    p: int

    def __post_init__(self):
        if not 0 <= self.index < self.m**self.p:
            raise ContractError(f"ROM index {self.index} outside [0, {self.m}^{self.p})")


@dataclass(frozen=True)
class BusConfig:
    m: int
    n: int
    p: int

    @property
    def dim(self) -> int:
        return self.m**self.p * self.n

    def check_dense(self) -> None:
        linalg.check_capacity(self.dim, "dense three-bus")


def encode_rom(prog: Program) -> RomState:
    index = 0
    for k in reversed(prog.steps):
        index = index * prog.m + k
    return RomState(index, prog.m, prog.p)


def decode_rom(rom: RomState) -> Program:
    steps = []
    rest = rom.index
    for _ in range(rom.p):
        rest, k = divmod(rest, rom.m)
        steps.append(k)
    return Program(tuple(steps), rom.m)


def shift_permutation(m: int, p: int) -> np.ndarray:
    """Image index of every ROM basis state under one cyclic shift.

    Digits ``(k_1, k_2, ..., k_p)`` become ``(k_2, ..., k_p, k_1)``.
    """
    size = m**p
    idx = np.arange(size)
    return idx // m + (idx % m) * m ** (p - 1)


def build_shift(m: int, p: int) -> np.ndarray:
    if m < 1 or p < 1:
        raise ContractError("m and p must be positive")
    linalg.check_capacity(m**p, "program register")
    perm = shift_permutation(m, p)
    out = np.zeros((m**p, m**p), dtype=complex)
    out[perm, np.arange(m**p)] = 1.0
    return out


def step_operator(iset: InstructionSet, p: int) -> np.ndarray:
    """One machine step ``(Shft (x) I_d) . (I_p (x) Ctrl)`` on the full space."""
    cfg = BusConfig(iset.m, iset.n, p)
    cfg.check_dense()
    ctrl = build_controller(iset).matrix
    prog_rest = np.eye(iset.m ** (p - 1), dtype=complex)
    data_eye = np.eye(iset.n, dtype=complex)
    return linalg.tensor_op(build_shift(iset.m, p), data_eye) @ linalg.tensor_op(prog_rest, ctrl)


def execute_dense(iset: InstructionSet, prog: Program, psi) -> tuple[RomState, np.ndarray]:
    """Run ``p`` machine steps on the full ``m^p * n`` space.

    Returns the final ROM basis state and the data-register factor. Every
    intermediate state is checked to be a product across the ROM/data cut.
    """
    psi = linalg.as_state(psi)
    if psi.shape[0] != iset.n:
        raise ContractError(f"state dim {psi.shape[0]} does not match data dim {iset.n}")
    if prog.m != iset.m:
        raise ContractError(f"program alphabet {prog.m} does not match instruction set size {iset.m}")
    rom_dim = iset.m**prog.p
    op = step_operator(iset, prog.p)
    state = linalg.tensor_state(linalg.basis_state(rom_dim, encode_rom(prog).index), psi)
    for step in range(prog.p):
        state = op @ state
        if linalg.schmidt_rank(state, rom_dim, iset.n) != 1:
            raise InvariantViolation(f"ROM and data entangled after step {step + 1}")
    blocks = state.reshape(rom_dim, iset.n)
    weights = np.linalg.norm(blocks, axis=1)
    index = int(np.argmax(weights))
    if abs(weights[index] - np.linalg.norm(weights)) > linalg.NORM_TOL:
        raise InvariantViolation("ROM register left the computational basis")
    return RomState(index, iset.m, prog.p), blocks[index].copy()


def execute_fast(iset: InstructionSet, prog: Program, psi) -> np.ndarray:
    """``u_{k_p} ... u_{k_1} psi`` by direct multiplication, ``k_1`` first."""
    psi = linalg.as_state(psi)
    if psi.shape[0] != iset.n:
        raise ContractError(f"state dim {psi.shape[0]} does not match data dim {iset.n}")
    if prog.m > iset.m:
        raise ContractError(f"program alphabet {prog.m} exceeds instruction set size {iset.m}")
    out = psi.copy()
    for k in prog.steps:
        out = iset.gates[k] @ out
    return out


def pack_run_length(prog: Program) -> list[tuple[int, int]]:
    """Collapse runs of equal indices into ``(count, index)`` pairs."""
    return [(len(list(run)), k) for k, run in groupby(prog.steps)]


def unpack_run_length(pairs, m: int | None = None) -> Program:
    steps = []
    for count, k in pairs:
        if count < 1:
            raise ContractError(f"run count must be >= 1, got {count}")
        steps.extend([k] * count)
    if not steps:
        raise ContractError("empty run-length list")
    if m is None:
        m = max(steps) + 1
    if min(steps) < 0 or max(steps) >= m:
        raise ContractError(f"run index outside [0, {m})")
    return Program(tuple(steps), m)

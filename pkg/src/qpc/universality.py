"""Near-identity instruction sets, Lie-algebra closure, and program synthesis."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels, linalg
from .controller import InstructionSet
from .errors import ContractError, NonTerminationError
from .program_bus import Program

log = logging.getLogger(__name__)

LIE_TOL = 1e-9
DEFAULT_NODE_BUDGET = 10**7


@dataclass(frozen=True, eq=False)
class HamiltonianSet:
    n: int
    hams: tuple

    def __post_init__(self):
        hams = tuple(linalg.as_operator(h, f"hamiltonian {k}") for k, h in enumerate(self.hams))
        for k, h in enumerate(hams):
            if h.shape != (self.n, self.n):
                raise ContractError(f"hamiltonian {k} has shape {h.shape}, expected ({self.n}, {self.n})")
            if not linalg.is_hermitian(h):
                raise ContractError(f"hamiltonian {k} is not Hermitian")
        object.__setattr__(self, "hams", hams)


def epsilon_instruction_set(hs: HamiltonianSet, eps: float) -> InstructionSet:
    """``{I, exp(i H_1 eps), ..., exp(i H_k eps)}``."""
    gates = [np.eye(hs.n, dtype=complex)]
    gates.extend(linalg.hermitian_exp(h, eps) for h in hs.hams)
    return InstructionSet(tuple(gates))


def parametric_instruction(axis: int, phi: float) -> np.ndarray:
    """``exp(i sigma_axis phi)`` for axis 1, 2, 3 (x, y, z)."""
    if axis not in (1, 2, 3):
        raise ContractError(f"axis must be 1, 2 or 3, got {axis!r}")
    # closed form; sigma^2 = I
    return np.cos(phi) * linalg.I2 + 1j * np.sin(phi) * linalg.PAULIS[axis - 1]


def group_commutator(ua, ub) -> np.ndarray:
    """``ua ub ua^dag ub^dag``.

    For ``ua = exp(i A eps)``, ``ub = exp(i B eps)`` this is
    ``exp(i (i[A, B]) eps^2) + O(eps^3)``.
    """
    ua = linalg.as_operator(ua, "ua")
    ub = linalg.as_operator(ub, "ub")
    if ua.shape != ub.shape:
        raise ContractError(f"dimension mismatch: {ua.shape[0]} vs {ub.shape[0]}")
    return ua @ ub @ ua.conj().T @ ub.conj().T


# Hermitian matrices as vectors of R^{2 n^2}; the Euclidean product there is
# Re tr(A^dag B).
def _vec(h: np.ndarray) -> np.ndarray:
    return np.concatenate([h.real.ravel(), h.imag.ravel()])


def _unvec(v: np.ndarray, n: int) -> np.ndarray:
    half = n * n
    return (v[:half] + 1j * v[half:]).reshape(n, n)


def _orthogonalize(v: np.ndarray, basis: list, tol: float):
    """Normalize ``v``, remove its span components twice, return the unit residual or None."""
    norm = np.linalg.norm(v)
    if norm <= tol:
        return None
    v = v / norm
    for _ in range(2):
        for b in basis:
            v = v - np.dot(b, v) * b
    rest = np.linalg.norm(v)
    if rest <= tol:
        return None
    return v / rest


@dataclass(frozen=True, eq=False)
class LieClosureReport:
    n: int
    generated_dim: int
    universal: bool
    basis: list = field(repr=False)
    iterations: int
    contains_identity: bool


def lie_closure(hs: HamiltonianSet, tol: float = LIE_TOL, max_iter: int = 100) -> LieClosureReport:
    """Real span of the Hamiltonians and all nested commutators ``i[A, B]``.

    Each round forms ``i[A, B]`` for every pair involving an element added in
    the previous round and keeps the candidates with a component outside the
    current span. Stops when a round adds nothing.
    """
    if tol <= 0:
        raise ContractError("tol must be positive")
    n = hs.n
    basis = []
    for h in hs.hams:
        v = _orthogonalize(_vec(h), basis, tol)
        if v is not None:
            basis.append(v)
    mats = [_unvec(v, n) for v in basis]
    fresh = list(range(len(mats)))
    iterations = 0
    while fresh:
        if iterations >= max_iter:
            raise NonTerminationError(
                f"Lie closure not stable after {max_iter} rounds (dim {len(basis)})",
                partial_dim=len(basis),
            )
        iterations += 1
        count = len(mats)
        added = []
        for i in range(count):
            for j in fresh:
                if j <= i and i in fresh:
                    continue
                a, b = mats[i], mats[j]
                comm = 1j * (a @ b - b @ a)
                v = _orthogonalize(_vec(comm), basis, tol)
                if v is not None:
                    basis.append(v)
                    mats.append(_unvec(v, n))
                    added.append(len(mats) - 1)
        fresh = added
    ident = _vec(np.eye(n, dtype=complex))
    contains_identity = _orthogonalize(ident, basis, tol) is None
    dim = len(basis)
    universal = dim == n * n or (dim == n * n - 1 and not contains_identity)
    return LieClosureReport(n, dim, universal, mats, iterations, contains_identity)


def gate_hamiltonian(u, degeneracy_tol: float = 1e-8):
    """Principal Hermitian log ``H`` with ``u = exp(i H)``, eigenphases in (-pi, pi].

    Returns ``None`` when ``-1`` is a repeated eigenvalue, where the choice
    of log is ambiguous.
    """
    u = linalg.as_operator(u)
    if not linalg.is_unitary(u):
        raise ContractError("gate_hamiltonian requires a unitary")
    t, z = scipy.linalg.schur(u, output="complex")
    evals = np.diag(t)
    if np.count_nonzero(np.abs(evals + 1) < degeneracy_tol) >= 2:
        return None
    phases = np.angle(evals)
    # angle() may return -pi for eigenvalue -1 from rounding
    phases = np.where(phases <= -np.pi + 1e-12, np.pi, phases)
    h = (z * phases) @ z.conj().T
    return (h + h.conj().T) / 2


@dataclass(frozen=True)
class SynthesisResult:
    """Outcome of :func:`synthesize`.

    When ``found`` is false, ``program`` and ``distance`` describe the closest
    sequence seen; ``budget_exhausted`` tells whether the node budget stopped
    the search before ``max_len``.
    """

    program: Program
    distance: float
    expanded_nodes: int
    found: bool
    budget_exhausted: bool = False

    @property
    def length(self) -> int:
        """Number of non-trivial instructions (0 for the identity program)."""
        return sum(1 for k in self.program.steps if k != 0)


def realized_operator(iset: InstructionSet, steps) -> np.ndarray:
    out = np.eye(iset.n, dtype=complex)
    for k in steps:
        out = iset.gates[k] @ out
    return out


def synthesize(target, iset: InstructionSet, max_len: int, tol: float,
               node_budget: int = DEFAULT_NODE_BUDGET, backend: str | None = None) -> SynthesisResult:
    """Shortest, then lexicographically first, program within ``tol`` of ``target``.

    Iterative deepening over sequences of non-identity instructions; the
    identity instruction only appears as the program ``(0,)`` for targets
    already within ``tol`` of the identity.
    """
    target = linalg.as_operator(target, "target")
    if target.shape[0] != iset.n:
        raise ContractError(f"target dim {target.shape[0]} does not match data dim {iset.n}")
    if max_len < 1:
        raise ContractError("max_len must be >= 1")
    if tol <= 0:
        raise ContractError("tol must be positive")

    def result(steps, nodes, found, exhausted=False):
        prog = Program(tuple(steps) or (0,), iset.m)
        dist = linalg.phase_distance(realized_operator(iset, prog.steps), target)
        return SynthesisResult(prog, dist, nodes, found, exhausted)

    nodes = 1
    best_dist = linalg.phase_distance(np.eye(iset.n), target)
    best_steps = []
    if best_dist <= tol:
        return result([], nodes, True)
    gates = np.stack(iset.gates[1:]) if iset.m > 1 else None
    g = iset.m - 1
    if g == 0:
        return result([], nodes, False)
    for length in range(1, max_len + 1):
        level = g**length
        if nodes + level > node_budget:
            log.info("node budget %d exhausted before length %d", node_budget, length)
            return result(best_steps, nodes, False, exhausted=True)
        hit, evaluated, dist, where = _kernels.search_level(gates, target, length, tol, backend)
        nodes += evaluated
        if dist < best_dist:
            best_dist = dist
            best_steps = [k + 1 for k in _kernels.sequence_digits(where, g, length)]
        if hit >= 0:
            steps = [k + 1 for k in _kernels.sequence_digits(hit, g, length)]
            return result(steps, nodes, True)
    return result(best_steps, nodes, False)

"""Controller unitaries and the no-programming analysis.

A controller over an ``m``-dimensional control register and an
``n``-dimensional data register applies gate ``u_k`` to the data whenever the
control register holds basis state ``|k>``. Its matrix is block diagonal with
blocks ``u_0 .. u_{m-1}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ContractError

DEFAULT_SAMPLES = 8
DEFAULT_SEED = 0
# spread below this counts as "psi-independent"
SPREAD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class InstructionSet:
    """Gates ``u_0 .. u_{m-1}`` on an ``n``-dimensional data space, ``u_0 = I``."""

    gates: tuple

    def __post_init__(self):
        if len(self.gates) < 1:
            raise ContractError("instruction set needs at least the identity")
        gates = tuple(linalg.as_operator(g, f"gate {k}") for k, g in enumerate(self.gates))
        n = gates[0].shape[0]
        for k, g in enumerate(gates):
            if g.shape != (n, n):
                raise ContractError(f"gate {k} has shape {g.shape}, expected ({n}, {n})")
            if not linalg.is_unitary(g):
                raise ContractError(f"gate {k} is not unitary")
        if not np.array_equal(gates[0], np.eye(n)):
            raise ContractError("gate 0 must be exactly the identity")
        for g in gates:
            g.setflags(write=False)
        object.__setattr__(self, "gates", gates)

    @classmethod
    def from_gates(cls, gates):
        """Build a set from the non-trivial gates, prepending the identity."""
        gates = [linalg.as_operator(g) for g in gates]
        if not gates:
            raise ContractError("need at least one gate")
        n = gates[0].shape[0]
        return cls((np.eye(n, dtype=complex), *gates))

    @property
    def m(self) -> int:
        return len(self.gates)

    @property
    def n(self) -> int:
        return self.gates[0].shape[0]


@dataclass(frozen=True, eq=False)
class ControllerUnitary:
    m: int
    n: int
    matrix: np.ndarray
    block_diagonal: bool = True

    def block(self, k: int) -> np.ndarray:
        if not 0 <= k < self.m:
            raise ContractError(f"program index {k} out of range [0, {self.m})")
        lo = k * self.n
        return self.matrix[lo:lo + self.n, lo:lo + self.n]


def controller_blocks(iset: InstructionSet) -> np.ndarray:
    """Place ``u_k`` on the k-th diagonal block of an ``mn x mn`` zero matrix."""
    m, n = iset.m, iset.n
    linalg.check_capacity(m * n, "controller")
    out = np.zeros((m * n, m * n), dtype=complex)
    for k, u in enumerate(iset.gates):
        out[k * n:(k + 1) * n, k * n:(k + 1) * n] = u
    return out


def controller_dirac(iset: InstructionSet) -> np.ndarray:
    """``sum_k |k><k| (x) u_k``."""
    m, n = iset.m, iset.n
    out = np.zeros((m * n, m * n), dtype=complex)
    for k, u in enumerate(iset.gates):
        proj = np.zeros((m, m), dtype=complex)
        proj[k, k] = 1.0
        out += linalg.tensor_op(proj, u)
    return out


def build_controller(iset: InstructionSet) -> ControllerUnitary:
    if not isinstance(iset, InstructionSet):
        iset = InstructionSet(tuple(iset))
    blocks = controller_blocks(iset)
    dirac = controller_dirac(iset)
    if not np.array_equal(blocks, dirac):
        raise AssertionError("block placement and Dirac sum disagree")
    blocks.setflags(write=False)
    return ControllerUnitary(iset.m, iset.n, blocks, block_diagonal=True)


def controlled_u(u) -> ControllerUnitary:
    """The two-qubit controlled-U gate: identity on ``|0>``, ``u`` on ``|1>``."""
    u = linalg.as_operator(u, "u")
    if u.shape != (2, 2):
        raise ContractError(f"controlled_u expects a 2x2 gate, got {u.shape}")
    return build_controller(InstructionSet((linalg.I2.copy(), u)))


def apply_with_program_state(ctrl: ControllerUnitary, k: int, psi, check: bool = False) -> np.ndarray:
    """Data-register output ``u_k psi`` for basis program ``|k>``.

    With ``check=True`` the dense product ``ctrl (|k> (x) psi)`` is also formed
    and compared against ``|k> (x) u_k psi``.
    """
    psi = linalg.as_state(psi)
    if psi.shape[0] != ctrl.n:
        raise ContractError(f"state dim {psi.shape[0]} does not match data dim {ctrl.n}")
    out = ctrl.block(k) @ psi
    if check:
        prog = linalg.basis_state(ctrl.m, k)
        dense = linalg.apply(ctrl.matrix, linalg.tensor_state(prog, psi))
        if not np.allclose(dense, linalg.tensor_state(prog, out), rtol=0, atol=1e-12):
            raise AssertionError("dense controller application disagrees with block action")
    return out


def default_samples(n: int, count: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> list:
    rng = np.random.default_rng(seed)
    return [linalg.random_state(n, rng) for _ in range(count)]


def overlap_spread(values) -> float:
    """Diameter of a set of complex numbers, ``max |z_i - z_j|``."""
    z = np.asarray(values, dtype=complex)
    return float(np.max(np.abs(z[:, None] - z[None, :])))


def gate_overlap_spread(ua, ub, samples) -> float:
    """How much ``<psi| ua^dag ub |psi>`` varies over the sample states.

    Zero exactly when the gates agree up to a global phase on the samples'
    span; strictly positive values show the overlap depends on ``psi``.
    """
    ua = linalg.as_operator(ua, "ua")
    ub = linalg.as_operator(ub, "ub")
    if ua.shape != ub.shape:
        raise ContractError("gate dimensions differ")
    vals = [np.vdot(ua @ psi, ub @ psi) for psi in samples]
    return overlap_spread(vals)


def _factor_product(state: np.ndarray, prog: np.ndarray, m: int, n: int):
    """Split a rank-1 ``m*n`` state into ``|prog'> (x) |data>``.

    The program factor's phase is fixed so that ``<prog|prog'>`` is real
    positive (or its largest entry is, if orthogonal); for a basis program this
    makes the data factor exactly ``u_k psi``.
    """
    mat = state.reshape(m, n)
    u, s, vh = np.linalg.svd(mat)
    prog_out = u[:, 0] * s[0]
    data = vh[0]
    ref = np.vdot(prog, prog_out)
    if abs(ref) < 1e-12:
        ref = prog_out[np.argmax(np.abs(prog_out))]
    phase = ref / abs(ref)
    return prog_out / phase, data * phase


@dataclass(frozen=True)
class OrthogonalityReport:
    """Outcome of checking the scalar-product identity for two programs.

    ``entangled`` is the distinct outcome where some output is not a product
    state; the numeric fields other than ``program_overlap`` are then ``None``.
    """

    program_overlap: complex
    entangled: bool
    entangled_sample: int | None
    residual: float | None
    gate_overlap_spread: float | None

    @property
    def certifies_orthogonality(self) -> bool:
        """Data-dependent gate overlap: distinct gates force ``<A|B> = 0``."""
        return (not self.entangled) and self.gate_overlap_spread > SPREAD_TOL


def orthogonality_residual(ctrl: ControllerUnitary, prog_a, prog_b, samples=None) -> OrthogonalityReport:
    """Check ``<A|B> = <A'|B'> <psi|u_A^dag u_B|psi>`` across sample data states."""
    prog_a = linalg.as_state(prog_a, "prog_a")
    prog_b = linalg.as_state(prog_b, "prog_b")
    m, n = ctrl.m, ctrl.n
    if prog_a.shape[0] != m or prog_b.shape[0] != m:
        raise ContractError(f"program states must have dim {m}")
    if samples is None:
        samples = default_samples(n)
    if len(samples) < 2:
        raise ContractError("need at least two sample states")
    overlap = complex(np.vdot(prog_a, prog_b))
    residual = 0.0
    gate_overlaps = []
    for idx, psi in enumerate(samples):
        psi = linalg.as_state(psi)
        out_a = ctrl.matrix @ linalg.tensor_state(prog_a, psi)
        out_b = ctrl.matrix @ linalg.tensor_state(prog_b, psi)
        if linalg.schmidt_rank(out_a, m, n) > 1 or linalg.schmidt_rank(out_b, m, n) > 1:
            return OrthogonalityReport(overlap, True, idx, None, None)
        a_out, data_a = _factor_product(out_a, prog_a, m, n)
        b_out, data_b = _factor_product(out_b, prog_b, m, n)
        data_overlap = np.vdot(data_a, data_b)
        gate_overlaps.append(data_overlap)
        residual = max(residual, abs(overlap - np.vdot(a_out, b_out) * data_overlap))
    return OrthogonalityReport(overlap, False, None, float(residual), overlap_spread(gate_overlaps))


def superposed_program_entanglement(ctrl: ControllerUnitary, weights, psi) -> int:
    """Schmidt rank across the control/data cut after ``ctrl`` acts on a superposed program."""
    w = linalg.as_state(weights, "weights")
    if w.shape[0] != ctrl.m:
        raise ContractError(f"need {ctrl.m} weights, got {w.shape[0]}")
    if abs(np.linalg.norm(w) - 1) > linalg.NORM_TOL:
        raise ContractError("weights must be normalized")
    psi = linalg.as_state(psi)
    if psi.shape[0] != ctrl.n:
        raise ContractError(f"state dim {psi.shape[0]} does not match data dim {ctrl.n}")
    out = ctrl.matrix @ linalg.tensor_state(w, psi)
    return linalg.schmidt_rank(out, ctrl.m, ctrl.n)


def non_unitary_universal_map(n: int) -> np.ndarray:
    """Matrix of the linear map ``A (x) v -> 1 (x) A v`` on ``(H (x) H*) (x) H``.

    Basis: ``e_ij (x) e_k`` sits at ``(i*n + j)*n + k`` and maps to
    ``delta_jk sum_l e_ll (x) e_i``. The map is linear but, for ``n >= 2``,
    far from unitary.
    """
    if n < 1:
        raise ContractError("n must be positive")
    dim = n**3
    linalg.check_capacity(dim, "universal map")
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(n):
        for j in range(n):
            col = (i * n + j) * n + j
            for l in range(n):
                out[(l * n + l) * n + i, col] = 1.0
    return out

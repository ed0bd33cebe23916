"""Simulation of programmable quantum controllers.

A fixed unitary acting on a control register and a data register applies a
different gate to the data for each orthogonal program state. This package
builds such controllers, runs programs on a three-bus (program, controller,
data) machine, and checks universality of instruction sets.
"""
from .controller import (ControllerUnitary, InstructionSet, OrthogonalityReport, apply_with_program_state,
                         build_controller, controlled_u, gate_overlap_spread, non_unitary_universal_map,
                         orthogonality_residual, superposed_program_entanglement)
from .errors import CapacityError, ContractError, InvariantViolation, NonTerminationError, QPCError
from .linalg import (apply, hermitian_exp, is_unitary, phase_distance, schmidt_rank, tensor_op,
                     tensor_state)
from .program_bus import (BusConfig, Program, RomState, build_shift, decode_rom, encode_rom,
                          execute_dense, execute_fast, pack_run_length, unpack_run_length)
from .progfile import ProgramFile, ProgramFileError, parse_program_file
from .universality import (HamiltonianSet, LieClosureReport, SynthesisResult, epsilon_instruction_set,
                           group_commutator, lie_closure, parametric_instruction, synthesize)

__version__ = "0.1.0"

"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 numeric or capacity failure,
3 synthesis target not found.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import linalg
from .controller import (InstructionSet, build_controller, default_samples,
                         orthogonality_residual, superposed_program_entanglement)
from .errors import CapacityError, ContractError, InvariantViolation, NonTerminationError
from .program_bus import encode_rom, execute_dense, execute_fast
from .progfile import parse_gate_expression, parse_program_file
from .universality import HamiltonianSet, gate_hamiltonian, lie_closure, synthesize

log = logging.getLogger("qpc")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_NOT_FOUND = 0, 1, 2, 3


class InputError(Exception):
    """Bad command-line input (as opposed to a bad program file)."""


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".16e")


def dumps(obj) -> str:
    """Serialize a report; floats get 17 significant digits in lowercase scientific."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_program_file(text)


def cmd_run(args) -> tuple[dict, int]:
    pf = _load(args.file)
    final = execute_fast(pf.iset, pf.program, pf.initial_state)
    report = {
        "command": "run",
        "m": pf.config.m,
        "n": pf.config.n,
        "p": pf.config.p,
        "program": list(pf.program.steps),
        "rom_index": encode_rom(pf.program).index,
        "final_state": [complex(a) for a in final],
        "norm": float(np.linalg.norm(final)),
        "dense": bool(args.dense),
        "rom_restored": None,
        "cross_check_residual": None,
        "fidelity": None,
    }
    if args.dense:
        rom, data = execute_dense(pf.iset, pf.program, pf.initial_state)
        report["rom_restored"] = rom.index == encode_rom(pf.program).index
        report["cross_check_residual"] = float(np.linalg.norm(data - final))
    if pf.target is not None:
        expected = pf.target @ pf.initial_state
        report["fidelity"] = float(abs(np.vdot(expected, final)) ** 2)
    return report, EXIT_OK


def cmd_check_universality(args) -> tuple[dict, int]:
    pf = _load(args.file)
    hams, sources, skipped, warnings = [], [], [], []
    for name, h in pf.hamiltonians:
        hams.append(h)
        sources.append(name)
    for idx, name in enumerate(pf.gate_names):
        if idx == 0:
            continue
        h = gate_hamiltonian(pf.iset.gates[idx])
        if h is None:
            msg = f"gate {name!r} has a degenerate -1 eigenvalue; principal log ambiguous, skipped"
            log.warning(msg)
            warnings.append(msg)
            skipped.append(name)
            continue
        hams.append(h)
        sources.append(name)
    rep = lie_closure(HamiltonianSet(pf.config.n, tuple(hams)), tol=args.tol, max_iter=args.max_iter)
    report = {
        "command": "check-universality",
        "n": pf.config.n,
        "n_squared": pf.config.n ** 2,
        "generators": sources,
        "skipped": skipped,
        "generated_dim": rep.generated_dim,
        "contains_identity": rep.contains_identity,
        "iterations": rep.iterations,
        "universal": rep.universal,
        "warnings": warnings,
    }
    return report, EXIT_OK


def cmd_synthesize(args) -> tuple[dict, int]:
    pf = _load(args.file)
    if args.target is not None:
        target = parse_gate_expression(args.target, pf)
    elif pf.target is not None:
        target = pf.target
    else:
        raise InputError("no target: pass --target or add a 'target' line")
    if target.shape[0] != pf.config.n:
        raise InputError(f"target is {target.shape[0]}x{target.shape[0]}, data dimension is {pf.config.n}")
    if not linalg.is_unitary(target, 1e-8):
        raise InputError("target is not unitary")
    res = synthesize(target, pf.iset, args.max_len, args.tol, node_budget=args.node_budget)
    report = {
        "command": "synthesize",
        "found": res.found,
        "program": " ".join(str(k) for k in res.program.steps),
        "length": res.length,
        "distance": res.distance,
        "tol": args.tol,
        "max_len": args.max_len,
        "expanded_nodes": res.expanded_nodes,
        "budget_exhausted": res.budget_exhausted,
    }
    return report, EXIT_OK if res.found else EXIT_NOT_FOUND


def cmd_demo(args) -> tuple[dict, int]:
    names = [g.strip() for g in args.gates.split(",") if g.strip()]
    if len(names) < 2:
        raise InputError("--gates needs at least two instructions")
    try:
        mats = [parse_gate_expression(g) for g in names]
    except ContractError as exc:
        raise InputError(str(exc)) from None
    if not linalg.is_unitary(mats[0]) or not np.allclose(mats[0], np.eye(mats[0].shape[0]), rtol=0, atol=1e-12):
        raise InputError("first instruction of --gates must be the identity")
    mats[0] = np.eye(mats[0].shape[0], dtype=complex)
    ctrl = build_controller(InstructionSet(tuple(mats)))
    m, n = ctrl.m, ctrl.n
    samples = default_samples(n, args.samples, args.seed)
    basis = orthogonality_residual(ctrl, linalg.basis_state(m, 0), linalg.basis_state(m, 1), samples)
    weights = np.full(m, 1 / math.sqrt(m), dtype=complex)
    superposed = orthogonality_residual(ctrl, linalg.basis_state(m, 0), weights, samples)
    rank = superposed_program_entanglement(ctrl, weights, linalg.basis_state(n, 0))
    report = {
        "command": "demo no-programming",
        "gates": names,
        "seed": args.seed,
        "samples": args.samples,
        "basis_programs": {
            "program_overlap": basis.program_overlap,
            "entangled": basis.entangled,
            "residual": basis.residual,
            "gate_overlap_spread": basis.gate_overlap_spread,
        },
        "superposed_program": {
            "program_overlap": superposed.program_overlap,
            "entangled": superposed.entangled,
            "entangled_sample": superposed.entangled_sample,
            "residual": superposed.residual,
            "gate_overlap_spread": superposed.gate_overlap_spread,
        },
        "schmidt_rank": rank,
        "verdict": "orthogonality required" if rank > 1 else "no constraint",
    }
    return report, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpc", description="Programmable quantum controller simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a program file")
    run.add_argument("file")
    run.add_argument("--dense", action="store_true", help="also run the full three-bus simulation")
    run.add_argument("--json", metavar="PATH", help="write the report to PATH as well")
    run.set_defaults(func=cmd_run)

    uni = sub.add_parser("check-universality", help="Lie-algebra closure of the file's generators")
    uni.add_argument("file")
    uni.add_argument("--tol", type=float, default=1e-9)
    uni.add_argument("--max-iter", type=int, default=100)
    uni.add_argument("--json", metavar="PATH")
    uni.set_defaults(func=cmd_check_universality)

    syn = sub.add_parser("synthesize", help="search for a program approximating a target gate")
    syn.add_argument("file")
    syn.add_argument("--target", help="gate expression; defaults to the file's target line")
    syn.add_argument("--max-len", type=int, required=True)
    syn.add_argument("--tol", type=float, required=True)
    syn.add_argument("--node-budget", type=int, default=10**7)
    syn.add_argument("--json", metavar="PATH")
    syn.set_defaults(func=cmd_synthesize)

    demo = sub.add_parser("demo", help="canned demonstrations")
    demo.add_argument("name", choices=["no-programming"])
    demo.add_argument("--gates", default="I,X", help="comma-separated instructions, identity first")
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--samples", type=int, default=8)
    demo.add_argument("--json", metavar="PATH")
    demo.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        report, code = args.func(args)
    except (InputError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CapacityError, NonTerminationError, InvariantViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = dumps(report) + "\n"
    sys.stdout.write(text)
    if getattr(args, "json", None):
        try:
            Path(args.json).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.json}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())

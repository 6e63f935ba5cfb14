"""Monte Carlo tree search routing of CNOT circuits onto constrained architectures.

The usual entry points:

    from mctsroute import builtin_q20, read_qasm, transform

    result = transform(read_qasm("circuit.qasm"), builtin_q20())
    result.added_cnots, result.added_depth

Everything else (verification, benchmarking, the QASM writer) is re-exported
here as well; the submodules hold the detail.
"""

from .arch import ArchGraph, builtin_q20, from_edge_list, grid, load_edge_list, parse_arch
from .bench import bench_run, best_of, greedy_route, random_circuit, scaling_run
from .circuits import Circuit, Gate, circuit, circuit_depth, cnot, single, swap
from .mcts import MctsParams, TransformResult, transform
from .qasm import QasmError, emit_qasm, parse_qasm, read_qasm, write_qasm
from .verify import (
    VerificationReport,
    check_connectivity,
    check_equivalence,
    gf2_matrix_of,
    overhead_stats,
    swap_permutation,
    verify_routed,
)

__all__ = [
    "ArchGraph",
    "Circuit",
    "Gate",
    "MctsParams",
    "QasmError",
    "TransformResult",
    "VerificationReport",
    "bench_run",
    "best_of",
    "builtin_q20",
    "check_connectivity",
    "check_equivalence",
    "circuit",
    "circuit_depth",
    "cnot",
    "emit_qasm",
    "from_edge_list",
    "gf2_matrix_of",
    "greedy_route",
    "grid",
    "load_edge_list",
    "overhead_stats",
    "parse_arch",
    "parse_qasm",
    "random_circuit",
    "read_qasm",
    "scaling_run",
    "single",
    "swap",
    "swap_permutation",
    "transform",
    "verify_routed",
    "write_qasm",
]

"""Exact checks for routed circuits.

A routed circuit is accepted when (1) every two-qubit gate sits on an
architecture edge, (2) its CNOT skeleton equals the input skeleton relocated
by the initial mapping and the accumulated SWAP permutation over GF(2), and
(3) per logical qubit, single-qubit gates keep their relative order around
the CNOTs. The GF(2) check is exact linear algebra on packed bit rows, not a
heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arch import ArchGraph
from .circuits import Circuit, Gate, circuit_depth, decompose_swaps


class Gf2Matrix:
    """Square matrix over GF(2); each row is a packed int bitmask."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: list[int] | None = None):
        self.n = n
        self.rows = rows if rows is not None else [1 << i for i in range(n)]

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(n)

    @classmethod
    def permutation(cls, perm) -> "Gf2Matrix":
        """Matrix moving the value on wire v to wire perm[v]."""
        n = len(perm)
        rows = [0] * n
        for v, target in enumerate(perm):
            rows[target] = 1 << v
        if 0 in rows:
            raise ValueError("perm is not a permutation")
        return cls(n, rows)

    def apply_cnot(self, control: int, target: int) -> None:
        """Left-multiply by the CNOT update: row target += row control."""
        self.rows[target] ^= self.rows[control]

    def apply_swap(self, a: int, b: int) -> None:
        self.rows[a], self.rows[b] = self.rows[b], self.rows[a]

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.n != other.n:
            raise ValueError("size mismatch")
        out = []
        for r in self.rows:
            acc = 0
            m = r
            while m:
                k = (m & -m).bit_length() - 1
                acc ^= other.rows[k]
                m &= m - 1
            out.append(acc)
        return Gf2Matrix(self.n, out)

    def mul_vec(self, x: int) -> int:
        """Matrix times a packed column vector."""
        y = 0
        for i, r in enumerate(self.rows):
            y |= (bin(r & x).count("1") & 1) << i
        return y

    def __eq__(self, other) -> bool:
        return isinstance(other, Gf2Matrix) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, tuple(self.rows)))


def gf2_matrix_of(c: Circuit, n: int | None = None) -> Gf2Matrix:
    """Fold a circuit's CNOT/SWAP skeleton into a GF(2) matrix.

    Single-qubit gates do not touch the skeleton and are skipped. Composing
    circuits multiplies matrices in reverse order: the matrix of c1 followed
    by c2 is matrix(c2) @ matrix(c1).
    """
    m = Gf2Matrix.identity(c.num_qubits if n is None else n)
    for g in c.gates:
        if g.is_cnot:
            m.apply_cnot(g.control, g.target)
        elif g.is_swap:
            m.apply_swap(*g.qubits)
    return m


def swap_permutation(physical: Circuit) -> tuple[int, ...]:
    """Net wire permutation of the SWAPs in a routed circuit.

    perm[v] is where the content initially on wire v ends up.
    """
    perm = list(range(physical.num_qubits))
    pos = list(range(physical.num_qubits))  # pos[initial] = current wire
    at = list(range(physical.num_qubits))   # at[wire] = initial occupant
    for g in physical.gates:
        if g.is_swap:
            a, b = g.qubits
            ia, ib = at[a], at[b]
            at[a], at[b] = ib, ia
            pos[ia], pos[ib] = b, a
    return tuple(pos)


@dataclass(frozen=True)
class VerificationReport:
    connectivity_ok: bool
    equivalent: bool
    order_ok: bool
    bad_gates: tuple[int, ...]  # indices of gates off the architecture

    @property
    def ok(self) -> bool:
        return self.connectivity_ok and self.equivalent and self.order_ok


def check_connectivity(physical: Circuit, arch: ArchGraph) -> list[int]:
    """Indices of two-qubit gates whose operands are not adjacent."""
    bad = []
    for i, g in enumerate(physical.gates):
        if len(g.qubits) == 2 and not arch.adjacent(*g.qubits):
            bad.append(i)
    return bad


def check_equivalence(
    lc: Circuit,
    physical: Circuit,
    initial_mapping,
    perm,
) -> bool:
    """Exact skeleton equivalence over GF(2).

    The routed skeleton must equal the input skeleton embedded at the
    initial mapping and then relocated by the SWAP permutation:
    M_physical == P_perm @ M_embedded.
    """
    n = physical.num_qubits
    embedded = Gf2Matrix.identity(n)
    for g in lc.gates:
        if g.is_cnot:
            embedded.apply_cnot(initial_mapping[g.control], initial_mapping[g.target])
        elif g.is_swap:
            raise ValueError("input circuits may not contain SWAP gates")
    m_phys = gf2_matrix_of(decompose_swaps(physical), n)
    return m_phys == Gf2Matrix.permutation(perm) @ embedded


def check_gate_order(
    lc: Circuit,
    physical_gates,
    provenance,
) -> bool:
    """Per logical qubit, emitted gates keep the input's relative order.

    Uses the router's provenance tags: each emitted gate carries the input
    gate index it realizes (bridges tag all four CNOTs with the bridged
    gate). SWAPs carry no input gate and are skipped.
    """
    want: dict[int, list[int]] = {q: [] for q in range(lc.num_qubits)}
    for oi, g in enumerate(lc.gates):
        for q in g.qubits:
            want[q].append(oi)
    got: dict[int, list[int]] = {q: [] for q in range(lc.num_qubits)}
    last_bridge = None
    for g, (kind, oi) in zip(physical_gates, provenance):
        if kind == "swap":
            last_bridge = None
            continue
        if kind == "bridge":
            if oi == last_bridge:
                continue
            last_bridge = oi
        else:
            last_bridge = None
        for q in lc.gates[oi].qubits:
            got[q].append(oi)
    return got == want


def overhead_stats(lc: Circuit, physical: Circuit) -> tuple[int, int]:
    """(added CNOTs after SWAP decomposition, added schedule depth)."""
    added_cnots = decompose_swaps(physical).cnot_count - lc.cnot_count
    added_depth = circuit_depth(physical) - circuit_depth(lc)
    return added_cnots, added_depth


def verify_routed(
    lc: Circuit,
    physical: Circuit,
    initial_mapping,
    perm,
    arch: ArchGraph,
    provenance=None,
) -> VerificationReport:
    """Run every check; order is only checked when provenance is available."""
    bad = check_connectivity(physical, arch)
    equivalent = check_equivalence(lc, physical, initial_mapping, perm)
    order_ok = (
        check_gate_order(lc, physical.gates, provenance)
        if provenance is not None
        else True
    )
    return VerificationReport(
        connectivity_ok=not bad,
        equivalent=equivalent,
        order_ok=order_ok,
        bad_gates=tuple(bad),
    )

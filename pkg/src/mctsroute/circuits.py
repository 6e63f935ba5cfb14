"""Gate and circuit primitives shared by the router, verifier and IO layers.

Circuits are immutable gate sequences over integer qubit indices. Two-qubit
gates are restricted to CNOT and SWAP; everything else is a named
single-qubit gate with optional float parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

SINGLE_QUBIT_GATES = frozenset({
    "u1", "u2", "u3", "h", "x", "y", "z", "s", "sdg",
    "t", "tdg", "rx", "ry", "rz", "id",
})

TWO_QUBIT_GATES = frozenset({"cx", "swap"})


@dataclass(frozen=True)
class Gate:
    """One gate application: a name, operand qubits, optional parameters."""

    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.name in TWO_QUBIT_GATES:
            if len(self.qubits) != 2:
                raise ValueError(f"{self.name} takes 2 qubits, got {self.qubits}")
            if self.qubits[0] == self.qubits[1]:
                raise ValueError(f"{self.name} operands must be distinct: {self.qubits}")
        elif self.name in SINGLE_QUBIT_GATES:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.name} takes 1 qubit, got {self.qubits}")
        else:
            raise ValueError(f"unsupported gate {self.name!r}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")

    @property
    def is_cnot(self) -> bool:
        return self.name == "cx"

    @property
    def is_swap(self) -> bool:
        return self.name == "swap"

    @property
    def is_single(self) -> bool:
        return len(self.qubits) == 1

    @property
    def control(self) -> int:
        return self.qubits[0]

    @property
    def target(self) -> int:
        return self.qubits[1]


def cnot(control: int, target: int) -> Gate:
    return Gate("cx", (control, target))


def swap(a: int, b: int) -> Gate:
    return Gate("swap", (a, b))


def single(name: str, qubit: int, *params: float) -> Gate:
    return Gate(name, (qubit,), tuple(params))


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on ``num_qubits`` wires."""

    num_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        if self.num_qubits < 0:
            raise ValueError("num_qubits must be non-negative")
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise ValueError(f"gate {g} exceeds {self.num_qubits} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.is_cnot)


def circuit(num_qubits: int, gates) -> Circuit:
    """Build a Circuit from any iterable of gates."""
    return Circuit(num_qubits, tuple(gates))


@dataclass(frozen=True)
class DependencyGraph:
    """Direct-dependence DAG of a circuit.

    Gate j is a parent of gate i when j precedes i, they share a qubit, and
    no single intermediate gate k both depends on j and is depended on by i.
    Edges covered by such a two-step path are dropped; the transitive closure
    of what remains still recovers the full ordering constraints.
    """

    num_gates: int
    parents: tuple[tuple[int, ...], ...]
    children: tuple[tuple[int, ...], ...]

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (p, i) for i, ps in enumerate(self.parents) for p in ps
        )


def _last_use_parents(gates: tuple[Gate, ...]) -> list[tuple[int, ...]]:
    """Candidate parents: for each operand qubit, the previous gate using it.

    Every direct dependence is of this form (if gate j is not the last user
    of any shared qubit, the later user sits between j and i and breaks
    directness), so the true edge set is a subset of these candidates.
    """
    last: dict[int, int] = {}
    parents: list[tuple[int, ...]] = []
    for i, g in enumerate(gates):
        ps = {last[q] for q in g.qubits if q in last}
        parents.append(tuple(sorted(ps)))
        for q in g.qubits:
            last[q] = i
    return parents


def build_dependency_graph(c: Circuit) -> DependencyGraph:
    """Compute the direct-dependence DAG of a circuit."""
    from bisect import bisect_right

    n = len(c.gates)
    cand = _last_use_parents(c.gates)

    # Occurrence lists let the two-step cover test run per candidate edge:
    # an intermediate k covers (j, i) iff k lies strictly between them and
    # touches some qubit of j and some qubit of i. k is then either a gate
    # on the unordered qubit pair (qa, qb), or any gate on qa when qa == qb.
    uses: dict[int, list[int]] = {}
    pair_uses: dict[tuple[int, int], list[int]] = {}
    for i, g in enumerate(c.gates):
        for q in g.qubits:
            uses.setdefault(q, []).append(i)
        if len(g.qubits) == 2:
            a, b = sorted(g.qubits)
            pair_uses.setdefault((a, b), []).append(i)

    def covered(j: int, i: int) -> bool:
        for qa in c.gates[j].qubits:
            for qb in c.gates[i].qubits:
                occ = uses[qa] if qa == qb else pair_uses.get((min(qa, qb), max(qa, qb)), ())
                k = bisect_right(occ, j)
                if k < len(occ) and occ[k] < i:
                    return True
        return False

    parents: list[tuple[int, ...]] = [
        tuple(p for p in ps if not covered(p, i)) for i, ps in enumerate(cand)
    ]

    children: list[list[int]] = [[] for _ in range(n)]
    for i, ps in enumerate(parents):
        for p in ps:
            children[p].append(i)
    return DependencyGraph(
        num_gates=n,
        parents=tuple(parents),
        children=tuple(tuple(ch) for ch in children),
    )


def layers(c: Circuit) -> list[set[int]]:
    """Partition gate indices into layers.

    A gate's layer index is one past the maximum layer of its parents; layer
    0 is the front layer (gates with no dependencies).
    """
    cand = _last_use_parents(c.gates)
    idx = [0] * len(c.gates)
    out: list[set[int]] = []
    for i, ps in enumerate(cand):
        k = max((idx[p] + 1 for p in ps), default=0)
        idx[i] = k
        while len(out) <= k:
            out.append(set())
        out[k].add(i)
    return out


def circuit_depth(c: Circuit) -> int:
    """Schedule depth with SWAPs decomposed into 3 CNOTs.

    Every gate, single-qubit ones included, occupies one slot on each of its
    wires; the depth is the As-Soon-As-Possible makespan.
    """
    wire = [0] * c.num_qubits
    depth = 0
    for g in c.gates:
        slots = 3 if g.is_swap else 1
        t = max(wire[q] for q in g.qubits) + slots
        for q in g.qubits:
            wire[q] = t
        if t > depth:
            depth = t
    return depth


def strip_single_qubit(c: Circuit) -> tuple[Circuit, tuple[int, ...]]:
    """Drop single-qubit gates.

    Returns the two-qubit skeleton and, for each kept gate, its index in the
    original circuit (used to reattach the dropped gates later).
    """
    kept = [(i, g) for i, g in enumerate(c.gates) if not g.is_single]
    skeleton = Circuit(c.num_qubits, tuple(g for _, g in kept))
    return skeleton, tuple(i for i, _ in kept)


def decompose_swaps(c: Circuit) -> Circuit:
    """Replace each SWAP(a, b) with CX(a,b) CX(b,a) CX(a,b)."""
    out: list[Gate] = []
    for g in c.gates:
        if g.is_swap:
            a, b = g.qubits
            out.extend((cnot(a, b), cnot(b, a), cnot(a, b)))
        else:
            out.append(g)
    return Circuit(c.num_qubits, tuple(out))

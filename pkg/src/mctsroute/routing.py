"""Routing states: mapping plus emitted and remaining gates, and the actions
that advance them.

A state is the triple (mapping, physical prefix, remaining logical gates).
States are persistent: a child shares the task context and parent chain and
stores only its own emitted-gate delta, so the search tree can hold many
thousands without copying circuits around. Applying an action always flushes
afterwards: every remaining gate whose dependencies are met and whose mapped
operands are adjacent is emitted, repeatedly, until none qualifies.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arch import ArchGraph
from .circuits import Circuit, Gate, cnot, strip_single_qubit, swap as swap_gate

# Provenance kinds attached to every emitted physical gate.
PROV_GATE = "gate"      # direct execution of an input gate (CNOT or 1q rider)
PROV_SWAP = "swap"      # inserted SWAP, no input counterpart
PROV_BRIDGE = "bridge"  # one of the four CNOTs realizing a remote CNOT


@dataclass(frozen=True)
class SwapAction:
    """Insert a SWAP on a physical edge."""

    edge: tuple[int, int]


@dataclass(frozen=True)
class BridgeAction:
    """Execute remaining gate ``gate`` remotely through ``middle``."""

    gate: int
    middle: int


class RoutingTask:
    """Shared, immutable context for one transformation."""

    __slots__ = (
        "lc", "arch", "dist", "adj", "objective", "remote_span",
        "skeleton", "source_index", "parents", "children",
        "companions", "leading", "num_logical",
    )

    def __init__(self, lc: Circuit, arch: ArchGraph, objective: str, remote_cnot: bool):
        if objective not in ("size", "depth"):
            raise ValueError(f"objective must be 'size' or 'depth', got {objective!r}")
        if lc.num_qubits > arch.num_vertices:
            raise ValueError(
                f"circuit has {lc.num_qubits} qubits but architecture only "
                f"{arch.num_vertices} vertices"
            )
        for g in lc.gates:
            if g.is_swap:
                raise ValueError("input circuits may not contain SWAP gates")
        self.lc = lc
        self.arch = arch
        self.dist = arch.distances()
        self.adj = arch._adj
        self.objective = objective
        self.remote_span = 2 if remote_cnot else 0
        skeleton, src = strip_single_qubit(lc)
        self.skeleton = tuple(g.qubits for g in skeleton.gates)
        self.source_index = src
        self.num_logical = lc.num_qubits

        last: dict[int, int] = {}
        parents = []
        for i, (c, t) in enumerate(self.skeleton):
            parents.append(tuple(sorted({last[q] for q in (c, t) if q in last})))
            last[c] = last[t] = i
        self.parents = tuple(parents)
        children: list[list[int]] = [[] for _ in self.skeleton]
        for i, ps in enumerate(parents):
            for p in ps:
                children[p].append(i)
        self.children = tuple(tuple(ch) for ch in children)

        # Single-qubit riders: for each skeleton gate and each of its wires,
        # the run of 1q gates that follows it up to the wire's next CNOT.
        # 1q gates on a wire before any CNOT ever touches it are "leading"
        # and get emitted when the initial state is built.
        runs: list[list[tuple[int, Gate]]] = [[] for _ in self.skeleton]
        leading: list[tuple[int, Gate]] = []
        last_cx: dict[int, int] = {}  # logical qubit -> skeleton index of last CNOT
        orig_to_skel = {oi: si for si, oi in enumerate(src)}
        for oi, g in enumerate(lc.gates):
            if g.is_single:
                q = g.qubits[0]
                if q in last_cx:
                    runs[last_cx[q]].append((oi, g))
                else:
                    leading.append((oi, g))
            else:
                si = orig_to_skel[oi]
                for q in g.qubits:
                    last_cx[q] = si
        self.companions = tuple(tuple(sorted(r)) for r in runs)
        self.leading = tuple(leading)


class RoutingState:
    """One node value in the search: mapping, schedule profile, progress."""

    __slots__ = (
        "task", "parent", "delta", "prov",
        "phys_of", "log_at", "pred_left", "done", "frontier",
        "remaining", "wire_depth", "pc_depth",
    )

    task: RoutingTask
    parent: "RoutingState | None"

    def mapping(self) -> tuple[int, ...]:
        """Current logical-to-physical assignment."""
        return tuple(self.phys_of)

    def is_done(self) -> bool:
        return self.remaining == 0

    def front_layer(self) -> tuple[int, ...]:
        """Remaining gates whose dependencies are all executed."""
        return tuple(sorted(self.frontier))

    def physical_circuit(self) -> tuple[tuple[Gate, ...], tuple[tuple[str, int], ...]]:
        """Materialize the emitted prefix and its provenance tags."""
        chain = []
        s: RoutingState | None = self
        while s is not None:
            chain.append(s)
            s = s.parent
        gates: list[Gate] = []
        prov: list[tuple[str, int]] = []
        for s in reversed(chain):
            gates.extend(s.delta)
            prov.extend(s.prov)
        return tuple(gates), tuple(prov)

    def executed_gates(self) -> set[int]:
        return {i for i in range(len(self.task.skeleton)) if self.done[i]}


def _child(s: RoutingState) -> RoutingState:
    c = RoutingState.__new__(RoutingState)
    c.task = s.task
    c.parent = s
    c.delta = []
    c.prov = []
    c.phys_of = s.phys_of.copy()
    c.log_at = s.log_at.copy()
    c.pred_left = s.pred_left.copy()
    c.done = bytearray(s.done)
    c.frontier = set(s.frontier)
    c.remaining = s.remaining
    c.wire_depth = s.wire_depth.copy()
    c.pc_depth = s.pc_depth
    return c


def _emit(s: RoutingState, gate: Gate, kind: str, origin: int) -> None:
    s.delta.append(gate)
    s.prov.append((kind, origin))
    wd = s.wire_depth
    slots = 3 if gate.is_swap else 1
    t = max(wd[q] for q in gate.qubits) + slots
    for q in gate.qubits:
        wd[q] = t
    if t > s.pc_depth:
        s.pc_depth = t


def _emit_riders(s: RoutingState, skel_idx: int) -> None:
    for oi, g in s.task.companions[skel_idx]:
        _emit(s, Gate(g.name, (s.phys_of[g.qubits[0]],), g.params), PROV_GATE, oi)


def _execute(s: RoutingState, g: int, kind: str = PROV_GATE) -> None:
    task = s.task
    c, t = task.skeleton[g]
    if kind == PROV_GATE:
        _emit(s, cnot(s.phys_of[c], s.phys_of[t]), PROV_GATE, task.source_index[g])
    s.done[g] = 1
    s.frontier.discard(g)
    s.remaining -= 1
    _emit_riders(s, g)
    for ch in task.children[g]:
        s.pred_left[ch] -= 1
        if s.pred_left[ch] == 0:
            s.frontier.add(ch)


def _flush(s: RoutingState) -> int:
    """Execute everything executable, to fixpoint. Returns the CNOT count."""
    task = s.task
    adj = task.adj
    phys = s.phys_of
    executed = 0
    progressed = True
    while progressed:
        progressed = False
        for g in sorted(s.frontier):
            c, t = task.skeleton[g]
            if phys[t] in adj[phys[c]]:
                _execute(s, g)
                executed += 1
                progressed = True
    return executed


def naive_mapping(num_logical: int) -> tuple[int, ...]:
    """Logical qubit i on physical vertex i."""
    return tuple(range(num_logical))


def initial_state(
    lc: Circuit,
    mapping,
    arch: ArchGraph,
    objective: str = "size",
    remote_cnot: bool = False,
) -> RoutingState:
    """Build the starting state and flush whatever is already executable.

    ``mapping`` assigns each logical qubit a distinct physical vertex;
    leading single-qubit gates are emitted immediately under it.
    """
    task = RoutingTask(lc, arch, objective, remote_cnot)
    phys_of = list(mapping)
    if len(phys_of) != lc.num_qubits:
        raise ValueError(f"mapping covers {len(phys_of)} qubits, circuit has {lc.num_qubits}")
    if len(set(phys_of)) != len(phys_of):
        raise ValueError("mapping is not injective")
    if any(not 0 <= v < arch.num_vertices for v in phys_of):
        raise ValueError("mapping targets a vertex outside the architecture")

    s = RoutingState.__new__(RoutingState)
    s.task = task
    s.parent = None
    s.delta = []
    s.prov = []
    s.phys_of = phys_of
    s.log_at = [-1] * arch.num_vertices
    for q, v in enumerate(phys_of):
        s.log_at[v] = q
    s.pred_left = [len(ps) for ps in task.parents]
    s.done = bytearray(len(task.skeleton))
    s.frontier = {i for i, ps in enumerate(task.parents) if not ps}
    s.remaining = len(task.skeleton)
    s.wire_depth = [0] * arch.num_vertices
    s.pc_depth = 0
    for oi, g in task.leading:
        _emit(s, Gate(g.name, (phys_of[g.qubits[0]],), g.params), PROV_GATE, oi)
    _flush(s)
    return s


def executable_gates(s: RoutingState) -> set[int]:
    """Gates that would execute right now, dependencies unfolding included.

    On a freshly flushed state this is empty; it is meaningful on states
    built or modified without flushing (and for what-if probing in tests).
    """
    probe = _child(s)
    _flush(probe)
    return {i for i in range(len(s.task.skeleton)) if probe.done[i] and not s.done[i]}


def apply_swap(s: RoutingState, edge: tuple[int, int]) -> tuple[RoutingState, int]:
    """Insert a SWAP on ``edge``, flush, and return (child, executed CNOTs)."""
    u, v = edge
    if v not in s.task.adj[u]:
        raise ValueError(f"({u}, {v}) is not an architecture edge")
    c = _child(s)
    lu, lv = c.log_at[u], c.log_at[v]
    c.log_at[u], c.log_at[v] = lv, lu
    if lu >= 0:
        c.phys_of[lu] = v
    if lv >= 0:
        c.phys_of[lv] = u
    _emit(c, swap_gate(u, v), PROV_SWAP, -1)
    reward = _flush(c)
    return c, reward


def apply_bridge(s: RoutingState, action: BridgeAction) -> tuple[RoutingState, int]:
    """Execute a distance-2 gate through a middle vertex, then flush.

    The four emitted CNOTs compose to the gate itself; mapping and
    permutation are untouched.
    """
    g, m = action.gate, action.middle
    task = s.task
    if g not in s.frontier:
        raise ValueError(f"gate {g} is not in the front layer")
    qc, qt = task.skeleton[g]
    u, w = s.phys_of[qc], s.phys_of[qt]
    if task.dist[u][w] != 2 or m not in task.adj[u] or w not in task.adj[m]:
        raise ValueError(f"vertex {m} does not bridge {u} and {w}")
    c = _child(s)
    oi = task.source_index[g]
    for a, b in ((u, m), (m, w), (u, m), (m, w)):
        _emit(c, cnot(a, b), PROV_BRIDGE, oi)
    _execute(c, g, kind=PROV_BRIDGE)
    reward = 1 + _flush(c)
    return c, reward


def pertinent_swaps(s: RoutingState) -> list[SwapAction]:
    """Architecture edges touching a wire of some front-layer gate.

    Canonical edge order, so the result doubles as the action order.
    """
    verts = set()
    for g in s.frontier:
        c, t = s.task.skeleton[g]
        verts.add(s.phys_of[c])
        verts.add(s.phys_of[t])
    return [
        SwapAction(e) for e in s.task.arch.edges if e[0] in verts or e[1] in verts
    ]


def bridge_candidates(s: RoutingState) -> list[BridgeAction]:
    """Remote-CNOT actions for front gates at exactly the bridging distance."""
    if not s.task.remote_span:
        return []
    out = []
    for g in sorted(s.frontier):
        qc, qt = s.task.skeleton[g]
        u, w = s.phys_of[qc], s.phys_of[qt]
        if s.task.dist[u][w] == s.task.remote_span:
            for m in sorted(s.task.adj[u] & s.task.adj[w]):
                out.append(BridgeAction(g, m))
    return out


def actions(s: RoutingState) -> list[SwapAction | BridgeAction]:
    """Every action available in ``s``: pertinent SWAPs, then bridges."""
    return [*pertinent_swaps(s), *bridge_candidates(s)]


def swap_cost(s: RoutingState, gate: int) -> int:
    """Distance between a gate's mapped operands."""
    c, t = s.task.skeleton[gate]
    return s.task.dist[s.phys_of[c]][s.phys_of[t]]


def depth_overhead(s: RoutingState, action: SwapAction | BridgeAction) -> int:
    """Schedule growth caused by the action's own gates.

    Size objective: flat 1 for either action kind (a SWAP is one step of
    overhead; a bridge trades 3 extra CNOTs, the same as one SWAP). Depth
    objective: the makespan delta of appending the action's CNOTs to the
    current schedule, before any flushing. For a SWAP that is always 0..3.
    """
    if s.task.objective == "size":
        return 1
    wd = s.wire_depth
    if isinstance(action, SwapAction):
        u, v = action.edge
        return max(0, max(wd[u], wd[v]) + 3 - s.pc_depth)
    qc, qt = s.task.skeleton[action.gate]
    u, w = s.phys_of[qc], s.phys_of[qt]
    m = action.middle
    du, dm, dw = wd[u], wd[m], wd[w]
    for a, b in ((0, 1), (1, 2), (0, 1), (1, 2)):  # wires (u, m), (m, w)
        t = max((du, dm, dw)[a], (du, dm, dw)[b]) + 1
        if a == 0:
            du = dm = t
        else:
            dm = dw = t
    return max(0, max(du, dm, dw) - s.pc_depth)


def force_cheapest_gate(s: RoutingState) -> tuple[RoutingState, int]:
    """Progress guarantee: walk one front gate's operands together.

    Chooses the front gate with minimal operand distance (ties: lowest
    index) and SWAPs one operand toward the other until the gate
    executes. Under the size objective the control walks a shortest
    path. Under the depth objective each step moves whichever operand
    sits on the shallower wire, through the shallowest neighboring
    wire that still closes distance; detouring through idle wires keeps
    most of the chain off the critical path. Returns (new state, SWAPs
    inserted).
    """
    if not s.frontier:
        raise ValueError("nothing to force: front layer is empty")
    g = min(s.frontier, key=lambda i: (swap_cost(s, i), i))
    qc, qt = s.task.skeleton[g]
    swaps = 0
    if s.task.objective == "depth":
        dist = s.task.dist
        nbrs = s.task.arch.neighbors
        while not s.done[g]:
            u, v = s.phys_of[qc], s.phys_of[qt]
            walker, anchor = (u, v) if s.wire_depth[u] <= s.wire_depth[v] else (v, u)
            step = min((n for n in nbrs[walker] if dist[n][anchor] < dist[walker][anchor]),
                       key=lambda n: (s.wire_depth[n], n))
            s, _ = apply_swap(s, (walker, step) if walker < step else (step, walker))
            swaps += 1
        return s, swaps
    path = s.task.arch.shortest_path(s.phys_of[qc], s.phys_of[qt])
    for a, b in zip(path, path[1:-1]):
        s, _ = apply_swap(s, (a, b) if a < b else (b, a))
        swaps += 1
        if s.done[g]:
            break
    return s, swaps

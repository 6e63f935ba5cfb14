"""Monte Carlo tree search that chooses SWAP and bridge insertions.

Each decision runs a fixed number of playouts over a tree of routing
states. Selection walks from the root taking the child that maximizes

    REW(s, s') + VAL(s') + c * sqrt(log VISIT(s) / VISIT(s'))

where REW is the number of gates the child's action flushed and VAL the
child's long-term value; unvisited children count as infinitely urgent
and are taken in action order. Expansion attaches one child per
available action. Simulation estimates the selected leaf's value by
randomized SWAP walks over a window of the remaining gates: every walk
repeatedly samples a SWAP with probability proportional to the front
layer's total operand-distance reduction (a SWAP changing nothing keeps
a 0.001 floor weight, a worsening one drops to zero; when every
candidate worsens, the draw is uniform), flushing executable gates
after each draw until the window empties. The value is then
gamma^(N/2) * g_sim with N the best walk's SWAP count under the size
objective, or the best accumulated schedule growth under depth.
Backpropagation lifts each ancestor to gamma^e * (REW + VAL) of its
on-path child when that is larger; e is 1 for size and the child's
recorded depth overhead for depth.

The decision itself takes the root child with the best REW + VAL (ties:
cheaper recorded overhead, then more visits, then first in action
order) and keeps its subtree. The overhead tie-break only matters under
the depth objective, where slack wires make exact value ties common and
committing to a schedule-growing SWAP over a free one is pure loss.
When |V| consecutive decisions execute nothing, a fallback routes the
cheapest front gate directly, guaranteeing termination, and the tree is
rebuilt from the forced state.

Walks score the two-qubit skeleton only; single-qubit riders are
emitted on real execution but never steer the sampling.
"""

from __future__ import annotations

import math
import random
import time
from bisect import bisect_right
from dataclasses import dataclass

from .arch import ArchGraph
from .circuits import Circuit, circuit
from .routing import (
    RoutingState,
    SwapAction,
    actions,
    apply_bridge,
    apply_swap,
    depth_overhead,
    force_cheapest_gate,
    initial_state,
    naive_mapping,
    pertinent_swaps,
)
from .verify import overhead_stats, swap_permutation


@dataclass(frozen=True)
class MctsParams:
    """Search knobs. Defaults are the tuned values used throughout."""

    n_bp: int = 20        # playouts per decision
    c: float = 20.0       # exploration weight
    g_sim: int = 30       # rollout window, in gates
    n_sim: int = 500      # rollouts per simulation
    gamma: float = 0.7    # discount
    d_remote: int = 0     # 0 = no bridges, 2 = distance-2 bridges
    objective: str = "size"
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.n_bp, self.g_sim, self.n_sim) < 1:
            raise ValueError("n_bp, g_sim and n_sim must be at least 1")
        if self.c < 0:
            raise ValueError("exploration weight must be non-negative")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.d_remote not in (0, 2):
            raise ValueError("d_remote must be 0 (off) or 2")
        if self.objective not in ("size", "depth"):
            raise ValueError(f"unknown objective {self.objective!r}")


class SearchNode:
    """One tree position: a routing state plus its search statistics."""

    __slots__ = ("state", "action", "rew", "depth_ov", "val", "visit", "children", "parent")

    def __init__(self, state: RoutingState, action=None, rew: int = 0,
                 depth_ov: int = 0, parent: "SearchNode | None" = None):
        self.state = state
        self.action = action
        self.rew = rew
        self.depth_ov = depth_ov
        self.val = 0.0
        self.visit = 0
        self.children: list[SearchNode] | None = None
        self.parent = parent


def select(root: SearchNode, c: float) -> SearchNode:
    """Descend to a leaf, bumping the visit count of every node passed."""
    node = root
    node.visit += 1
    while node.children:
        node = _best_child(node, c)
        node.visit += 1
    return node


def _best_child(parent: SearchNode, c: float) -> SearchNode:
    log_v = math.log(parent.visit)
    best = None
    best_score = -math.inf
    for child in parent.children:
        if child.visit == 0:
            return child
        score = child.rew + child.val + c * math.sqrt(log_v / child.visit)
        if score > best_score:
            best = child
            best_score = score
    return best


def expand(node: SearchNode) -> None:
    """Attach one child per available action, SWAPs first, then bridges."""
    state = node.state
    if state.is_done():
        raise RuntimeError("goal states are never expanded")
    children = []
    for act in actions(state):
        ov = depth_overhead(state, act)
        if isinstance(act, SwapAction):
            child_state, rew = apply_swap(state, act.edge)
        else:
            child_state, rew = apply_bridge(state, act)
        children.append(SearchNode(child_state, act, rew, ov, parent=node))
    if not children:
        raise RuntimeError("non-goal state offers no action; is the graph connected?")
    node.children = children


def _impact_weights(dist, front_pairs, cands) -> list[float]:
    """Sampling weight per candidate SWAP against the given front layer.

    The raw score of a SWAP is the total mapped-operand-distance change
    it causes across the front gates; negatives scale to 0 and an exact
    0 to a small floor so harmless SWAPs stay samplable.
    """
    weights = []
    for a, b in cands:
        saved = 0
        for u, v in front_pairs:
            u2 = b if u == a else a if u == b else u
            v2 = b if v == a else a if v == b else v
            saved += dist[u][v] - dist[u2][v2]
        weights.append(float(saved) if saved > 0 else (0.001 if saved == 0 else 0.0))
    return weights


def _front_pairs(s: RoutingState) -> list[tuple[int, int]]:
    out = []
    for g in sorted(s.frontier):
        qc, qt = s.task.skeleton[g]
        u, v = s.phys_of[qc], s.phys_of[qt]
        out.append((u, v) if u < v else (v, u))
    return out


def impact_factor(s: RoutingState, edge: tuple[int, int]) -> float:
    """Scaled distance saving of one SWAP over the state's front layer."""
    return _impact_weights(s.task.dist, _front_pairs(s), [edge])[0]


def swap_distribution(s: RoutingState) -> tuple[list[tuple[int, int]], list[float]]:
    """Pertinent SWAPs of the state with their sampling probabilities."""
    cands = [a.edge for a in pertinent_swaps(s)]
    weights = _impact_weights(s.task.dist, _front_pairs(s), cands)
    total = sum(weights)
    if total <= 0:
        return cands, [1.0 / len(cands)] * len(cands)
    return cands, [w / total for w in weights]


def sample_swap(s: RoutingState, rng: random.Random) -> tuple[int, int]:
    cands, probs = swap_distribution(s)
    return rng.choices(cands, weights=probs, k=1)[0]


def simulate(node: SearchNode, params: MctsParams, rng: random.Random,
             memo: dict | None = None) -> float:
    """Set the leaf's value from randomized SWAP walks and return it.

    A goal leaf is worth the full g_sim. Otherwise n_sim walks each try
    to empty the window of the next min(g_sim, remaining) gates; walks
    that sample |V| SWAPs in a row without executing anything abort,
    and if every walk aborts the value is 0.

    ``memo`` caches sampling distributions keyed by the front layer's
    mapped operand pairs; it may be shared across a whole transformation
    since the architecture never changes.
    """
    state = node.state
    g_sim = params.g_sim
    if state.is_done():
        node.val = float(g_sim)
        return node.val

    task = state.task
    dist = task.dist
    edges = task.arch.edges
    nv = task.arch.num_vertices
    if memo is None:
        memo = {}
    depth_mode = task.objective == "depth"

    done = state.done
    window = [i for i in range(len(task.skeleton)) if not done[i]][:g_sim]
    index_of = {gi: k for k, gi in enumerate(window)}
    pairs = [task.skeleton[gi] for gi in window]
    pend0 = []
    kids: list[list[int]] = [[] for _ in window]
    for k, gi in enumerate(window):
        pending = 0
        for p in task.parents[gi]:
            if p in index_of:
                kids[index_of[p]].append(k)
                pending += 1
        pend0.append(pending)
    # Undone parents always precede their gate in remaining order, so a
    # window gate's parents are either globally done or in the window;
    # pend0 == 0 therefore means "in the state's front layer", and on a
    # flushed state none of those gates is executable yet.
    front0 = [k for k, n in enumerate(pend0) if n == 0]

    best = None
    for _ in range(params.n_sim):
        pos = state.phys_of.copy()
        at = state.log_at.copy()
        pend = pend0.copy()
        front = set(front0)
        left = len(window)
        swaps = 0
        stall = 0
        cost = 0
        if depth_mode:
            wd = state.wire_depth.copy()
            pcd = state.pc_depth

        while left:
            if stall >= nv:
                break  # abort: persistent lack of progress
            if best is not None and (cost if depth_mode else swaps) >= best:
                break  # cannot beat the best walk seen, stop early

            key_parts = []
            for k in front:
                qc, qt = pairs[k]
                u, v = pos[qc], pos[qt]
                key_parts.append((u, v) if u < v else (v, u))
            key_parts.sort()
            key = tuple(key_parts)
            entry = memo.get(key)
            if entry is None:
                wires = set()
                for u, v in key:
                    wires.add(u)
                    wires.add(v)
                cands = [e for e in edges if e[0] in wires or e[1] in wires]
                total = 0.0
                cum = []
                for w in _impact_weights(dist, key, cands):
                    total += w
                    cum.append(total)
                entry = (cands, cum if total > 0 else None)
                memo[key] = entry
            cands, cum = entry
            if cum is None:
                a, b = cands[rng.randrange(len(cands))]
            else:
                # Inlined rng.choices(cands, cum_weights=cum): same draw,
                # same stream position, a third of the call overhead.
                a, b = cands[bisect_right(cum, rng.random() * cum[-1],
                                          0, len(cands) - 1)]

            la, lb = at[a], at[b]
            at[a], at[b] = lb, la
            if la >= 0:
                pos[la] = b
            if lb >= 0:
                pos[lb] = a
            swaps += 1
            if depth_mode:
                t = (wd[a] if wd[a] > wd[b] else wd[b]) + 3
                if t > pcd:
                    cost += t - pcd
                    pcd = t
                wd[a] = wd[b] = t

            executed = 0
            progressed = True
            while progressed:
                progressed = False
                for k in tuple(front):
                    qc, qt = pairs[k]
                    u, v = pos[qc], pos[qt]
                    if dist[u][v] == 1:
                        front.discard(k)
                        left -= 1
                        executed += 1
                        progressed = True
                        if depth_mode:
                            t = (wd[u] if wd[u] > wd[v] else wd[v]) + 1
                            wd[u] = wd[v] = t
                            if t > pcd:
                                pcd = t
                        for ch in kids[k]:
                            pend[ch] -= 1
                            if not pend[ch]:
                                front.add(ch)
            stall = 0 if executed else stall + 1

        if left == 0:
            n = cost if depth_mode else swaps
            if best is None or n < best:
                best = n

    node.val = 0.0 if best is None else params.gamma ** (best / 2) * g_sim
    return node.val


def backpropagate(node: SearchNode, gamma: float, objective: str = "size") -> None:
    """Lift ancestor values toward the freshly evaluated leaf."""
    child = node
    while child.parent is not None:
        parent = child.parent
        exponent = 1 if objective == "size" else child.depth_ov
        candidate = gamma ** exponent * (child.rew + child.val)
        if candidate > parent.val:
            parent.val = candidate
        child = parent


def decide(root: SearchNode) -> SearchNode:
    """Commit to the best root child; its subtree survives as the new tree."""
    if not root.children:
        raise RuntimeError("decide needs an expanded root")
    best = root.children[0]
    best_key = (best.rew + best.val, -best.depth_ov, best.visit)
    for child in root.children[1:]:
        key = (child.rew + child.val, -child.depth_ov, child.visit)
        if key > best_key:
            best = child
            best_key = key
    best.parent = None
    return best


@dataclass(frozen=True)
class TransformResult:
    """A routed circuit plus everything needed to check and report it."""

    physical: Circuit
    provenance: tuple[tuple[str, int], ...]
    initial_mapping: tuple[int, ...]
    final_mapping: tuple[int, ...]
    perm: tuple[int, ...]
    added_cnots: int
    added_depth: int
    decisions: int
    fallbacks: int
    selection_depth_stats: tuple[tuple[int, float, int], ...]
    wall_time: float


def transform(lc: Circuit, arch: ArchGraph, initial_mapping=None,
              params: MctsParams | None = None) -> TransformResult:
    """Route a logical circuit onto the architecture.

    The returned physical circuit uses physical wire indices, satisfies
    the architecture's adjacency everywhere, and is equivalent to the
    input under the initial mapping and the returned permutation.
    selection_depth_stats holds one (min, mean, max) triple of
    selection-path depths per decision.
    """
    if params is None:
        params = MctsParams()
    if initial_mapping is None:
        initial_mapping = naive_mapping(lc.num_qubits)
    else:
        initial_mapping = tuple(initial_mapping)
    rng = random.Random(params.seed)
    started = time.perf_counter()

    state = initial_state(lc, initial_mapping, arch,
                          params.objective, params.d_remote == 2)
    root = SearchNode(state)
    memo: dict = {}
    nv = arch.num_vertices
    decisions = 0
    fallbacks = 0
    dry_spell = 0
    depth_stats = []

    while not root.state.is_done():
        depths = []
        for _ in range(params.n_bp):
            leaf = select(root, params.c)
            if leaf.children is None and not leaf.state.is_done():
                expand(leaf)
            simulate(leaf, params, rng, memo)
            backpropagate(leaf, params.gamma, params.objective)
            d = 0
            n = leaf
            while n.parent is not None:
                d += 1
                n = n.parent
            depths.append(d)
        depth_stats.append((min(depths), sum(depths) / len(depths), max(depths)))
        root = decide(root)
        decisions += 1
        dry_spell = dry_spell + 1 if root.rew == 0 else 0
        if dry_spell >= nv and not root.state.is_done():
            forced, _ = force_cheapest_gate(root.state)
            root = SearchNode(forced)
            fallbacks += 1
            dry_spell = 0

    gates, prov = root.state.physical_circuit()
    physical = circuit(arch.num_vertices, gates)
    added_cnots, added_depth = overhead_stats(lc, physical)
    return TransformResult(
        physical=physical,
        provenance=prov,
        initial_mapping=initial_mapping,
        final_mapping=root.state.mapping(),
        perm=swap_permutation(physical),
        added_cnots=added_cnots,
        added_depth=added_depth,
        decisions=decisions,
        fallbacks=fallbacks,
        selection_depth_stats=tuple(depth_stats),
        wall_time=time.perf_counter() - started,
    )

import random

import pytest

from mctsroute.circuits import (
    Circuit,
    Gate,
    build_dependency_graph,
    circuit,
    circuit_depth,
    cnot,
    decompose_swaps,
    layers,
    single,
    strip_single_qubit,
    swap,
)


def fig4_circuit() -> Circuit:
    # Five-CNOT example circuit used throughout the routing tests: the gate
    # list is pinned by the worked transformation trace it must reproduce.
    return circuit(5, [cnot(0, 2), cnot(3, 4), cnot(0, 1), cnot(1, 2), cnot(2, 3)])


def random_mixed_circuit(rng: random.Random, num_qubits: int, num_gates: int) -> Circuit:
    gates = []
    for _ in range(num_gates):
        kind = rng.random()
        if kind < 0.55:
            a, b = rng.sample(range(num_qubits), 2)
            gates.append(cnot(a, b))
        elif kind < 0.65:
            a, b = rng.sample(range(num_qubits), 2)
            gates.append(swap(a, b))
        else:
            name = rng.choice(["h", "t", "tdg", "x", "rz"])
            q = rng.randrange(num_qubits)
            if name == "rz":
                gates.append(single("rz", q, rng.uniform(-3.14, 3.14)))
            else:
                gates.append(single(name, q))
    return circuit(num_qubits, gates)


# ---------------------------------------------------------------- oracles


def brute_force_dependence(c: Circuit) -> set[tuple[int, int]]:
    """All (j, i) with j < i sharing at least one qubit."""
    out = set()
    for i, gi in enumerate(c.gates):
        for j in range(i):
            if set(c.gates[j].qubits) & set(gi.qubits):
                out.add((j, i))
    return out


def brute_force_direct(c: Circuit) -> set[tuple[int, int]]:
    """Direct dependences: no intermediate gate dependent both ways."""
    dep = brute_force_dependence(c)
    direct = set()
    for (j, i) in dep:
        if not any((j, k) in dep and (k, i) in dep for k in range(j + 1, i)):
            direct.add((j, i))
    return direct


def transitive_closure(n: int, edges: set[tuple[int, int]]) -> set[tuple[int, int]]:
    reach = [set() for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for (a, b) in edges:
            if a == i:
                reach[i].add(b)
                reach[i] |= reach[b]
    return {(i, j) for i in range(n) for j in reach[i]}


def longest_chain_depth(c: Circuit) -> int:
    """Depth oracle: longest path in the gate DAG of the decomposed circuit."""
    d = decompose_swaps(c)
    dep = brute_force_dependence(d)
    n = len(d.gates)
    dist = [1] * n
    for i in range(n):
        for j in range(i):
            if (j, i) in dep:
                dist[i] = max(dist[i], dist[j] + 1)
    return max(dist, default=0)


# ------------------------------------------------------------------ gates


def test_gate_validation():
    with pytest.raises(ValueError):
        cnot(1, 1)
    with pytest.raises(ValueError):
        Gate("cx", (0, 1, 2))
    with pytest.raises(ValueError):
        Gate("ccx", (0, 1, 2))
    with pytest.raises(ValueError):
        Gate("h", (-1,))
    g = cnot(2, 5)
    assert g.control == 2 and g.target == 5 and g.is_cnot and not g.is_swap


def test_circuit_validation():
    with pytest.raises(ValueError):
        circuit(2, [cnot(0, 2)])
    c = fig4_circuit()
    assert len(c) == 5 and c.cnot_count == 5


# ------------------------------------------------------- dependency graph


def test_fig4_dependency_edges():
    dag = build_dependency_graph(fig4_circuit())
    assert dag.edges == frozenset({(0, 2), (1, 4), (2, 3), (3, 4)})
    assert dag.parents[0] == () and dag.parents[4] == (1, 3)
    assert dag.children[0] == (2,)


def test_dependency_edges_match_direct_oracle():
    rng = random.Random(7)
    for trial in range(120):
        c = random_mixed_circuit(rng, rng.randint(2, 7), rng.randint(0, 24))
        dag = build_dependency_graph(c)
        assert dag.edges == brute_force_direct(c), f"trial {trial}"


def test_dependency_closure_recovers_full_relation():
    rng = random.Random(8)
    for _ in range(60):
        c = random_mixed_circuit(rng, rng.randint(2, 6), rng.randint(0, 20))
        dag = build_dependency_graph(c)
        n = len(c.gates)
        assert transitive_closure(n, set(dag.edges)) == transitive_closure(
            n, brute_force_dependence(c)
        )


def test_dependency_graph_acyclic_forward_edges():
    rng = random.Random(9)
    for _ in range(40):
        c = random_mixed_circuit(rng, 5, 30)
        for (a, b) in build_dependency_graph(c).edges:
            assert a < b


def test_redundant_edge_dropped():
    # 0 shares a qubit with 2, but the path through 1 covers it.
    c = circuit(3, [cnot(0, 1), cnot(1, 2), cnot(0, 2)])
    assert build_dependency_graph(c).edges == frozenset({(0, 1), (1, 2)})


def test_chain_without_shortcut_kept():
    # 0 and 2 share no qubit; only the chain edges exist.
    c = circuit(4, [cnot(0, 1), cnot(1, 2), cnot(2, 3)])
    assert build_dependency_graph(c).edges == frozenset({(0, 1), (1, 2)})


# ------------------------------------------------------------------ layers


def test_fig4_layers():
    assert layers(fig4_circuit()) == [{0, 1}, {2}, {3}, {4}]


def test_layers_match_longest_path_oracle():
    rng = random.Random(11)
    for _ in range(80):
        c = random_mixed_circuit(rng, rng.randint(2, 6), rng.randint(1, 25))
        dep = brute_force_dependence(c)
        idx = [0] * len(c.gates)
        for i in range(len(c.gates)):
            idx[i] = max((idx[j] + 1 for j in range(i) if (j, i) in dep), default=0)
        got = layers(c)
        for k, layer in enumerate(got):
            for g in layer:
                assert idx[g] == k
        assert sum(len(l) for l in got) == len(c.gates)


def test_layers_front_layer_has_no_parents():
    rng = random.Random(12)
    for _ in range(40):
        c = random_mixed_circuit(rng, 5, 15)
        if not c.gates:
            continue
        dag = build_dependency_graph(c)
        for g in layers(c)[0]:
            assert dag.parents[g] == ()


# ------------------------------------------------------------------- depth


def test_fig4_depth():
    assert circuit_depth(fig4_circuit()) == 4


def test_depth_counts_single_qubit_slots():
    c = circuit(2, [cnot(0, 1), single("h", 0), cnot(0, 1)])
    assert circuit_depth(c) == 3


def test_depth_swap_costs_three_layers():
    c = circuit(2, [cnot(0, 1), single("h", 0), swap(0, 1), cnot(0, 1)])
    # cx at 1, h at 2, swap occupies 3..5, final cx at 6.
    assert circuit_depth(c) == 6
    assert circuit_depth(circuit(2, [swap(0, 1)])) == 3


def test_depth_matches_longest_chain_oracle():
    rng = random.Random(13)
    for _ in range(100):
        c = random_mixed_circuit(rng, rng.randint(2, 7), rng.randint(0, 30))
        assert circuit_depth(c) == longest_chain_depth(c)


def test_depth_empty_circuit():
    assert circuit_depth(circuit(3, [])) == 0


# -------------------------------------------------------------- transforms


def test_strip_single_qubit():
    c = circuit(3, [single("h", 0), cnot(0, 1), single("t", 1), swap(1, 2), cnot(2, 0)])
    skel, src = strip_single_qubit(c)
    assert [g.name for g in skel.gates] == ["cx", "swap", "cx"]
    assert src == (1, 3, 4)
    assert skel.num_qubits == 3


def test_strip_is_idempotent():
    rng = random.Random(14)
    c = random_mixed_circuit(rng, 5, 30)
    skel, _ = strip_single_qubit(c)
    again, idx = strip_single_qubit(skel)
    assert again == skel and idx == tuple(range(len(skel.gates)))


def test_decompose_swaps():
    c = circuit(3, [swap(0, 2), cnot(1, 2)])
    d = decompose_swaps(c)
    assert [g.qubits for g in d.gates] == [(0, 2), (2, 0), (0, 2), (1, 2)]
    assert all(g.is_cnot for g in d.gates)


def test_decompose_swaps_identity_without_swaps():
    c = fig4_circuit()
    assert decompose_swaps(c) == c

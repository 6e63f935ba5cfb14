import random

import pytest

from mctsroute.arch import builtin_q20
from mctsroute.circuits import circuit, cnot, decompose_swaps, single, swap
from mctsroute.routing import apply_swap, initial_state, naive_mapping
from mctsroute.verify import (
    Gf2Matrix,
    check_connectivity,
    check_equivalence,
    check_gate_order,
    gf2_matrix_of,
    overhead_stats,
    swap_permutation,
    verify_routed,
)

from test_circuits import fig4_circuit

Q20 = builtin_q20()


def random_skeleton(rng, n, m):
    gates = []
    for _ in range(m):
        a, b = rng.sample(range(n), 2)
        gates.append(swap(a, b) if rng.random() < 0.2 else cnot(a, b))
    return circuit(n, gates)


def simulate(c, x: int) -> int:
    """Bit-level oracle: push a packed vector through the skeleton."""
    for g in c.gates:
        if g.is_cnot:
            cbit = (x >> g.control) & 1
            x ^= cbit << g.target
        elif g.is_swap:
            a, b = g.qubits
            ab = ((x >> a) ^ (x >> b)) & 1
            x ^= (ab << a) | (ab << b)
    return x


# ------------------------------------------------------------- GF(2) core


def test_matrix_matches_bit_simulation():
    rng = random.Random(41)
    for _ in range(250):
        n = rng.randint(2, 10)
        c = random_skeleton(rng, n, rng.randint(0, 20))
        m = gf2_matrix_of(c)
        for _ in range(4):
            x = rng.getrandbits(n)
            assert m.mul_vec(x) == simulate(c, x)


def test_concatenation_multiplies_matrices():
    rng = random.Random(42)
    for _ in range(250):
        n = rng.randint(2, 8)
        c1 = random_skeleton(rng, n, rng.randint(0, 12))
        c2 = random_skeleton(rng, n, rng.randint(0, 12))
        joined = circuit(n, list(c1.gates) + list(c2.gates))
        assert gf2_matrix_of(joined) == gf2_matrix_of(c2) @ gf2_matrix_of(c1)


def test_swap_equals_three_cnots_and_permutation():
    c = circuit(4, [swap(1, 3)])
    assert gf2_matrix_of(decompose_swaps(c)) == gf2_matrix_of(c)
    assert gf2_matrix_of(c) == Gf2Matrix.permutation((0, 3, 2, 1))


def test_bridge_identity():
    # CX(u,m) CX(m,w) CX(u,m) CX(m,w) == CX(u,w), middle untouched.
    u, m, w = 0, 1, 2
    bridge = circuit(3, [cnot(u, m), cnot(m, w), cnot(u, m), cnot(m, w)])
    assert gf2_matrix_of(bridge) == gf2_matrix_of(circuit(3, [cnot(u, w)]))


def test_single_qubit_gates_do_not_touch_skeleton():
    c = circuit(3, [single("h", 0), cnot(0, 1), single("t", 1)])
    assert gf2_matrix_of(c) == gf2_matrix_of(circuit(3, [cnot(0, 1)]))


def test_permutation_validation():
    with pytest.raises(ValueError):
        Gf2Matrix.permutation((0, 0, 1))


def test_matrices_invertible_under_simulation():
    # Distinct inputs stay distinct: CNOT/SWAP skeletons are bijections.
    rng = random.Random(43)
    for _ in range(50):
        n = rng.randint(2, 6)
        c = random_skeleton(rng, n, rng.randint(0, 15))
        outs = {simulate(c, x) for x in range(1 << n)}
        assert len(outs) == 1 << n


# --------------------------------------------------------- permutations


def test_swap_permutation_tracks_contents():
    c = circuit(4, [swap(0, 1), cnot(1, 2), swap(1, 2), swap(0, 1)])
    # contents: start [0,1,2,3] -> swap01 [1,0,..] -> swap12 [1,2,0,3]
    # -> swap01 [2,1,0,3]; perm[v] = final wire of initial content v.
    perm = swap_permutation(c)
    assert perm == (2, 1, 0, 3)


def test_swap_permutation_matches_routed_mapping():
    rng = random.Random(44)
    for _ in range(30):
        c = fig4_circuit()
        s = initial_state(c, naive_mapping(5), Q20)
        for _ in range(rng.randint(0, 6)):
            from mctsroute.routing import pertinent_swaps
            acts = pertinent_swaps(s)
            if not acts:
                break
            s, _ = apply_swap(s, acts[rng.randrange(len(acts))].edge)
        gates, _ = s.physical_circuit()
        perm = swap_permutation(circuit(20, gates))
        for q in range(5):
            assert perm[q] == s.phys_of[q]  # naive mapping: tau_ini(q) = q


# ------------------------------------------------------------ full checks


def routed_fig4():
    s = initial_state(fig4_circuit(), naive_mapping(5), Q20)
    s, _ = apply_swap(s, (0, 1))
    s, _ = apply_swap(s, (0, 1))
    gates, prov = s.physical_circuit()
    return circuit(20, gates), prov


def test_fig4_trace_verifies():
    pc, prov = routed_fig4()
    perm = swap_permutation(pc)
    report = verify_routed(fig4_circuit(), pc, naive_mapping(5), perm, Q20, prov)
    assert report.ok
    assert overhead_stats(fig4_circuit(), pc) == (6, 6)


def test_dropped_gate_fails_equivalence():
    pc, _ = routed_fig4()
    broken = circuit(20, [g for i, g in enumerate(pc.gates) if i != 2])
    perm = swap_permutation(broken)
    assert not check_equivalence(fig4_circuit(), broken, naive_mapping(5), perm)


def test_flipped_cnot_fails_equivalence():
    pc, _ = routed_fig4()
    gates = list(pc.gates)
    gates[0] = cnot(4, 3)  # reverse control and target
    broken = circuit(20, gates)
    assert not check_equivalence(
        fig4_circuit(), broken, naive_mapping(5), swap_permutation(broken)
    )


def test_wrong_perm_fails_equivalence():
    pc, _ = routed_fig4()
    wrong = list(swap_permutation(pc))
    wrong[2], wrong[3] = wrong[3], wrong[2]
    assert not check_equivalence(fig4_circuit(), pc, naive_mapping(5), tuple(wrong))


def test_connectivity_flags_non_edges():
    pc = circuit(20, [cnot(0, 1), cnot(0, 2), swap(4, 5), cnot(3, 4)])
    assert check_connectivity(pc, Q20) == [1, 2]  # d(0,2)=2 and d(4,5)=4


def test_gate_order_detects_rider_inversion():
    lc = circuit(2, [cnot(0, 1), single("h", 0), cnot(0, 1)])
    good = [cnot(0, 1), single("h", 0), cnot(0, 1)]
    prov_good = [("gate", 0), ("gate", 1), ("gate", 2)]
    assert check_gate_order(lc, good, prov_good)
    bad = [cnot(0, 1), cnot(0, 1), single("h", 0)]
    prov_bad = [("gate", 0), ("gate", 2), ("gate", 1)]
    assert not check_gate_order(lc, bad, prov_bad)


def test_gate_order_accepts_bridge_groups():
    lc = circuit(3, [cnot(0, 2), single("h", 2)])
    pc = [cnot(0, 1), cnot(1, 2), cnot(0, 1), cnot(1, 2), single("h", 2)]
    prov = [("bridge", 0)] * 4 + [("gate", 1)]
    assert check_gate_order(lc, pc, prov)


def test_verify_routed_on_bridge_output():
    from mctsroute.routing import BridgeAction, apply_bridge
    s = initial_state(fig4_circuit(), naive_mapping(5), Q20, remote_cnot=True)
    s, _ = apply_bridge(s, BridgeAction(gate=0, middle=1))
    gates, prov = s.physical_circuit()
    pc = circuit(20, gates)
    report = verify_routed(
        fig4_circuit(), pc, naive_mapping(5), swap_permutation(pc), Q20, prov
    )
    assert report.ok
    assert overhead_stats(fig4_circuit(), pc)[0] == 3

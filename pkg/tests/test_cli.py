"""Command line checks through Click's test runner.

These stay on tiny circuits and a 2x3 grid with shrunken search
parameters; the point is the plumbing (files, flags, exit codes), not
search quality.
"""

import json

from click.testing import CliRunner

from mctsroute.bench import random_circuit
from mctsroute.cli import main
from mctsroute.qasm import emit_qasm, parse_qasm

FAST = ["--nbp", "4", "--nsim", "10", "--gsim", "8"]


def invoke(args):
    return CliRunner().invoke(main, [str(a) for a in args])


def write_sample(tmp_path, name="sample.qasm", qubits=4, cnots=6, seed=1):
    path = tmp_path / name
    path.write_text(emit_qasm(random_circuit(qubits, cnots, seed)))
    return path


def test_help_lists_subcommands():
    res = invoke(["--help"])
    assert res.exit_code == 0
    for cmd in ("route", "bench", "random", "scaling", "verify"):
        assert cmd in res.output


def test_route_writes_outputs_and_they_verify(tmp_path):
    src = write_sample(tmp_path)
    out = tmp_path / "routed.qasm"
    rep = tmp_path / "report.json"
    res = invoke(["route", src, "--arch", "grid:2x3", "--trials", 2,
                  "--out", out, "--report", rep, *FAST])
    assert res.exit_code == 0, res.output
    assert "best: seed" in res.output

    sidecar = json.loads((tmp_path / "routed.qasm.mapping.json").read_text())
    assert sorted(sidecar) == ["final", "initial", "perm"]
    assert sorted(sidecar["perm"]) == list(range(6))

    doc = json.loads(rep.read_text())
    assert doc["arch"] == "grid2x3"
    assert len(doc["results"]) == 2
    assert doc["best"]["added_cnots"] == min(
        r["added_cnots"] for r in doc["results"])
    assert doc["input"] == {"qubits": 4, "cnots": 6,
                            "depth": doc["input"]["depth"]}

    check = invoke(["verify", src, out, "--arch", "grid:2x3",
                    "--mapping", tmp_path / "routed.qasm.mapping.json"])
    assert check.exit_code == 0, check.output
    assert "verification passed" in check.output


def test_verify_defaults_to_naive_mapping_and_swap_tracking(tmp_path):
    src = write_sample(tmp_path)
    out = tmp_path / "routed.qasm"
    assert invoke(["route", src, "--arch", "grid:2x3", "--trials", 1,
                   "--out", out, *FAST]).exit_code == 0
    res = invoke(["verify", src, out, "--arch", "grid:2x3"])
    assert res.exit_code == 0, res.output


def test_verify_rejects_a_wrong_circuit(tmp_path):
    src = write_sample(tmp_path, "logical.qasm", seed=1)
    imposter = write_sample(tmp_path, "routed.qasm", qubits=6, seed=2)
    res = invoke(["verify", src, imposter, "--arch", "grid:2x3"])
    assert res.exit_code != 0
    assert "FAILED" in res.output


def test_route_rejects_unparsable_input(tmp_path):
    bad = tmp_path / "bad.qasm"
    bad.write_text("OPENQASM 2.0;\nqreg q[2];\nfrobnicate q[0];\n")
    res = invoke(["route", bad, "--arch", "grid:2x3", *FAST])
    assert res.exit_code != 0
    assert "bad.qasm" in res.output


def test_route_rejects_unknown_arch(tmp_path):
    src = write_sample(tmp_path)
    res = invoke(["route", src, "--arch", "hypercube", *FAST])
    assert res.exit_code != 0


def test_route_accepts_mapping_file(tmp_path):
    src = write_sample(tmp_path)
    mapping = tmp_path / "mapping.json"
    mapping.write_text("[1, 0, 3, 2]")
    out = tmp_path / "routed.qasm"
    res = invoke(["route", src, "--arch", "grid:2x3", "--trials", 1,
                  "--mapping", f"file:{mapping}", "--out", out, *FAST])
    assert res.exit_code == 0, res.output
    sidecar = json.loads((tmp_path / "routed.qasm.mapping.json").read_text())
    assert sidecar["initial"] == [1, 0, 3, 2]


def test_route_depth_report(tmp_path):
    src = write_sample(tmp_path)
    path = tmp_path / "depths.csv"
    res = invoke(["route", src, "--arch", "grid:2x3", "--trials", 1,
                  "--depth-report", path, *FAST])
    assert res.exit_code == 0, res.output
    lines = path.read_text().splitlines()
    assert lines[0] == "decision,min,mean,max"


def test_random_command_is_deterministic_qasm():
    args = ["random", "--qubits", 4, "--cnots", 7, "--seed", 1]
    first, second = invoke(args), invoke(args)
    assert first.exit_code == 0
    assert first.output == second.output
    c = parse_qasm(first.output)
    assert c.num_qubits == 4
    assert c.cnot_count == 7


def test_random_command_rejects_one_qubit():
    res = invoke(["random", "--qubits", 1, "--cnots", 3])
    assert res.exit_code != 0


def test_bench_command_writes_csv(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "a.qasm").write_text(emit_qasm(random_circuit(4, 5, 1)))
    (corpus / "b.qasm").write_text(emit_qasm(random_circuit(5, 6, 2)))
    csv_path = tmp_path / "bench.csv"
    res = invoke(["bench", corpus, "--arch", "grid:2x3", "--trials", 1,
                  "--out", csv_path, *FAST])
    assert res.exit_code == 0, res.output
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("name,qubits,")
    assert len(lines) == 4  # header, a, b, TOTAL
    assert lines[-1].startswith("TOTAL,")


def test_bench_command_requires_circuits(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    res = invoke(["bench", empty, "--arch", "grid:2x3"])
    assert res.exit_code != 0


def test_scaling_command_respects_ranges(tmp_path):
    csv_path = tmp_path / "scaling.csv"
    res = invoke(["scaling", "--arch", "grid:2x3", "--per-point", 1,
                  "--qubit-points", "3:5", "--qubit-cnots", 5,
                  "--cnot-points", "4:9:4", "--cnot-qubits", 4,
                  "--nbp", 2, "--nsim", 5, "--gsim", 6,
                  "--out", csv_path])
    assert res.exit_code == 0, res.output
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "sweep,x,circuits,mean_added_cnots,mean_wall_time"
    assert len(lines) == 5  # header + 2 qubit points + 2 cnot points
    assert lines[1].startswith("qubits,3,")
    assert lines[3].startswith("cnots,4,")


def test_scaling_command_rejects_bad_range():
    res = invoke(["scaling", "--qubit-points", "five"])
    assert res.exit_code != 0

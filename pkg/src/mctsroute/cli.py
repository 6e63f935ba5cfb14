"""Command line front end.

Subcommands: route one circuit, bench a corpus directory, generate a
random circuit, run the scaling sweeps, and verify a routed file pair.
All randomness is seeded; trial t of a multi-trial run uses seed + t.
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from .arch import parse_arch
from .bench import (
    SCALING_COLUMNS,
    bench_run,
    best_of,
    depth_report_rows,
    random_circuit,
    scaling_run,
    write_csv,
)
from .circuits import circuit_depth
from .mcts import MctsParams
from .qasm import QasmError, emit_qasm, read_qasm
from .routing import naive_mapping
from .verify import swap_permutation, verify_routed

ARCH_HELP = "q20, grid5x4, grid:RxC, or file:PATH (edge list)"


def _search_options(fn):
    opts = [
        click.option("--objective", type=click.Choice(["size", "depth"]),
                     default="size", show_default=True,
                     help="minimize added CNOTs or added depth"),
        click.option("--remote-cnot", is_flag=True,
                     help="allow 4-CNOT remote execution at distance 2"),
        click.option("--seed", default=0, show_default=True,
                     help="base RNG seed; trial t uses seed+t"),
        click.option("--nbp", default=20, show_default=True,
                     help="playouts per decision"),
        click.option("--c", "c_weight", default=20.0, show_default=True,
                     help="exploration weight"),
        click.option("--gsim", default=30, show_default=True,
                     help="rollout window, in gates"),
        click.option("--nsim", default=500, show_default=True,
                     help="rollouts per simulation"),
        click.option("--gamma", default=0.7, show_default=True,
                     help="value discount, in (0, 1)"),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _params(objective, remote_cnot, seed, nbp, c_weight, gsim, nsim, gamma) -> MctsParams:
    try:
        return MctsParams(n_bp=nbp, c=c_weight, g_sim=gsim, n_sim=nsim,
                          gamma=gamma, d_remote=2 if remote_cnot else 0,
                          objective=objective, seed=seed)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def _load_arch(spec: str):
    try:
        return parse_arch(spec)
    except (ValueError, OSError) as exc:
        raise click.BadParameter(f"--arch {spec}: {exc}")


def _load_circuit(path):
    try:
        return read_qasm(path)
    except (QasmError, OSError) as exc:
        raise click.ClickException(f"{path}: {exc}")


def _parse_range(spec: str) -> range:
    try:
        parts = [int(p) for p in spec.split(":")]
    except ValueError:
        parts = []
    if len(parts) == 2:
        return range(parts[0], parts[1])
    if len(parts) == 3:
        return range(*parts)
    raise click.BadParameter(f"range '{spec}' is not start:stop[:step]")


def _load_mapping(spec: str, lc):
    if spec == "naive":
        return naive_mapping(lc.num_qubits)
    if spec.startswith("file:"):
        try:
            data = json.loads(pathlib.Path(spec[5:]).read_text())
            if isinstance(data, dict):
                data = data["initial"]
            return tuple(int(v) for v in data)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise click.BadParameter(f"--mapping {spec}: {exc}")
    raise click.BadParameter("--mapping takes 'naive' or 'file:PATH'")


@click.group()
def main():
    """Map logical CNOT circuits onto constrained architectures.

    A Monte Carlo tree search inserts SWAPs (and, on request, remote
    CNOTs) so that every two-qubit gate of the output acts on adjacent
    physical qubits, while keeping the inserted-gate or depth overhead
    low. Outputs are verified exactly before they are written.
    """


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--arch", "arch_spec", default="q20", show_default=True, help=ARCH_HELP)
@click.option("--mapping", "mapping_spec", default="naive", show_default=True,
              help="initial placement: naive or file:PATH (JSON list)")
@click.option("--trials", default=5, show_default=True, help="independent runs")
@_search_options
@click.option("--out", type=click.Path(dir_okay=False),
              help="write the routed circuit here (QASM), plus a .mapping.json sidecar")
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              help="write a JSON trial report here")
@click.option("--depth-report", "depth_report_path", type=click.Path(dir_okay=False),
              help="write the best trial's per-decision selection-depth CSV here")
def route(circuit_file, arch_spec, mapping_spec, trials, out, report_path,
          depth_report_path, **search):
    """Route CIRCUIT_FILE and keep the best of several trials."""
    lc = _load_circuit(circuit_file)
    arch = _load_arch(arch_spec)
    params = _params(**search)
    mapping = _load_mapping(mapping_spec, lc)

    try:
        best, outcomes = best_of(lc, arch, params, trials, mapping)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    for t, res in enumerate(outcomes):
        report = verify_routed(lc, res.physical, res.initial_mapping, res.perm,
                               arch, res.provenance)
        if not report.ok:
            raise click.ClickException(
                f"trial {t} (seed {params.seed + t}) failed verification: {report}")

    click.echo(f"{circuit_file} on {arch.name}, {params.objective} objective"
               + (", remote CNOTs" if params.d_remote else ""))
    for t, res in enumerate(outcomes):
        click.echo(f"  seed {params.seed + t}: +{res.added_cnots} CNOTs, "
                   f"+{res.added_depth} depth, {res.decisions} decisions, "
                   f"{res.fallbacks} fallbacks, {res.wall_time:.2f}s")
    best_seed = params.seed + next(i for i, r in enumerate(outcomes) if r is best)
    click.echo(f"best: seed {best_seed}, +{best.added_cnots} CNOTs, "
               f"+{best.added_depth} depth (all trials verified)")

    if out:
        pathlib.Path(out).write_text(emit_qasm(best.physical))
        sidecar = {
            "initial": list(best.initial_mapping),
            "final": list(best.final_mapping),
            "perm": list(best.perm),
        }
        pathlib.Path(out + ".mapping.json").write_text(
            json.dumps(sidecar, indent=2) + "\n")
        click.echo(f"wrote {out} and {out}.mapping.json")
    if report_path:
        doc = {
            "circuit": str(circuit_file),
            "arch": arch.name,
            "objective": params.objective,
            "remote_cnot": params.d_remote == 2,
            "trials": trials,
            "seed": params.seed,
            "params": {"n_bp": params.n_bp, "c": params.c, "g_sim": params.g_sim,
                       "n_sim": params.n_sim, "gamma": params.gamma},
            "input": {"qubits": lc.num_qubits, "cnots": lc.cnot_count,
                      "depth": circuit_depth(lc)},
            "mapping": {"initial": list(best.initial_mapping),
                        "final": list(best.final_mapping),
                        "perm": list(best.perm)},
            "results": [
                {"seed": params.seed + t, "added_cnots": r.added_cnots,
                 "added_depth": r.added_depth, "decisions": r.decisions,
                 "fallbacks": r.fallbacks, "wall_time": round(r.wall_time, 3)}
                for t, r in enumerate(outcomes)
            ],
            "best": {"seed": best_seed, "added_cnots": best.added_cnots,
                     "added_depth": best.added_depth},
        }
        pathlib.Path(report_path).write_text(json.dumps(doc, indent=2) + "\n")
        click.echo(f"wrote {report_path}")
    if depth_report_path:
        with open(depth_report_path, "w", newline="") as fh:
            write_csv(depth_report_rows(best), fh,
                      columns=("decision", "min", "mean", "max"))
        click.echo(f"wrote {depth_report_path}")


@main.command()
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--arch", "arch_spec", default="q20", show_default=True, help=ARCH_HELP)
@click.option("--trials", default=5, show_default=True)
@click.option("--jobs", default=1, show_default=True,
              help="parallel worker processes")
@_search_options
@click.option("--out", type=click.Path(dir_okay=False),
              help="CSV destination (default: stdout)")
def bench(corpus_dir, arch_spec, trials, jobs, out, **search):
    """Route every .qasm file in CORPUS_DIR and tabulate the overheads.

    Each row also carries a one-step greedy baseline and the relative
    improvement over it; a TOTAL footer aggregates the numbers.
    """
    arch = _load_arch(arch_spec)
    params = _params(**search)
    corpus = []
    for path in sorted(pathlib.Path(corpus_dir).glob("*.qasm")):
        try:
            corpus.append((path.stem, read_qasm(path)))
        except QasmError as exc:
            print(f"bench: skipping {path.name}: {exc}", file=sys.stderr)
    if not corpus:
        raise click.ClickException(f"no readable .qasm files in {corpus_dir}")

    rows, failures = bench_run(corpus, arch, params, trials, jobs)
    if out:
        with open(out, "w", newline="") as fh:
            write_csv(rows, fh)
        click.echo(f"wrote {out} ({len(rows)} rows, {len(failures)} failures)")
    else:
        write_csv(rows, sys.stdout)


@main.command("random")
@click.option("--qubits", type=int, required=True)
@click.option("--cnots", type=int, required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False),
              help="QASM destination (default: stdout)")
def random_cmd(qubits, cnots, seed, out):
    """Generate a uniformly random CNOT circuit."""
    try:
        c = random_circuit(qubits, cnots, seed)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    text = emit_qasm(c)
    if out:
        pathlib.Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--arch", "arch_spec", default="q20", show_default=True, help=ARCH_HELP)
@click.option("--per-point", default=10, show_default=True,
              help="random circuits per sweep point")
@click.option("--qubit-points", default="5:15", show_default=True,
              help="qubit sweep as start:stop[:step]")
@click.option("--qubit-cnots", default=500, show_default=True,
              help="CNOTs per circuit in the qubit sweep")
@click.option("--cnot-points", default="50:501:50", show_default=True,
              help="CNOT sweep as start:stop[:step]")
@click.option("--cnot-qubits", default=10, show_default=True,
              help="qubits per circuit in the CNOT sweep")
@_search_options
@click.option("--out", type=click.Path(dir_okay=False),
              help="CSV destination (default: stdout)")
def scaling(arch_spec, per_point, qubit_points, qubit_cnots, cnot_points,
            cnot_qubits, out, **search):
    """Mean-runtime sweeps over qubit count and over CNOT count."""
    arch = _load_arch(arch_spec)
    params = _params(**search)
    try:
        rows = scaling_run(arch, params, per_point=per_point,
                           qubit_points=_parse_range(qubit_points),
                           qubit_cnots=qubit_cnots,
                           cnot_points=_parse_range(cnot_points),
                           cnot_qubits=cnot_qubits, seed=params.seed)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if out:
        with open(out, "w", newline="") as fh:
            write_csv(rows, fh, columns=SCALING_COLUMNS)
        click.echo(f"wrote {out}")
    else:
        write_csv(rows, sys.stdout, columns=SCALING_COLUMNS)


@main.command()
@click.argument("logical_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("physical_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--arch", "arch_spec", default="q20", show_default=True, help=ARCH_HELP)
@click.option("--mapping", "mapping_file", type=click.Path(exists=True, dir_okay=False),
              help="JSON sidecar holding the initial mapping (and permutation)")
def verify(logical_file, physical_file, arch_spec, mapping_file):
    """Check a routed circuit against its logical source.

    Exits nonzero when connectivity or equivalence fails.
    """
    lc = _load_circuit(logical_file)
    pc = _load_circuit(physical_file)
    arch = _load_arch(arch_spec)
    if mapping_file:
        try:
            data = json.loads(pathlib.Path(mapping_file).read_text())
            initial = tuple(int(v) for v in data["initial"])
            perm = tuple(int(v) for v in data["perm"]) if "perm" in data \
                else swap_permutation(pc)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise click.BadParameter(f"--mapping {mapping_file}: {exc}")
    else:
        initial = naive_mapping(lc.num_qubits)
        perm = swap_permutation(pc)
    try:
        report = verify_routed(lc, pc, initial, perm, arch)
    except (ValueError, IndexError) as exc:
        raise click.ClickException(f"verification could not run: {exc}")
    click.echo(f"connectivity: {'ok' if report.connectivity_ok else 'FAILED'}"
               + (f" (gates {list(report.bad_gates)})" if report.bad_gates else ""))
    click.echo(f"equivalence: {'ok' if report.equivalent else 'FAILED'}")
    if not report.ok:
        raise click.ClickException("verification failed")
    click.echo("verification passed")


if __name__ == "__main__":
    main()

"""Batch runners: corpora, random inputs, scaling sweeps, CSV reports.

Everything here is deterministic given its seed except the wall-time
column, which is why that column always comes last in the CSV rows.
The greedy baseline used for the improvement column is a one-step
lookahead: at every step it applies the pertinent SWAP that flushes the
most gates. It exists to give the improvement numbers a fixed, bundled
reference point; it is not a reimplementation of any published router.
"""

from __future__ import annotations

import csv
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .arch import ArchGraph
from .circuits import Circuit, circuit, circuit_depth, cnot
from .mcts import MctsParams, TransformResult, impact_factor, transform
from .routing import (
    apply_swap,
    force_cheapest_gate,
    initial_state,
    naive_mapping,
    pertinent_swaps,
)
from .verify import overhead_stats, swap_permutation, verify_routed


def random_circuit(qubits: int, cnots: int, seed: int) -> Circuit:
    """CNOTs over uniformly random ordered pairs of distinct qubits."""
    if qubits < 2:
        raise ValueError("random circuits need at least 2 qubits")
    rng = random.Random(seed)
    return circuit(qubits, [cnot(*rng.sample(range(qubits), 2)) for _ in range(cnots)])


@dataclass(frozen=True)
class GreedyResult:
    physical: Circuit
    provenance: tuple[tuple[str, int], ...]
    initial_mapping: tuple[int, ...]
    added_cnots: int
    added_depth: int
    fallbacks: int


def greedy_route(lc: Circuit, arch: ArchGraph, initial_mapping=None,
                 objective: str = "size") -> GreedyResult:
    """Baseline router: per step, the SWAP that flushes the most gates.

    Ties go to the higher impact factor, then to action order. The same
    dry-spell fallback as the tree search guarantees termination.
    """
    if initial_mapping is None:
        initial_mapping = naive_mapping(lc.num_qubits)
    initial_mapping = tuple(initial_mapping)
    state = initial_state(lc, initial_mapping, arch, objective, False)
    nv = arch.num_vertices
    dry = 0
    fallbacks = 0
    while not state.is_done():
        best = None
        best_key = None
        for act in pertinent_swaps(state):
            child, rew = apply_swap(state, act.edge)
            key = (rew, impact_factor(state, act.edge))
            if best_key is None or key > best_key:
                best, best_key = child, key
        state = best
        dry = dry + 1 if best_key[0] == 0 else 0
        if dry >= nv and not state.is_done():
            state, _ = force_cheapest_gate(state)
            fallbacks += 1
            dry = 0
    gates, prov = state.physical_circuit()
    physical = circuit(arch.num_vertices, gates)
    added_cnots, added_depth = overhead_stats(lc, physical)
    return GreedyResult(physical, prov, initial_mapping, added_cnots,
                        added_depth, fallbacks)


def best_of(lc: Circuit, arch: ArchGraph, params: MctsParams,
            trials: int, initial_mapping=None) -> tuple[TransformResult, list[TransformResult]]:
    """Run trial t with seed params.seed + t; best by the objective metric.

    Size picks minimal added CNOTs (ties: added depth); depth the reverse.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    outcomes = [
        transform(lc, arch, initial_mapping, replace(params, seed=params.seed + t))
        for t in range(trials)
    ]
    if params.objective == "depth":
        metric = lambda r: (r.added_depth, r.added_cnots)
    else:
        metric = lambda r: (r.added_cnots, r.added_depth)
    return min(outcomes, key=metric), outcomes


def _improvement(baseline: int, ours: int) -> float:
    return (baseline - ours) / baseline if baseline > 0 else 0.0


BENCH_COLUMNS = (
    "name", "qubits", "input_cnots", "input_depth",
    "added_cnots", "added_depth", "fallbacks",
    "greedy_added", "improvement", "wall_time",
)


def _bench_one(job) -> dict:
    name, lc, arch, params, trials = job
    best, outcomes = best_of(lc, arch, params, trials)
    report = verify_routed(lc, best.physical, best.initial_mapping, best.perm,
                           arch, best.provenance)
    if not report.ok:
        raise RuntimeError(f"{name}: routed circuit failed verification: {report}")
    base = greedy_route(lc, arch, objective=params.objective)
    base_report = verify_routed(lc, base.physical, base.initial_mapping,
                                swap_permutation(base.physical), arch,
                                base.provenance)
    if not base_report.ok:
        raise RuntimeError(f"{name}: greedy baseline failed verification")
    if params.objective == "depth":
        ours, theirs = best.added_depth, base.added_depth
    else:
        ours, theirs = best.added_cnots, base.added_cnots
    return {
        "name": name,
        "qubits": lc.num_qubits,
        "input_cnots": lc.cnot_count,
        "input_depth": circuit_depth(lc),
        "added_cnots": best.added_cnots,
        "added_depth": best.added_depth,
        "fallbacks": best.fallbacks,
        "greedy_added": theirs,
        "improvement": round(_improvement(theirs, ours), 4),
        "wall_time": round(sum(r.wall_time for r in outcomes), 3),
    }


def bench_run(corpus, arch: ArchGraph, params: MctsParams, trials: int = 5,
              jobs: int = 1, log=sys.stderr):
    """Route every (name, circuit) pair; returns (rows, failures).

    Rows come back in corpus order with a TOTAL footer. Failures are
    (name, message) pairs; a failed circuit is logged and skipped.
    """
    work = [(name, lc, arch, params, trials) for name, lc in corpus]
    rows = []
    failures = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(job[0], pool.submit(_bench_one, job)) for job in work]
            for name, future in futures:
                try:
                    rows.append(future.result())
                except Exception as exc:
                    failures.append((name, str(exc)))
                    print(f"bench: {name} failed: {exc}", file=log)
    else:
        for job in work:
            try:
                rows.append(_bench_one(job))
            except Exception as exc:
                failures.append((job[0], str(exc)))
                print(f"bench: {job[0]} failed: {exc}", file=log)
    if rows:
        total_greedy = sum(r["greedy_added"] for r in rows)
        key = "added_depth" if params.objective == "depth" else "added_cnots"
        rows.append({
            "name": "TOTAL",
            "qubits": "",
            "input_cnots": sum(r["input_cnots"] for r in rows),
            "input_depth": sum(r["input_depth"] for r in rows),
            "added_cnots": sum(r["added_cnots"] for r in rows),
            "added_depth": sum(r["added_depth"] for r in rows),
            "fallbacks": sum(r["fallbacks"] for r in rows),
            "greedy_added": total_greedy,
            "improvement": round(
                _improvement(total_greedy, sum(r[key] for r in rows)), 4),
            "wall_time": round(sum(r["wall_time"] for r in rows), 3),
        })
    return rows, failures


def write_csv(rows, fh, columns=BENCH_COLUMNS) -> None:
    writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


SCALING_COLUMNS = ("sweep", "x", "circuits", "mean_added_cnots", "mean_wall_time")


def scaling_run(arch: ArchGraph, params: MctsParams, per_point: int = 10,
                qubit_points=tuple(range(5, 15)), qubit_cnots: int = 500,
                cnot_points=tuple(range(50, 501, 50)), cnot_qubits: int = 10,
                seed: int = 0):
    """Runtime sweeps over circuit width and length.

    Two families of random circuits: one varying the qubit count at a
    fixed CNOT count, one varying the CNOT count at a fixed qubit count;
    per_point circuits per setting, mean runtime reported. Measurement
    order is repetition-major and serpentine (points ascending on even
    passes, descending on odd ones) after one untimed warm-up, so slow
    machine drift spreads across all points instead of tilting the
    slope fits.
    """
    settings = []
    for sweep, points in (("qubits", qubit_points), ("cnots", cnot_points)):
        for x in points:
            n, m = (x, qubit_cnots) if sweep == "qubits" else (cnot_qubits, x)
            settings.append((sweep, x, n, m))
    added = {(sweep, x): [] for sweep, x, _, _ in settings}
    times = {(sweep, x): [] for sweep, x, _, _ in settings}
    transform(random_circuit(2, 4, seed), arch, params=params)
    for i in range(per_point):
        for sweep, x, n, m in settings if i % 2 == 0 else reversed(settings):
            lc = random_circuit(n, m, seed + i)
            res = transform(lc, arch, params=params)
            added[sweep, x].append(res.added_cnots)
            times[sweep, x].append(res.wall_time)
    return [
        {
            "sweep": sweep,
            "x": x,
            "circuits": per_point,
            "mean_added_cnots": round(sum(added[sweep, x]) / per_point, 1),
            "mean_wall_time": round(sum(times[sweep, x]) / per_point, 4),
        }
        for sweep, x, _, _ in settings
    ]


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    var = sum((a - mx) ** 2 for a in lx)
    cov = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    return cov / var


def depth_report_rows(result: TransformResult):
    """Selection-depth series: one row per decision round."""
    return [
        {"decision": i, "min": lo, "mean": round(mean, 3), "max": hi}
        for i, (lo, mean, hi) in enumerate(result.selection_depth_stats)
    ]

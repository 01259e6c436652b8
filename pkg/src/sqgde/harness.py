"""Benchmark harness: run an algorithm/function/dimension/repetition matrix
under a fixed evaluation budget and summarize the results.

Each run's seed is derived deterministically from the master seed and the
run key, so the full matrix is reproducible from the spec alone, results
are independent of execution order and worker count, and an interrupted
directory can be resumed (completed records are skipped by key).

Artifacts under the output directory:

* ``spec.json``      the benchmark spec that produced everything below
* ``rse.csv``        random-search reference targets per function and dim
* ``runs.csv``       one row per run (sorted by key, full float precision)
* ``traces/``        per-run best-so-far traces, ``eval,best`` per line
* ``ert.csv``        expected running times (written by ``summarize``)
* ``summary.csv``    per-category means and tests vs the best algorithm
* ``bnfv/``          mean/median normalized convergence curves on a grid
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .algos import DEConfig, SQGConfig, run_de, run_sqg
from .core import RunTrace, derive_seed
from .metrics import (
    ErtResult,
    NormalizationUndefined,
    RseTarget,
    bnfv_on_grid,
    expected_running_time,
    estimate_rse_target,
)
from .stats import wilcoxon_signed_rank
from .testfuncs import FunctionDescriptor, default_suite, make_test_function

__all__ = [
    "AlgorithmSpec",
    "ALGORITHM_PRESETS",
    "algorithm_preset",
    "BenchmarkSpec",
    "default_benchmark_spec",
    "RunRecord",
    "execute_run",
    "run_benchmark",
    "summarize",
    "SummaryResult",
    "BNFV_GRID_STEP",
]

RUNS_COLUMNS = ["algorithm", "function", "dim", "rep", "seed", "evals_used", "best_fitness"]
ERT_COLUMNS = ["algorithm", "function", "dim", "ert", "lower_bound", "success_rate"]
SUMMARY_COLUMNS = ["category", "dim", "algorithm", "mean_ert", "flag", "p_vs_best"]
RSE_COLUMNS = ["function", "dim", "budget", "reps", "value"]
BNFV_GRID_STEP = 10
OVERALL_CATEGORY = "overall"


@dataclass(frozen=True)
class AlgorithmSpec:
    """A named optimizer: a DE configuration or a quasi-gradient descent one."""

    name: str
    config: DEConfig | SQGConfig

    def to_dict(self) -> dict:
        kind = "de" if isinstance(self.config, DEConfig) else "sqg"
        return {"name": self.name, "kind": kind, **asdict(self.config)}

    @classmethod
    def from_dict(cls, d: dict) -> "AlgorithmSpec":
        name = d["name"]
        kind = d.get("kind")
        params = {k: v for k, v in d.items() if k not in ("name", "kind")}
        if kind is None:
            preset = ALGORITHM_PRESETS.get(name)
            if preset is None:
                raise ValueError(
                    f"unknown algorithm preset {name!r}; give 'kind' plus parameters"
                )
            if params:
                return cls(name, replace(preset.config, **params))
            return preset
        if kind == "de":
            return cls(name, DEConfig(**params))
        if kind == "sqg":
            return cls(name, SQGConfig(**params))
        raise ValueError(f"unknown algorithm kind {kind!r}")


# The four protocol optimizers: classic DE, best-of-two-differences DE,
# the quasi-gradient DE hybrid, and standalone quasi-gradient descent.
ALGORITHM_PRESETS: dict[str, AlgorithmSpec] = {
    "de": AlgorithmSpec("de", DEConfig("rand1exp", F=0.8, CR=0.8, pop_size=100)),
    "de2": AlgorithmSpec("de2", DEConfig("best2bin", F=0.8, CR=0.8, pop_size=100)),
    "sqg": AlgorithmSpec("sqg", SQGConfig(r=5, delta=1e-3, step0=0.015, decay=0.96, warm_start_samples=100)),
    "sqgde": AlgorithmSpec("sqgde", DEConfig("sqgbin", F=0.8, CR=0.8, w=5, pop_size=100)),
}


def algorithm_preset(name: str) -> AlgorithmSpec:
    if name not in ALGORITHM_PRESETS:
        raise ValueError(f"unknown algorithm {name!r}; known: {sorted(ALGORITHM_PRESETS)}")
    return ALGORITHM_PRESETS[name]


@dataclass
class BenchmarkSpec:
    """Everything needed to reproduce a benchmark matrix."""

    algorithms: list[AlgorithmSpec]
    functions: list[FunctionDescriptor]
    dims: list[int]
    budget: int = 1000
    reps: int = 100
    master_seed: int = 12345
    output_dir: str = "results"

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if not self.functions:
            raise ValueError("at least one function is required")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError("dims must be positive")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ValueError("algorithm names must be unique")
        labels = [f.label for f in self.functions]
        if len(set(labels)) != len(labels):
            raise ValueError("function labels must be unique")

    def to_dict(self) -> dict:
        return {
            "algorithms": [a.to_dict() for a in self.algorithms],
            "functions": [f.to_dict() for f in self.functions],
            "dims": list(self.dims),
            "budget": self.budget,
            "reps": self.reps,
            "master_seed": self.master_seed,
            "output_dir": str(self.output_dir),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkSpec":
        algos = []
        for entry in d.get("algorithms", list(ALGORITHM_PRESETS)):
            if isinstance(entry, str):
                algos.append(algorithm_preset(entry))
            else:
                algos.append(AlgorithmSpec.from_dict(entry))
        funcs = d.get("functions")
        functions = [FunctionDescriptor.from_dict(f) for f in funcs] if funcs else default_suite()
        return cls(
            algorithms=algos,
            functions=functions,
            dims=[int(x) for x in d.get("dims", [30, 50])],
            budget=int(d.get("budget", 1000)),
            reps=int(d.get("reps", 100)),
            master_seed=int(d.get("master_seed", 12345)),
            output_dir=str(d.get("output_dir", "results")),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BenchmarkSpec":
        return cls.from_dict(json.loads(text))


def default_benchmark_spec(
    output_dir: str = "results",
    dims=(30, 50),
    budget: int = 1000,
    reps: int = 100,
    master_seed: int = 12345,
) -> BenchmarkSpec:
    return BenchmarkSpec(
        algorithms=[ALGORITHM_PRESETS[n] for n in ("de", "de2", "sqg", "sqgde")],
        functions=default_suite(),
        dims=list(dims),
        budget=budget,
        reps=reps,
        master_seed=master_seed,
        output_dir=output_dir,
    )


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    function: str
    dim: int
    rep: int
    seed: int
    evals_used: int
    best_fitness: float
    trace_path: str

    @property
    def key(self) -> tuple[str, str, int, int]:
        return (self.algorithm, self.function, self.dim, self.rep)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _csv_text(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _trace_rel_path(algorithm: str, function: str, dim: int, rep: int) -> str:
    return f"traces/{algorithm}__{function}__d{dim}__r{rep:04d}.csv"


def _write_trace(path: Path, trace: RunTrace) -> None:
    rows = [(e, f) for e, f in trace.points]
    _atomic_write_text(path, _csv_text(["eval", "best"], rows))


def _read_trace(path: Path) -> RunTrace:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["eval", "best"]:
            raise ValueError(f"unexpected trace header in {path}: {header}")
        points = [(int(e), float(b)) for e, b in reader]
    final_evals = points[-1][0] if points else 0
    return RunTrace(tuple(points), final_evals)


def _load_runs(path: Path, out_dir: Path) -> dict[tuple, RunRecord]:
    """Existing records keyed by (algorithm, function, dim, rep).

    Rows whose trace file is missing are dropped so they get re-run.
    """
    records: dict[tuple, RunRecord] = {}
    if not path.exists():
        return records
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RUNS_COLUMNS:
            return records
        for row in reader:
            if len(row) != len(RUNS_COLUMNS):
                continue
            algorithm, function, dim, rep, seed, evals_used, best = row
            rec = RunRecord(
                algorithm=algorithm,
                function=function,
                dim=int(dim),
                rep=int(rep),
                seed=int(seed),
                evals_used=int(evals_used),
                best_fitness=float(best),
                trace_path=_trace_rel_path(algorithm, function, int(dim), int(rep)),
            )
            if rec.key not in records and (out_dir / rec.trace_path).exists():
                records[rec.key] = rec
    return records


def _write_runs(path: Path, records: list[RunRecord]) -> None:
    rows = [
        (r.algorithm, r.function, r.dim, r.rep, r.seed, r.evals_used, r.best_fitness)
        for r in sorted(records, key=lambda r: r.key)
    ]
    _atomic_write_text(path, _csv_text(RUNS_COLUMNS, rows))


def _load_rse(path: Path) -> dict[tuple[str, int], RseTarget]:
    targets: dict[tuple[str, int], RseTarget] = {}
    if not path.exists():
        return targets
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RSE_COLUMNS:
            return targets
        for function, dim, budget, reps, value in reader:
            targets[(function, int(dim))] = RseTarget(function, int(budget), int(reps), float(value))
    return targets


def _write_rse(path: Path, targets: dict[tuple[str, int], RseTarget]) -> None:
    rows = [
        (label, dim, t.budget, t.reps, t.value)
        for (label, dim), t in sorted(targets.items())
    ]
    _atomic_write_text(path, _csv_text(RSE_COLUMNS, rows))


def execute_run(algo: AlgorithmSpec, fn, budget: int, seed: int) -> RunTrace:
    """Run one optimizer once against a function under the budget."""
    if isinstance(algo.config, DEConfig):
        return run_de(algo.config, fn, budget, seed)
    if isinstance(algo.config, SQGConfig):
        return run_sqg(algo.config, fn, budget, seed)
    raise TypeError(f"unsupported algorithm config {type(algo.config).__name__}")


def run_seed(master_seed: int, algorithm: str, function: str, dim: int, rep: int) -> int:
    return derive_seed(master_seed, "run", algorithm, function, dim, rep)


def _run_task(algo: AlgorithmSpec, desc: FunctionDescriptor, dim: int, rep: int, budget: int, seed: int):
    fn = make_test_function(desc, dim=dim)
    trace = execute_run(algo, fn, budget, seed)
    return (algo.name, desc.label, dim, rep, seed, trace.final_evals, trace.final_best, trace.points)


def ensure_rse_targets(spec: BenchmarkSpec, progress: bool = False) -> dict[tuple[str, int], RseTarget]:
    """Compute (or load) the random-search targets for every function/dim cell."""
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rse_path = out / "rse.csv"
    targets = _load_rse(rse_path)
    missing = [
        (desc, dim)
        for desc in spec.functions
        for dim in spec.dims
        if (desc.label, dim) not in targets
    ]
    for desc, dim in missing:
        fn = make_test_function(desc, dim=dim)
        seed = derive_seed(spec.master_seed, "rse", desc.label, dim)
        target = estimate_rse_target(fn, spec.budget, spec.reps, seed)
        targets[(desc.label, dim)] = target
        if progress:
            print(f"rse  {desc.label} d={dim}  target={target.value:.6g}")
    _write_rse(rse_path, targets)
    return targets


def run_benchmark(spec: BenchmarkSpec, workers: int = 1, progress: bool = False) -> list[RunRecord]:
    """Execute the full matrix, skipping runs already recorded on disk.

    The final runs.csv is sorted by run key and byte-identical across
    re-runs, resumptions, and worker counts.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    out = Path(spec.output_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    _atomic_write_text(out / "spec.json", spec.to_json())

    # Build every instance up front so a bad descriptor fails fast.
    for desc in spec.functions:
        for dim in spec.dims:
            make_test_function(desc, dim=dim)

    ensure_rse_targets(spec, progress=progress)

    runs_path = out / "runs.csv"
    existing = _load_runs(runs_path, out)

    tasks = []
    for algo in spec.algorithms:
        for desc in spec.functions:
            for dim in spec.dims:
                for rep in range(spec.reps):
                    key = (algo.name, desc.label, dim, rep)
                    if key in existing:
                        continue
                    seed = run_seed(spec.master_seed, algo.name, desc.label, dim, rep)
                    tasks.append((algo, desc, dim, rep, seed))

    new_records: list[RunRecord] = []
    append_header = not runs_path.exists()
    with open(runs_path, "a", newline="") as fh:
        if append_header:
            fh.write(",".join(RUNS_COLUMNS) + "\n")

        def handle(result):
            name, label, dim, rep, seed, evals_used, best, points = result
            rel = _trace_rel_path(name, label, dim, rep)
            _write_trace(out / rel, RunTrace(tuple(points), evals_used))
            rec = RunRecord(name, label, dim, rep, seed, evals_used, best, rel)
            new_records.append(rec)
            fh.write(
                ",".join(_fmt(v) for v in (name, label, dim, rep, seed, evals_used, best)) + "\n"
            )
            fh.flush()
            if progress:
                print(f"run  {name} {label} d={dim} rep={rep}  best={best:.6g}")

        if workers == 1:
            for algo, desc, dim, rep, seed in tasks:
                handle(_run_task(algo, desc, dim, rep, spec.budget, seed))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(_run_task, algo, desc, dim, rep, spec.budget, seed)
                    for algo, desc, dim, rep, seed in tasks
                ]
                for fut in as_completed(futures):
                    handle(fut.result())

    records = list(existing.values()) + new_records
    for rec in records:
        if rec.evals_used > spec.budget:
            raise RuntimeError(
                f"run {rec.key} used {rec.evals_used} evaluations, over the budget {spec.budget}"
            )
    _write_runs(runs_path, records)
    return sorted(records, key=lambda r: r.key)


@dataclass
class SummaryResult:
    ert_rows: list[dict]
    summary_rows: list[dict]


def _category_order(functions: list[FunctionDescriptor]) -> list[str]:
    seen: list[str] = []
    for f in functions:
        if f.category not in seen:
            seen.append(f.category)
    return seen


def summarize(output_dir: str | Path) -> SummaryResult:
    """Build ert.csv, summary.csv and normalized convergence curves.

    Expected running times are measured against the stored random-search
    targets. Per category and dimension, each algorithm's mean ERT is
    compared to the best algorithm's with a paired signed-rank test over
    the per-function ERT values; cells involving lower bounds are flagged.
    """
    out = Path(output_dir)
    spec = BenchmarkSpec.from_json((out / "spec.json").read_text())
    targets = _load_rse(out / "rse.csv")
    records = sorted(_load_runs(out / "runs.csv", out).values(), key=lambda r: r.key)
    if not records:
        raise ValueError(f"no run records found under {out}")
    for rec in records:
        if rec.evals_used > spec.budget:
            raise RuntimeError(
                f"run {rec.key} used {rec.evals_used} evaluations, over the budget {spec.budget}"
            )

    by_cell: dict[tuple[str, str, int], list[RunRecord]] = {}
    for rec in records:
        by_cell.setdefault((rec.algorithm, rec.function, rec.dim), []).append(rec)

    algo_names = [a.name for a in spec.algorithms]
    labels = [f.label for f in spec.functions]
    cat_of = {f.label: f.category for f in spec.functions}

    ert_rows: list[dict] = []
    ert_by_cell: dict[tuple[str, str, int], ErtResult] = {}
    grid = list(range(BNFV_GRID_STEP, spec.budget + 1, BNFV_GRID_STEP))
    bnfv_dir = out / "bnfv"
    bnfv_dir.mkdir(exist_ok=True)

    for algo in algo_names:
        for label in labels:
            for dim in spec.dims:
                cell = (algo, label, dim)
                if cell not in by_cell:
                    continue
                recs = sorted(by_cell[cell], key=lambda r: r.rep)
                target = targets.get((label, dim))
                if target is None:
                    raise ValueError(f"missing random-search target for {label} d={dim}")
                traces = [_read_trace(out / r.trace_path) for r in recs]
                ert = expected_running_time(traces, target.value, spec.budget)
                ert_by_cell[cell] = ert
                ert_rows.append(
                    {
                        "algorithm": algo,
                        "function": label,
                        "dim": dim,
                        "ert": ert.value,
                        "lower_bound": ert.lower_bound,
                        "success_rate": ert.success_rate,
                    }
                )
                _write_bnfv_curves(bnfv_dir, algo, label, dim, traces, target, grid)

    _atomic_write_text(
        out / "ert.csv",
        _csv_text(
            ERT_COLUMNS,
            [
                (r["algorithm"], r["function"], r["dim"], r["ert"], r["lower_bound"], r["success_rate"])
                for r in ert_rows
            ],
        ),
    )

    summary_rows = build_summary_rows(
        ert_by_cell, algo_names, labels, cat_of, spec.dims, _category_order(spec.functions)
    )
    _atomic_write_text(
        out / "summary.csv",
        _csv_text(
            SUMMARY_COLUMNS,
            [
                (r["category"], r["dim"], r["algorithm"], r["mean_ert"], r["flag"], r["p_vs_best"])
                for r in summary_rows
            ],
        ),
    )
    return SummaryResult(ert_rows, summary_rows)


def _write_bnfv_curves(bnfv_dir: Path, algo, label, dim, traces, target, grid) -> None:
    try:
        curves = np.array([bnfv_on_grid(tr, target, grid) for tr in traces])
        header = ["eval", "mean_bnfv", "median_bnfv"]
    except NormalizationUndefined:
        # Zero target: fall back to raw best fitness values.
        curves = np.array([[tr.best_at(int(e)) for e in grid] for tr in traces])
        header = ["eval", "mean_bfv", "median_bfv"]
    mean = curves.mean(axis=0)
    median = np.median(curves, axis=0)
    rows = [(e, float(m), float(md)) for e, m, md in zip(grid, mean, median)]
    _atomic_write_text(bnfv_dir / f"{label}__d{dim}__{algo}.csv", _csv_text(header, rows))


def build_summary_rows(
    ert_by_cell: dict[tuple[str, str, int], ErtResult],
    algo_names: list[str],
    labels: list[str],
    cat_of: dict[str, str],
    dims: list[int],
    category_order: list[str],
) -> list[dict]:
    """Per-(category, dim) mean ERT per algorithm plus a test vs the best.

    The best algorithm has the lowest mean ERT in the cell; every other
    algorithm is compared to it with a paired signed-rank test over the
    per-function ERT values. Lower-bound ERTs enter the means as their
    bound values and flag the row with ">=".
    """
    rows: list[dict] = []
    groups = [(cat, [l for l in labels if cat_of[l] == cat]) for cat in category_order]
    if len(category_order) > 1:
        groups.append((OVERALL_CATEGORY, list(labels)))
    for cat, cat_labels in groups:
        if not cat_labels:
            continue
        for dim in dims:
            per_algo: dict[str, list[ErtResult]] = {}
            for algo in algo_names:
                values = [ert_by_cell.get((algo, label, dim)) for label in cat_labels]
                if any(v is None for v in values):
                    continue
                per_algo[algo] = values
            if not per_algo:
                continue
            means = {a: float(np.mean([e.value for e in v])) for a, v in per_algo.items()}
            best_algo = min(means, key=lambda a: (means[a], algo_names.index(a)))
            best_vector = [e.value for e in per_algo[best_algo]]
            for algo in algo_names:
                if algo not in per_algo:
                    continue
                flag = ">=" if any(e.lower_bound for e in per_algo[algo]) else ""
                if algo == best_algo:
                    p = ""
                else:
                    vector = [e.value for e in per_algo[algo]]
                    # a single pair can never reject the null (exact p is 1)
                    if len(vector) < 2:
                        p = 1.0
                    else:
                        p = wilcoxon_signed_rank(vector, best_vector).p_value
                rows.append(
                    {
                        "category": cat,
                        "dim": dim,
                        "algorithm": algo,
                        "mean_ert": means[algo],
                        "flag": flag,
                        "p_vs_best": p,
                    }
                )
    return rows

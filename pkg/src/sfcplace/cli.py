"""Command-line entry point: generate, solve, evaluate and compare.

Exit codes: 0 success, 2 usage error, 3 data error, 4 solver refusal.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .evaluator import InfeasibleInstanceError
from .model import (TINY_SPEC, DatasetError, GeneratorSpec, ObjectiveConfig, Solution, dumps_dataset,
                    generate_dataset, load_dataset, reference_instance, validate_shape)
from .solvers import (ALGORITHMS, DEFAULT_CAP, GaConfig, Problem, SearchSpaceTooLarge, exhaustive_solve,
                      random_baseline, run_ga)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_REFUSED = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# -- helpers ------------------------------------------------------------------

def thread_count() -> int:
    raw = os.environ.get("SFC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"SFC_THREADS must be an integer, got {raw!r}", EXIT_USAGE) from None


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def read_dataset(path: str):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read dataset {path}: {exc.strerror}", EXIT_DATA) from None
    try:
        infra, workload, objective = load_dataset(raw)
    except DatasetError as exc:
        raise CliError(f"{path}: {exc}", EXIT_DATA) from None
    return infra, workload, objective, hashlib.sha256(raw).hexdigest()


def parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def ga_config_from(args, seed: int) -> GaConfig:
    base = GaConfig()
    population = args.population if args.population is not None else base.population
    if args.population is not None and args.crossovers is None and args.elites is None:
        cfg = GaConfig.scaled(population, seed=seed)
    else:
        cfg = GaConfig(population=population, seed=seed)
    overrides = {k: v for k, v in (("generations", args.generations),
                                   ("crossovers_per_generation", args.crossovers),
                                   ("elites", args.elites),
                                   ("mutation_rate", args.mutation_rate)) if v is not None}
    try:
        return replace(cfg, **overrides)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def objective_from(args, objective: ObjectiveConfig) -> ObjectiveConfig:
    changes = {}
    if args.gamma is not None:
        changes["penalty_weight"] = args.gamma
    if args.raw_fitness:
        changes["raw_fitness"] = True
    try:
        return replace(objective, **changes)
    except (ValueError, DatasetError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def solve_one(algorithm: str, infra, workload, objective: ObjectiveConfig, seed: int,
              ga_cfg: GaConfig | None = None, threads: int = 1, attempts: int = 10_000, cap: int = DEFAULT_CAP):
    """Run one solver; the library-level counterpart of ``solve`` for a single seed."""
    try:
        problem = Problem(infra, workload, objective)
    except InfeasibleInstanceError as exc:
        raise CliError(str(exc), EXIT_DATA) from None
    if algorithm in ("gap-gaba", "gap-raba"):
        cfg = replace(ga_cfg or GaConfig(), seed=seed)
        return run_ga(algorithm, infra, workload, objective, cfg, threads=threads, problem=problem)
    if algorithm == "random":
        return random_baseline(infra, workload, objective, attempts=attempts, seed=seed, problem=problem)
    if algorithm == "exact":
        try:
            return exhaustive_solve(infra, workload, objective, cap=cap, problem=problem)
        except SearchSpaceTooLarge as exc:
            raise CliError(str(exc), EXIT_REFUSED) from None
    raise CliError(f"unknown algorithm {algorithm!r}", EXIT_USAGE)


def result_document(result, manifest: dict) -> dict:
    """Deterministic result document; wall time is kept out so reruns compare byte for byte."""
    return {
        "manifest": manifest,
        "algorithm": result.algorithm,
        "seed": result.seed,
        "optimal": result.optimal,
        "feasible": result.feasible,
        "evaluations": result.evaluations,
        "report": result.best_report.to_dict(),
        "solution": result.best_solution.to_dict(),
        "fitness_history": result.fitness_history,
    }


def run_name(algorithm: str, override: int | None) -> str:
    return algorithm if override is None else f"{algorithm}-s{override}"


# -- commands -----------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.reference_instance:
        infra, workload, objective = reference_instance(args.node_scale)
    else:
        spec = TINY_SPEC if args.tiny else GeneratorSpec()
        changes = {}
        if args.categories is not None:
            changes["categories"] = (args.categories, args.categories)
        if args.sfcs is not None:
            changes["num_sfcs"] = (args.sfcs, args.sfcs)
        try:
            spec = replace(spec, **changes)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_USAGE) from None
        infra, workload = generate_dataset(spec, args.seed)
        objective = ObjectiveConfig()
    text = dumps_dataset(infra, workload, objective)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            write_atomic(Path(args.out), text)
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc.strerror}", EXIT_DATA) from None
    print(f"M={infra.num_categories} N={infra.total_nodes} K={len(workload)} sum_Nk={workload.total_vnfs}",
          file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


def _manifest(args, algorithm, seed, override, dataset_hash, ga_cfg, objective) -> dict:
    doc = {
        "tool": f"sfcplace {__version__}",
        "dataset": str(args.dataset),
        "dataset_sha256": dataset_hash,
        "algorithm": algorithm,
        "seed": seed,
        "strategy_override": override,
        "objective": asdict(objective),
    }
    if algorithm in ("gap-gaba", "gap-raba"):
        doc["ga"] = {k: v for k, v in asdict(ga_cfg).items() if k != "seed"}
    elif algorithm == "random":
        doc["attempts"] = args.attempts
    return doc


def cmd_solve(args) -> int:
    infra, workload, objective, digest = read_dataset(args.dataset)
    objective = objective_from(args, objective)
    if args.strategy_override is not None:
        workload = workload.with_strategy(args.strategy_override)
    seeds = args.seeds if args.seeds is not None else [args.seed]
    threads = thread_count()
    out = Path(args.out)
    for seed in seeds:
        ga_cfg = ga_config_from(args, seed)
        result = solve_one(args.algorithm, infra, workload, objective, seed, ga_cfg, threads, args.attempts)
        manifest = _manifest(args, args.algorithm, seed, args.strategy_override, digest, ga_cfg, objective)
        stem = f"{run_name(args.algorithm, args.strategy_override)}_seed{seed}"
        write_atomic(out / f"{stem}.json", dump_json(result_document(result, manifest)))
        write_atomic(out / f"{stem}.timing.json", dump_json({"wall_time_s": result.wall_time}))
        rep = result.best_report
        print(f"{stem}: objective={rep.objective:.6f} fitness={rep.fitness:.6f} "
              f"penalties={rep.penalty_count} feasible={rep.feasible}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    infra, workload, objective, _ = read_dataset(args.dataset)
    objective = objective_from(args, objective)
    try:
        doc = json.loads(Path(args.solution).read_text())
    except OSError as exc:
        raise CliError(f"cannot read solution {args.solution}: {exc.strerror}", EXIT_DATA) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.solution}: malformed JSON: {exc}", EXIT_DATA) from None
    if isinstance(doc, dict) and "solution" in doc:
        doc = doc["solution"]
    try:
        solution = Solution.from_dict(doc, infra, workload)
        validate_shape(solution, infra, workload)
        problem = Problem(infra, workload, objective)
    except (DatasetError, InfeasibleInstanceError) as exc:
        raise CliError(f"{args.solution}: {exc}", EXIT_DATA) from None
    text = dump_json(problem.evaluate(solution).to_dict())
    if args.out:
        write_atomic(Path(args.out), text)
    sys.stdout.write(text)
    return EXIT_OK


def summarize(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=1)) if len(arr) > 1 else 0.0


def reductions(means: dict[str, float]) -> list[dict]:
    """Pairwise (A - B) / A over mean objectives, A being the baseline."""
    rows = []
    for a, ma in means.items():
        for b, mb in means.items():
            rows.append({"baseline": a, "candidate": b,
                         "reduction_pct": 100.0 * (ma - mb) / ma if ma else 0.0})
    return rows


METRICS = ("objective", "normalized_cost", "normalized_delay", "total_cost", "total_delay", "penalty_count")


def cmd_compare(args) -> int:
    infra, workload, objective, digest = read_dataset(args.dataset)
    objective = objective_from(args, objective)
    overrides = args.strategy_overrides or [None]
    configs = [(a, s) for a in args.algorithms for s in overrides]
    if len(configs) < 2:
        raise CliError("compare needs at least two configurations", EXIT_USAGE)
    threads = thread_count()
    out = Path(args.out)
    table, errors, means = [], {}, {}
    series = io.StringIO()
    series_writer = csv.writer(series, lineterminator="\n")
    series_writer.writerow(["configuration", "seed", "generation", "best_fitness"])
    for algorithm, override in configs:
        name = run_name(algorithm, override)
        wl = workload if override is None else workload.with_strategy(override)
        samples = {m: [] for m in METRICS}
        feasible = 0
        try:
            for seed in args.seeds:
                ga_cfg = ga_config_from(args, seed)
                result = solve_one(algorithm, infra, wl, objective, seed, ga_cfg, threads, args.attempts)
                manifest = _manifest(args, algorithm, seed, override, digest, ga_cfg, objective)
                write_atomic(out / "runs" / f"{name}_seed{seed}.json", dump_json(result_document(result, manifest)))
                rep = result.best_report
                for m in METRICS:
                    samples[m].append(getattr(rep, m))
                feasible += rep.feasible
                for gen, value in enumerate(result.fitness_history):
                    series_writer.writerow([name, seed, gen, repr(value)])
        except CliError as exc:
            errors[name] = str(exc)
            print(f"{name}: failed: {exc}", file=sys.stderr)
            continue
        row = {"configuration": name, "algorithm": algorithm, "strategy_override": override,
               "runs": len(args.seeds), "feasible_runs": feasible}
        for m in METRICS:
            row[f"{m}_mean"], row[f"{m}_std"] = summarize(samples[m])
        table.append(row)
        means[name] = row["objective_mean"]
        print(f"{name}: objective {row['objective_mean']:.6f} +/- {row['objective_std']:.6f} "
              f"({feasible}/{len(args.seeds)} feasible)")

    doc = {
        "manifest": {"tool": f"sfcplace {__version__}", "dataset": str(args.dataset), "dataset_sha256": digest,
                     "configurations": [run_name(a, s) for a, s in configs], "seeds": args.seeds,
                     "objective": asdict(objective)},
        "table": table,
        "reductions": reductions(means),
        "errors": errors,
    }
    write_atomic(out / "comparison.json", dump_json(doc))
    write_atomic(out / "comparison.csv", _csv(table, list(table[0]) if table else ["configuration"]))
    long_rows = [{"configuration": r["configuration"], "metric": m, "mean": r[f"{m}_mean"], "stddev": r[f"{m}_std"]}
                 for r in table for m in METRICS]
    write_atomic(out / "metrics.csv", _csv(long_rows, ["configuration", "metric", "mean", "stddev"]))
    write_atomic(out / "reductions.csv", _csv(doc["reductions"], ["baseline", "candidate", "reduction_pct"]))
    write_atomic(out / "fitness_history.csv", series.getvalue())
    return EXIT_DATA if errors and not table else EXIT_OK


def _csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# -- parser -------------------------------------------------------------------

def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True, help="dataset JSON file")
    p.add_argument("--generations", type=int)
    p.add_argument("--population", type=positive_int,
                   help="population size; alone it rescales crossovers and elites proportionally")
    p.add_argument("--crossovers", type=int, help="offspring bred per generation")
    p.add_argument("--elites", type=positive_int)
    p.add_argument("--mutation-rate", type=float)
    p.add_argument("--gamma", type=float, help="penalty weight per violated constraint")
    p.add_argument("--raw-fitness", action="store_true", help="score un-normalized cost and delay")
    p.add_argument("--attempts", type=positive_int, default=10_000, help="draws for the random baseline")
    p.add_argument("--out", default="results", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfcplace", description="Reliability-aware SFC placement on fog nodes")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a dataset")
    which = g.add_mutually_exclusive_group()
    which.add_argument("--paper-instance", dest="reference_instance", action="store_true",
                       help="the published 3-category instance")
    which.add_argument("--tiny", action="store_true", help="oracle-sized random instance")
    g.add_argument("--node-scale", type=float, default=1.0, help="node-count scale for --paper-instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--categories", type=positive_int, help="fix the number of node categories")
    g.add_argument("--sfcs", type=positive_int, help="fix the number of SFCs")
    g.add_argument("--out", help="output file (stdout if omitted)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve a dataset for one or more seeds")
    _add_solver_flags(s)
    s.add_argument("--algorithm", choices=ALGORITHMS, default="gap-gaba")
    seeds = s.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=int, default=0)
    seeds.add_argument("--seeds", type=parse_seeds)
    s.add_argument("--strategy-override", type=int, choices=(1, 2, 3, 4))
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("evaluate", help="score a solution file")
    e.add_argument("--dataset", required=True)
    e.add_argument("--solution", required=True, help="solution JSON (bare or inside a result document)")
    e.add_argument("--gamma", type=float)
    e.add_argument("--raw-fitness", action="store_true")
    e.add_argument("--out", help="also write the report here")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("compare", help="run several configurations over a shared seed list")
    _add_solver_flags(c)
    c.add_argument("--algorithms", type=lambda t: [a.strip() for a in t.split(",") if a.strip()],
                   default=["gap-gaba", "gap-raba", "random"], help="comma-separated algorithm names")
    c.add_argument("--strategy-overrides", type=lambda t: [int(x) for x in t.split(",") if x.strip()],
                   help="comma-separated strategies, each forced on every SFC")
    c.add_argument("--seeds", type=parse_seeds, default=list(range(10)))
    c.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "compare":
        bad = [a for a in args.algorithms if a not in ALGORITHMS]
        if bad:
            parser.error(f"unknown algorithm(s): {', '.join(bad)}")
        if args.strategy_overrides and any(s not in (1, 2, 3, 4) for s in args.strategy_overrides):
            parser.error("strategy overrides must be in 1..4")
    if args.command == "generate" and args.node_scale <= 0:
        parser.error("--node-scale must be positive")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

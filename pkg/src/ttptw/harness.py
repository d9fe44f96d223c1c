"""Command line front end and experiment plumbing.

Subcommands: ``gen-tw`` writes window families next to a TTP file,
``solve`` runs one solver configuration, ``bench`` runs a seeded
campaign into a CSV (per-run rows plus a summary block), ``bruteforce``
enumerates small instances exactly, and ``validate`` checks solution
files or window families and exits non-zero on any violation.
"""

import argparse
import csv
import itertools
import json
import math
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dsea import RunResult, SolverConfig, VARIANTS, solve
from .evaluation import (EvaluationBudget, Solution, as_plan, as_tour,
                         evaluate, evaluation_report, is_feasible,
                         save_solution)
from .instance import (TtpInstance, attach_windows, load_ttp, load_windows,
                       save_windows)
from .operators import OperatorParams
from .packing import PackParams
from .windows import TwGenSpec, generate_nested

BRUTE_FORCE_MAX_CITIES = 8
BRUTE_FORCE_MAX_ITEMS = 12

CAMPAIGN_COLUMNS = ("instance", "l", "variant", "seed", "best_z", "cv",
                    "feasible", "fe_used", "wall_ms")
SUMMARY_COLUMNS = ("instance", "l", "variant", "runs", "mean_ob", "std_ob", "fr")


# ------------------------------------------------------------ brute force


def brute_force(inst, fe_counter: list | None = None):
    """Exact optimum by enumerating every tour and capacity-feasible plan.

    Guarded to tiny instances; returns (Solution, Evaluation). Ties keep
    the first optimum in enumeration order (lexicographic tours, plans
    as ascending bitmasks).
    """
    ttp = inst.ttp
    n, m = ttp.n, ttp.m
    if n > BRUTE_FORCE_MAX_CITIES or m > BRUTE_FORCE_MAX_ITEMS:
        raise ValueError(
            f"brute force is limited to n <= {BRUTE_FORCE_MAX_CITIES} and "
            f"m <= {BRUTE_FORCE_MAX_ITEMS}, got n={n}, m={m}")
    masks = np.arange(2 ** m, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(m)) & 1
    fits = bits @ ttp.weights <= ttp.capacity
    plans = [np.ascontiguousarray(row, dtype=np.bool_) for row in bits[fits]]
    budget = EvaluationBudget(limit=math.factorial(n - 1) * len(plans))
    best = None
    best_pair = None
    tour = np.empty(n, dtype=np.int64)
    tour[0] = 0
    for perm in itertools.permutations(range(1, n)):
        tour[1:] = perm
        for plan in plans:
            ev = evaluate(inst, tour, plan, budget)
            if best is None or ev.key() > best.key():
                best = ev
                best_pair = (tour.copy(), plan.copy())
    if fe_counter is not None:
        fe_counter.append(budget.used)
    return Solution(tour=best_pair[0], plan=best_pair[1]), best


# ------------------------------------------------------------- campaigns


@dataclass
class CampaignSpec:
    """One benchmark campaign: an instance, its window files, variants,
    and the run protocol (runs per cell, FE per run, seeds base_seed,
    base_seed+1, ...)."""

    ttp_path: str
    window_paths: list = field(default_factory=list)
    variants: tuple = VARIANTS
    runs: int = 30
    fe_limit: int = 1_000_000
    base_seed: int = 0
    out_path: str | None = None
    jobs: int = 1
    feasible_only_mean: bool = False
    ops: OperatorParams = field(default_factory=OperatorParams)
    pack: PackParams = field(default_factory=PackParams)


@dataclass
class CampaignReport:
    """Per-run rows plus one summary row per (instance, l, variant)."""

    rows: list
    summaries: list


def _campaign_cell(args):
    inst, label, tightness, variant, seed, fe_limit, ops, pack_params = args
    config = SolverConfig(variant=variant, seed=seed, fe_limit=fe_limit,
                          ops=ops, pack=pack_params)
    result = solve(inst, config)
    return {
        "instance": label,
        "l": tightness,
        "variant": variant,
        "seed": seed,
        "best_z": result.evaluation.objective,
        "cv": result.evaluation.violation,
        "feasible": int(result.feasible),
        "fe_used": result.fe_used,
        "wall_ms": result.wall_ms,
    }


def run_campaign(spec: CampaignSpec) -> CampaignReport:
    """Execute the campaign; rows are deterministic in the spec apart
    from wall_ms. A run that dies is recorded as a row with best_z and
    cv set to nan and feasible -1, and the campaign keeps going. The
    CSV lands at spec.out_path when that is set.
    """
    ttp = load_ttp(spec.ttp_path)
    label = ttp.name or Path(spec.ttp_path).stem
    families = []
    if spec.window_paths:
        for path in spec.window_paths:
            tw = load_windows(path)
            families.append((tw.tightness, attach_windows(ttp, tw)))
    else:
        families.append((0, attach_windows(ttp)))

    cells = []
    for tightness, inst in families:
        for variant in spec.variants:
            for i in range(spec.runs):
                cells.append((inst, label, tightness, variant,
                              spec.base_seed + i, spec.fe_limit,
                              spec.ops, spec.pack))
    rows = []
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_campaign_cell, cells))
    else:
        for cell in cells:
            try:
                rows.append(_campaign_cell(cell))
            except Exception as exc:  # keep the campaign alive
                rows.append({
                    "instance": cell[1], "l": cell[2], "variant": cell[3],
                    "seed": cell[4], "best_z": float("nan"),
                    "cv": float("nan"), "feasible": -1, "fe_used": 0,
                    "wall_ms": 0.0,
                })
                print(f"run failed ({cell[3]}, seed {cell[4]}): {exc}",
                      file=sys.stderr)
    summaries = summarize_campaign(rows, feasible_only=spec.feasible_only_mean)
    report = CampaignReport(rows=rows, summaries=summaries)
    if spec.out_path:
        write_campaign_csv(spec.out_path, report.rows, report.summaries)
    return report


def summarize_campaign(rows, feasible_only: bool = False):
    """Per (instance, l, variant): mean/std of the objective and the
    feasibility rate. The mean covers every completed run unless
    feasible_only is set; std is the sample standard deviation (0.0 for
    a single run)."""
    keys = []
    groups = {}
    for row in rows:
        key = (row["instance"], row["l"], row["variant"])
        if key not in groups:
            groups[key] = []
            keys.append(key)
        groups[key].append(row)
    summaries = []
    for key in keys:
        group = [r for r in groups[key] if r["feasible"] >= 0]
        zs = [r["best_z"] for r in group]
        if feasible_only:
            zs = [r["best_z"] for r in group if r["feasible"] == 1]
        feasible_runs = sum(1 for r in group if r["feasible"] == 1)
        summaries.append({
            "instance": key[0],
            "l": key[1],
            "variant": key[2],
            "runs": len(group),
            "mean_ob": statistics.fmean(zs) if zs else float("nan"),
            "std_ob": statistics.stdev(zs) if len(zs) > 1 else 0.0,
            "fr": feasible_runs / len(group) if group else float("nan"),
        })
    return summaries


def write_campaign_csv(path, rows, summaries):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CAMPAIGN_COLUMNS)
        for row in rows:
            writer.writerow([row[c] for c in CAMPAIGN_COLUMNS])
        writer.writerow(["SUMMARY"])
        writer.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            writer.writerow([s[c] for c in SUMMARY_COLUMNS])


def read_campaign_csv(path):
    """Inverse of write_campaign_csv; returns (rows, summaries)."""
    rows, summaries = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        section = "rows"
        header = next(reader)
        for record in reader:
            if record == ["SUMMARY"]:
                section = "summary"
                next(reader)
                continue
            if section == "rows":
                row = dict(zip(CAMPAIGN_COLUMNS, record))
                row["l"] = int(row["l"])
                row["seed"] = int(row["seed"])
                row["best_z"] = float(row["best_z"])
                row["cv"] = float(row["cv"])
                row["feasible"] = int(row["feasible"])
                row["fe_used"] = int(row["fe_used"])
                row["wall_ms"] = float(row["wall_ms"])
                rows.append(row)
            else:
                s = dict(zip(SUMMARY_COLUMNS, record))
                s["l"] = int(s["l"])
                s["runs"] = int(s["runs"])
                s["mean_ob"] = float(s["mean_ob"])
                s["std_ob"] = float(s["std_ob"])
                s["fr"] = float(s["fr"])
                summaries.append(s)
    return rows, summaries


# ------------------------------------------------------------------- CLI


def read_tour_file(path, n: int) -> np.ndarray:
    """Read a reference tour: either a 'TOUR:' line or bare city ids
    (TSPLIB tour sections work). Rotated so the depot comes first."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    ids = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("TOUR:"):
            ids = [int(tok) for tok in line[5:].split()]
            break
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError:
            continue  # header/footer line (NAME:, TOUR_SECTION, EOF, ...)
        ids.extend(values)
    if -1 in ids:
        ids = ids[: ids.index(-1)]
    if len(ids) != n:
        raise ValueError(f"tour file must list all {n} cities")
    tour = np.array([i - 1 for i in ids], dtype=np.int64)
    depot = int(np.nonzero(tour == 0)[0][0])
    return as_tour(np.roll(tour, -depot), n)


def _load_instance(args) -> tuple:
    ttp = load_ttp(args.ttp)
    tw = load_windows(args.windows) if getattr(args, "windows", None) else None
    return ttp, attach_windows(ttp, tw)


def _result_json(label: str, result: RunResult) -> str:
    payload = {
        "instance": label,
        "variant": result.variant,
        "seed": result.seed,
        "fe_limit": result.fe_limit,
        "fe_used": result.fe_used,
        "z": result.evaluation.objective,
        "cv": result.evaluation.violation,
        "feasible": result.feasible,
        "tour": [int(c) + 1 for c in result.solution.tour],
        "plan": [int(b) for b in result.solution.plan],
    }
    return json.dumps(payload, indent=2)


def cmd_gen_tw(args) -> int:
    ttp = load_ttp(args.ttp)
    tightness = tuple(int(tok) for tok in args.l.split(","))
    spec = TwGenSpec(kind=args.type, seed=args.seed, tightness=tightness)
    tour = None
    if args.type == "A":
        if not args.tour:
            print("type A needs --tour with a reference tour file", file=sys.stderr)
            return 2
        tour = read_tour_file(args.tour, ttp.n)
    out_dir = Path(args.out_dir or os.environ.get("TTPTW_OUTPUT_DIR", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    base = ttp.name or Path(args.ttp).stem
    families = generate_nested(ttp, spec, tour=tour, audit=args.audit)
    for tightness_value in sorted(families, reverse=True):
        tw = families[tightness_value]
        path = out_dir / f"{base}_{args.type}_l{tightness_value}.ttptw"
        save_windows(tw, path)
        print(path)
    return 0


def cmd_solve(args) -> int:
    ttp, inst = _load_instance(args)
    config = SolverConfig(variant=args.variant, seed=args.seed,
                          fe_limit=args.fe)
    result = solve(inst, config)
    label = ttp.name or Path(args.ttp).stem
    text = _result_json(label, result)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    if args.solution:
        save_solution(result.solution, args.solution)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["fe", "z", "cv"])
            for fe, z, cv in result.trace:
                writer.writerow([fe, z, cv])
    return 0


def cmd_bench(args) -> int:
    spec = CampaignSpec(
        ttp_path=args.ttp,
        window_paths=list(args.windows or []),
        variants=tuple(args.variants.split(",")),
        runs=args.runs,
        fe_limit=args.fe,
        base_seed=args.seed,
        out_path=args.out,
        jobs=args.jobs,
        feasible_only_mean=args.feasible_only_mean,
    )
    for variant in spec.variants:
        if variant not in VARIANTS + ("baseline",):
            print(f"unknown variant {variant!r}", file=sys.stderr)
            return 2
    started = time.perf_counter()
    report = run_campaign(spec)
    rows, summaries = report.rows, report.summaries
    print(f"{len(rows)} runs -> {args.out} "
          f"({time.perf_counter() - started:.1f}s)")
    for s in summaries:
        print(f"  {s['instance']} l={s['l']} {s['variant']}: "
              f"mean_ob={s['mean_ob']:.4f} std_ob={s['std_ob']:.4f} fr={s['fr']:.2f}")
    return 0


def cmd_bruteforce(args) -> int:
    ttp, inst = _load_instance(args)
    try:
        solution, ev = brute_force(inst)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    label = ttp.name or Path(args.ttp).stem
    payload = {
        "instance": label,
        "variant": "bruteforce",
        "z": ev.objective,
        "cv": ev.violation,
        "feasible": is_feasible(ev),
        "tour": [int(c) + 1 for c in solution.tour],
        "plan": [int(b) for b in solution.plan],
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    if args.solution:
        save_solution(solution, args.solution)
    return 0


def cmd_validate(args) -> int:
    if bool(args.solution) == bool(args.family):
        print("validate needs exactly one of --solution or --family",
              file=sys.stderr)
        return 2
    if args.family:
        return _validate_family(args)
    return _validate_solution(args)


def _validate_solution(args) -> int:
    from .evaluation import load_solution

    if not args.ttp:
        print("validating a solution needs --ttp", file=sys.stderr)
        return 2
    ttp, inst = _load_instance(args)
    violations = []
    try:
        sol = load_solution(args.solution, ttp.n, ttp.m)
    except ValueError as exc:
        print(f"malformed solution: {exc}")
        return 2
    weight = float(ttp.weights[sol.plan].sum())
    if weight > ttp.capacity:
        violations.append(f"capacity: plan weighs {weight}, knapsack holds "
                          f"{ttp.capacity}")
    budget = EvaluationBudget(limit=1)
    ev = evaluate(inst, sol.tour, sol.plan, budget)
    if ev.violation > 0:
        late = np.nonzero(ev.arrivals > inst.windows.upper[sol.tour])[0]
        cities = ", ".join(str(int(sol.tour[i]) + 1) for i in late)
        violations.append(f"windows: late at cities {cities} (cv={ev.violation})")
    print(json.dumps(evaluation_report(ev), indent=2))
    if violations:
        for v in violations:
            print(f"VIOLATION {v}")
        return 1
    print("solution valid and feasible")
    return 0


def _validate_family(args) -> int:
    families = [load_windows(path) for path in args.family]
    families.sort(key=lambda tw: tw.tightness, reverse=True)
    violations = []
    for looser, tighter in zip(families, families[1:]):
        if looser.n != tighter.n:
            violations.append(
                f"family size mismatch: l={looser.tightness} has {looser.n} "
                f"cities, l={tighter.tightness} has {tighter.n}")
            continue
        for i in range(looser.n):
            if looser.lower[i] > tighter.lower[i] or looser.upper[i] < tighter.upper[i]:
                violations.append(
                    f"nesting: city {i + 1} window for l={tighter.tightness} "
                    f"is not contained in l={looser.tightness}")
    if violations:
        for v in violations:
            print(f"VIOLATION {v}")
        return 1
    print(f"{len(families)} window families nest correctly")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttptw",
        description="Travelling thief with time windows: generation, solving, benchmarking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-tw", help="generate nested window families for a TTP file")
    p.add_argument("--ttp", required=True)
    p.add_argument("--type", choices=("A", "B"), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tour", help="reference tour file (required for type A)")
    p.add_argument("--l", default="1000,100,-100,-1000",
                   help="comma separated tightness values")
    p.add_argument("--out-dir", default=None,
                   help="output directory (default: $TTPTW_OUTPUT_DIR or .)")
    p.add_argument("--audit", action="store_true",
                   help="warn when the generating tour violates a family")
    p.set_defaults(func=cmd_gen_tw)

    p = sub.add_parser("solve", help="run one solver configuration")
    p.add_argument("--ttp", required=True)
    p.add_argument("--windows")
    p.add_argument("--variant", choices=VARIANTS + ("baseline",), default="dsea1")
    p.add_argument("--fe", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the run JSON here instead of stdout")
    p.add_argument("--solution", help="also write a solution file")
    p.add_argument("--trace", help="also write the improvement trace CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a campaign into a CSV")
    p.add_argument("--ttp", required=True)
    p.add_argument("--windows", nargs="*", default=[])
    p.add_argument("--variants", default=",".join(VARIANTS))
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--fe", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--feasible-only-mean", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bruteforce", help="exact optimum of a tiny instance")
    p.add_argument("--ttp", required=True)
    p.add_argument("--windows")
    p.add_argument("--out")
    p.add_argument("--solution")
    p.set_defaults(func=cmd_bruteforce)

    p = sub.add_parser("validate", help="check a solution file or a window family")
    p.add_argument("--ttp")
    p.add_argument("--windows")
    p.add_argument("--solution")
    p.add_argument("--family", nargs="*")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""The dual search main loop and its run protocol.

Each iteration runs two tour-space operators back to back on the
incumbent (optionally mutated after a stagnation streak) while the plan
rides along, then rebuilds the plan from scratch for the resulting tour
with the iterative packer. Both candidates can replace the incumbent;
either replacement resets the stagnation counter.

Variants select the operator pair and the repair policy:

    dsea1   topo + rain, no plan repair
    dsea2   topo + rain, repack fires on rejected evaluations every beta
    dsea3   itp + iip, repair integrated into the operators themselves

``baseline_random_restart`` is the sanity yardstick: random tours with
a greedily packed plan under the same FE accounting.
"""

from dataclasses import dataclass, field, replace
import time

import numpy as np

from .evaluation import (BudgetExhausted, EvaluationBudget, Evaluation,
                         Solution, evaluate, is_better, is_feasible)
from .initialization import DEFAULT_LATENESS_PENALTY, initialize_tour
from .instance import TtptwInstance
from .operators import OperatorParams, SearchState, iip, itp, mutate_swap, rain, topo
from .packing import PackParams, pack, pack_iterative, repack
from .seeding import child_rng

VARIANTS = ("dsea1", "dsea2", "dsea3")


@dataclass(frozen=True)
class SolverConfig:
    variant: str = "dsea1"
    seed: int = 0
    fe_limit: int = 1_000_000
    ops: OperatorParams = field(default_factory=OperatorParams)
    pack: PackParams = field(default_factory=PackParams)
    penalty: float = DEFAULT_LATENESS_PENALTY
    record_trace: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS + ("baseline",):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.fe_limit < 10:
            raise ValueError("fe_limit must be at least 10")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class RunResult:
    """Outcome of one solver run."""

    solution: Solution
    evaluation: Evaluation
    feasible: bool
    fe_used: int
    fe_limit: int
    seed: int
    variant: str
    trace: list
    wall_ms: float


def solve(inst: TtptwInstance, config: SolverConfig) -> RunResult:
    """One full solver run; deterministic in (inst, config).

    The improvement trace records (fe_used, objective, violation) for
    the initial incumbent and every strict improvement.
    """
    if config.variant == "baseline":
        return baseline_random_restart(inst, config)
    started = time.perf_counter()
    budget = EvaluationBudget(limit=config.fe_limit)
    rng_mut = child_rng(config.seed, "mutation")
    rng_o1 = child_rng(config.seed, "o1")
    rng_o2 = child_rng(config.seed, "o2")
    trace: list = []

    def record(ev: Evaluation):
        if config.record_trace:
            trace.append((budget.used, ev.objective, ev.violation))

    tour = initialize_tour(inst, budget, penalty=config.penalty)
    # fe_limit >= 10 and initialization spends exactly 4 FE, so the
    # packer always gets at least one evaluation here
    plan, ev = pack_iterative(inst, tour, config.pack, budget)
    best = SearchState(tour, plan, ev, rng_o1, {})
    record(best.eval)

    if config.variant == "dsea2":
        def repair(tour_, plan_, ev_, counter):
            if counter % config.ops.beta != 0:
                return plan_, ev_
            return repack(inst, tour_, plan_, budget, config.pack, current_eval=ev_)
    else:
        repair = None

    k = 0
    n = inst.n
    try:
        while budget.remaining > 0:
            cand_tour = best.tour.copy()
            if k > config.ops.rho and n >= 3:
                cand_tour = mutate_swap(cand_tour, config.ops.h, rng_mut)
            entry_eval = evaluate(inst, cand_tour, best.plan, budget)
            state = SearchState(cand_tour, best.plan, entry_eval, rng_o1,
                                dict(best.counters))
            if config.variant == "dsea3":
                state = itp(state, inst, config.ops, budget, config.pack)
                state.rng = rng_o2
                state = iip(state, inst, config.ops, budget, config.pack)
            else:
                state = topo(state, inst, config.ops, budget, repair)
                state.rng = rng_o2
                state = rain(state, inst, config.ops, budget, repair)
            improved = False
            if is_better(state.eval, best.eval):
                best = SearchState(state.tour.copy(), state.plan.copy(),
                                   state.eval, rng_o1, dict(state.counters))
                record(best.eval)
                improved = True
            else:
                best.counters = dict(state.counters)
            if budget.remaining <= 0:
                break
            plan2, ev2 = pack_iterative(inst, state.tour, config.pack, budget)
            if is_better(ev2, best.eval):
                best = SearchState(state.tour.copy(), plan2, ev2, rng_o1,
                                   dict(best.counters))
                record(best.eval)
                improved = True
            # an improving iteration leaves k at 1: the reset happens
            # before the unconditional increment
            k = 1 if improved else k + 1
    except BudgetExhausted:
        pass

    return RunResult(
        solution=Solution(tour=best.tour, plan=best.plan),
        evaluation=best.eval,
        feasible=is_feasible(best.eval) and best.eval.capacity_ok,
        fe_used=budget.used,
        fe_limit=config.fe_limit,
        seed=config.seed,
        variant=config.variant,
        trace=trace,
        wall_ms=(time.perf_counter() - started) * 1000.0,
    )


def baseline_random_restart(inst: TtptwInstance, config: SolverConfig) -> RunResult:
    """Random tours plus gated greedy plans until the budget dies."""
    started = time.perf_counter()
    budget = EvaluationBudget(limit=config.fe_limit)
    rng = child_rng(config.seed, "baseline")
    trace: list = []
    n, m = inst.n, inst.m
    empty = np.zeros(m, dtype=np.bool_)
    best_tour = best_plan = best_eval = None
    try:
        while budget.remaining > 0:
            tour = np.concatenate(([0], rng.permutation(np.arange(1, n, dtype=np.int64))))
            base = evaluate(inst, tour, empty, budget)
            plan, ev = pack(inst, tour, config.pack.c, budget, base_eval=base)
            if best_eval is None or is_better(ev, best_eval):
                best_tour, best_plan, best_eval = tour, plan, ev
                if config.record_trace:
                    trace.append((budget.used, ev.objective, ev.violation))
    except BudgetExhausted:
        pass
    if best_eval is None:
        raise BudgetExhausted("budget too small to evaluate a single tour")
    return RunResult(
        solution=Solution(tour=best_tour, plan=best_plan),
        evaluation=best_eval,
        feasible=is_feasible(best_eval) and best_eval.capacity_ok,
        fe_used=budget.used,
        fe_limit=config.fe_limit,
        seed=config.seed,
        variant="baseline",
        trace=trace,
        wall_ms=(time.perf_counter() - started) * 1000.0,
    )


def variant_config(variant: str, seed: int, fe_limit: int = 1_000_000,
                   **overrides) -> SolverConfig:
    """Convenience constructor used by the CLI and the campaign runner."""
    return SolverConfig(variant=variant, seed=seed, fe_limit=fe_limit, **overrides)

"""Greedy packing plans driven by per-item scores.

An item's score is p^alpha / (w^alpha * d) where d is its tail
distance: the distance still to travel from the item's city along the
tour until the thief is back at the depot. High profit, low weight and
late pickup all raise the score. ``pack`` fills a plan greedily in
descending score under an evaluation gate, ``pack_iterative`` searches
over the exponent alpha, and ``repack`` repairs an existing plan by
dropping items picked up before the first late arrival and refilling.
"""

from dataclasses import dataclass

import numpy as np

from .evaluation import (BudgetExhausted, EvaluationBudget, Evaluation,
                         evaluate, is_better)
from .instance import TtptwInstance


@dataclass(frozen=True)
class PackParams:
    """Exponent search knobs: start exponent c, step ratio delta
    (shrunk to its square root each round), round cap q, and relative
    improvement threshold e for early stopping."""

    c: float = 5.0
    delta: float = 2.5
    q: int = 20
    e: float = 0.1

    def __post_init__(self):
        if self.c <= 0 or self.delta <= 1 or self.q < 1 or self.e < 0:
            raise ValueError("need c > 0, delta > 1, q >= 1, e >= 0")


def tail_distances(inst: TtptwInstance, tour: np.ndarray) -> np.ndarray:
    """Distance from each tour position to the end of the closed tour."""
    ttp = inst.ttp
    legs = np.empty(ttp.n)
    legs[:-1] = ttp.dist[tour[:-1], tour[1:]]
    legs[-1] = ttp.dist[tour[-1], tour[0]]
    return np.cumsum(legs[::-1])[::-1]


def item_scores(inst: TtptwInstance, tour: np.ndarray, alpha: float) -> np.ndarray:
    """Score every item for the given tour at exponent alpha."""
    ttp = inst.ttp
    tail_by_pos = tail_distances(inst, tour)
    tail_by_city = np.empty(ttp.n)
    tail_by_city[tour] = tail_by_pos
    return scores_from_tails(ttp, tail_by_city, alpha)


def scores_from_tails(ttp, tail_by_city: np.ndarray, alpha: float) -> np.ndarray:
    return ttp.profits ** alpha / (ttp.weights ** alpha * tail_by_city[ttp.item_city])


def greedy_order(scores: np.ndarray) -> np.ndarray:
    """Item indices in descending score, ties broken by lower item id."""
    ids = np.arange(scores.shape[0])
    return ids[np.lexsort((ids, -scores))]


def pack(inst: TtptwInstance, tour: np.ndarray, alpha: float,
         budget: EvaluationBudget, scores: np.ndarray | None = None,
         base_plan: np.ndarray | None = None,
         base_eval: Evaluation | None = None):
    """Evaluation-gated greedy fill; returns (plan, eval) for the result.

    Walks items in descending score, tentatively adds each one that
    still fits the knapsack, and keeps it only when the evaluation
    strictly improves the ranking (equal evaluations revert the add, so
    zero-contribution weight is never loaded). Every tentative add costs
    1 FE; when no ``base_eval`` is supplied the plan it starts from is
    evaluated first (1 extra FE). Runs out of budget gracefully: the
    plan built so far and its evaluation are returned.

    ``scores`` overrides the alpha-derived scores (operators maintain
    their own table); ``base_plan`` starts the fill from an existing
    plan instead of an empty one.
    """
    ttp = inst.ttp
    if scores is None:
        scores = item_scores(inst, tour, alpha)
    plan = (np.zeros(ttp.m, dtype=np.bool_) if base_plan is None
            else base_plan.astype(np.bool_, copy=True))
    weight = float(ttp.weights[plan].sum()) if plan.any() else 0.0
    current = base_eval
    for j in greedy_order(scores):
        if plan[j] or weight + ttp.weights[j] > ttp.capacity:
            continue
        try:
            if current is None:
                current = evaluate(inst, tour, plan, budget)
            plan[j] = True
            trial = evaluate(inst, tour, plan, budget)
        except BudgetExhausted:
            plan[j] = False
            if current is None:
                raise
            break
        if is_better(trial, current):
            current = trial
            weight += float(ttp.weights[j])
        else:
            plan[j] = False
    if current is None:
        # no item ever fit; the caller gave no baseline, so spend the FE now
        current = evaluate(inst, tour, plan, budget)
    return plan, current


def pack_iterative(inst: TtptwInstance, tour: np.ndarray, params: PackParams,
                   budget: EvaluationBudget):
    """Exponent search around ``pack``; returns the best (plan, eval).

    Evaluates pack at alpha = c, then repeatedly at alpha*delta and
    alpha/delta, recentring on the better neighbor whenever it beats the
    best so far and shrinking delta to its square root each round. Stops
    after q rounds, when a round leaves the violation unchanged and
    improves the objective by less than a fraction e, or when the budget
    dies (best so far is returned; needs at least 1 FE).
    """
    empty = np.zeros(inst.ttp.m, dtype=np.bool_)
    base_eval = evaluate(inst, tour, empty, budget)
    alpha = params.c
    best_plan, best_eval = pack(inst, tour, alpha, budget, base_eval=base_eval)
    delta = params.delta
    for _ in range(params.q):
        if budget.remaining <= 0:
            break
        previous = best_eval
        lo_alpha, hi_alpha = alpha / delta, alpha * delta
        lo_plan, lo_eval = pack(inst, tour, lo_alpha, budget, base_eval=base_eval)
        hi_plan, hi_eval = pack(inst, tour, hi_alpha, budget, base_eval=base_eval)
        if is_better(lo_eval, hi_eval):
            cand_alpha, cand_plan, cand_eval = lo_alpha, lo_plan, lo_eval
        else:
            cand_alpha, cand_plan, cand_eval = hi_alpha, hi_plan, hi_eval
        if is_better(cand_eval, best_eval):
            alpha, best_plan, best_eval = cand_alpha, cand_plan, cand_eval
        delta = delta ** 0.5
        if best_eval.violation == previous.violation:
            gain = best_eval.objective - previous.objective
            if gain < params.e * max(1.0, abs(previous.objective)):
                break
    return best_plan, best_eval


def repack(inst: TtptwInstance, tour: np.ndarray, plan: np.ndarray,
           budget: EvaluationBudget, params: PackParams | None = None,
           current_eval: Evaluation | None = None):
    """Two-phase plan repair for a fixed tour; returns (plan, eval).

    Phase 1 walks the items taken at tour positions strictly before the
    first late arrival (all positions when nothing is late) in tour
    order and drops each one whose removal strictly improves the
    ranking. Phase 2 refills with ``pack`` at alpha = c over the items
    still left out. Never returns something worse than the input.
    """
    if params is None:
        params = PackParams()
    plan = plan.astype(np.bool_, copy=True)
    try:
        if current_eval is None:
            current_eval = evaluate(inst, tour, plan, budget)
    except BudgetExhausted:
        raise
    ttp = inst.ttp
    upper = inst.windows.upper[tour]
    late = np.nonzero(current_eval.arrivals > upper)[0]
    first_late = int(late[0]) if late.size else ttp.n
    pos_by_city = np.empty(ttp.n, dtype=np.int64)
    pos_by_city[tour] = np.arange(ttp.n)
    item_pos = pos_by_city[ttp.item_city]
    candidates = np.nonzero(plan & (item_pos < first_late))[0]
    for j in candidates[np.argsort(item_pos[candidates], kind="stable")]:
        plan[j] = False
        try:
            trial = evaluate(inst, tour, plan, budget)
        except BudgetExhausted:
            plan[j] = True
            return plan, current_eval
        if is_better(trial, current_eval):
            current_eval = trial
        else:
            plan[j] = True
    return pack(inst, tour, params.c, budget,
                base_plan=plan, base_eval=current_eval)

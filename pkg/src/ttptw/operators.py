"""Tour-space search operators.

Two plain operators treat the packing plan as fixed: ``topo`` reverses
random subtours and evaluates only a mu-fraction of them, letting
unevaluated reversals pile up as perturbation; ``rain`` moves one city
to another position and evaluates every move. Both accept a candidate
only when it strictly improves the ranking, and both can carry a plan
repair hook that fires on rejected evaluations.

Two integrated operators additionally maintain the item score table
incrementally and rebuild the plan with ``pack`` on a period: ``itp``
(subtour reversal moves) and ``iip`` (insertion moves). All operators
stop quietly when the FE budget dies and return their current state.
"""

from dataclasses import dataclass, field

import numpy as np

from .evaluation import (BudgetExhausted, EvaluationBudget, Evaluation,
                         evaluate, is_better)
from .instance import TtptwInstance
from .packing import PackParams, pack, scores_from_tails, tail_distances


@dataclass(frozen=True)
class OperatorParams:
    """Shared operator knobs.

    mu: evaluation probability inside topo (itp evaluates when a draw
    exceeds mu, matching the original formulations); theta: iterations
    per operator call; beta: repair / pack-refresh period; rho: pack
    period inside itp, doubling as the stagnation threshold of the main
    loop; h: cap for the stagnation mutation's swap count.
    """

    mu: float = 0.5
    theta: int = 1000
    beta: int = 10
    rho: int = 5
    h: int = 10

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu is a probability")
        if min(self.theta, self.beta, self.rho, self.h) < 1:
            raise ValueError("theta, beta, rho and h must be positive")


@dataclass
class SearchState:
    """A (tour, plan) pair, its evaluation, and the operator bookkeeping."""

    tour: np.ndarray
    plan: np.ndarray
    eval: Evaluation
    rng: np.random.Generator
    counters: dict = field(default_factory=dict)


def mutate_swap(tour: np.ndarray, h: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly 1..h random swaps of non-depot positions, on a copy."""
    n = tour.shape[0]
    if n < 3:
        raise ValueError("swap mutation needs at least two non-depot cities")
    out = tour.copy()
    for _ in range(int(rng.integers(1, h + 1))):
        i = int(rng.integers(1, n))
        j = int(rng.integers(1, n))
        while j == i:
            j = int(rng.integers(1, n))
        out[i], out[j] = out[j], out[i]
    return out


def _distinct_pair(rng: np.random.Generator, n: int):
    a = int(rng.integers(1, n))
    b = int(rng.integers(1, n))
    while b == a:
        b = int(rng.integers(1, n))
    return a, b


def topo(state: SearchState, inst: TtptwInstance, params: OperatorParams,
         budget: EvaluationBudget, repair=None) -> SearchState:
    """Random subtour reversals with probabilistic evaluation.

    Each iteration reverses a random segment of the working tour. With
    probability mu the working pair is evaluated: an improvement becomes
    the new state and the walk continues from it, a rejection resets the
    working tour (and lets ``repair`` fire, if installed). Unevaluated
    reversals accumulate, perturbing the tour between evaluations.
    """
    n = inst.n
    if n < 3:
        return state
    rng = state.rng
    best_tour, best_plan, best_eval = state.tour, state.plan, state.eval
    working = best_tour.copy()
    done = 0
    try:
        for counter in range(1, params.theta + 1):
            done = counter
            a, b = _distinct_pair(rng, n)
            if a > b:
                a, b = b, a
            working[a:b + 1] = working[a:b + 1][::-1]
            if rng.random() < params.mu:
                ev = evaluate(inst, working, best_plan, budget)
                if is_better(ev, best_eval):
                    best_tour, best_eval = working.copy(), ev
                else:
                    working[:] = best_tour
                    if repair is not None:
                        best_plan, best_eval = repair(best_tour, best_plan,
                                                      best_eval, counter)
    except BudgetExhausted:
        pass
    counters = dict(state.counters)
    counters["topo"] = counters.get("topo", 0) + done
    return SearchState(best_tour, best_plan, best_eval, rng, counters)


def rain(state: SearchState, inst: TtptwInstance, params: OperatorParams,
         budget: EvaluationBudget, repair=None) -> SearchState:
    """Random city relocation, evaluated on every iteration."""
    n = inst.n
    if n < 3:
        return state
    rng = state.rng
    best_tour, best_plan, best_eval = state.tour, state.plan, state.eval
    done = 0
    try:
        for counter in range(1, params.theta + 1):
            done = counter
            i, j = _distinct_pair(rng, n)
            cand = np.insert(np.delete(best_tour, i), j, best_tour[i])
            ev = evaluate(inst, cand, best_plan, budget)
            if is_better(ev, best_eval):
                best_tour, best_eval = cand, ev
            elif repair is not None:
                best_plan, best_eval = repair(best_tour, best_plan,
                                              best_eval, counter)
    except BudgetExhausted:
        pass
    counters = dict(state.counters)
    counters["rain"] = counters.get("rain", 0) + done
    return SearchState(best_tour, best_plan, best_eval, rng, counters)


class _ScoreTable:
    """Tail distances and item scores kept alongside a working tour."""

    def __init__(self, inst: TtptwInstance, tour: np.ndarray, alpha: float):
        self.ttp = inst.ttp
        self.inst = inst
        self.alpha = alpha
        self.tail_by_city = np.empty(self.ttp.n)
        self.tail_by_pos = np.empty(self.ttp.n)
        self.rebuild(tour)

    def rebuild(self, tour: np.ndarray):
        self.tail_by_pos = tail_distances(self.inst, tour)
        self.tail_by_city[tour] = self.tail_by_pos
        self.scores = scores_from_tails(self.ttp, self.tail_by_city, self.alpha)

    def refresh_prefix(self, tour: np.ndarray, upto: int):
        """Recompute tails for positions 0..upto after a segment reversal
        that left positions beyond ``upto`` untouched."""
        n = tour.shape[0]
        if upto >= n - 1:
            self.tail_by_pos[n - 1] = self.ttp.dist[tour[n - 1], tour[0]]
            self.tail_by_city[tour[n - 1]] = self.tail_by_pos[n - 1]
            upto = n - 2
        legs = self.ttp.dist[tour[:upto + 1], tour[1:upto + 2]]
        self.tail_by_pos[:upto + 1] = (self.tail_by_pos[upto + 1]
                                       + np.cumsum(legs[::-1])[::-1])
        self.tail_by_city[tour[:upto + 1]] = self.tail_by_pos[:upto + 1]
        self.scores = scores_from_tails(self.ttp, self.tail_by_city, self.alpha)

    def rescore_city(self, tour: np.ndarray, position: int, items: np.ndarray):
        """Recompute one city's tail from its position and rescore only
        its items; every other entry deliberately goes stale."""
        city = tour[position]
        tail = float(self.ttp.dist[tour[position:-1], tour[position + 1:]].sum()
                     + self.ttp.dist[tour[-1], tour[0]])
        self.tail_by_city[city] = tail
        if items.size:
            self.scores[items] = (self.ttp.profits[items] ** self.alpha
                                  / (self.ttp.weights[items] ** self.alpha * tail))


def _items_by_city(ttp) -> list:
    groups = [[] for _ in range(ttp.n)]
    for j, city in enumerate(ttp.item_city):
        groups[city].append(j)
    return [np.asarray(g, dtype=np.int64) for g in groups]


def itp(state: SearchState, inst: TtptwInstance, params: OperatorParams,
        budget: EvaluationBudget, pack_params: PackParams | None = None) -> SearchState:
    """Subtour reversals with an integrated packing table.

    Like ``topo`` but the item score table follows the tour: after each
    reversal all tails at or before the segment end are recomputed. On
    iterations divisible by rho or beta the plan is rebuilt with
    ``pack`` from the current scores; otherwise a draw above mu triggers
    a plain evaluation. Either result strictly improving the ranking
    becomes the new state; a rejected one resets the working pair.
    """
    pp = pack_params or PackParams()
    n = inst.n
    if n < 3:
        return state
    ttp = inst.ttp
    rng = state.rng
    best_tour, best_plan, best_eval = state.tour, state.plan, state.eval
    working = best_tour.copy()
    working_plan = best_plan.copy()
    table = _ScoreTable(inst, working, pp.c)
    empty = np.zeros(ttp.m, dtype=np.bool_)
    done = 0
    try:
        for counter in range(1, params.theta + 1):
            done = counter
            a, b = _distinct_pair(rng, n)
            if a > b:
                a, b = b, a
            working[a:b + 1] = working[a:b + 1][::-1]
            table.refresh_prefix(working, b)
            fresh = None
            if counter % params.rho == 0 or counter % params.beta == 0:
                base = evaluate(inst, working, empty, budget)
                working_plan, fresh = pack(inst, working, pp.c, budget,
                                           scores=table.scores, base_eval=base)
            elif rng.random() > params.mu:
                fresh = evaluate(inst, working, working_plan, budget)
            if fresh is None:
                continue
            if is_better(fresh, best_eval):
                best_tour = working.copy()
                best_plan = working_plan.copy()
                best_eval = fresh
            else:
                working[:] = best_tour
                working_plan = best_plan.copy()
                table.rebuild(working)
    except BudgetExhausted:
        pass
    counters = dict(state.counters)
    counters["itp"] = counters.get("itp", 0) + done
    return SearchState(best_tour, best_plan, best_eval, rng, counters)


def iip(state: SearchState, inst: TtptwInstance, params: OperatorParams,
        budget: EvaluationBudget, pack_params: PackParams | None = None) -> SearchState:
    """Insertion moves with the cheap score update.

    Moves one city per iteration and rescores only that city's items
    (the rest of the table goes stale on purpose). Every iteration is
    evaluated; on iterations divisible by beta the plan is first rebuilt
    with ``pack`` from the current scores.
    """
    pp = pack_params or PackParams()
    n = inst.n
    if n < 3:
        return state
    ttp = inst.ttp
    rng = state.rng
    best_tour, best_plan, best_eval = state.tour, state.plan, state.eval
    table = _ScoreTable(inst, best_tour, pp.c)
    items_of = _items_by_city(ttp)
    empty = np.zeros(ttp.m, dtype=np.bool_)
    done = 0
    try:
        for counter in range(1, params.theta + 1):
            done = counter
            i, j = _distinct_pair(rng, n)
            moved = int(best_tour[i])
            cand = np.insert(np.delete(best_tour, i), j, moved)
            table.rescore_city(cand, j, items_of[moved])
            if counter % params.beta == 0:
                base = evaluate(inst, cand, empty, budget)
                cand_plan, fresh = pack(inst, cand, pp.c, budget,
                                        scores=table.scores, base_eval=base)
            else:
                cand_plan = best_plan
                fresh = evaluate(inst, cand, cand_plan, budget)
            if is_better(fresh, best_eval):
                best_tour = cand
                best_plan = cand_plan
                best_eval = fresh
    except BudgetExhausted:
        pass
    counters = dict(state.counters)
    counters["iip"] = counters.get("iip", 0) + done
    return SearchState(best_tour, best_plan, best_eval, rng, counters)

"""Window-aware construction of the starting tour.

Cities are scored from the current position: an on-time city scores its
travel time (nearest first), a late city scores a large negative number
(most urgent), an early city a large positive one (can wait). Four
candidate tours are built from these scores and the best one under the
usual ranking, evaluated with an empty plan, wins.
"""

from dataclasses import dataclass, field

import numpy as np

from .evaluation import BudgetExhausted, EvaluationBudget, evaluate, is_better
from .instance import TtptwInstance

DEFAULT_LATENESS_PENALTY = 10000.0


@dataclass
class InitContext:
    """Position of the scorer: where the tour currently stands."""

    city: int
    time: float
    visited: set = field(default_factory=set)
    penalty: float = DEFAULT_LATENESS_PENALTY


def _score_block(inst: TtptwInstance, city: int, now: float,
                 candidates: np.ndarray, penalty: float) -> np.ndarray:
    ttp = inst.ttp
    travel = ttp.dist[city, candidates] / ttp.v_max
    planned = now + travel
    lower = inst.windows.lower[candidates]
    upper = inst.windows.upper[candidates]
    on_time = (lower <= planned) & (planned <= upper)
    return np.where(on_time, travel, -(travel + penalty * (planned - upper)))


def score_city(ctx: InitContext, inst: TtptwInstance, city: int) -> float:
    """Score one candidate city from the context's position."""
    return float(_score_block(inst, ctx.city, ctx.time,
                              np.array([city], dtype=np.int64), ctx.penalty)[0])


def _pick(scores: np.ndarray, candidates: np.ndarray) -> int:
    # lowest score wins, ties go to the lower city index
    order = np.lexsort((candidates, scores))
    return int(candidates[order[0]])


def initialize_tour(inst: TtptwInstance, budget: EvaluationBudget,
                    penalty: float = DEFAULT_LATENESS_PENALTY) -> np.ndarray:
    """Build the starting tour from a four-candidate memory.

    Candidates: cities sorted by their score from the depot at time 0,
    that order reversed, a greedy walk that repeatedly visits the
    lowest-scored remaining city (updating time with full-speed travel
    and free waiting), and the walk reversed. All four are evaluated
    with an empty plan (4 FE); if the budget dies mid-selection the best
    candidate evaluated so far is returned.
    """
    ttp = inst.ttp
    n = ttp.n
    others = np.arange(1, n, dtype=np.int64)

    start_scores = _score_block(inst, 0, 0.0, others, penalty)
    by_score = others[np.lexsort((others, start_scores))]
    cand1 = np.concatenate(([0], by_score))
    cand2 = np.concatenate(([0], by_score[::-1]))

    remaining = others.copy()
    walk = [0]
    city, now = 0, 0.0
    while remaining.size:
        scores = _score_block(inst, city, now, remaining, penalty)
        nxt = _pick(scores, remaining)
        planned = now + ttp.dist[city, nxt] / ttp.v_max
        now = max(planned, float(inst.windows.lower[nxt]))
        walk.append(nxt)
        city = nxt
        remaining = remaining[remaining != nxt]
    cand3 = np.array(walk, dtype=np.int64)
    cand4 = np.concatenate(([0], cand3[1:][::-1]))

    empty = np.zeros(ttp.m, dtype=np.bool_)
    best_tour = None
    best_eval = None
    for cand in (cand1, cand2, cand3, cand4):
        try:
            ev = evaluate(inst, cand, empty, budget)
        except BudgetExhausted:
            break
        if best_eval is None or is_better(ev, best_eval):
            best_tour, best_eval = cand, ev
    if best_tour is None:
        raise BudgetExhausted("no budget left to evaluate any starting tour")
    return best_tour

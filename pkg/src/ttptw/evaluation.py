"""Tour plus packing plan evaluation, comparison, and the FE budget.

The evaluator walks the tour once: the thief leaves the depot empty,
picks up the selected items of each city on arrival, and moves at a
speed that drops linearly with carried weight. Arrival at a city is
``max(planned arrival, window lower bound)`` (early arrivals wait, for
free), the constraint violation is the summed overshoot past window
upper bounds, and the objective is total profit minus rent for the
travel time of a closed tour, waiting included.

One call to ``evaluate`` is one function evaluation (FE) and consumes
exactly one unit of its ``EvaluationBudget``. Solutions are ranked by
``compare``: capacity-feasible before over-capacity, then smaller
violation, then larger objective.

Totality rule: plans heavier than the knapsack capacity are still
evaluated; once the nominal speed ``v_max - nu * weight`` falls below
``v_min`` it is floored at ``v_min`` so times stay finite. ``compare``
ranks such solutions below every capacity-feasible one regardless.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .instance import TtptwInstance


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested but the FE budget is spent."""


@dataclass
class EvaluationBudget:
    """Single-owner mutable FE counter; used never exceeds limit."""

    limit: int
    used: int = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.used


@dataclass
class Evaluation:
    """Result of one full (tour, plan) evaluation.

    planned_arrivals, arrivals and weight_on_leave are indexed by tour
    position, not by city.
    """

    objective: float
    violation: float
    total_weight: float
    capacity_ok: bool
    planned_arrivals: np.ndarray
    arrivals: np.ndarray
    weight_on_leave: np.ndarray

    def key(self):
        """Sort key; lexicographically larger is better."""
        return (self.capacity_ok, -self.violation, self.objective)


def compare(a: Evaluation, b: Evaluation) -> int:
    """Return 1 if a ranks strictly better than b, -1 if worse, 0 if equal.

    Capacity violators rank below all capacity-feasible solutions; among
    equals, lower violation wins; violation ties go to the higher
    objective. Feasibility uses exact zero equality on the violation.
    """
    ka, kb = a.key(), b.key()
    if ka > kb:
        return 1
    if ka < kb:
        return -1
    return 0


def is_better(a: Evaluation, b: Evaluation) -> bool:
    return a.key() > b.key()


def is_feasible(e: Evaluation) -> bool:
    return e.capacity_ok and e.violation == 0.0


@njit(cache=True)
def _walk_kernel(dist, tour, profits, weights, item_city, plan,
                 capacity, v_min, v_max, renting, lower, upper):
    n = tour.shape[0]
    n_cities = dist.shape[0]
    m = plan.shape[0]
    per_city = np.zeros(n_cities)
    profit = 0.0
    total_w = 0.0
    for j in range(m):
        if plan[j]:
            per_city[item_city[j]] += weights[j]
            profit += profits[j]
            total_w += weights[j]
    seen = np.zeros(n_cities, np.uint8)
    for i in range(n):
        c = tour[i]
        if c < 0 or c >= n_cities or seen[c] == 1:
            return 1, 0.0, 0.0, 0.0, per_city, per_city, per_city
        seen[c] = 1
    nu = (v_max - v_min) / capacity
    planned = np.empty(n)
    actual = np.empty(n)
    w_leave = np.empty(n)
    w = per_city[tour[0]]
    planned[0] = 0.0
    actual[0] = 0.0
    w_leave[0] = w
    t = 0.0
    cv = 0.0
    for i in range(1, n):
        speed = v_max - nu * w
        if speed < v_min:
            speed = v_min
        ts = t + dist[tour[i - 1], tour[i]] / speed
        li = lower[tour[i]]
        t = ts if ts >= li else li
        planned[i] = ts
        actual[i] = t
        over = t - upper[tour[i]]
        if over > 0.0:
            cv += over
        w += per_city[tour[i]]
        w_leave[i] = w
    speed = v_max - nu * w
    if speed < v_min:
        speed = v_min
    z = profit - renting * (dist[tour[n - 1], tour[0]] / speed + t)
    return 0, z, cv, total_w, planned, actual, w_leave


@njit(cache=True)
def _windowless_kernel(dist, tour, profits, weights, item_city, plan,
                       capacity, v_min, v_max, renting):
    # Plain TTP objective, bit-identical arithmetic order to _walk_kernel
    # with all-open windows (waiting never fires there).
    n = tour.shape[0]
    n_cities = dist.shape[0]
    m = plan.shape[0]
    per_city = np.zeros(n_cities)
    profit = 0.0
    for j in range(m):
        if plan[j]:
            per_city[item_city[j]] += weights[j]
            profit += profits[j]
    nu = (v_max - v_min) / capacity
    w = per_city[tour[0]]
    t = 0.0
    for i in range(1, n):
        speed = v_max - nu * w
        if speed < v_min:
            speed = v_min
        t = t + dist[tour[i - 1], tour[i]] / speed
        w += per_city[tour[i]]
    speed = v_max - nu * w
    if speed < v_min:
        speed = v_min
    return profit - renting * (dist[tour[n - 1], tour[0]] / speed + t)


def as_tour(seq, n: int) -> np.ndarray:
    """Coerce a 0-based city sequence into a validated tour array."""
    tour = np.ascontiguousarray(np.asarray(seq, dtype=np.int64))
    if tour.ndim != 1 or tour.shape[0] != n:
        raise ValueError(f"tour must list all {n} cities")
    if tour[0] != 0:
        raise ValueError("tours start at the depot (city index 0)")
    if np.bincount(tour, minlength=n).max() > 1 or tour.min() < 0 or tour.max() >= n:
        raise ValueError("tour is not a permutation of 0..n-1")
    return tour


def as_plan(bits, m: int) -> np.ndarray:
    plan = np.ascontiguousarray(np.asarray(bits, dtype=np.bool_))
    if plan.ndim != 1 or plan.shape[0] != m:
        raise ValueError(f"plan must carry one bit per item ({m})")
    return plan


def evaluate(inst: TtptwInstance, tour: np.ndarray, plan: np.ndarray,
             budget: EvaluationBudget) -> Evaluation:
    """Full evaluation of one (tour, plan) pair; costs exactly 1 FE.

    Raises BudgetExhausted (without consuming anything) when the budget
    is spent, and ValueError for a malformed tour or plan.
    """
    if budget.used >= budget.limit:
        raise BudgetExhausted(f"FE budget of {budget.limit} exhausted")
    ttp = inst.ttp
    if not (isinstance(tour, np.ndarray) and tour.dtype == np.int64 and tour.ndim == 1):
        tour = np.ascontiguousarray(np.asarray(tour, dtype=np.int64))
    if not (isinstance(plan, np.ndarray) and plan.dtype == np.bool_ and plan.ndim == 1):
        plan = np.ascontiguousarray(np.asarray(plan, dtype=np.bool_))
    if tour.shape[0] != ttp.n or tour[0] != 0:
        raise ValueError("tour must visit all cities and start at the depot")
    if plan.shape[0] != ttp.m:
        raise ValueError(f"plan must carry one bit per item ({ttp.m})")
    flag, z, cv, total_w, planned, actual, w_leave = _walk_kernel(
        ttp.dist, tour, ttp.profits, ttp.weights, ttp.item_city, plan,
        ttp.capacity, ttp.v_min, ttp.v_max, ttp.renting_ratio,
        inst.windows.lower, inst.windows.upper,
    )
    if flag != 0:
        raise ValueError("tour is not a permutation of 0..n-1")
    budget.used += 1
    return Evaluation(
        objective=z,
        violation=cv,
        total_weight=total_w,
        capacity_ok=bool(total_w <= ttp.capacity),
        planned_arrivals=planned,
        arrivals=actual,
        weight_on_leave=w_leave,
    )


def evaluate_windowless(inst: TtptwInstance, tour: np.ndarray, plan: np.ndarray) -> float:
    """Plain TTP objective of the same pair, ignoring windows and waiting.

    With all-open windows ``evaluate(...).objective`` equals this value
    bit for bit (identical arithmetic order); used as a reduction check,
    so it is deliberately budget-free.
    """
    ttp = inst.ttp
    tour = np.ascontiguousarray(np.asarray(tour, dtype=np.int64))
    plan = np.ascontiguousarray(np.asarray(plan, dtype=np.bool_))
    return float(_windowless_kernel(
        ttp.dist, tour, ttp.profits, ttp.weights, ttp.item_city, plan,
        ttp.capacity, ttp.v_min, ttp.v_max, ttp.renting_ratio,
    ))


# ------------------------------------------------------------ solutions


@dataclass
class Solution:
    """A tour plus a packing plan, the unit the solver moves around."""

    tour: np.ndarray
    plan: np.ndarray


def write_solution(sol: Solution) -> str:
    tour = " ".join(str(int(c) + 1) for c in sol.tour)
    plan = " ".join("1" if b else "0" for b in sol.plan)
    return f"TOUR: {tour}\nPLAN: {plan}\n"


def parse_solution(text: str, n: int, m: int) -> Solution:
    tour = None
    plan = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("TOUR:"):
            tour = [int(tok) - 1 for tok in line[5:].split()]
        elif line.startswith("PLAN:"):
            plan = [int(tok) for tok in line[5:].split()]
        else:
            raise ValueError(f"line {lineno}: expected TOUR: or PLAN: line, got {raw!r}")
    if tour is None or plan is None:
        raise ValueError("solution file needs one TOUR: and one PLAN: line")
    if any(b not in (0, 1) for b in plan):
        raise ValueError("PLAN: entries must be 0 or 1")
    return Solution(tour=as_tour(tour, n), plan=as_plan(plan, m))


def load_solution(path, n: int, m: int) -> Solution:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_solution(fh.read(), n, m)


def save_solution(sol: Solution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_solution(sol))


def evaluation_report(e: Evaluation) -> dict:
    """JSON-ready summary of an evaluation."""
    return {
        "z": e.objective,
        "cv": e.violation,
        "feasible": is_feasible(e),
        "arrivals": [float(t) for t in e.arrivals],
    }

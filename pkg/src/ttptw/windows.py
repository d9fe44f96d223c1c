"""Time window generation around a reference tour.

Windows are derived from two reference arrival profiles along one tour
with an empty knapsack and no waiting: ``t`` at full speed and ``t'`` at
minimum speed. A tightness value l widens (l > 0) or pinches (l < 0)
the interval [t, t']:

    L_i = max(0, min(t_i - random(0, l), t'_i))
    U_i = max(t'_i + random(0, l), t_i)

where random(0, l) draws uniformly between 0 and l (so negative l draws
from [l, 0]). The depot keeps (0, inf). Families for several tightness
values are generated together in descending l order and clamped so that
a looser family always contains a tighter one city by city.

Type A uses a caller-supplied reference tour (ideally a good TSP tour);
type B draws a uniformly random reference tour from the seed. Each
tightness value consumes its own child RNG stream derived from
(seed, l), so dropping one l from the set never changes the others.
"""

from dataclasses import dataclass
import warnings

import numpy as np

from .evaluation import EvaluationBudget, evaluate, is_feasible
from .instance import TimeWindows, TtpInstance, attach_windows
from .seeding import child_rng

DEFAULT_TIGHTNESS = (1000, 100, -100, -1000)


@dataclass(frozen=True)
class ReferenceTimes:
    """Arrival profiles along the generating tour, indexed by city."""

    tour: np.ndarray
    fast: np.ndarray   # arrival at v_max
    slow: np.ndarray   # arrival at v_min

    @property
    def n(self) -> int:
        return self.fast.shape[0]


@dataclass(frozen=True)
class TwGenSpec:
    """What to generate: family type, seed, and the tightness set."""

    kind: str
    seed: int
    tightness: tuple = DEFAULT_TIGHTNESS

    def __post_init__(self):
        if self.kind not in ("A", "B"):
            raise ValueError("window family type must be 'A' or 'B'")
        if not self.tightness:
            raise ValueError("need at least one tightness value")
        if len(set(self.tightness)) != len(self.tightness):
            raise ValueError("tightness values must be distinct")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def reference_arrivals(ttp: TtpInstance, tour) -> ReferenceTimes:
    """Empty-knapsack arrival times at v_max and v_min, per city."""
    tour = np.asarray(tour, dtype=np.int64)
    legs = ttp.dist[tour[:-1], tour[1:]]
    cum = np.concatenate(([0.0], np.cumsum(legs)))
    fast = np.empty(ttp.n)
    slow = np.empty(ttp.n)
    fast[tour] = cum / ttp.v_max
    slow[tour] = cum / ttp.v_min
    return ReferenceTimes(tour=tour, fast=fast, slow=slow)


def sample_windows(ref: ReferenceTimes, tightness: int,
                   rng: np.random.Generator) -> TimeWindows:
    """One un-nested window family for a single tightness value.

    Draws two uniforms per non-depot city (lower first, then upper, in
    city-index order) and clamps inverted intervals to L := min(L, U).
    """
    n = ref.n
    lo, hi = min(0, tightness), max(0, tightness)
    draws = rng.uniform(lo, hi, size=(n - 1, 2))
    t, ts = ref.fast[1:], ref.slow[1:]
    lower = np.maximum(0.0, np.minimum(t - draws[:, 0], ts))
    upper = np.maximum(ts + draws[:, 1], t)
    lower = np.minimum(lower, upper)
    return TimeWindows(
        lower=np.concatenate(([0.0], lower)),
        upper=np.concatenate(([np.inf], upper)),
        tightness=tightness,
    )


def audit_window_feasibility(ttp: TtpInstance, tour, tw: TimeWindows) -> bool:
    """True when the tour with an empty plan (waiting allowed) meets every window."""
    inst = attach_windows(ttp, tw)
    scratch = EvaluationBudget(limit=1)
    ev = evaluate(inst, np.asarray(tour, dtype=np.int64),
                  np.zeros(ttp.m, dtype=np.bool_), scratch)
    return is_feasible(ev)


def generate_nested(ttp: TtpInstance, spec: TwGenSpec, tour=None,
                    audit: bool = False) -> dict:
    """Generate one window family per tightness value, nested.

    Returns {l: TimeWindows} over the spec's tightness set. Families are
    produced in descending l order; each later (tighter) family is
    clamped into the previous one via L := max(L, L_prev) and
    U := min(U, U_prev). When that clamp inverts an interval, the window
    collapses to the point min(max(L, L_prev), U_prev), which stays
    inside the containing window.

    Type A requires ``tour``; type B ignores it and draws a uniformly
    random tour (depot first) from the seed. With ``audit=True`` each
    family is checked for generating-tour feasibility (empty plan,
    waiting allowed) and a warning names the ones that fail.
    """
    if spec.kind == "A":
        if tour is None:
            raise ValueError("type A window generation needs a reference tour")
        tour = np.asarray(tour, dtype=np.int64)
    else:
        rng = child_rng(spec.seed, "tour")
        tour = np.concatenate(([0], rng.permutation(np.arange(1, ttp.n, dtype=np.int64))))
    ref = reference_arrivals(ttp, tour)
    out = {}
    prev_lower = prev_upper = None
    for tightness in sorted(spec.tightness, reverse=True):
        raw = sample_windows(ref, tightness, child_rng(spec.seed, "l", tightness))
        lower = raw.lower.copy()
        upper = raw.upper.copy()
        if prev_lower is not None:
            lower = np.maximum(lower, prev_lower)
            upper = np.minimum(upper, prev_upper)
            crossed = lower > upper
            if crossed.any():
                point = np.minimum(lower[crossed], prev_upper[crossed])
                lower[crossed] = point
                upper[crossed] = point
        tw = TimeWindows(lower=lower, upper=upper, tightness=tightness,
                         base=ttp.name, kind=spec.kind, seed=spec.seed)
        out[tightness] = tw
        prev_lower, prev_upper = lower, upper
        if audit and not audit_window_feasibility(ttp, tour, tw):
            warnings.warn(
                f"generating tour violates its own windows for l={tightness}",
                stacklevel=2,
            )
    return out

import numpy as np
import pytest

from ttptw import TimeWindows, TtpInstance, attach_windows

# Canonical 4-city desk instance: square-ish layout under CEIL_2D with
# three items. Small enough to reason about by hand, big enough to have
# a real routing/packing trade-off.
DESK5_TEXT = """\
PROBLEM NAME: desk5
KNAPSACK DATA TYPE: bounded strongly corr
DIMENSION: 4
NUMBER OF ITEMS: 3
CAPACITY OF KNAPSACK: 8
MIN SPEED: 0.1
MAX SPEED: 1.0
RENTING RATIO: 1
EDGE_WEIGHT_TYPE: CEIL_2D
NODE_COORD_SECTION (INDEX, X, Y):
1 0 0
2 0 4
3 3 4
4 3 0
ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
1 10 3 2
2 8 5 3
3 6 2 4
"""


def make_desk5() -> TtpInstance:
    return TtpInstance(
        name="desk5",
        coords=np.array([[0.0, 0.0], [0.0, 4.0], [3.0, 4.0], [3.0, 0.0]]),
        capacity=8.0,
        v_min=0.1,
        v_max=1.0,
        renting_ratio=1.0,
        profits=np.array([10.0, 8.0, 6.0]),
        weights=np.array([3.0, 5.0, 2.0]),
        item_city=np.array([1, 2, 3]),
    )


def random_instance(seed: int, n: int, m: int, span: float = 50.0,
                    renting_ratio: float | None = None) -> TtpInstance:
    """Small random instance for property tests. Weights keep roughly
    half the items packable at once."""
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, span, size=(n, 2))
    weights = rng.integers(1, 100, size=m).astype(float)
    profits = rng.integers(1, 200, size=m).astype(float)
    item_city = rng.integers(1, n, size=m).astype(np.int64)
    if renting_ratio is None:
        renting_ratio = float(rng.uniform(0.5, 5.0))
    return TtpInstance(
        name=f"rand{seed}",
        coords=coords,
        capacity=float(np.ceil(weights.sum() / 2)),
        v_min=0.1,
        v_max=1.0,
        renting_ratio=renting_ratio,
        profits=profits,
        weights=weights,
        item_city=item_city,
    )


def random_windows(seed: int, n: int, scale: float = 200.0) -> TimeWindows:
    """Unnested random windows: L uniform, U = L + positive width."""
    rng = np.random.default_rng(seed ^ 0x5EED)
    lower = np.concatenate(([0.0], rng.uniform(0.0, scale, size=n - 1)))
    upper = lower + np.concatenate(([np.inf], rng.uniform(1.0, scale, size=n - 1)))
    lower[0], upper[0] = 0.0, np.inf
    return TimeWindows(lower=lower, upper=upper)


def corr_instance(seed: int, n: int, renting_ratio: float = 5.0) -> TtpInstance:
    """Bounded strongly correlated instance: profit = weight + 100, one
    item per non-depot city, capacity ~ 3/11 of total weight."""
    rng = np.random.default_rng(seed)
    m = n - 1
    coords = rng.uniform(0.0, 70.0, size=(n, 2))
    weights = rng.integers(1, 1001, size=m).astype(float)
    profits = weights + 100.0
    return TtpInstance(
        name=f"corr{n}-{seed}",
        coords=coords,
        capacity=float(np.ceil(weights.sum() * 3 / 11)),
        v_min=0.1,
        v_max=1.0,
        renting_ratio=renting_ratio,
        profits=profits,
        weights=weights,
        item_city=np.arange(1, n, dtype=np.int64),
    )


@pytest.fixture
def desk5() -> TtpInstance:
    return make_desk5()


@pytest.fixture
def desk5_open(desk5):
    return attach_windows(desk5)


# One line per acceptance criterion, echoed after the test summary so a
# tee'd full run always shows the per-criterion verdicts and headline
# numbers regardless of output capturing.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance report")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

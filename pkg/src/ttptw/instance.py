"""TTP instance data, time windows, and the file formats around them.

Cities and items are 1-based in every file format (CEC-2014 style TTP
files, window files, solution files) and 0-based in memory; the depot is
city 1 in files and index 0 everywhere else. Loaders convert on the way
in, writers on the way out.

A ``TtpInstance`` is immutable after construction and carries a
precomputed distance matrix. Time windows live in a separate
``TimeWindows`` object so one TTP instance can be paired with many
window families; ``attach_windows`` glues the two together for the
evaluator.
"""

from dataclasses import dataclass, field
import math

import numpy as np

HEADER_KEYS = (
    "PROBLEM NAME",
    "KNAPSACK DATA TYPE",
    "DIMENSION",
    "NUMBER OF ITEMS",
    "CAPACITY OF KNAPSACK",
    "MIN SPEED",
    "MAX SPEED",
    "RENTING RATIO",
    "EDGE_WEIGHT_TYPE",
)

WINDOW_FILE_MAGIC = "TTPTW-WINDOWS"


class TtpParseError(ValueError):
    """Raised for malformed TTP or window files; message names the line."""


@dataclass(frozen=True)
class TtpInstance:
    """One travelling thief instance.

    coords: (n, 2) float array of city coordinates, depot at row 0.
    profits/weights/item_city: parallel (m,) arrays in item-id order;
    item_city holds 0-based city indices and never contains the depot.
    dist is filled in at construction from edge_weight_type.
    """

    name: str
    coords: np.ndarray
    capacity: float
    v_min: float
    v_max: float
    renting_ratio: float
    profits: np.ndarray
    weights: np.ndarray
    item_city: np.ndarray
    edge_weight_type: str = "CEIL_2D"
    knapsack_type: str = ""
    dist: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        coords = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        profits = np.ascontiguousarray(np.asarray(self.profits, dtype=np.float64))
        weights = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        item_city = np.ascontiguousarray(np.asarray(self.item_city, dtype=np.int64))
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "profits", profits)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "item_city", item_city)
        self._validate()
        object.__setattr__(self, "dist", _distance_matrix(coords, self.edge_weight_type))
        for arr in (self.coords, self.profits, self.weights, self.item_city, self.dist):
            arr.setflags(write=False)

    def _validate(self):
        n, m = self.coords.shape[0], self.profits.shape[0]
        if self.coords.ndim != 2 or self.coords.shape[1] != 2:
            raise ValueError("coords must be an (n, 2) array")
        if n < 2:
            raise ValueError("need at least 2 cities")
        if m < 1:
            raise ValueError("need at least 1 item")
        if self.weights.shape[0] != m or self.item_city.shape[0] != m:
            raise ValueError("profits, weights and item_city must have equal length")
        if not (0.0 < self.v_min < self.v_max):
            raise ValueError("need 0 < v_min < v_max")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if self.renting_ratio < 0:
            raise ValueError("renting ratio must be non-negative")
        if np.any(self.weights <= 0):
            raise ValueError("item weights must be positive")
        if np.any(self.profits < 0):
            raise ValueError("item profits must be non-negative")
        if np.any(self.item_city < 1) or np.any(self.item_city >= n):
            raise ValueError("items must sit in cities 2..n (never the depot)")
        if self.edge_weight_type not in ("CEIL_2D", "EUC_2D"):
            raise ValueError(f"unsupported edge weight type {self.edge_weight_type!r}")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def m(self) -> int:
        return self.profits.shape[0]


def _distance_matrix(coords: np.ndarray, edge_weight_type: str) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    euclid = np.sqrt((diff * diff).sum(axis=-1))
    if edge_weight_type == "CEIL_2D":
        return np.ceil(euclid)
    # TSPLIB EUC_2D rounds to the nearest integer
    return np.floor(euclid + 0.5)


def distance(inst: TtpInstance, i: int, j: int) -> float:
    """Inter-city distance between 0-based city indices i and j."""
    return float(inst.dist[i, j])


@dataclass(frozen=True)
class TimeWindows:
    """Per-city service windows, index-aligned with TtpInstance.coords.

    tightness is the l the family was generated with (0 for all-open
    windows); base/kind/seed describe provenance for the file format and
    stay empty for windows built by hand.
    """

    lower: np.ndarray
    upper: np.ndarray
    tightness: int = 0
    base: str = ""
    kind: str = ""
    seed: int = 0

    def __post_init__(self):
        lower = np.ascontiguousarray(np.asarray(self.lower, dtype=np.float64))
        upper = np.ascontiguousarray(np.asarray(self.upper, dtype=np.float64))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be equal-length 1-d arrays")
        if lower[0] != 0.0 or not math.isinf(upper[0]):
            raise ValueError("the depot window must be (0, inf)")
        if np.any(lower < 0):
            raise ValueError("window lower bounds must be non-negative")
        if np.any(lower > upper):
            raise ValueError("every window needs lower <= upper")
        lower.setflags(write=False)
        upper.setflags(write=False)

    @property
    def n(self) -> int:
        return self.lower.shape[0]


def open_windows(n: int) -> TimeWindows:
    """All-open windows: (0, inf) everywhere, the degenerate TTP case."""
    return TimeWindows(np.zeros(n), np.full(n, np.inf), tightness=0, kind="open")


@dataclass(frozen=True)
class TtptwInstance:
    """A TTP instance paired with one window family."""

    ttp: TtpInstance
    windows: TimeWindows

    def __post_init__(self):
        if self.windows.n != self.ttp.n:
            raise ValueError(
                f"window family covers {self.windows.n} cities, instance has {self.ttp.n}"
            )

    @property
    def n(self) -> int:
        return self.ttp.n

    @property
    def m(self) -> int:
        return self.ttp.m


def attach_windows(ttp: TtpInstance, windows: TimeWindows | None = None) -> TtptwInstance:
    """Pair a TTP instance with windows; None means all-open windows."""
    if windows is None:
        windows = open_windows(ttp.n)
    return TtptwInstance(ttp, windows)


# ---------------------------------------------------------------- TTP files


def parse_ttp(text: str) -> TtpInstance:
    """Parse a CEC-2014 style TTP document.

    Recognizes the canonical header keys plus NODE_COORD_SECTION and
    ITEMS SECTION; anything else (other than blank lines and a trailing
    EOF) is an error naming the offending line.
    """
    header: dict[str, str] = {}
    coords: list[tuple[float, float]] = []
    items: list[tuple[float, float, int]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if line.startswith("NODE_COORD_SECTION"):
            section = "coords"
            continue
        if line.startswith("ITEMS SECTION"):
            section = "items"
            continue
        if section == "coords":
            parts = line.split()
            if len(parts) != 3:
                raise TtpParseError(f"line {lineno}: expected 'index x y', got {raw!r}")
            idx, x, y = parts
            if int(float(idx)) != len(coords) + 1:
                raise TtpParseError(f"line {lineno}: city indices must run 1..n in order")
            coords.append((float(x), float(y)))
            continue
        if section == "items":
            parts = line.split()
            if len(parts) != 4:
                raise TtpParseError(
                    f"line {lineno}: expected 'index profit weight city', got {raw!r}"
                )
            idx, p, w, c = parts
            if int(float(idx)) != len(items) + 1:
                raise TtpParseError(f"line {lineno}: item indices must run 1..m in order")
            items.append((float(p), float(w), int(float(c))))
            continue
        if ":" not in line:
            raise TtpParseError(f"line {lineno}: not a header line: {raw!r}")
        key, value = line.split(":", 1)
        key = " ".join(key.split())
        if key not in HEADER_KEYS:
            raise TtpParseError(f"line {lineno}: unknown header key {key!r}")
        header[key] = value.strip()

    def require(key: str) -> str:
        if key not in header:
            raise TtpParseError(f"missing header key {key!r}")
        return header[key]

    n = int(require("DIMENSION"))
    m = int(require("NUMBER OF ITEMS"))
    if len(coords) != n:
        raise TtpParseError(f"DIMENSION says {n} cities, found {len(coords)} coordinate rows")
    if len(items) != m:
        raise TtpParseError(f"NUMBER OF ITEMS says {m}, found {len(items)} item rows")
    return TtpInstance(
        name=header.get("PROBLEM NAME", ""),
        coords=np.array(coords, dtype=np.float64),
        capacity=float(require("CAPACITY OF KNAPSACK")),
        v_min=float(require("MIN SPEED")),
        v_max=float(require("MAX SPEED")),
        renting_ratio=float(require("RENTING RATIO")),
        profits=np.array([p for p, _, _ in items], dtype=np.float64),
        weights=np.array([w for _, w, _ in items], dtype=np.float64),
        item_city=np.array([c - 1 for _, _, c in items], dtype=np.int64),
        edge_weight_type=require("EDGE_WEIGHT_TYPE"),
        knapsack_type=header.get("KNAPSACK DATA TYPE", ""),
    )


def _fmt_num(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def serialize_ttp(inst: TtpInstance) -> str:
    """Render an instance back into the canonical TTP document."""
    lines = [f"PROBLEM NAME: {inst.name}"]
    if inst.knapsack_type:
        lines.append(f"KNAPSACK DATA TYPE: {inst.knapsack_type}")
    lines += [
        f"DIMENSION: {inst.n}",
        f"NUMBER OF ITEMS: {inst.m}",
        f"CAPACITY OF KNAPSACK: {_fmt_num(inst.capacity)}",
        f"MIN SPEED: {_fmt_num(inst.v_min)}",
        f"MAX SPEED: {_fmt_num(inst.v_max)}",
        f"RENTING RATIO: {_fmt_num(inst.renting_ratio)}",
        f"EDGE_WEIGHT_TYPE: {inst.edge_weight_type}",
        "NODE_COORD_SECTION\t(INDEX, X, Y):",
    ]
    for i, (x, y) in enumerate(inst.coords, start=1):
        lines.append(f"{i} {_fmt_num(x)} {_fmt_num(y)}")
    lines.append("ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):")
    for j in range(inst.m):
        lines.append(
            f"{j + 1} {_fmt_num(inst.profits[j])} {_fmt_num(inst.weights[j])} "
            f"{inst.item_city[j] + 1}"
        )
    return "\n".join(lines) + "\n"


def load_ttp(path) -> TtpInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ttp(fh.read())


def save_ttp(inst: TtpInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_ttp(inst))


# ------------------------------------------------------------- window files


def parse_windows(text: str) -> TimeWindows:
    """Parse a window file (see write_windows for the layout)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != WINDOW_FILE_MAGIC:
        raise TtpParseError(f"line 1: window files start with {WINDOW_FILE_MAGIC!r}")
    meta = {"BASE": "", "L": "0", "TYPE": "", "SEED": "0"}
    rows: list[tuple[float, float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        key = line.split(":", 1)[0].strip() if ":" in line else None
        if key in meta:
            meta[key] = line.split(":", 1)[1].strip()
            continue
        parts = line.split()
        if len(parts) != 3:
            raise TtpParseError(f"line {lineno}: expected 'city L U', got {line!r}")
        if int(float(parts[0])) != len(rows) + 1:
            raise TtpParseError(f"line {lineno}: city indices must run 1..n in order")
        rows.append((float(parts[1]), float(parts[2])))
    if not rows:
        raise TtpParseError("window file has no city rows")
    return TimeWindows(
        lower=np.array([lo for lo, _ in rows]),
        upper=np.array([hi for _, hi in rows]),
        tightness=int(meta["L"]),
        base=meta["BASE"],
        kind=meta["TYPE"],
        seed=int(meta["SEED"]),
    )


def write_windows(tw: TimeWindows) -> str:
    lines = [
        WINDOW_FILE_MAGIC,
        f"BASE: {tw.base}",
        f"L: {tw.tightness}",
        f"TYPE: {tw.kind}",
        f"SEED: {tw.seed}",
    ]
    for i in range(tw.n):
        lines.append(f"{i + 1} {_fmt_num(tw.lower[i])} {_fmt_num(tw.upper[i])}")
    return "\n".join(lines) + "\n"


def load_windows(path) -> TimeWindows:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_windows(fh.read())


def save_windows(tw: TimeWindows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_windows(tw))

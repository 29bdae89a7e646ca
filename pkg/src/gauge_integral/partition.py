"""Tagged partitions of [0, 1], gauges and interval-union measurable sets."""

from __future__ import annotations

import csv
import enum
import io
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

DEPTH_CAP = 60


class TagMode(str, enum.Enum):
    PERRON = "PERRON"  # tag inside its cell (Henstock)
    FREE = "FREE"  # tag anywhere in [0, 1] (McShane)

    @classmethod
    def parse(cls, value: "TagMode | str") -> "TagMode":
        if isinstance(value, TagMode):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown tag mode {value!r}") from None


class CousinError(RuntimeError):
    def __init__(self, a: float, b: float, depth: int):
        super().__init__(f"no gauge-fine tag found for [{a!r}, {b!r}] at bisection depth {depth}")
        self.interval = (a, b)


# ---------------------------------------------------------------------------
# measurable sets


@dataclass(frozen=True)
class MeasurableSet:
    """Finite union of disjoint closed intervals inside [0, 1].

    Overlapping or touching intervals are merged on construction; degenerate
    intervals ``[a, a]`` are kept only if nothing else covers them and have
    measure zero.
    """

    intervals: tuple[tuple[float, float], ...]

    def __init__(self, intervals: Iterable[Iterable[float]]):
        raw = []
        for iv in intervals:
            a, b = (float(v) for v in iv)
            if not (0.0 <= a <= b <= 1.0):
                raise ValueError(f"interval [{a}, {b}] is not a subinterval of [0, 1]")
            raw.append((a, b))
        raw.sort()
        merged: list[list[float]] = []
        for a, b in raw:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        object.__setattr__(self, "intervals", tuple((a, b) for a, b in merged))

    @classmethod
    def unit(cls) -> "MeasurableSet":
        return cls([(0.0, 1.0)])

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    def intersect(self, other: "MeasurableSet") -> "MeasurableSet":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo <= hi:
                    out.append((lo, hi))
        return MeasurableSet(out)

    def overlap_measure(self, other: "MeasurableSet") -> float:
        return self.intersect(other).measure

    def contains_point(self, t: float) -> bool:
        return any(a <= t <= b for a, b in self.intervals)

    def to_json(self) -> list[list[float]]:
        return [[a, b] for a, b in self.intervals]


def measure(E: MeasurableSet) -> float:
    return E.measure


# ---------------------------------------------------------------------------
# gauges


class Gauge:
    """Strictly positive function on [0, 1]; `fn` must accept numpy arrays."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], descriptor: dict | None = None):
        self._fn = fn
        self.descriptor = descriptor or {"kind": "callable"}

    def __call__(self, t):
        val = np.asarray(self._fn(np.asarray(t, dtype=float)), dtype=float)
        if np.any(~(val > 0)):
            raise ValueError("gauge values must be strictly positive")
        return val if val.ndim else float(val)


def constant_gauge(delta: float) -> Gauge:
    return Gauge(lambda t: np.full(np.shape(t), float(delta)), {"kind": "constant", "delta": delta})


def affine_gauge(offset: float, slope: float) -> Gauge:
    return Gauge(lambda t: offset + slope * t, {"kind": "affine", "offset": offset, "slope": slope})


def piecewise_gauge(breaks: list[float], values: list[float]) -> Gauge:
    """Piecewise-constant gauge: ``values[i]`` on ``[breaks[i-1], breaks[i])``."""
    if len(values) != len(breaks) + 1:
        raise ValueError("piecewise gauge needs len(values) == len(breaks) + 1")
    b = np.asarray(breaks, dtype=float)
    v = np.asarray(values, dtype=float)
    return Gauge(lambda t: v[np.searchsorted(b, t, side="right")],
                 {"kind": "piecewise", "breaks": list(breaks), "values": list(values)})


def gauge_from_config(spec: dict) -> Gauge:
    kind = spec.get("kind")
    if kind == "constant":
        return constant_gauge(float(spec["delta"]))
    if kind == "affine":
        return affine_gauge(float(spec["offset"]), float(spec["slope"]))
    if kind == "piecewise":
        return piecewise_gauge(spec["breaks"], spec["values"])
    raise ValueError(f"unknown gauge kind {kind!r}")


# ---------------------------------------------------------------------------
# tagged partitions


@dataclass(frozen=True, eq=False)
class TaggedPartition:
    """Cells ``[left[i], right[i]]`` with tags ``tags[i]``, stored as arrays."""

    left: np.ndarray
    right: np.ndarray
    tags: np.ndarray
    mode: TagMode = TagMode.PERRON

    def __post_init__(self):
        for name in ("left", "right", "tags"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "mode", TagMode.parse(self.mode))
        if not (self.left.shape == self.right.shape == self.tags.shape) or self.left.ndim != 1:
            raise ValueError("partition arrays must be 1-D of equal length")

    @classmethod
    def from_cells(cls, cells: Iterable[tuple[float, float, float]],
                   mode: TagMode | str = TagMode.PERRON) -> "TaggedPartition":
        cells = list(cells)
        arr = np.array(cells, dtype=float).reshape(len(cells), 3)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], TagMode.parse(mode))

    def __len__(self) -> int:
        return len(self.left)

    @property
    def cells(self) -> list[tuple[float, float, float]]:
        return list(zip(self.left.tolist(), self.right.tolist(), self.tags.tolist()))

    @property
    def lengths(self) -> np.ndarray:
        return self.right - self.left

    def covered_set(self) -> MeasurableSet:
        return MeasurableSet(zip(self.left, self.right))

    def with_tags(self, tags: np.ndarray, mode: TagMode | None = None) -> "TaggedPartition":
        return TaggedPartition(self.left, self.right, tags, mode or self.mode)

    def as_free(self) -> "TaggedPartition":
        return TaggedPartition(self.left, self.right, self.tags, TagMode.FREE)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "tag"])
        for a, b, t in self.cells:
            w.writerow([repr(a), repr(b), repr(t)])
        return buf.getvalue()


def is_valid(P: TaggedPartition, domain: MeasurableSet | None = None, tol: float = 1e-12) -> bool:
    """Cells are non-degenerate, non-overlapping, cover `domain`, tags obey the mode."""
    domain = domain or MeasurableSet.unit()
    if len(P) == 0:
        return domain.measure == 0.0
    if np.any(P.right < P.left) or np.any(P.tags < 0) or np.any(P.tags > 1):
        return False
    order = np.argsort(P.left, kind="stable")
    lo, hi = P.left[order], P.right[order]
    if np.any(lo[1:] < hi[:-1] - tol):
        return False
    if P.mode is TagMode.PERRON and np.any((P.tags < P.left) | (P.tags > P.right)):
        return False
    covered = P.covered_set()
    return (abs(covered.measure - domain.measure) <= tol * max(1, len(P))
            and abs(covered.overlap_measure(domain) - domain.measure) <= tol * max(1, len(P)))


def is_fine(P: TaggedPartition, g: Gauge) -> bool:
    """Every cell lies in the open ball ``(t - g(t), t + g(t))`` around its tag."""
    if len(P) == 0:
        return True
    delta = np.asarray(g(P.tags))
    ok = (P.left > P.tags - delta) & (P.right < P.tags + delta)
    if P.mode is TagMode.PERRON:
        ok &= (P.tags >= P.left) & (P.tags <= P.right)
    return bool(np.all(ok))


def uniform_partition(n: int, domain: MeasurableSet | None = None,
                      mode: TagMode | str = TagMode.PERRON) -> TaggedPartition:
    """Each interval of `domain` cut into `n` equal cells, tagged at midpoints."""
    domain = domain or MeasurableSet.unit()
    lefts, rights = [], []
    for a, b in domain.intervals:
        if b <= a:
            continue
        edges = np.linspace(a, b, n + 1)
        lefts.append(edges[:-1])
        rights.append(edges[1:])
    if not lefts:
        empty = np.empty(0)
        return TaggedPartition(empty, empty, empty, TagMode.parse(mode))
    left = np.concatenate(lefts)
    right = np.concatenate(rights)
    return TaggedPartition(left, right, 0.5 * (left + right), TagMode.parse(mode))


def refine(P: TaggedPartition) -> TaggedPartition:
    """Bisect every cell.

    PERRON: both halves are tagged at their midpoints.  FREE: the left half
    keeps the parent tag and the right half is tagged at its midpoint.
    """
    mid = 0.5 * (P.left + P.right)
    left = np.empty(2 * len(P))
    right = np.empty(2 * len(P))
    tags = np.empty(2 * len(P))
    left[0::2], right[0::2] = P.left, mid
    left[1::2], right[1::2] = mid, P.right
    if P.mode is TagMode.PERRON:
        tags[0::2] = 0.5 * (P.left + mid)
    else:
        tags[0::2] = P.tags
    tags[1::2] = 0.5 * (mid + P.right)
    return TaggedPartition(left, right, tags, P.mode)


def restrict(P: TaggedPartition, E: MeasurableSet) -> TaggedPartition:
    """Intersect every cell with `E`, dropping null pieces.

    FREE tags are kept; PERRON tags are projected into the surviving piece.
    """
    lefts, rights, tags = [], [], []
    for a, b in E.intervals:
        lo = np.maximum(P.left, a)
        hi = np.minimum(P.right, b)
        keep = hi > lo
        lefts.append(lo[keep])
        rights.append(hi[keep])
        tags.append(P.tags[keep])
    left = np.concatenate(lefts) if lefts else np.empty(0)
    right = np.concatenate(rights) if rights else np.empty(0)
    tag = np.concatenate(tags) if tags else np.empty(0)
    order = np.argsort(left, kind="stable")
    left, right, tag = left[order], right[order], tag[order]
    if P.mode is TagMode.PERRON:
        tag = np.clip(tag, left, right)
    return TaggedPartition(left, right, tag, P.mode)


def cousin_partition(g: Gauge, domain: MeasurableSet | None = None,
                     depth_cap: int = DEPTH_CAP) -> TaggedPartition:
    """Gauge-fine PERRON partition of `domain` by recursive bisection.

    An interval is accepted as soon as its midpoint, left endpoint or right
    endpoint (probed in that order) is a tag whose gauge ball contains it.
    """
    domain = domain or MeasurableSet.unit()
    cells: list[tuple[float, float, float]] = []

    def accept(a: float, b: float) -> float | None:
        for t in (0.5 * (a + b), a, b):
            delta = g(t)
            if a > t - delta and b < t + delta:
                return t
        return None

    for a0, b0 in domain.intervals:
        if b0 <= a0:
            continue
        stack = [(a0, b0, 0)]
        while stack:
            a, b, depth = stack.pop()
            t = accept(a, b)
            if t is not None:
                cells.append((a, b, t))
                continue
            if depth >= depth_cap:
                raise CousinError(a, b, depth)
            m = 0.5 * (a + b)
            stack.append((m, b, depth + 1))
            stack.append((a, m, depth + 1))
    cells.sort()
    return TaggedPartition.from_cells(cells, TagMode.PERRON)

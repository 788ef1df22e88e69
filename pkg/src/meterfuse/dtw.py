"""Warped-distance computation between value sequences and pairwise ranking.

Two engines are provided:

* `dtw_exact` fills the full dynamic-programming lattice and is the
  oracle of record: globally minimal warped distance, with the path
  recovered by backtracking (diagonal preferred on ties, then the row
  step, then the column step, so paths are unique and reproducible).

* `fastdtw` is the multiresolution approximation: halve both series by
  pairwise averaging, solve the coarse problem recursively, project the
  coarse path back to fine resolution, dilate it by ``radius`` cells in
  both axes, and run the dynamic program inside that window only.  Its
  distance is an upper bound on the exact one and converges to it as the
  radius grows; work is linear in series length at fixed radius.

Costs are pointwise |a-b| for L1 and (a-b)^2 for L2; an L2 distance is
the square root of the accumulated total, matching the usual Euclidean
convention.  Inputs of unequal length are accepted as is, without
resampling.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import EmptyInput, EmptyPartition, TooShort
from .model import MeasurementId, TimeSeries
from .sampling import SamplingRecipe, apply_recipe

_BASE_CASE_MIN = 16
_INF = float("inf")


class Metric(Enum):
    L1 = "l1"
    L2 = "l2"


@dataclass(frozen=True)
class WarpPath:
    """Aligned index pairs realizing a warped distance.

    Starts at (0, 0), ends at (len_a-1, len_b-1); each step increments
    i, j, or both by exactly 1.
    """

    pairs: tuple[tuple[int, int], ...]

    def is_valid(self, len_a: int, len_b: int) -> bool:
        if not self.pairs:
            return False
        if self.pairs[0] != (0, 0) or self.pairs[-1] != (len_a - 1, len_b - 1):
            return False
        for (i0, j0), (i1, j1) in zip(self.pairs, self.pairs[1:]):
            di, dj = i1 - i0, j1 - j0
            if (di, dj) not in ((1, 0), (0, 1), (1, 1)):
                return False
        return True


@dataclass(frozen=True)
class DtwResult:
    distance: float
    path: WarpPath
    metric: Metric
    cells_evaluated: int


@dataclass(frozen=True)
class MatchResult:
    ion_id: MeasurementId
    hist_id: MeasurementId
    distance: float
    recipe: SamplingRecipe
    rank: int


@dataclass(frozen=True)
class MatchRun:
    """All cross-system pair distances, ranked, plus loop wall time."""

    results: tuple[MatchResult, ...]
    elapsed_seconds: float
    radius: int
    metric: Metric
    recipe: SamplingRecipe


def _as_list(a) -> list[float]:
    if isinstance(a, np.ndarray):
        return a.astype(np.float64).tolist()
    return [float(x) for x in a]


def _cost_fn(metric: Metric):
    if metric is Metric.L1:
        return lambda x, y: abs(x - y)
    return lambda x, y: (x - y) * (x - y)


def _finish(total: float, metric: Metric) -> float:
    if metric is Metric.L2:
        return float(np.sqrt(total))
    return float(total)


def dtw_exact(a: Sequence[float], b: Sequence[float], metric: Metric = Metric.L2) -> DtwResult:
    """Globally minimal warped distance over the full lattice."""
    av, bv = _as_list(a), _as_list(b)
    la, lb = len(av), len(bv)
    if la == 0 or lb == 0:
        raise EmptyInput("both sequences must be non-empty")
    cost = _cost_fn(metric)

    acc = [[0.0] * lb for _ in range(la)]
    acc[0][0] = cost(av[0], bv[0])
    for j in range(1, lb):
        acc[0][j] = acc[0][j - 1] + cost(av[0], bv[j])
    for i in range(1, la):
        row = acc[i]
        prev = acc[i - 1]
        x = av[i]
        row[0] = prev[0] + cost(x, bv[0])
        for j in range(1, lb):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if row[j - 1] < best:
                best = row[j - 1]
            row[j] = best + cost(x, bv[j])

    path = _backtrack(lambda i, j: acc[i][j], la, lb)
    return DtwResult(_finish(acc[-1][-1], metric), path, metric, la * lb)


def _backtrack(acc_at, la: int, lb: int) -> WarpPath:
    # Ties resolved diagonal first, then the row step, then the column step.
    i, j = la - 1, lb - 1
    rev = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag = acc_at(i - 1, j - 1)
            up = acc_at(i - 1, j)
            left = acc_at(i, j - 1)
            if diag <= up and diag <= left:
                i, j = i - 1, j - 1
            elif up <= left:
                i -= 1
            else:
                j -= 1
        rev.append((i, j))
    rev.reverse()
    return WarpPath(tuple(rev))


def coarsen(a: Sequence[float]) -> list[float]:
    """Halve a sequence by averaging adjacent pairs.

    An odd trailing element is carried through unchanged.
    """
    av = _as_list(a)
    if len(av) < 2:
        raise TooShort("need at least 2 points to coarsen")
    out = [(av[2 * i] + av[2 * i + 1]) / 2.0 for i in range(len(av) // 2)]
    if len(av) % 2:
        out.append(av[-1])
    return out


def expand_window(
    coarse_path: WarpPath, len_a: int, len_b: int, radius: int
) -> set[tuple[int, int]]:
    """Fine-resolution cells admitted by a coarse path.

    Each coarse cell projects to its (at most) 2x2 fine block; the block
    is dilated by ``radius`` in both axes and clipped to the lattice.
    The result is contiguous per row because the coarse path is monotone
    and continuous.
    """
    cells: set[tuple[int, int]] = set()
    for ci, cj in coarse_path.pairs:
        i_lo = max(0, 2 * ci - radius)
        i_hi = min(len_a, 2 * ci + 2 + radius)
        j_lo = max(0, 2 * cj - radius)
        j_hi = min(len_b, 2 * cj + 2 + radius)
        for i in range(i_lo, i_hi):
            for j in range(j_lo, j_hi):
                cells.add((i, j))
    return cells


def _window_rows(cells: set[tuple[int, int]]) -> dict[int, tuple[int, int]]:
    rows: dict[int, tuple[int, int]] = {}
    for i, j in cells:
        lo, hi = rows.get(i, (j, j))
        rows[i] = (min(lo, j), max(hi, j))
    return rows


def _windowed_dtw(
    av: list[float], bv: list[float], cells: set[tuple[int, int]], metric: Metric
) -> tuple[float, WarpPath, int]:
    la, lb = len(av), len(bv)
    cost = _cost_fn(metric)
    rows = _window_rows(cells)

    # Per-row cumulative-cost segments, kept for backtracking.
    seg: dict[int, tuple[int, list[float]]] = {}
    evaluated = 0
    for i in range(la):
        if i not in rows:
            continue
        lo, hi = rows[i]
        vals = [0.0] * (hi - lo + 1)
        prev = seg.get(i - 1)
        x = av[i]
        for j in range(lo, hi + 1):
            evaluated += 1
            if i == 0 and j == 0:
                vals[0] = cost(x, bv[0])
                continue
            best = _INF
            if prev is not None:
                plo, pvals = prev
                pj = j - plo
                if 0 <= pj < len(pvals) and pvals[pj] < best:
                    best = pvals[pj]
                if 0 <= pj - 1 < len(pvals) and pvals[pj - 1] < best:
                    best = pvals[pj - 1]
            if j - 1 >= lo and vals[j - 1 - lo] < best:
                best = vals[j - 1 - lo]
            vals[j - lo] = _INF if best == _INF else best + cost(x, bv[j])
        seg[i] = (lo, vals)

    def acc_at(i: int, j: int) -> float:
        row = seg.get(i)
        if row is None:
            return _INF
        lo, vals = row
        if lo <= j < lo + len(vals):
            return vals[j - lo]
        return _INF

    total = acc_at(la - 1, lb - 1)
    path = _backtrack(acc_at, la, lb)
    return _finish(total, metric), path, evaluated


def fastdtw(
    a: Sequence[float],
    b: Sequence[float],
    radius: int = 1,
    metric: Metric = Metric.L2,
) -> DtwResult:
    """Multiresolution approximate warped distance.

    Sequences at or below the base-case length, max(radius + 2, 16), are
    solved exactly, so tiny inputs delegate to `dtw_exact` bit for bit.
    The returned distance is always >= the exact distance and equals it
    once the radius reaches the longer input's length.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    av, bv = _as_list(a), _as_list(b)
    if len(av) == 0 or len(bv) == 0:
        raise EmptyInput("both sequences must be non-empty")
    return _fastdtw(av, bv, radius, metric)


def _fastdtw(av: list[float], bv: list[float], radius: int, metric: Metric) -> DtwResult:
    base = max(radius + 2, _BASE_CASE_MIN)
    if len(av) <= base or len(bv) <= base:
        return dtw_exact(av, bv, metric)
    coarse = _fastdtw(coarsen(av), coarsen(bv), radius, metric)
    window = expand_window(coarse.path, len(av), len(bv), radius)
    distance, path, evaluated = _windowed_dtw(av, bv, window, metric)
    return DtwResult(distance, path, metric, coarse.cells_evaluated + evaluated)


def z_normalize(values: np.ndarray) -> np.ndarray:
    """Center to zero mean, scale to unit variance (zeros when constant)."""
    values = np.asarray(values, dtype=np.float64)
    std = values.std()
    centered = values - values.mean()
    if std == 0:
        return centered
    return centered / std


def match_all(
    ion: Sequence[TimeSeries],
    hist: Sequence[TimeSeries],
    recipe: SamplingRecipe,
    radius: int = 1,
    metric: Metric = Metric.L2,
    normalize: bool = False,
) -> MatchRun:
    """Rank every cross-system pair by warped distance, ascending.

    Series are sampled per the recipe before comparison; the sampling is
    done up front so the recorded wall time covers the distance loop
    only.  Ties in distance break lexicographically on (ion name, hist
    name), making the ranking deterministic regardless of evaluation
    order.
    """
    if not ion or not hist:
        raise EmptyPartition("both corpus partitions must contain at least one series")

    def prep(s: TimeSeries) -> list[float]:
        sampled = apply_recipe(s, recipe)
        vals = z_normalize(sampled.v) if normalize else sampled.v
        return _as_list(vals)

    ion_sorted = sorted(ion, key=lambda s: s.id.name)
    hist_sorted = sorted(hist, key=lambda s: s.id.name)
    ion_vals = [(s.id, prep(s)) for s in ion_sorted]
    hist_vals = [(s.id, prep(s)) for s in hist_sorted]

    start = time.perf_counter()
    scored = []
    for ion_id, a in ion_vals:
        for hist_id, b in hist_vals:
            result = _fastdtw(a, b, radius, metric) if a and b else None
            if result is None:
                raise EmptyInput(f"sampled series is empty for pair ({ion_id}, {hist_id})")
            scored.append((result.distance, ion_id, hist_id))
    elapsed = time.perf_counter() - start

    scored.sort(key=lambda r: (r[0], r[1].name, r[2].name))
    results = tuple(
        MatchResult(ion_id, hist_id, dist, recipe, rank)
        for rank, (dist, ion_id, hist_id) in enumerate(scored, start=1)
    )
    return MatchRun(results, elapsed, radius, metric, recipe)

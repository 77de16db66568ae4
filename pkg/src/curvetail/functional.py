"""Discretized curves, the second-difference semi-metric and moving windows.

Curves are stored as plain value grids.  Distances between curves are
measured with the squared-second-difference semi-metric, which vanishes
exactly on affine shifts of the index.  A moving window around a target
curve collects every response whose covariate lies in the closed ball of
radius h, which is the raw material for all tail estimators here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateGridError,
    EmptyWindowError,
    ParameterError,
    StructuralError,
)


def _as_curve_values(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise StructuralError(f"curve values must be one-dimensional, got shape {arr.shape}")
    if arr.size < 3:
        raise StructuralError(f"a curve needs at least 3 grid points, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError("curve values must all be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Curve:
    """A curve sampled on a regular grid of L >= 3 abscissae."""

    values: np.ndarray
    identifier: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_curve_values(self.values))

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def energy(self) -> float:
        """Squared Euclidean norm of the discretized values."""
        return float(self.values @ self.values)


@dataclass(eq=False)
class Dataset:
    """Design curves x_1..x_n, each paired with its positive responses."""

    curves: list[Curve]
    responses: list[np.ndarray]

    def __post_init__(self) -> None:
        if len(self.curves) < 1:
            raise StructuralError("a dataset needs at least one curve")
        if len(self.responses) != len(self.curves):
            raise StructuralError(
                f"{len(self.curves)} curves but {len(self.responses)} response groups"
            )
        length = len(self.curves[0])
        for c in self.curves:
            if len(c) != length:
                raise StructuralError("all curves in a dataset must share the same length")
        cleaned = []
        for i, resp in enumerate(self.responses):
            arr = np.asarray(resp, dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise StructuralError(f"curve #{i} needs a non-empty 1-d response vector")
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
                raise StructuralError(f"curve #{i} has non-positive or non-finite responses")
            cleaned.append(arr)
        self.responses = cleaned

    @property
    def n_curves(self) -> int:
        return len(self.curves)


@dataclass(frozen=True, eq=False)
class Slice:
    """Responses whose covariates fall in the closed ball B(target, radius).

    ``members`` keeps the responses in covariate order (then response order
    within a covariate); ``order_stats`` is the same multiset sorted
    ascending, so ``order_stats[i - 1]`` is the i-th smallest response.
    """

    target: str | None
    radius: float
    members: np.ndarray
    order_stats: np.ndarray

    @property
    def size(self) -> int:
        """Number of responses in the window (m_t)."""
        return int(self.members.size)

    @classmethod
    def from_members(
        cls, members, target: str | None = None, radius: float = float("nan")
    ) -> "Slice":
        arr = np.asarray(members, dtype=float)
        if arr.size == 0:
            raise EmptyWindowError("empty window: no response falls inside the ball")
        stats = np.sort(arr, kind="stable")
        return cls(target=target, radius=radius, members=arr, order_stats=stats)


def semi_metric_sq(a: Curve, b: Curve) -> float:
    """Squared second-difference semi-metric between two equal-length curves.

    Sums, over every interior grid point, the squared second difference of
    the pointwise difference a - b.  The result is exactly zero whenever
    a - b is affine in the grid index.
    """
    if len(a) != len(b):
        raise StructuralError(f"curve length mismatch: {len(a)} vs {len(b)}")
    diff = a.values - b.values
    second = diff[2:] + diff[:-2] - 2.0 * diff[1:-1]
    return float(second @ second)


def curve_distance(a: Curve, b: Curve) -> float:
    """Semi-metric distance, i.e. the square root of :func:`semi_metric_sq`."""
    return math.sqrt(semi_metric_sq(a, b))


def ball_proportion(ds: Dataset, t: Curve, h: float, metric_sq=semi_metric_sq) -> float:
    """Fraction of design curves lying in the closed ball of radius h around t.

    The target counts itself whenever it is a design point, since its
    distance to itself is zero.  Membership is decided on squared distances
    so no square roots are taken.  ``metric_sq`` is the plug-in point for an
    alternate squared semi-metric.
    """
    if h < 0:
        raise ParameterError(f"ball radius must be non-negative, got {h}")
    h_sq = h * h
    inside = sum(1 for c in ds.curves if metric_sq(c, t) <= h_sq)
    return inside / ds.n_curves


def extract_slice(ds: Dataset, t: Curve, h: float, metric_sq=semi_metric_sq) -> Slice:
    """Collect all responses of the design curves within distance h of t.

    Raises :class:`EmptyWindowError` when no design curve is in the ball,
    never returning a silent empty result.
    """
    if h < 0:
        raise ParameterError(f"ball radius must be non-negative, got {h}")
    h_sq = h * h
    chunks = [
        resp
        for curve, resp in zip(ds.curves, ds.responses)
        if metric_sq(curve, t) <= h_sq
    ]
    if not chunks:
        raise EmptyWindowError(
            f"empty window: no design point within distance {h} of target "
            f"{t.identifier or '<anonymous>'}"
        )
    members = np.concatenate(chunks)
    return Slice.from_members(members, target=t.identifier, radius=float(h))


def empirical_quantile(sorted_values: np.ndarray, level: float) -> float:
    """Order statistic at 1-based index ceil(level * N) of pre-sorted values.

    This is the single empirical-quantile convention used everywhere in the
    package (h grids, confidence intervals), chosen because it is simple
    and deterministic.
    """
    n = sorted_values.size
    idx = int(math.ceil(level * n))
    idx = min(max(idx, 1), n)
    return float(sorted_values[idx - 1])


def pairwise_distance_grid(
    ds: Dataset | Sequence[Curve],
    quantile_levels: Iterable[float],
    metric_sq=semi_metric_sq,
) -> tuple[float, ...]:
    """Empirical quantiles of the pairwise semi-metric distances.

    Returns the order statistics at 1-based index ceil(p * N) of the
    N = n(n-1)/2 sorted distances, deduplicated and ascending.  Used to
    build data-driven h grids for window selection.
    """
    curves = list(ds.curves) if isinstance(ds, Dataset) else list(ds)
    if len(curves) < 2:
        raise StructuralError("need at least two curves to build a distance grid")
    dists = []
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            dists.append(math.sqrt(metric_sq(curves[i], curves[j])))
    sorted_d = np.sort(np.asarray(dists))
    if sorted_d[-1] == 0.0:
        raise DegenerateGridError("all curves are identical: every pairwise distance is zero")
    values = []
    for level in quantile_levels:
        if not 0.0 < level <= 1.0:
            raise ParameterError(f"quantile level must lie in (0, 1], got {level}")
        values.append(empirical_quantile(sorted_d, level))
    unique = sorted(set(values))
    return tuple(unique)

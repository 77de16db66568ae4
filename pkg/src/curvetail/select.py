"""Joint (h, k) selection by estimator agreement or by distance to the truth.

Both selectors scan a grid of window radii and top-order counts, score each
feasible pair by a cross-design-point distance, and return the argmin with
a deterministic tie-break (smallest h, then smallest k).  The heuristic
score is the disagreement between the constant-weight and log-weight
extrapolated estimates; the oracle score replaces the log-weight estimate
with the true quantile and is only available when the model is known.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SelectionError, StructuralError
from .functional import Dataset, Slice, extract_slice
from .models import ConditionalModel
from .quantile import q2
from .tailindex import HILL, ZIPF


@dataclass(frozen=True)
class SelectionGrid:
    """Candidate window radii (ascending) and top-order counts (ascending)."""

    h_values: tuple[float, ...]
    k_values: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.h_values or not self.k_values:
            raise ParameterError("selection grid must contain at least one h and one k")
        hs = tuple(float(h) for h in self.h_values)
        ks = tuple(int(k) for k in self.k_values)
        if any(h <= 0 for h in hs) or list(hs) != sorted(hs):
            raise ParameterError("h values must be positive and ascending")
        if any(k <= 0 for k in ks) or list(ks) != sorted(ks):
            raise ParameterError("k values must be positive and ascending")
        object.__setattr__(self, "h_values", hs)
        object.__setattr__(self, "k_values", ks)


@dataclass(frozen=True)
class GridCell:
    """One row of the criterion table."""

    h: float
    k: int
    criterion: float  # NaN when infeasible
    feasible: bool
    reason: str  # empty when feasible


@dataclass
class SelectionResult:
    """Argmin of a selection criterion over the feasible grid."""

    mode: str  # "heuristic" | "oracle"
    alpha: float
    h_selected: float
    k_selected: int
    criterion: float
    table: list[GridCell] = field(repr=False)

    def cell(self, h: float, k: int) -> GridCell:
        for row in self.table:
            if row.h == h and row.k == k:
                return row
        raise KeyError(f"no grid cell at (h={h}, k={k})")


def dist_over_design(f, g) -> float:
    """Euclidean distance between two value vectors aligned on the design points."""
    fa = np.asarray(f, dtype=float)
    ga = np.asarray(g, dtype=float)
    if fa.shape != ga.shape:
        raise StructuralError(f"design-point vectors differ in shape: {fa.shape} vs {ga.shape}")
    diff = fa - ga
    return float(math.sqrt(diff @ diff))


@dataclass
class SelectionEvaluation:
    """Shared result of one grid scan: both criteria plus the slices per h."""

    heuristic: SelectionResult
    oracle: SelectionResult | None
    slices: dict[float, list[Slice]]


def evaluate_selection(
    ds: Dataset,
    alpha: float,
    grid: SelectionGrid,
    model: ConditionalModel | None = None,
) -> SelectionEvaluation:
    """Scan the grid once, scoring the heuristic and (optionally) oracle criteria.

    Cells are visited with h ascending outer and k ascending inner, and the
    running minimum is only replaced on strict improvement, which realizes
    the smallest-h-then-smallest-k tie-break.  Infeasible or degenerate
    cells are kept in the table with a reason code.
    """
    slices = {h: [extract_slice(ds, t, h) for t in ds.curves] for h in grid.h_values}
    truth = None
    if model is not None:
        truth = np.array([model.quantile(alpha, t) for t in ds.curves])

    heur_table: list[GridCell] = []
    orac_table: list[GridCell] = []
    best_heur: tuple[float, float, int] | None = None
    best_orac: tuple[float, float, int] | None = None

    for h in grid.h_values:
        row_slices = slices[h]
        sizes = [s.size for s in row_slices]
        for k in grid.k_values:
            reason = ""
            if any(k > m - 1 for m in sizes):
                reason = "k exceeds window size"
            elif any(alpha > k / m for m in sizes):
                reason = "no extrapolation: alpha above k/m"
            est_hill = est_zipf = None
            if not reason:
                est_hill = [q2(s, alpha, k, HILL) for s in row_slices]
                est_zipf = [q2(s, alpha, k, ZIPF) for s in row_slices]
                if any(e.degenerate for e in est_hill):
                    reason = "degenerate tail estimate"
            if reason:
                heur_table.append(GridCell(h, k, float("nan"), False, reason))
                orac_table.append(GridCell(h, k, float("nan"), False, reason))
                continue
            hill_values = [e.value for e in est_hill]
            crit_h = dist_over_design(hill_values, [e.value for e in est_zipf])
            heur_table.append(GridCell(h, k, crit_h, True, ""))
            if best_heur is None or crit_h < best_heur[0]:
                best_heur = (crit_h, h, k)
            if truth is not None:
                crit_o = dist_over_design(hill_values, truth)
                orac_table.append(GridCell(h, k, crit_o, True, ""))
                if best_orac is None or crit_o < best_orac[0]:
                    best_orac = (crit_o, h, k)

    if best_heur is None:
        raise SelectionError("no feasible (h, k) pair on the selection grid")
    heuristic = SelectionResult(
        mode="heuristic", alpha=alpha,
        h_selected=best_heur[1], k_selected=best_heur[2],
        criterion=best_heur[0], table=heur_table,
    )
    oracle = None
    if truth is not None:
        oracle = SelectionResult(
            mode="oracle", alpha=alpha,
            h_selected=best_orac[1], k_selected=best_orac[2],
            criterion=best_orac[0], table=orac_table,
        )
    return SelectionEvaluation(heuristic=heuristic, oracle=oracle, slices=slices)


def select_heuristic(ds: Dataset, alpha: float, grid: SelectionGrid) -> SelectionResult:
    """Pick (h, k) minimizing the disagreement between the two weightings."""
    return evaluate_selection(ds, alpha, grid).heuristic


def select_oracle(
    ds: Dataset, alpha: float, grid: SelectionGrid, model: ConditionalModel
) -> SelectionResult:
    """Pick (h, k) minimizing the distance to the true quantile.

    Infeasible in practice (the true quantile is unknown) but it lower
    bounds the error reachable on the same grid, which makes it the natural
    benchmark for the heuristic.
    """
    return evaluate_selection(ds, alpha, grid, model=model).oracle


def write_criterion_table(result: SelectionResult, path) -> None:
    """Export a criterion table as CSV (h, k, criterion, feasible, reason)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "k", "criterion", "feasible", "reason"])
        for cell in result.table:
            writer.writerow([
                format(cell.h, ".12g"),
                cell.k,
                "" if math.isnan(cell.criterion) else format(cell.criterion, ".12g"),
                str(cell.feasible).lower(),
                cell.reason,
            ])

"""Within-sample and extrapolated estimators of extreme conditional quantiles.

For a window of m responses and a target order 1 - alpha, the product
m * alpha decides where the quantile sits relative to the sample: deep
inside (interior), at the boundary, or beyond the largest observation.
The within-sample estimator reads off an upper order statistic; the
extrapolated one anchors at order k/m and multiplies by a power-law
factor driven by an estimated tail index.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, NotExtrapolationError, OrderBeyondSampleError
from .functional import Slice
from .tailindex import HILL, WeightFunction, tail_index


class Situation(enum.Enum):
    """Position of the target quantile relative to the window sample."""

    INTERIOR = "S1"   # m*alpha large: quantile well inside the sample
    BOUNDARY = "S2"   # m*alpha of order one: quantile near the maximum
    BEYOND = "S3"     # m*alpha below one: quantile beyond the maximum

    def __str__(self) -> str:  # serialized form used in reports and CSVs
        return self.value


DEFAULT_S1_THRESHOLD = 10.0


def classify_situation(m: int, alpha: float, s1_threshold: float = DEFAULT_S1_THRESHOLD) -> Situation:
    """Finite-sample proxy for the asymptotic regime of (m, alpha)."""
    if m < 1:
        raise DomainError(f"window size must be at least 1, got {m}")
    _check_alpha(alpha)
    product = m * alpha
    if product >= s1_threshold:
        return Situation.INTERIOR
    if product >= 1.0:
        return Situation.BOUNDARY
    return Situation.BEYOND


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"quantile order must lie strictly inside (0, 1), got {alpha}")
    return alpha


@dataclass(frozen=True)
class QuantileEstimate:
    """A point estimate of q(alpha, t) with its provenance.

    ``beta``, ``anchor``, ``gamma_hat``, ``weight`` and ``k`` are only set
    for extrapolated estimates, for which
    ``value == anchor * (beta / alpha) ** gamma_hat`` holds exactly.
    """

    value: float
    alpha: float
    situation: Situation
    m: int
    method: str                      # "within-sample" | "extrapolated"
    k: int | None = None
    beta: float | None = None
    anchor: float | None = None
    gamma_hat: float | None = None
    weight: str | None = None
    degenerate: bool = False


def q1(slc: Slice, alpha: float, s1_threshold: float = DEFAULT_S1_THRESHOLD) -> QuantileEstimate:
    """Within-sample estimate: the order statistic Z_{m - floor(m*alpha) + 1, m}.

    Fails loudly with :class:`OrderBeyondSampleError` when floor(m*alpha)
    is zero, because the target then exceeds the sample maximum with
    non-vanishing probability and clamping would bias experiments.
    """
    alpha = _check_alpha(alpha)
    m = slc.size
    j = int(math.floor(m * alpha))
    if j == 0:
        raise OrderBeyondSampleError(
            f"floor(m*alpha) = 0 for m={m}, alpha={alpha}: the target order lies "
            "beyond the sample; use the extrapolated estimator"
        )
    value = float(slc.order_stats[m - j])  # 1-based order statistic m - j + 1
    return QuantileEstimate(
        value=value,
        alpha=alpha,
        situation=classify_situation(m, alpha, s1_threshold),
        m=m,
        method="within-sample",
    )


def q2(
    slc: Slice,
    alpha: float,
    k: int,
    w: WeightFunction = HILL,
    s1_threshold: float = DEFAULT_S1_THRESHOLD,
) -> QuantileEstimate:
    """Extrapolated estimate anchored at the order statistic of level k/m.

    Computes Z_{m-k+1, m} * (beta / alpha) ** gamma_hat with beta = k/m and
    gamma_hat the weighted log-spacing estimate on the same window.  The
    target order must satisfy alpha <= k/m, otherwise the factor would
    interpolate instead of extrapolate and the within-sample estimator is
    the right tool.
    """
    alpha = _check_alpha(alpha)
    est = tail_index(slc, k, w)  # validates 1 <= k <= m - 1
    m = slc.size
    beta = k / m
    if alpha > beta:
        raise NotExtrapolationError(
            f"alpha={alpha} exceeds the anchor order k/m={beta}; use the "
            "within-sample estimator"
        )
    anchor = float(slc.order_stats[m - k])  # Z_{m-k+1, m}
    value = anchor * (beta / alpha) ** est.gamma_hat
    return QuantileEstimate(
        value=float(value),
        alpha=alpha,
        situation=classify_situation(m, alpha, s1_threshold),
        m=m,
        method="extrapolated",
        k=k,
        beta=beta,
        anchor=anchor,
        gamma_hat=est.gamma_hat,
        weight=est.weight,
        degenerate=est.degenerate,
    )

"""Synthetic-curve studies and Monte Carlo validation of the limit laws.

Two entry points live here.  ``run_study`` reproduces the finite-sample
experiment: fixed synthetic spectra, re-drawn heavy-tailed responses per
replication, data-driven (h, k) selection by the heuristic and by the
oracle, and error summaries across replications.  ``run_asymptotic_suite``
runs seeded Monte Carlo checks of the estimators' limit behavior on a
covariate-free design and emits one pass/fail row per claim.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from joblib import Parallel, delayed

from .errors import ConfigError, CurveTailError, GenerationError, ParameterError, StudyError
from .functional import (
    Curve,
    Dataset,
    Slice,
    empirical_quantile,
    pairwise_distance_grid,
    semi_metric_sq,
)
from .models import (
    ConditionalModel,
    ConstantMap,
    EnergyTailIndexMap,
    FrechetModel,
    ParetoModel,
    BurrModel,
    PerCurveValue,
    ShiftedScaledModel,
    TailMeanCentering,
    sigma_scale,
)
from .quantile import DEFAULT_S1_THRESHOLD, q1, q2
from .select import SelectionGrid, dist_over_design, evaluate_selection
from .tailindex import HILL, ZIPF, av_factor, tail_index

# ---------------------------------------------------------------------------
# Synthetic data generation


def default_y_values(n_curves: int) -> tuple[float, ...]:
    """Equally spaced response proportions in [0.05, 0.75].

    The upper end is kept away from 1 so that min_i log(1/y_i) stays well
    above zero: that minimum sets the noise scale of the synthetic
    responses, and letting it collapse would make the across-curve location
    differences dwarf the tail noise that the estimators are supposed to
    resolve.
    """
    if n_curves < 2:
        raise ConfigError("need at least two curves for the default proportions")
    idx = np.arange(n_curves, dtype=float)
    return tuple(0.05 + 0.7 * idx / (n_curves - 1))


def _draw_spectrum(
    rng: np.random.Generator,
    u: np.ndarray,
    band_centers: np.ndarray,
    band_widths: np.ndarray,
    band_depths: np.ndarray,
    intensity: float,
) -> np.ndarray:
    # nearly flat baseline minus narrow absorption dips; keeping the baseline
    # flat makes the curve energy track the (semi-metric visible) dips rather
    # than affine components the semi-metric cannot see, and the jitters are
    # kept small so the energy ordering follows the absorption intensity
    level = 1.5
    tilt = rng.uniform(-0.002, 0.002)
    amp = rng.uniform(0.0, 0.001)
    freq = int(rng.integers(1, 4))
    phase = rng.uniform(0.0, 2.0 * np.pi)
    vals = level + tilt * u + amp * np.sin(2.0 * np.pi * freq * u + phase)
    for center, width, depth in zip(band_centers, band_widths, band_depths):
        w = width * rng.uniform(0.995, 1.005)
        d = intensity * depth * rng.uniform(0.995, 1.005)
        vals = vals - d * np.exp(-0.5 * ((u - center) / w) ** 2)
    return vals


def _intensity_profile(n_curves: int) -> np.ndarray:
    # absorption strength follows the response-location profile of the
    # default proportions, so that distances in the semi-metric are
    # proportional to the oscillation of the conditional quantile map (the
    # Lipschitz regularity the estimators rely on)
    locations = np.log(1.0 / np.asarray(default_y_values(n_curves)))
    profile = (locations[0] - locations) / (locations[0] - locations[-1])
    return 0.35 + 0.65 * profile


def generate_curves(grid_length: int, n_curves: int, seed) -> list[Curve]:
    """Deterministic spectrum-like curves with pairwise distinct energies.

    The collection shares a fixed set of six absorption bands (random
    centers, widths and depths drawn once from the seeded generator); curve
    i subtracts all of them at a strength set by an index-driven intensity,
    the way a physical parameter sweep would.  Absorption therefore drives
    the curve energy and the second-derivative geometry jointly: curves
    close in the semi-metric also have close energies, hence close tail
    indices and response locations.  A draw whose squared energy collides
    with an earlier curve is redrawn; after 100 failed redraws generation
    aborts.
    """
    if grid_length < 3:
        raise ParameterError(f"grid length must be at least 3, got {grid_length}")
    if n_curves < 2:
        raise ParameterError(f"need at least 2 curves, got {n_curves}")
    rng = np.random.default_rng(seed)
    u = np.linspace(0.0, 1.0, grid_length)
    band_centers = np.sort(rng.uniform(0.12, 0.88, size=6))
    band_widths = rng.uniform(0.018, 0.045, size=6)
    band_depths = rng.uniform(0.3, 0.5, size=6)
    intensities = _intensity_profile(n_curves)
    curves: list[Curve] = []
    energies: list[float] = []
    for i in range(n_curves):
        for _attempt in range(100):
            vals = _draw_spectrum(rng, u, band_centers, band_widths, band_depths,
                                  float(intensities[i]))
            energy = float(vals @ vals)
            if all(abs(energy - e) > 1e-9 * max(1.0, energy) for e in energies):
                break
        else:
            raise GenerationError("could not reach pairwise distinct energies in 100 redraws")
        energies.append(energy)
        curves.append(Curve(vals, identifier=f"c{i + 1:02d}"))
    return curves


def build_generative_model(
    curves: Sequence[Curve], y_values: Sequence[float]
) -> ShiftedScaledModel:
    """Noise model for the synthetic responses: a located, scaled heavy tail.

    Responses at curve x are log(1/y(x)) plus centered noise whose tail
    index is the energy map of the curve collection; the common noise scale
    is the largest one keeping every response positive.
    """
    gamma_map = EnergyTailIndexMap.from_curves(curves)
    sigma = sigma_scale(curves, y_values, gamma_map)
    location = PerCurveValue(
        {c.identifier: math.log(1.0 / y) for c, y in zip(curves, y_values)}
    )
    return ShiftedScaledModel(
        FrechetModel(gamma_map), location, sigma, TailMeanCentering(gamma_map)
    )


def generate_responses(
    curves: Sequence[Curve], y_values: Sequence[float], seed: int, n_responses: int = 100
) -> Dataset:
    """Draw the response groups for one replication.

    Curve i uses the stream seeded with ``seed + i`` (0-based), so workers
    handling different curves or replications never share a stream.  All
    responses are checked to be finite and strictly positive.
    """
    model = build_generative_model(curves, y_values)
    responses = []
    for i, curve in enumerate(curves):
        draws = model.sample(curve, n_responses, seed + i)
        if not np.all(np.isfinite(draws)) or np.any(draws <= 0.0):
            raise GenerationError(
                f"non-positive synthetic response at curve {curve.identifier}: "
                "the noise scale is mis-computed"
            )
        responses.append(draws)
    return Dataset(list(curves), responses)


# ---------------------------------------------------------------------------
# The replication study


@dataclass
class ExperimentConfig:
    """Knobs of the replication study; defaults mirror the reference set-up."""

    n_curves: int = 16
    n_responses: int = 100
    grid_length: int = 256
    replications: int = 100
    alphas: tuple[float, ...] = (1.0 / 300.0, 1.0 / 500.0)
    base_seed: int = 1729
    h_quantile_levels: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    k_values: tuple[int, ...] | None = None
    y_values: tuple[float, ...] | None = None
    s1_threshold: float = DEFAULT_S1_THRESHOLD
    jobs: int = 1

    def __post_init__(self) -> None:
        for name in ("n_curves", "n_responses", "grid_length", "replications"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        self.alphas = tuple(float(a) for a in self.alphas)
        if not self.alphas or any(not 0.0 < a < 1.0 for a in self.alphas):
            raise ConfigError("every target order must lie strictly inside (0, 1)")
        if any(not 0.0 < p <= 1.0 for p in self.h_quantile_levels):
            raise ConfigError("h quantile levels must lie in (0, 1]")
        if self.k_values is not None:
            self.k_values = tuple(int(k) for k in self.k_values)
            if any(k <= 0 for k in self.k_values):
                raise ConfigError("k values must be positive")
        if self.y_values is not None:
            self.y_values = tuple(float(y) for y in self.y_values)
            if len(self.y_values) != self.n_curves:
                raise ConfigError("y_values must have one entry per curve")
            if any(not 0.0 < y < 1.0 for y in self.y_values):
                raise ConfigError("y values must lie strictly inside (0, 1)")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")


@dataclass
class ReplicationReport:
    """Everything recorded for one replication of the study."""

    index: int
    pair_heuristic: tuple[float, int]
    pair_oracle: tuple[float, int]
    criterion_heuristic: float
    criterion_oracle: float
    hill_error_at_heuristic_pair: float
    truth: dict[float, np.ndarray]
    estimates_heuristic: dict[float, np.ndarray]
    estimates_oracle: dict[float, np.ndarray]
    error_heuristic: dict[float, float]
    error_oracle: dict[float, float]


@dataclass(frozen=True)
class AbortedReplication:
    index: int
    reason: str


def _run_replication(
    index: int,
    curves: Sequence[Curve],
    y_values: Sequence[float],
    n_responses: int,
    base_seed: int,
    grid: SelectionGrid,
    model: ConditionalModel,
    alphas: tuple[float, ...],
    alpha_ref: float,
):
    """One replication: redraw responses, select (h, k) both ways, evaluate.

    Replication indices are 1-based; the response seed is
    base_seed + index * 10**6, which never collides with the curve
    generator stream at base_seed.
    """
    try:
        ds = generate_responses(
            curves, y_values, base_seed + index * 1_000_000, n_responses=n_responses
        )
        ev = evaluate_selection(ds, alpha_ref, grid, model=model)
        heur, orac = ev.heuristic, ev.oracle
        pair_h = (heur.h_selected, heur.k_selected)
        pair_o = (orac.h_selected, orac.k_selected)
        truth: dict[float, np.ndarray] = {}
        est_h: dict[float, np.ndarray] = {}
        est_o: dict[float, np.ndarray] = {}
        err_h: dict[float, float] = {}
        err_o: dict[float, float] = {}
        for alpha in alphas:
            truth[alpha] = np.array([model.quantile(alpha, t) for t in curves])
            est_h[alpha] = np.array(
                [q2(s, alpha, pair_h[1], ZIPF).value for s in ev.slices[pair_h[0]]]
            )
            est_o[alpha] = np.array(
                [q2(s, alpha, pair_o[1], ZIPF).value for s in ev.slices[pair_o[0]]]
            )
            err_h[alpha] = dist_over_design(est_h[alpha], truth[alpha])
            err_o[alpha] = dist_over_design(est_o[alpha], truth[alpha])
        return ReplicationReport(
            index=index,
            pair_heuristic=pair_h,
            pair_oracle=pair_o,
            criterion_heuristic=heur.criterion,
            criterion_oracle=orac.criterion,
            hill_error_at_heuristic_pair=orac.cell(*pair_h).criterion,
            truth=truth,
            estimates_heuristic=est_h,
            estimates_oracle=est_o,
            error_heuristic=err_h,
            error_oracle=err_o,
        )
    except CurveTailError as exc:
        return AbortedReplication(index, f"{type(exc).__name__}: {exc}")


@dataclass
class StudySummary:
    alphas: tuple[float, ...]
    curve_ids: list[str]
    gammas: np.ndarray
    energies: np.ndarray
    ci_low: dict[float, np.ndarray]
    ci_high: dict[float, np.ndarray]
    hist_edges: np.ndarray
    hist_counts: dict[str, np.ndarray]
    median_replication: dict[float, int]
    mean_error: dict[tuple[str, float], float]
    p95_error: dict[tuple[str, float], float]
    aborted: list[AbortedReplication]


@dataclass
class StudyResult:
    config: ExperimentConfig
    curves: list[Curve]
    y_values: tuple[float, ...]
    grid: SelectionGrid
    model: ShiftedScaledModel
    reports: list[ReplicationReport]
    summary: StudySummary


def _default_k_values(curves: Sequence[Curve], h_min: float, n_responses: int) -> tuple[int, ...]:
    # cap at half the smallest window obtainable on the grid
    h_sq = h_min * h_min
    counts = [
        sum(1 for other in curves if semi_metric_sq(other, t) <= h_sq) for t in curves
    ]
    m_min = min(counts) * n_responses
    ks = tuple(range(5, m_min // 2 + 1, 5))
    if not ks:
        raise ConfigError(
            f"default k grid is empty for minimal window size {m_min}; pass k_values"
        )
    return ks


def _summarize(
    alphas: tuple[float, ...],
    curves: Sequence[Curve],
    model: ConditionalModel,
    reports: list[ReplicationReport],
    aborted: list[AbortedReplication],
) -> StudySummary:
    gammas = np.array([model.gamma(c) for c in curves])
    energies = np.array([c.energy for c in curves])
    ci_low: dict[float, np.ndarray] = {}
    ci_high: dict[float, np.ndarray] = {}
    median_rep: dict[float, int] = {}
    mean_error: dict[tuple[str, float], float] = {}
    p95_error: dict[tuple[str, float], float] = {}
    pooled = {"heuristic": [], "oracle": []}
    for alpha in alphas:
        errs_h = np.array([r.error_heuristic[alpha] for r in reports])
        errs_o = np.array([r.error_oracle[alpha] for r in reports])
        pooled["heuristic"].append(errs_h)
        pooled["oracle"].append(errs_o)
        mean_error[("heuristic", alpha)] = float(errs_h.mean())
        mean_error[("oracle", alpha)] = float(errs_o.mean())
        p95_error[("heuristic", alpha)] = empirical_quantile(np.sort(errs_h), 0.95)
        p95_error[("oracle", alpha)] = empirical_quantile(np.sort(errs_o), 0.95)
        order = np.argsort(errs_h, kind="stable")
        median_rep[alpha] = reports[int(order[(len(reports) - 1) // 2])].index
        ests = np.stack([r.estimates_heuristic[alpha] for r in reports])  # (N, n_curves)
        low = np.empty(len(curves))
        high = np.empty(len(curves))
        for j in range(len(curves)):
            sorted_vals = np.sort(ests[:, j])
            low[j] = empirical_quantile(sorted_vals, 0.05)
            high[j] = empirical_quantile(sorted_vals, 0.95)
        ci_low[alpha] = low
        ci_high[alpha] = high
    pooled = {mode: np.concatenate(vals) for mode, vals in pooled.items()}
    top = max(float(v.max()) for v in pooled.values())
    edges = np.linspace(0.0, top if top > 0 else 1.0, 21)
    counts = {mode: np.histogram(vals, bins=edges)[0] for mode, vals in pooled.items()}
    return StudySummary(
        alphas=alphas,
        curve_ids=[c.identifier for c in curves],
        gammas=gammas,
        energies=energies,
        ci_low=ci_low,
        ci_high=ci_high,
        hist_edges=edges,
        hist_counts=counts,
        median_replication=median_rep,
        mean_error=mean_error,
        p95_error=p95_error,
        aborted=aborted,
    )


def run_study(cfg: ExperimentConfig) -> StudyResult:
    """Run the full replication study described by ``cfg``.

    Curves are generated once from the base seed and reused across
    replications; only the responses are redrawn.  Selection runs at the
    largest target order and the chosen pairs are reused for every order,
    so the selected hyperparameters do not depend on the target order.
    Replications are independent and may run on parallel workers; reports
    are reduced in replication order, making the result worker-count
    invariant.
    """
    curves = generate_curves(cfg.grid_length, cfg.n_curves, cfg.base_seed)
    y_values = cfg.y_values if cfg.y_values is not None else default_y_values(cfg.n_curves)
    model = build_generative_model(curves, y_values)
    h_values = pairwise_distance_grid(curves, cfg.h_quantile_levels)
    k_values = cfg.k_values
    if k_values is None:
        k_values = _default_k_values(curves, h_values[0], cfg.n_responses)
    grid = SelectionGrid(h_values, k_values)
    alpha_ref = max(cfg.alphas)

    indices = range(1, cfg.replications + 1)
    args = (curves, y_values, cfg.n_responses, cfg.base_seed, grid, model,
            cfg.alphas, alpha_ref)
    if cfg.jobs > 1:
        outcomes = Parallel(n_jobs=cfg.jobs)(
            delayed(_run_replication)(i, *args) for i in indices
        )
    else:
        outcomes = [_run_replication(i, *args) for i in indices]

    reports = [o for o in outcomes if isinstance(o, ReplicationReport)]
    aborted = [o for o in outcomes if isinstance(o, AbortedReplication)]
    if len(aborted) > 0.1 * cfg.replications:
        first = aborted[0]
        raise StudyError(
            f"{len(aborted)} of {cfg.replications} replications aborted "
            f"(first: #{first.index} {first.reason})"
        )
    summary = _summarize(cfg.alphas, curves, model, reports, aborted)
    return StudyResult(
        config=cfg, curves=curves, y_values=tuple(y_values), grid=grid,
        model=model, reports=reports, summary=summary,
    )


# ---------------------------------------------------------------------------
# CSV output


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _write_rows(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_study_csvs(result: StudyResult, outdir) -> dict[str, Path]:
    """Write the study artifacts (floats at 12 significant digits).

    ``replications.csv`` has one row per replication x curve x order;
    ``summary_ci.csv`` holds the per-curve 90% intervals ordered by
    ascending tail index; ``errors_hist.csv`` the per-mode error histogram;
    ``median_replication.csv`` the estimates of the median-error
    replication against the truth, keyed by curve energy.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = result.summary
    ids = summary.curve_ids
    paths: dict[str, Path] = {}

    rows = []
    for rep in result.reports:
        for j, cid in enumerate(ids):
            for alpha in summary.alphas:
                rows.append([
                    rep.index, cid, alpha, summary.gammas[j],
                    float(rep.truth[alpha][j]),
                    float(rep.estimates_heuristic[alpha][j]),
                    float(rep.estimates_oracle[alpha][j]),
                    rep.pair_heuristic[0], rep.pair_heuristic[1],
                    rep.pair_oracle[0], rep.pair_oracle[1],
                    rep.error_heuristic[alpha], rep.error_oracle[alpha],
                ])
    paths["replications"] = outdir / "replications.csv"
    _write_rows(paths["replications"], [
        "replication", "curve", "alpha", "gamma", "truth",
        "estimate_heuristic", "estimate_oracle",
        "h_heuristic", "k_heuristic", "h_oracle", "k_oracle",
        "error_heuristic", "error_oracle",
    ], rows)

    order = np.argsort(summary.gammas, kind="stable")
    rows = []
    for j in order:
        for alpha in summary.alphas:
            rows.append([
                ids[j], float(summary.gammas[j]), alpha,
                float(summary.ci_low[alpha][j]), float(summary.ci_high[alpha][j]),
            ])
    paths["summary_ci"] = outdir / "summary_ci.csv"
    _write_rows(paths["summary_ci"], ["curve", "gamma", "alpha", "ci_low", "ci_high"], rows)

    rows = []
    for mode in ("heuristic", "oracle"):
        counts = summary.hist_counts[mode]
        for b in range(len(counts)):
            rows.append([
                mode, float(summary.hist_edges[b]), float(summary.hist_edges[b + 1]),
                int(counts[b]),
            ])
    paths["errors_hist"] = outdir / "errors_hist.csv"
    _write_rows(paths["errors_hist"], ["mode", "bin_low", "bin_high", "count"], rows)

    by_index = {rep.index: rep for rep in result.reports}
    rows = []
    for alpha in summary.alphas:
        rep = by_index[summary.median_replication[alpha]]
        for j in np.argsort(summary.energies, kind="stable"):
            rows.append([
                alpha, ids[j], float(summary.energies[j]),
                float(rep.truth[alpha][j]),
                float(rep.estimates_heuristic[alpha][j]),
                float(rep.estimates_oracle[alpha][j]),
            ])
    paths["median_replication"] = outdir / "median_replication.csv"
    _write_rows(paths["median_replication"],
                ["alpha", "curve", "energy", "truth", "heuristic", "oracle"], rows)
    return paths


# ---------------------------------------------------------------------------
# Monte Carlo validation of the asymptotic claims


@dataclass(frozen=True)
class ValidationRow:
    """One validated claim: measured statistic against its target and bound."""

    claim: str
    m: int
    statistic: float
    target: float
    tolerance: float
    passed: bool


def _band_row(claim: str, m: int, stat: float, target: float, tol: float) -> ValidationRow:
    return ValidationRow(claim, m, float(stat), float(target), float(tol),
                         bool(abs(stat - target) <= tol))


def _upper_row(claim: str, m: int, stat: float, bound: float, strict: bool = False) -> ValidationRow:
    ok = stat < bound if strict else stat <= bound
    return ValidationRow(claim, m, float(stat), float(bound), float(bound), bool(ok))


def _lower_row(claim: str, m: int, stat: float, bound: float) -> ValidationRow:
    return ValidationRow(claim, m, float(stat), float(bound), float(bound),
                         bool(stat >= bound))


def _point_model(family: str, gamma: float, rho: float = -1.0):
    x = Curve((0.0, 0.0, 0.0), identifier="t0")
    gamma_map = ConstantMap(gamma)
    if family == "pareto":
        return ParetoModel(gamma_map), x
    if family == "frechet":
        return FrechetModel(gamma_map), x
    if family == "burr":
        return BurrModel(gamma_map, ConstantMap(rho)), x
    raise ConfigError(f"unknown family {family!r}")


# stream offsets so every suite draws from its own substream of the seed
_OFF_WITHIN, _OFF_MAX, _OFF_EXTRAP, _OFF_BOUNDARY, _OFF_TAIL = 11, 12, 13, 14, 15


def within_sample_normality_suite(
    seed, family: str = "pareto", gamma: float = 0.5, m: int = 10_000,
    alpha: float = 0.01, replications: int = 2000, tolerance_scale: float = 1.0,
    rho: float = -1.0,
) -> list[ValidationRow]:
    """Interior regime: sqrt(m*alpha)*(q1/q - 1) is centered with spread gamma."""
    model, x = _point_model(family, gamma, rho)
    truth = model.quantile(alpha, x)
    scale = math.sqrt(m * alpha)
    stats = np.empty(replications)
    for r in range(replications):
        slc = Slice.from_members(model.sample(x, m, (seed, _OFF_WITHIN, r)), target="t0")
        stats[r] = scale * (q1(slc, alpha).value / truth - 1.0)
    ts = tolerance_scale
    return [
        _band_row("within-sample-clt-mean", m, stats.mean(), 0.0, 0.05 * ts),
        _band_row("within-sample-clt-sd", m, stats.std(ddof=1), gamma, 0.1 * gamma * ts),
    ]


def sample_maximum_position_suite(
    seed, family: str = "pareto", gamma: float = 0.5, m: int = 10_000,
    c_values: tuple[float, ...] = (0.5, 2.0),
    tolerances: tuple[float, ...] = (0.02, 0.01),
    replications: int = 10_000, tolerance_scale: float = 1.0,
    rho: float = -1.0,
) -> list[ValidationRow]:
    """P(sample max < q(c/m)) approaches exp(-c) at and beyond the boundary."""
    model, x = _point_model(family, gamma, rho)
    rows = []
    for idx, (c, tol) in enumerate(zip(c_values, tolerances)):
        alpha = c / m
        truth = model.quantile(alpha, x)
        rng = np.random.default_rng((seed, _OFF_MAX, idx))
        below = 0
        done = 0
        while done < replications:
            take = min(200, replications - done)
            u = rng.random((take, m))
            u[u == 0.0] = np.finfo(float).tiny
            draws = model.quantile(u, x)
            below += int(np.sum(draws.max(axis=1) < truth))
            done += take
        rows.append(_band_row(
            f"max-undershoot-probability-c={c:g}", m, below / replications,
            math.exp(-c), tol * tolerance_scale,
        ))
    return rows


def extrapolation_normality_suite(
    seed, family: str = "pareto", gamma: float = 0.5, m: int = 10_000,
    k: int = 100, alpha: float = 1e-5, replications: int = 2000,
    tolerance_scale: float = 1.0, rho: float = -1.0,
) -> list[ValidationRow]:
    """Beyond the sample: the normalized extrapolation error has spread
    gamma * sqrt(AV) for each weighting, so the log-weight variant carries
    twice the variance of the constant-weight one.

    The nominal rows use the ratio statistic factor * (q2/q - 1).  At the
    default parameters the extrapolation exponent is large enough that the
    exponential curvature visibly inflates the spread of the log-weight
    ratio statistic, so the companion log-scale rows (suffix ``-log``),
    which measure factor * log(q2/q), are reported alongside; they converge
    at much smaller sample sizes.
    """
    model, x = _point_model(family, gamma, rho)
    truth = model.quantile(alpha, x)
    factor = math.sqrt(k) / math.log(k / (m * alpha))
    stats_h = np.empty(replications)
    stats_z = np.empty(replications)
    logs_h = np.empty(replications)
    logs_z = np.empty(replications)
    for r in range(replications):
        slc = Slice.from_members(model.sample(x, m, (seed, _OFF_EXTRAP, r)), target="t0")
        vh = q2(slc, alpha, k, HILL).value
        vz = q2(slc, alpha, k, ZIPF).value
        stats_h[r] = factor * (vh / truth - 1.0)
        stats_z[r] = factor * (vz / truth - 1.0)
        logs_h[r] = factor * math.log(vh / truth)
        logs_z[r] = factor * math.log(vz / truth)
    ts = tolerance_scale
    target_h = gamma * math.sqrt(av_factor(HILL))
    target_z = gamma * math.sqrt(av_factor(ZIPF))
    ratio = float(stats_z.var(ddof=1) / stats_h.var(ddof=1))
    log_ratio = float(logs_z.var(ddof=1) / logs_h.var(ddof=1))
    return [
        _band_row("extrapolated-clt-sd-hill", m, stats_h.std(ddof=1), target_h, 0.15 * target_h * ts),
        _band_row("extrapolated-clt-sd-zipf", m, stats_z.std(ddof=1), target_z, 0.15 * target_z * ts),
        _band_row("zipf-hill-variance-ratio", m, ratio, 2.0, 0.4 * ts),
        _band_row("extrapolated-clt-sd-hill-log", m, logs_h.std(ddof=1), target_h, 0.15 * target_h * ts),
        _band_row("extrapolated-clt-sd-zipf-log", m, logs_z.std(ddof=1), target_z, 0.15 * target_z * ts),
        _band_row("zipf-hill-variance-ratio-log", m, log_ratio, 2.0, 0.4 * ts),
    ]


def boundary_consistency_suite(
    seed, family: str = "pareto", gamma: float = 0.5, c: float = 2.0,
    m_values: tuple[int, ...] = (1_000, 10_000, 100_000),
    replications: int = 1000, tolerance_scale: float = 1.0,
    rho: float = -1.0,
) -> list[ValidationRow]:
    """With m*alpha pinned at c, the within-sample ratio keeps a spread
    bounded away from zero while the extrapolated error shrinks with m."""
    model, x = _point_model(family, gamma, rho)
    rows = []
    prev_mean = math.inf
    for mi, m in enumerate(m_values):
        alpha = c / m
        k = int(m ** 0.6)
        truth = model.quantile(alpha, x)
        e1 = np.empty(replications)
        e2 = np.empty(replications)
        for r in range(replications):
            slc = Slice.from_members(model.sample(x, m, (seed, _OFF_BOUNDARY, mi, r)))
            e1[r] = q1(slc, alpha).value / truth - 1.0
            e2[r] = q2(slc, alpha, k, HILL).value / truth - 1.0
        rows.append(_lower_row("within-sample-ratio-sd", m, e1.std(ddof=1),
                               0.1 / tolerance_scale))
        mean_abs = float(np.abs(e2).mean())
        rows.append(_upper_row("extrapolated-mean-abs-error", m, mean_abs,
                               prev_mean * tolerance_scale, strict=True))
        prev_mean = mean_abs
    return rows


def tail_estimator_suite(
    seed, family: str = "pareto", gamma: float = 0.5, m: int = 10_000,
    k: int | None = None, replications: int = 500, tolerance_scale: float = 1.0,
    rho: float = -1.0,
) -> list[ValidationRow]:
    """Tail-index estimates concentrate at gamma with scaled variance
    gamma**2 * AV per weighting."""
    model, x = _point_model(family, gamma, rho)
    if k is None:
        k = int(m ** 0.6)
    gh = np.empty(replications)
    gz = np.empty(replications)
    for r in range(replications):
        slc = Slice.from_members(model.sample(x, m, (seed, _OFF_TAIL, r)))
        gh[r] = tail_index(slc, k, HILL).gamma_hat
        gz[r] = tail_index(slc, k, ZIPF).gamma_hat
    ts = tolerance_scale
    var_h = float(k * np.var(gh - gamma, ddof=1))
    var_z = float(k * np.var(gz - gamma, ddof=1))
    g2 = gamma * gamma
    return [
        _upper_row("tail-mean-abs-error", m, float(np.abs(gh - gamma).mean()), 0.03 * ts),
        _band_row("tail-scaled-variance-hill", m, var_h, g2 * av_factor(HILL),
                  0.15 * g2 * av_factor(HILL) * ts),
        _band_row("tail-scaled-variance-zipf", m, var_z, g2 * av_factor(ZIPF),
                  0.15 * g2 * av_factor(ZIPF) * ts),
        _band_row("tail-variance-ratio", m, var_z / var_h, 2.0, 0.4 * ts),
    ]


SUITES: dict[str, Callable[..., list[ValidationRow]]] = {
    "within-sample-normality": within_sample_normality_suite,
    "sample-maximum-position": sample_maximum_position_suite,
    "extrapolation-normality": extrapolation_normality_suite,
    "boundary-consistency": boundary_consistency_suite,
    "tail-estimator": tail_estimator_suite,
}


def run_asymptotic_suite(
    suites: Sequence[str] | None = None,
    seed: int = 1729,
    tolerance_scale: float = 1.0,
    family: str = "pareto",
    gamma: float = 0.5,
    rho: float = -1.0,
) -> list[ValidationRow]:
    """Run the requested Monte Carlo suites serially and in a fixed order.

    Each suite draws from its own substream of ``seed``, so results do not
    depend on which other suites run or on any worker count.  The nominal
    tolerances are calibrated for the defaults (pure power-law tail,
    gamma = 0.5); other families carry second-order bias and may need a
    looser ``tolerance_scale``.
    """
    names = list(SUITES) if suites is None else list(suites)
    if not names:
        raise ConfigError("no validation suite selected")
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown validation suites: {unknown}; known: {sorted(SUITES)}")
    rows: list[ValidationRow] = []
    for name in names:
        rows.extend(SUITES[name](seed=seed, tolerance_scale=tolerance_scale,
                                 family=family, gamma=gamma, rho=rho))
    return rows


def write_validation_csv(rows: Sequence[ValidationRow], path) -> Path:
    """Write the pass/fail table for the Monte Carlo claims."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _write_rows(path, ["claim", "m", "statistic", "target", "tolerance", "pass"],
                [[r.claim, r.m, r.statistic, r.target, r.tolerance,
                  str(r.passed).lower()] for r in rows])
    return path

"""
Deterministic grid scans and successive grid-shrink refinement.

Objectives are vectorized by default: they receive an ``(n, d)`` array of
points and return ``n`` values. If a vectorized call raises, the batch is
re-evaluated point by point so that only the offending points are excluded.
Ties are broken toward the first point in row-major order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kaon, neutrino
from .errors import NumericalError, ParameterError
from .lgi import QUANTUM_BOUND
from .params import KaonParams, NeutrinoParams, TimeQuad

__all__ = [
    "ScanDomain",
    "ScanTable",
    "MaxResult",
    "EqualSpacingReport",
    "CpEnhancement",
    "grid_scan",
    "refine_max",
    "maximize",
    "kaon_domain",
    "neutrino_domain",
    "kaon_objective",
    "neutrino_objective",
    "kaon_max",
    "neutrino_max",
    "equal_spacing_optimality",
    "cp_enhancement",
    "DEFAULT_SEED",
]

log = logging.getLogger(__name__)

DEFAULT_SEED = 20130731
SHRINK = 0.2
POINTS_PER_DIM = 11
_EXCLUDABLE = (ArithmeticError, ValueError)


@dataclass(frozen=True)
class ScanDomain:
    """Axis-aligned box sampled by ``steps`` evenly spaced points per dimension."""

    lower: tuple
    upper: tuple
    steps: tuple

    def __post_init__(self):
        lower = tuple(float(x) for x in np.atleast_1d(self.lower))
        upper = tuple(float(x) for x in np.atleast_1d(self.upper))
        steps = tuple(int(n) for n in np.atleast_1d(self.steps))
        if not (len(lower) == len(upper) == len(steps)) or not lower:
            raise ParameterError("lower, upper and steps must have one entry per dimension")
        for lo, hi, n in zip(lower, upper, steps):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ParameterError(f"domain bounds must be finite, got [{lo}, {hi}]")
            if not lo < hi:
                raise ParameterError(f"empty domain: lower {lo} is not below upper {hi}")
            if n < 2:
                raise ParameterError(f"need at least 2 steps per dimension, got {n}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "steps", steps)

    @property
    def ndim(self) -> int:
        return len(self.lower)

    @property
    def spacing(self) -> np.ndarray:
        return (np.array(self.upper) - np.array(self.lower)) / (np.array(self.steps) - 1)

    def axes(self) -> list:
        return [np.linspace(lo, hi, n) for lo, hi, n in zip(self.lower, self.upper, self.steps)]

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class ScanTable:
    """Row-major table of grid points, their values and excluded points."""

    points: np.ndarray
    values: np.ndarray
    shape: tuple
    excluded: list = field(default_factory=list)

    @property
    def argmax(self) -> int:
        return int(np.nanargmax(self.values))

    @property
    def best_point(self) -> np.ndarray:
        return self.points[self.argmax]

    @property
    def best_value(self) -> float:
        return float(self.values[self.argmax])

    def grid(self) -> np.ndarray:
        return self.values.reshape(self.shape)


def _pointwise(objective, points):
    values = np.full(len(points), np.nan)
    excluded = []
    for i, x in enumerate(points):
        try:
            values[i] = float(np.asarray(objective(x[None, :])).reshape(-1)[0])
        except _EXCLUDABLE as exc:
            excluded.append((i, f"{type(exc).__name__}: {exc}"))
    return values, excluded


def _evaluate_batch(objective, points, vectorized):
    if not vectorized:
        values = np.full(len(points), np.nan)
        excluded = []
        for i, x in enumerate(points):
            try:
                values[i] = float(objective(x))
            except _EXCLUDABLE as exc:
                excluded.append((i, f"{type(exc).__name__}: {exc}"))
        return values, excluded
    try:
        values = np.asarray(objective(points), dtype=float).reshape(len(points))
        return values, []
    except _EXCLUDABLE:
        return _pointwise(objective, points)


def _evaluate(objective, points, vectorized=True, workers=1):
    """Values for every point plus (index, reason) pairs for excluded ones."""
    if workers > 1 and len(points) > workers:
        chunks = np.array_split(np.arange(len(points)), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(lambda idx: _evaluate_batch(objective, points[idx], vectorized), chunks)
            )
        values = np.concatenate([p[0] for p in parts])
        excluded = [(int(idx[i]), why) for idx, (_, exc) in zip(chunks, parts) for i, why in exc]
    else:
        values, excluded = _evaluate_batch(objective, points, vectorized)
    bad = ~np.isfinite(values)
    already = {i for i, _ in excluded}
    for i in np.flatnonzero(bad):
        if int(i) not in already:
            excluded.append((int(i), "non-finite value"))
    values[bad] = np.nan
    excluded.sort()
    return values, excluded


def grid_scan(objective: Callable, domain: ScanDomain, *, vectorized=True, workers=1) -> ScanTable:
    points = domain.points()
    values, excluded = _evaluate(objective, points, vectorized, workers)
    if excluded:
        log.info("grid scan excluded %d of %d points", len(excluded), len(points))
    if len(excluded) == len(points):
        raise NumericalError(f"all {len(points)} grid points were excluded: {excluded[0][1]}")
    return ScanTable(points=points, values=values, shape=domain.steps, excluded=excluded)


@dataclass(frozen=True)
class MaxResult:
    x: tuple
    value: float
    resolution: tuple
    evaluations: int
    at_boundary: bool
    iterations: int = 0
    history: tuple = ()


def _fit_box(lo, hi, bounds):
    if bounds is None:
        return lo, hi
    lower, upper = bounds
    width = np.minimum(hi - lo, upper - lower)
    lo = np.clip(lo, lower, upper - width)
    return lo, lo + width


def refine_max(
    objective: Callable,
    seed,
    tolerance: float,
    *,
    width=None,
    bounds=None,
    shrink: float = SHRINK,
    points: int = POINTS_PER_DIM,
    vectorized: bool = True,
    workers: int = 1,
) -> MaxResult:
    """
    Successive grid-shrink maximization around ``seed``.

    Each iteration lays a ``points``-per-dimension grid over a box centred on
    the incumbent, keeps the incumbent unless a strictly larger value is
    found, then shrinks the box by ``shrink``. Stops once the box diameter
    drops below ``tolerance``.

    Parameters
    ----------
    width : float or array, optional
        Initial box side lengths; defaults to a tenth of ``bounds``.
    bounds : (lower, upper), optional
        Hard limits; boxes are shifted to stay inside them.
    """
    x = np.atleast_1d(np.asarray(seed, dtype=float)).copy()
    if bounds is not None:
        bounds = (np.atleast_1d(np.asarray(bounds[0], float)), np.atleast_1d(np.asarray(bounds[1], float)))
        if np.any(x < bounds[0]) or np.any(x > bounds[1]):
            raise ParameterError(f"seed {x} lies outside the bounds")
    if width is None:
        if bounds is None:
            raise ParameterError("refine_max needs either width or bounds")
        width = 0.1 * (bounds[1] - bounds[0])
    width = np.broadcast_to(np.asarray(width, dtype=float), x.shape).copy()
    if not tolerance > 0:
        raise ParameterError("tolerance must be positive")

    values, excluded = _evaluate(objective, x[None, :], vectorized)
    best = values[0]
    if excluded or not math.isfinite(best):
        raise NumericalError(f"objective is not finite at the seed {x}")
    evaluations = 1
    history = [best]
    step = width / (points - 1)
    while np.linalg.norm(width) >= tolerance:
        lo, hi = _fit_box(x - 0.5 * width, x + 0.5 * width, bounds)
        axes = [np.linspace(a, b, points) for a, b in zip(lo, hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        grid = np.stack([m.ravel() for m in mesh], axis=1)
        vals, _ = _evaluate(objective, grid, vectorized, workers)
        evaluations += len(grid)
        if np.any(np.isfinite(vals)):
            i = int(np.nanargmax(vals))
            if vals[i] > best:
                best = float(vals[i])
                x = grid[i].copy()
        history.append(best)
        step = (hi - lo) / (points - 1)
        width = width * shrink

    at_boundary = False
    if bounds is not None:
        at_boundary = bool(np.any(x - bounds[0] <= step) or np.any(bounds[1] - x <= step))
    return MaxResult(
        x=tuple(float(v) for v in x),
        value=float(best),
        resolution=tuple(float(s) for s in step),
        evaluations=evaluations,
        at_boundary=at_boundary,
        iterations=len(history) - 1,
        history=tuple(float(h) for h in history),
    )


def maximize(objective, domain: ScanDomain, tolerance: float, *, vectorized=True, workers=1):
    """Coarse grid scan followed by refinement around the best grid point."""
    table = grid_scan(objective, domain, vectorized=vectorized, workers=workers)
    result = refine_max(
        objective,
        table.best_point,
        tolerance,
        width=2.0 * domain.spacing,
        bounds=(np.array(domain.lower), np.array(domain.upper)),
        vectorized=vectorized,
        workers=workers,
    )
    return MaxResult(
        x=result.x,
        value=result.value,
        resolution=result.resolution,
        evaluations=result.evaluations + len(table.points),
        at_boundary=result.at_boundary,
        iterations=result.iterations,
        history=(table.best_value,) + result.history[1:],
    )


# -- physics objectives -----------------------------------------------------


def kaon_domain(steps: int = 400, t1_max: float = 10.0, dt_min: float | None = None, dt_max: float = 10.0):
    """(t1, dt) box in tau_S; dt starts one step above zero by default."""
    if dt_min is None:
        dt_min = dt_max / steps
    return ScanDomain((0.0, dt_min), (t1_max, dt_max), (steps, steps))


def neutrino_domain(steps: int = 20001, loe_min: float = 0.0, loe_max: float = 100.0):
    return ScanDomain((loe_min,), (loe_max,), (steps,))


def kaon_objective(params: KaonParams):
    def objective(points):
        return kaon.lgi_c_equal_spacing(params, points[:, 0], points[:, 1]).c

    return objective


def neutrino_objective(params: NeutrinoParams):
    def objective(points):
        return neutrino.lgi_c(params, points[:, 0]).c_value

    return objective


def kaon_max(params: KaonParams, domain: ScanDomain | None = None, tolerance: float = 1e-6, workers=1):
    """Maximum of equal-spacing C over (t1, dt)."""
    return maximize(kaon_objective(params), domain or kaon_domain(), tolerance, workers=workers)


def neutrino_max(params: NeutrinoParams, domain: ScanDomain | None = None, tolerance: float = 1e-9):
    return maximize(neutrino_objective(params), domain or neutrino_domain(), tolerance)


@dataclass(frozen=True)
class CpEnhancement:
    max_on: MaxResult
    max_off: MaxResult

    @property
    def difference(self) -> float:
        return self.max_on.value - self.max_off.value


def cp_enhancement(
    params_on: KaonParams,
    params_off: KaonParams,
    domain: ScanDomain | None = None,
    tolerance: float = 1e-6,
) -> CpEnhancement:
    """Refined max C with CP violation minus refined max C without it."""
    same = ("tau_s", "tau_l", "delta_m")
    if any(getattr(params_on, k) != getattr(params_off, k) for k in same) or params_off.cp_enabled:
        raise ParameterError("cp_enhancement needs parameter sets differing only in the CP switch")
    if tolerance > 1e-6:
        raise ParameterError("CP enhancement needs tolerance <= 1e-6")
    return CpEnhancement(
        max_on=kaon_max(params_on, domain, tolerance),
        max_off=kaon_max(params_off, domain, tolerance),
    )


# -- equal-spacing optimality ------------------------------------------------


@dataclass(frozen=True)
class EqualSpacingReport:
    """
    Unconstrained-quad maximum against the equal-spacing maximum.

    ``general_point`` and ``equal_point`` are TimeQuads. ``gap`` is
    general_max - equal_max; positive values mean some unequal spacing won.
    """

    system: str
    trials: int
    seed: int
    sampled_max: float
    general_max: float
    general_point: TimeQuad
    equal_max: float
    equal_point: TimeQuad
    degenerate_samples: int
    degenerate_c_values: tuple
    bound_ok: bool

    @property
    def gap(self) -> float:
        return self.general_max - self.equal_max


def _quad_objective(params):
    model = kaon if isinstance(params, KaonParams) else neutrino

    def objective(points):
        return model.lgi_c_gaps(params, points[:, 0], points[:, 1], points[:, 2], points[:, 3]).c

    return objective


def equal_spacing_optimality(
    params,
    domain: ScanDomain | None = None,
    trials: int = 1000,
    seed: int = DEFAULT_SEED,
    tolerance: float = 1e-6,
    degenerate: int = 10,
) -> EqualSpacingReport:
    """
    Compare C over seeded random general quads (plus a refined general-quad
    maximum) with the refined equal-spacing maximum.

    For kaons ``domain`` is the (t1, dt) box and every gap is drawn from
    [0, dt_max]. For neutrinos it is the 1-D L/E box for the gap.
    """
    if trials < 1000:
        raise ParameterError(f"need at least 1000 trials, got {trials}")
    is_kaon = isinstance(params, KaonParams)
    if is_kaon:
        domain = domain or kaon_domain()
        equal = kaon_max(params, domain, tolerance)
        t1_lo, t1_hi = domain.lower[0], domain.upper[0]
        g_hi = domain.upper[1]
        equal_quad = TimeQuad.equal_spacing(equal.x[0], equal.x[1])
        base_width = np.array([domain.spacing[0], *[domain.spacing[1]] * 3])
    else:
        domain = domain or neutrino_domain()
        equal = neutrino_max(params, domain, min(tolerance, 1e-9))
        t1_lo, t1_hi = 0.0, domain.upper[0]
        g_hi = domain.upper[0]
        equal_quad = TimeQuad.equal_spacing(0.0, equal.x[0])
        base_width = np.array([domain.spacing[0]] * 4)

    rng = np.random.default_rng(seed)
    samples = np.column_stack(
        [rng.uniform(t1_lo, t1_hi, trials), rng.uniform(0.0, g_hi, (trials, 3))]
    )
    samples[:degenerate, 1:] = 0.0
    objective = _quad_objective(params)
    values, _ = _evaluate(objective, samples)
    sampled_max = float(np.nanmax(values))

    bounds = (np.array([t1_lo, 0.0, 0.0, 0.0]), np.array([t1_hi, g_hi, g_hi, g_hi]))
    seeds = [samples[int(np.nanargmax(values))], np.array([equal_quad.t1, *equal_quad.gaps])]
    refined = [
        refine_max(objective, s, tolerance, width=8.0 * base_width, bounds=bounds) for s in seeds
    ]
    best = max(refined, key=lambda r: r.value)
    general_max = max(best.value, sampled_max)
    if best.value >= sampled_max:
        general_point = TimeQuad.from_gaps(*best.x)
    else:
        general_point = TimeQuad.from_gaps(*samples[int(np.nanargmax(values))])
    bound_ok = bool(np.nanmax(values) <= QUANTUM_BOUND + 1e-9 and general_max <= QUANTUM_BOUND + 1e-9)
    return EqualSpacingReport(
        system="kaon" if is_kaon else "neutrino",
        trials=trials,
        seed=seed,
        sampled_max=sampled_max,
        general_max=general_max,
        general_point=general_point,
        equal_max=equal.value,
        equal_point=equal_quad,
        degenerate_samples=degenerate,
        degenerate_c_values=tuple(float(v) for v in values[:degenerate]),
        bound_ok=bound_ok,
    )

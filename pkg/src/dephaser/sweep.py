"""Parameter sweeps over temperature and dot separation, plus scaling fits.

The sweep engine reproduces the two panels of the rate-versus-parameter
study: gamma(T) at fixed geometry and gamma(D) at fixed temperature. Fits
extract the limiting scaling exponents: the low-temperature power law, the
quadratic small-separation growth, and the logarithmic large-separation
growth. Fit windows are explicit inputs; no regime auto-detection.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .model import GAAS, DotGeometry, MaterialParams, ThermalEnv
from .quadrature import NonConvergence
from .rates import (
    METHOD_CLOSED,
    METHOD_DOUBLE,
    METHOD_MC,
    RateResult,
    rate_closed_form,
    rate_double_integral,
    rate_monte_carlo,
)
from .runtime import fmt_float, worker_count

AXIS_TEMPERATURE = "temperature"
AXIS_DISTANCE = "distance"

_METHODS = (METHOD_CLOSED, METHOD_DOUBLE, METHOD_MC)

SWEEP_CSV_HEADER = ("axis", "axis_value", "gamma_per_s", "t2_s", "method",
                    "error_estimate")


@dataclass(frozen=True)
class SweepSpec:
    """One-axis sweep description.

    axis "temperature" varies T_K with fixed separation fixed_D_m; axis
    "distance" varies the separation with fixed fixed_T_K. Values are SI
    (kelvin and meters).
    """

    axis: str
    min_value: float
    max_value: float
    points: int
    spacing: str = "logarithmic"
    method: str = METHOD_CLOSED
    material: MaterialParams = GAAS
    width_L_m: float = 4e-9
    fixed_D_m: Optional[float] = None
    fixed_T_K: Optional[float] = None
    samples: int = 10**7
    seed: int = 12345

    def __post_init__(self):
        if self.axis not in (AXIS_TEMPERATURE, AXIS_DISTANCE):
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        if self.spacing not in ("linear", "logarithmic"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.method not in _METHODS:
            raise ValueError(f"unknown rate method {self.method!r}")
        if self.points < 2:
            raise ValueError("points must be >= 2")
        if not (math.isfinite(self.min_value) and math.isfinite(self.max_value)):
            raise ValueError("sweep bounds must be finite")
        if not self.min_value < self.max_value:
            raise ValueError("min_value must be < max_value")
        if self.min_value < 0.0:
            raise ValueError("sweep values must be >= 0")
        if self.spacing == "logarithmic" and self.min_value <= 0.0:
            raise ValueError("logarithmic spacing requires min_value > 0")
        if not math.isfinite(self.width_L_m) or self.width_L_m <= 0.0:
            raise ValueError("width_L_m must be positive")
        if self.axis == AXIS_TEMPERATURE:
            if self.fixed_D_m is None or self.fixed_D_m < 0.0:
                raise ValueError("temperature axis requires fixed_D_m >= 0")
        else:
            if self.fixed_T_K is None or self.fixed_T_K < 0.0:
                raise ValueError("distance axis requires fixed_T_K >= 0")

    def grid(self) -> np.ndarray:
        """The exact axis grid; reproducible to the last bit."""
        i = np.arange(self.points)
        if self.spacing == "logarithmic":
            return self.min_value * (self.max_value / self.min_value) ** (
                i / (self.points - 1))
        return self.min_value + (self.max_value - self.min_value) * (
            i / (self.points - 1))


@dataclass(frozen=True)
class SweepPoint:
    """One grid point: either a rate result or a recorded failure."""

    axis_value: float
    method: str
    result: Optional[RateResult] = None
    error: Optional[str] = None


def _dispatch(method: str, material: MaterialParams, geom: DotGeometry,
              env: ThermalEnv, samples: int, seed: int) -> RateResult:
    if method == METHOD_CLOSED:
        return rate_closed_form(material, geom, env)
    if method == METHOD_DOUBLE:
        return rate_double_integral(material, geom, env)
    return rate_monte_carlo(material, geom, env, samples=samples, seed=seed)


def run_sweep(spec: SweepSpec) -> list:
    """Evaluate the rate on the sweep grid, one SweepPoint per grid value.

    Points evaluate concurrently (DEPHASER_THREADS workers) but the output
    order always matches the grid and every value is independent of the
    worker count. A point that fails to converge is recorded in place with
    its error message; the sweep continues.
    """

    def one(value: float) -> SweepPoint:
        if spec.axis == AXIS_TEMPERATURE:
            geom = DotGeometry(width_L_m=spec.width_L_m,
                               separation_D_m=spec.fixed_D_m)
            env = ThermalEnv(T_K=float(value))
        else:
            geom = DotGeometry(width_L_m=spec.width_L_m,
                               separation_D_m=float(value))
            env = ThermalEnv(T_K=spec.fixed_T_K)
        try:
            result = _dispatch(spec.method, spec.material, geom, env,
                               spec.samples, spec.seed)
        except NonConvergence as exc:
            return SweepPoint(axis_value=float(value), method=spec.method,
                              error=str(exc))
        return SweepPoint(axis_value=float(value), method=spec.method,
                          result=result)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(one, spec.grid()))


def sweep_csv_text(points: Sequence[SweepPoint], axis: str) -> str:
    """Render sweep rows as CSV text (header included, \\n line ends)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for p in points:
        if p.result is not None:
            gamma, t2, err = (p.result.gamma_per_s, p.result.t2_s,
                              p.result.error_estimate_per_s)
        else:
            gamma = t2 = err = math.nan
        writer.writerow([axis, fmt_float(p.axis_value), fmt_float(gamma),
                         fmt_float(t2), p.method, fmt_float(err)])
    return buf.getvalue()


def write_sweep_csv(points: Sequence[SweepPoint], axis: str, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(sweep_csv_text(points, axis))


def read_sweep_csv(path) -> Tuple[str, list]:
    """Parse a sweep CSV back into (axis, [SweepPoint]).

    Rows recorded as failures (nan cells) come back as failure points, so
    write -> read -> write round-trips byte-identically.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != SWEEP_CSV_HEADER:
        raise ValueError(f"{path}: not a sweep CSV (bad header)")
    axis = None
    points = []
    for row in rows[1:]:
        if len(row) != 6:
            raise ValueError(f"{path}: malformed row {row!r}")
        axis = row[0]
        value, gamma, t2, err = (float(row[1]), float(row[2]), float(row[3]),
                                 float(row[5]))
        if math.isnan(gamma):
            points.append(SweepPoint(axis_value=value, method=row[4],
                                     error="recorded failure"))
        else:
            points.append(SweepPoint(
                axis_value=value,
                method=row[4],
                result=RateResult(gamma_per_s=gamma, t2_s=t2, method=row[4],
                                  error_estimate_per_s=err),
            ))
    if axis is None:
        raise ValueError(f"{path}: no data rows")
    return axis, points


@dataclass(frozen=True)
class FitResult:
    """Least-squares line fit on transformed coordinates."""

    slope: float
    intercept: float
    residual_rms: float
    window: Tuple[float, float]


def _fit_window(points, window):
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    xs, ys = [], []
    for x, y in points:
        if lo <= x <= hi:
            xs.append(float(x))
            ys.append(float(y))
    if len(xs) < 3:
        raise ValueError("need at least 3 points inside the fit window")
    x = np.asarray(xs)
    y = np.asarray(ys)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("fit requires positive x and y values")
    return x, y, (lo, hi)


def fit_power_law(points: Sequence[Tuple[float, float]],
                  window: Tuple[float, float]) -> FitResult:
    """Fit y = c x^slope on the points with x inside the window.

    Least squares on (ln x, ln y); the slope is the power-law exponent and
    residual_rms is measured in ln y.
    """
    x, y, win = _fit_window(points, window)
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return FitResult(slope=float(slope), intercept=float(intercept),
                     residual_rms=float(np.sqrt(np.mean(resid**2))),
                     window=win)


def fit_log_law(points: Sequence[Tuple[float, float]],
                window: Tuple[float, float]) -> FitResult:
    """Fit y = slope ln x + intercept; residual_rms is in y units."""
    x, y, win = _fit_window(points, window)
    lx = np.log(x)
    slope, intercept = np.polyfit(lx, y, 1)
    resid = y - (slope * lx + intercept)
    return FitResult(slope=float(slope), intercept=float(intercept),
                     residual_rms=float(np.sqrt(np.mean(resid**2))),
                     window=win)

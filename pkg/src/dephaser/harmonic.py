"""Exact harmonic-reservoir decoherence of a two-level system.

For a purely harmonic reservoir the off-diagonal density-matrix element
never decays exponentially; its modulus follows

    |rho_01(t)| / |rho_01(0)| = exp[-2 Int dw w_th(w) J(w) sin^2(wt/2)/(hbar w)^2]

with the thermal weight w_th(w) = coth(hbar w/(theta k_B T)). For
super-Ohmic reservoirs the exponent saturates and the coherence reaches a
finite plateau (partial dephasing); for Ohmic reservoirs at T > 0 the
exponent grows without bound.

The coth-argument convention constant theta defaults to 1, the form this
implementation reproduces; the more common convention is theta = 2. It is
a parameter so both are available, but every reference value here uses 1.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import CONST
from .coupling import SpectralDensity, spectral_density
from .model import ThermalEnv
from .quadrature import QuadratureConfig, integrate, integrate_semi_infinite
from .runtime import fmt_float, worker_count

_EXP_CFG = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-10)

# Truncating a Gaussian at this many cutoff widths leaves < 1e-30 outside.
_GAUSS_SIGMA = math.sqrt(math.log(1e30))


def _thermal_weight(omega: np.ndarray, env: ThermalEnv, theta: float) -> np.ndarray:
    if env.T_K == 0.0:
        return np.ones_like(omega)
    return 1.0 / np.tanh(CONST.hbar * omega / (theta * CONST.k_B * env.T_K))


def _exponent(sd: SpectralDensity, env: ThermalEnv, t: float, theta: float) -> float:
    """The (positive) decoherence exponent at time t."""

    def integrand(omega: np.ndarray) -> np.ndarray:
        osc = np.sin(0.5 * omega * t) ** 2
        return (
            2.0
            * _thermal_weight(omega, env, theta)
            * spectral_density(sd, omega)
            * osc
            / (CONST.hbar * omega) ** 2
        )

    hint = math.pi / t if t > 0.0 else None
    cfg = QuadratureConfig(
        abs_tol=_EXP_CFG.abs_tol,
        rel_tol=_EXP_CFG.rel_tol,
        max_subdivisions=_EXP_CFG.max_subdivisions,
        panel_hint=hint,
    )
    if sd.form == "tabulated":
        lo = float(sd.table_omega_rad_per_s[0])
        hi = float(sd.table_omega_rad_per_s[-1])
        return integrate(integrand, lo, hi, cfg).value
    if sd.amplitude == 0.0:
        return 0.0
    if sd.form == "power-law-gaussian-cutoff":
        scale = sd.cutoff_rad_per_s
    else:
        scale = sd.cutoff_rad_per_s * _GAUSS_SIGMA
    return integrate_semi_infinite(integrand, 0.0, scale, cfg).value


def coherence_ratio(sd: SpectralDensity, env: ThermalEnv, t: float,
                    theta: float = 1.0) -> float:
    """|rho_01(t)|/|rho_01(0)| for the harmonic reservoir, in (0, 1].

    t = 0 returns exactly 1. The integrand vanishes as w^(n-1) at the
    origin for parametric J, so every finite-time value exists even when
    the long-time limit diverges.
    """
    if not math.isfinite(t) or t < 0.0:
        raise ValueError("t must be finite and >= 0")
    if not math.isfinite(theta) or theta <= 0.0:
        raise ValueError("theta must be positive")
    if t == 0.0:
        return 1.0
    return math.exp(-_exponent(sd, env, t, theta))


def asymptotic_coherence(sd: SpectralDensity, env: ThermalEnv,
                         theta: float = 1.0) -> Optional[float]:
    """Long-time coherence plateau, or None when no finite plateau exists.

    Replaces sin^2(wt/2) by its mean 1/2. The limit is finite for
    parametric exponents n > 2 at T > 0 and n > 1 at T = 0; at the
    boundary values the integral diverges logarithmically at w = 0 and
    None is returned (the coherence decays to zero instead). Tabulated
    densities have support bounded away from zero frequency, so their
    plateau is always finite.
    """
    if not math.isfinite(theta) or theta <= 0.0:
        raise ValueError("theta must be positive")
    if sd.form != "tabulated":
        if sd.amplitude == 0.0:
            return 1.0
        divergent = (env.T_K > 0.0 and sd.exponent <= 2.0) or (
            env.T_K == 0.0 and sd.exponent <= 1.0
        )
        if divergent:
            return None

    def integrand(omega: np.ndarray) -> np.ndarray:
        return (
            _thermal_weight(omega, env, theta)
            * spectral_density(sd, omega)
            / (CONST.hbar * omega) ** 2
        )

    if sd.form == "tabulated":
        lo = float(sd.table_omega_rad_per_s[0])
        hi = float(sd.table_omega_rad_per_s[-1])
        value = integrate(integrand, lo, hi, _EXP_CFG).value
    else:
        if sd.form == "power-law-gaussian-cutoff":
            scale = sd.cutoff_rad_per_s
        else:
            scale = sd.cutoff_rad_per_s * _GAUSS_SIGMA
        value = integrate_semi_infinite(integrand, 0.0, scale, _EXP_CFG).value
    return math.exp(-value)


@dataclass(frozen=True)
class DecoherenceCurve:
    """Sampled coherence ratio versus time with its long-time plateau.

    plateau is None when the exponent diverges (no partial dephasing,
    full decay).
    """

    times_s: np.ndarray
    ratio: np.ndarray
    plateau: Optional[float]

    def __post_init__(self):
        t = np.asarray(self.times_s, dtype=float)
        r = np.asarray(self.ratio, dtype=float)
        if t.ndim != 1 or t.shape != r.shape or t.size == 0:
            raise ValueError("times and ratio must be equal-length 1-D arrays")
        if np.any(r <= 0.0) or np.any(r > 1.0):
            raise ValueError("coherence ratio must lie in (0, 1]")
        t = t.copy()
        r = r.copy()
        t.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "times_s", t)
        object.__setattr__(self, "ratio", r)


def decoherence_curve(sd: SpectralDensity, env: ThermalEnv, t_max: float,
                      points: int, theta: float = 1.0) -> DecoherenceCurve:
    """Sample the coherence ratio on a uniform grid over [0, t_max].

    t_max = 0 produces the single trivial sample at t = 0. Points are
    evaluated in a thread pool (sized by DEPHASER_THREADS) in deterministic
    order.
    """
    if points < 1:
        raise ValueError("points must be >= 1")
    if not math.isfinite(t_max) or t_max < 0.0:
        raise ValueError("t_max must be finite and >= 0")
    if t_max == 0.0 or points == 1:
        times = np.array([0.0])
    else:
        times = t_max * np.arange(points) / (points - 1)

    def one(t: float) -> float:
        return coherence_ratio(sd, env, float(t), theta)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        ratios = np.array(list(pool.map(one, times)))
    return DecoherenceCurve(times_s=times, ratio=ratios,
                            plateau=asymptotic_coherence(sd, env, theta))


def curve_csv_text(curve: DecoherenceCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t_s", "coherence_ratio"])
    for t, r in zip(curve.times_s, curve.ratio):
        writer.writerow([fmt_float(t), fmt_float(r)])
    return buf.getvalue()


def write_curve_csv(curve: DecoherenceCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(curve_csv_text(curve))

"""Tests for parameter sweeps, their CSV round trip, and scaling fits."""

import math

import numpy as np
import pytest

import dephaser.sweep as sweep_module
from dephaser.quadrature import NonConvergence
from dephaser.rates import METHOD_CLOSED, METHOD_MC, RateResult
from dephaser.sweep import (
    AXIS_DISTANCE,
    AXIS_TEMPERATURE,
    SWEEP_CSV_HEADER,
    FitResult,
    SweepPoint,
    SweepSpec,
    fit_log_law,
    fit_power_law,
    read_sweep_csv,
    run_sweep,
    sweep_csv_text,
    write_sweep_csv,
)

NOISE_SEED = 330217


def _temperature_spec(points=6, method=METHOD_CLOSED, **kwargs):
    defaults = dict(axis=AXIS_TEMPERATURE, min_value=10.0, max_value=100.0,
                    points=points, method=method, fixed_D_m=10e-9)
    defaults.update(kwargs)
    return SweepSpec(**defaults)


def test_log_grid_formula_is_exact():
    spec = _temperature_spec(points=7)
    i = np.arange(7)
    expected = 10.0 * (100.0 / 10.0) ** (i / 6.0)
    np.testing.assert_array_equal(spec.grid(), expected)


def test_linear_grid_formula_is_exact():
    spec = SweepSpec(axis=AXIS_DISTANCE, min_value=0.0, max_value=20e-9,
                     points=5, spacing="linear", fixed_T_K=50.0)
    i = np.arange(5)
    expected = 0.0 + (20e-9 - 0.0) * (i / 4.0)
    np.testing.assert_array_equal(spec.grid(), expected)


def test_temperature_sweep_monotone_rates():
    points = run_sweep(_temperature_spec())
    assert len(points) == 6
    gammas = [p.result.gamma_per_s for p in points]
    t2s = [p.result.t2_s for p in points]
    assert all(np.diff(gammas) > 0.0)
    assert all(np.diff(t2s) < 0.0)
    assert all(p.method == METHOD_CLOSED for p in points)


def test_distance_sweep_includes_zero_separation():
    spec = SweepSpec(axis=AXIS_DISTANCE, min_value=0.0, max_value=20e-9,
                     points=5, spacing="linear", fixed_T_K=50.0)
    points = run_sweep(spec)
    assert points[0].result.gamma_per_s == 0.0
    assert math.isinf(points[0].result.t2_s)
    assert all(p.result.gamma_per_s > 0.0 for p in points[1:])


def test_monte_carlo_sweep_runs():
    spec = _temperature_spec(points=2, method=METHOD_MC, samples=10**4)
    points = run_sweep(spec)
    assert all(p.result is not None for p in points)
    assert all(p.result.mc_std_error_per_s > 0.0 for p in points)


def test_sweep_is_deterministic_across_thread_counts(monkeypatch):
    spec = _temperature_spec()
    baseline = sweep_csv_text(run_sweep(spec), spec.axis)
    monkeypatch.setenv("DEPHASER_THREADS", "5")
    threaded = sweep_csv_text(run_sweep(spec), spec.axis)
    monkeypatch.setenv("DEPHASER_THREADS", "1")
    serial = sweep_csv_text(run_sweep(spec), spec.axis)
    assert baseline == threaded == serial


def test_csv_round_trip_with_failure_row(tmp_path):
    spec = _temperature_spec(points=3)
    points = run_sweep(spec)
    # splice in a recorded failure to exercise the nan cells
    broken = SweepPoint(axis_value=55.5, method=METHOD_CLOSED,
                        error="recorded failure")
    points = points[:2] + [broken] + points[2:]
    path = tmp_path / "sweep.csv"
    write_sweep_csv(points, spec.axis, path)
    first = path.read_text(encoding="utf-8")
    axis, loaded = read_sweep_csv(path)
    assert axis == AXIS_TEMPERATURE
    assert loaded[2].error == "recorded failure"
    assert loaded[2].result is None
    assert loaded[0].result.gamma_per_s == points[0].result.gamma_per_s
    path2 = tmp_path / "again.csv"
    write_sweep_csv(loaded, axis, path2)
    assert path2.read_text(encoding="utf-8") == first


def test_csv_failure_row_renders_nan(tmp_path):
    broken = [SweepPoint(axis_value=1.0, method=METHOD_CLOSED, error="x")]
    text = sweep_csv_text(broken, AXIS_TEMPERATURE)
    row = text.splitlines()[1].split(",")
    assert row[2] == "nan" and row[3] == "nan" and row[5] == "nan"


def test_read_sweep_csv_rejects_bad_files(tmp_path):
    bad_header = tmp_path / "one.csv"
    bad_header.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="bad header"):
        read_sweep_csv(bad_header)

    short_row = tmp_path / "two.csv"
    short_row.write_text(",".join(SWEEP_CSV_HEADER) + "\n1,2,3\n",
                         encoding="utf-8")
    with pytest.raises(ValueError, match="malformed"):
        read_sweep_csv(short_row)

    no_rows = tmp_path / "three.csv"
    no_rows.write_text(",".join(SWEEP_CSV_HEADER) + "\n", encoding="utf-8")
    with pytest.raises(ValueError, match="no data rows"):
        read_sweep_csv(no_rows)


def test_sweep_records_nonconvergence_and_continues(monkeypatch):
    spec = _temperature_spec(points=4)
    target = spec.grid()[2]
    true_rate = sweep_module.rate_closed_form

    def flaky(material, geom, env):
        if env.T_K == target:
            raise NonConvergence("synthetic failure for this grid point")
        return true_rate(material, geom, env)

    monkeypatch.setattr(sweep_module, "rate_closed_form", flaky)
    points = run_sweep(spec)
    assert points[2].result is None
    assert "synthetic failure" in points[2].error
    assert all(p.result is not None for i, p in enumerate(points) if i != 2)


@pytest.mark.parametrize(
    "kwargs, match",
    [
        (dict(axis="pressure", fixed_D_m=1e-9), "axis"),
        (dict(spacing="cubic", fixed_D_m=1e-9), "spacing"),
        (dict(method="exact", fixed_D_m=1e-9), "method"),
        (dict(points=1, fixed_D_m=1e-9), "points"),
        (dict(min_value=100.0, max_value=10.0, fixed_D_m=1e-9), "min_value"),
        (dict(min_value=-1.0, fixed_D_m=1e-9), ">= 0"),
        (dict(min_value=0.0, fixed_D_m=1e-9), "logarithmic"),
        (dict(fixed_D_m=None), "fixed_D_m"),
        (dict(width_L_m=0.0, fixed_D_m=1e-9), "width_L_m"),
    ],
)
def test_sweep_spec_validation(kwargs, match):
    base = dict(axis=AXIS_TEMPERATURE, min_value=10.0, max_value=100.0,
                points=4)
    base.update(kwargs)
    with pytest.raises(ValueError, match=match):
        SweepSpec(**base)


def test_distance_axis_requires_temperature():
    with pytest.raises(ValueError, match="fixed_T_K"):
        SweepSpec(axis=AXIS_DISTANCE, min_value=1e-9, max_value=1e-8, points=4)


def test_fit_power_law_exact_exponent():
    xs = np.geomspace(1.0, 10.0, 12)
    pts = [(x, x**7) for x in xs]
    fit = fit_power_law(pts, (0.5, 20.0))
    assert fit.slope == pytest.approx(7.0, abs=1e-12)
    assert fit.intercept == pytest.approx(0.0, abs=1e-11)
    assert fit.residual_rms < 1e-12


def test_fit_power_law_with_noise():
    rng = np.random.default_rng(NOISE_SEED)
    xs = np.geomspace(0.1, 10.0, 40)
    pts = [(x, 3.0 * x**2 * math.exp(rng.normal(0.0, 0.01))) for x in xs]
    fit = fit_power_law(pts, (0.05, 20.0))
    assert fit.slope == pytest.approx(2.0, abs=0.05)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=0.05)
    assert fit.residual_rms < 0.03


def test_fit_power_law_scale_equivariance():
    xs = np.geomspace(1.0, 100.0, 9)
    pts = [(x, 2.0 * x**3.5) for x in xs]
    scaled = [(x, 1e12 * y) for x, y in pts]
    base = fit_power_law(pts, (0.5, 200.0))
    shifted = fit_power_law(scaled, (0.5, 200.0))
    assert shifted.slope == pytest.approx(base.slope, rel=1e-12)
    assert shifted.intercept == pytest.approx(base.intercept + math.log(1e12),
                                              rel=1e-12)


def test_fit_log_law_exact():
    xs = np.geomspace(1.0, 50.0, 10)
    pts = [(x, 2.0 * math.log(x) + 1.0) for x in xs]
    fit = fit_log_law(pts, (0.5, 100.0))
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.intercept == pytest.approx(1.0, abs=1e-12)


def test_fit_log_law_flat_data():
    pts = [(x, 5.0) for x in (1.0, 2.0, 4.0, 8.0)]
    fit = fit_log_law(pts, (0.5, 10.0))
    assert fit.slope == pytest.approx(0.0, abs=1e-12)
    assert fit.intercept == pytest.approx(5.0, rel=1e-12)


def test_fit_window_validation():
    pts = [(1.0, 1.0), (2.0, 4.0), (3.0, 9.0)]
    with pytest.raises(ValueError, match="lo < hi"):
        fit_power_law(pts, (5.0, 1.0))
    with pytest.raises(ValueError, match="at least 3"):
        fit_power_law(pts, (0.5, 1.5))
    with pytest.raises(ValueError, match="positive"):
        fit_power_law([(1.0, 1.0), (2.0, -4.0), (3.0, 9.0)], (0.5, 5.0))
    assert isinstance(fit_power_law(pts, (0.5, 5.0)), FitResult)

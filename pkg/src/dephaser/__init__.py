"""Phonon-induced pure dephasing of a double quantum dot.

Computes the Markovian dephasing rate gamma = 1/T2 of an electron
delocalized over two dots, coupled to an anharmonic acoustic-phonon
reservoir, by three independent numerical routes, together with the exact
harmonic-reservoir (partial-dephasing) benchmark and the resulting
two-level Lindblad dynamics.
"""
from .constants import CONST, PhysicalConstants
from .coupling import (
    SPECTRAL_FORMS,
    SpectralDensity,
    g_squared,
    load_spectral_table,
    spectral_density,
)
from .harmonic import (
    DecoherenceCurve,
    asymptotic_coherence,
    coherence_ratio,
    decoherence_curve,
    write_curve_csv,
)
from .lindblad import (
    MARKOV_RATE_LIMIT_PER_S,
    DensityMatrix2,
    LindbladParams,
    MarkovValidityWarning,
    Trajectory2,
    evolve_analytic,
    evolve_numeric,
    trajectory,
    write_trajectory_csv,
)
from .model import (
    GAAS,
    DotGeometry,
    MaterialFileError,
    MaterialParams,
    RateIntegralParams,
    ThermalEnv,
    anharmonic_strength_sq,
    coupling_scale,
    derived_scales,
    load_material,
)
from .quadrature import (
    NonConvergence,
    NonFiniteSample,
    QuadratureConfig,
    QuadratureResult,
    integrate,
    integrate_nested,
    integrate_semi_infinite,
)
from .rates import (
    METHOD_CLOSED,
    METHOD_DOUBLE,
    METHOD_MC,
    CutoffValidityWarning,
    RateResult,
    ValidationFailed,
    ValidationReport,
    rate_closed_form,
    rate_double_integral,
    rate_monte_carlo,
    rate_validate,
)
from .specfun import (
    BOSE_FIFTH_MOMENT_INF,
    BoseMomentTable,
    bose_fifth_moment,
    bose_fifth_moment_tail,
    bose_occupation,
    get_moment_table,
    sinc_deficit,
)
from .sweep import (
    AXIS_DISTANCE,
    AXIS_TEMPERATURE,
    FitResult,
    SweepPoint,
    SweepSpec,
    fit_log_law,
    fit_power_law,
    read_sweep_csv,
    run_sweep,
    write_sweep_csv,
)

__version__ = "0.1.0"

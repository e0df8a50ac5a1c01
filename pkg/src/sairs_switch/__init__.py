"""SAIRS epidemic dynamics under semi-Markov regime switching.

A numpy/scipy toolkit for a four-compartment epidemic whose transmission
rates jump between environmental regimes driven by a semi-Markov process:
per-regime and environment-averaged reproduction numbers, extinction and
persistence margins with certified lower bounds, event-exact hybrid
trajectory simulation, and empirical occupation-measure diagnostics.
"""

__version__ = "0.1.0"

from .model import (
    EpidemicParams,
    EpidemicState3,
    EpidemicState4,
    RegimeSpectrum,
    VectorField,
    bracket_field,
    dfe,
    drift3,
    drift4,
    endemic_equilibrium,
    f_minus_v,
    jacobian3,
    lambda1_sym,
    lie_bracket,
    lie_span_rank,
    r0_regime,
    regime_field,
    regime_spectrum,
)
from .semi_markov import (
    ErgodicWeights,
    Exponential,
    Gamma,
    RegimePath,
    SemiMarkovSpec,
    ValidationReport,
    Weibull,
    embedded_stationary,
    empirical_time_average,
    ergodic_limit,
    ergodic_weights,
    eta_at,
    hazard,
    mean_sojourn,
    regime_at,
    sample_holding,
    sample_path,
    validate_spec,
)
from .simulate import (
    EnsembleSummary,
    ExtinctionResult,
    IntegratorConfig,
    OccupationHistogram,
    TimeMeans,
    Trajectory,
    check_extinction,
    default_eta_cap,
    derive_seed,
    ensemble,
    integrate_between_jumps,
    occupation,
    psi_reachable,
    simulate,
    stationarity_tv,
    time_means,
)
from .thresholds import (
    Classification,
    PersistenceBounds,
    ThresholdReport,
    classify,
    composite_r0,
    margin_equal,
    margin_ext_maxmin,
    margin_ext_spectral,
    margin_pers,
    persistence_bounds,
    threshold_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]

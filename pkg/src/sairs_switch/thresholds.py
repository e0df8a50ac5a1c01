"""Threshold quantities for the switched epidemic: margins, bounds, verdicts.

Every margin is a weighted sum over regimes with weights ``pi_r * m_r`` and
is reported *unnormalized*; dividing by ``sum_r pi_r m_r`` gives the
exponential growth/decay rate that the persistence bounds need, and that
normalizer is exposed on the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import EpidemicParams, dfe, lambda1_sym
from .semi_markov import ErgodicWeights


class Classification(str, Enum):
    EXTINCT_AS = "ExtinctAS"
    PERSISTENT_IN_MEAN = "PersistentInMean"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class PersistenceBounds:
    """Lower bounds on long-run time means, valid when persistence is certified."""

    s_bound: float
    ai_bound: float
    i_bound: float
    a_bound: float


@dataclass(frozen=True)
class ThresholdReport:
    """Every scalar threshold quantity plus the resulting verdict.

    ``composite_r0`` and ``margin_equal`` are only defined for the equal-rate
    model and are ``None`` otherwise.  ``weight_total`` is ``sum_r pi_r m_r``,
    the divisor that turns a margin into a rate.
    """

    composite_r0: float | None
    margin_equal: float | None
    margin_ext_maxmin: float
    margin_ext_spectral: float
    margin_pers: float
    weight_total: float
    bounds: PersistenceBounds | None
    classification: Classification

    def normalized(self, margin: float | None) -> float | None:
        if margin is None:
            return None
        return margin / self.weight_total


def _weights_for(params: EpidemicParams, weights: ErgodicWeights) -> np.ndarray:
    if weights.state_count != params.n_regimes:
        raise ValueError(
            f"weights describe {weights.state_count} states but the model has {params.n_regimes} regimes"
        )
    return weights.weight


def _require_equal_rates(params: EpidemicParams, what: str):
    if not params.equal_rates:
        raise ValueError(f"{what} defined only for equal-rate model")


def composite_r0(params: EpidemicParams, weights: ErgodicWeights) -> float:
    """Reproduction number averaged over the switching environment.

    Requires the equal-rate model (``beta_A == beta_I`` per regime and
    ``delta_A == delta_I``); the threshold at one separates almost-sure
    extinction from persistence in time mean.
    """
    _require_equal_rates(params, "composite R0")
    w = _weights_for(params, weights)
    beta = np.asarray(params.beta_A)
    S0 = dfe(params)[0]
    return float(np.dot(w, beta) * S0 / (w.sum() * (params.delta_A + params.mu)))


def margin_equal(params: EpidemicParams, weights: ErgodicWeights) -> float:
    """Signed extinction/persistence margin of the equal-rate model."""
    _require_equal_rates(params, "equal-rate margin")
    w = _weights_for(params, weights)
    beta = np.asarray(params.beta_A)
    S0 = dfe(params)[0]
    return float(np.dot(w, beta * S0 - (params.delta_A + params.mu)))


def margin_ext_maxmin(params: EpidemicParams, weights: ErgodicWeights) -> float:
    """Extinction margin from the per-regime max transmission and global min
    recovery; a negative value certifies almost-sure extinction."""
    w = _weights_for(params, weights)
    beta_hi = np.maximum(params.beta_A, params.beta_I)
    delta_lo = min(params.delta_A, params.delta_I)
    S0 = dfe(params)[0]
    return float(np.dot(w, beta_hi * S0 - (delta_lo + params.mu)))


def margin_ext_spectral(params: EpidemicParams, weights: ErgodicWeights) -> float:
    """Extinction margin from the symmetrized infected-block spectrum; a
    negative value certifies almost-sure extinction."""
    w = _weights_for(params, weights)
    lam = np.array([lambda1_sym(params, r) for r in range(params.n_regimes)])
    return float(np.dot(w, lam))


def margin_pers(params: EpidemicParams, weights: ErgodicWeights) -> float:
    """Persistence margin from the per-regime min transmission and global max
    recovery; a positive value certifies persistence in time mean."""
    w = _weights_for(params, weights)
    beta_lo = np.minimum(params.beta_A, params.beta_I)
    delta_hi = max(params.delta_A, params.delta_I)
    S0 = dfe(params)[0]
    return float(np.dot(w, beta_lo * S0 - (delta_hi + params.mu)))


def persistence_bounds(params: EpidemicParams, weights: ErgodicWeights) -> PersistenceBounds:
    """Lower bounds on the long-run time means of S, A+I, I and A.

    Requires a positive persistence margin (for the equal-rate model this is
    the equal-rate margin).  The A+I bound splits into the I and A bounds
    through the symptomatic-onset balance.
    """
    w = _weights_for(params, weights)
    beta_max = max(max(params.beta_A), max(params.beta_I))
    mu, nu, ga, al = params.mu, params.nu, params.gamma, params.alpha
    s_bound = mu / (mu + nu + beta_max)

    if params.equal_rates:
        margin = margin_equal(params, weights)
        if margin <= 0.0:
            raise ValueError("no persistence certificate: equal-rate margin is not positive")
        delta = params.delta_A
        ai = (mu + nu + ga) / (beta_max * (beta_max + ga)) * margin / w.sum()
        i_share = al / (al + delta + mu)
    else:
        margin = margin_pers(params, weights)
        if margin <= 0.0:
            raise ValueError("no persistence certificate: persistence margin is not positive")
        beta_minmax = max(min(a, b) for a, b in zip(params.beta_A, params.beta_I))
        ai = (mu + nu + ga) / (beta_minmax * (beta_max + ga)) * margin / w.sum()
        i_share = al / (al + params.delta_I + mu)

    return PersistenceBounds(
        s_bound=s_bound,
        ai_bound=ai,
        i_bound=i_share * ai,
        a_bound=(1.0 - i_share) * ai,
    )


def classify(params: EpidemicParams, weights: ErgodicWeights) -> Classification:
    """Three-way verdict from the available certificates.

    Equal-rate model: the composite reproduction number is a sharp threshold.
    Otherwise extinction is certified by either extinction margin being
    negative and persistence by a positive persistence margin; the remaining
    gap is indeterminate.  Both certificates at once indicate a bug.
    """
    if params.equal_rates:
        r0 = composite_r0(params, weights)
        if r0 < 1.0:
            return Classification.EXTINCT_AS
        if r0 > 1.0:
            return Classification.PERSISTENT_IN_MEAN
        return Classification.INDETERMINATE

    extinct = (
        margin_ext_maxmin(params, weights) < 0.0
        or margin_ext_spectral(params, weights) < 0.0
    )
    persistent = margin_pers(params, weights) > 0.0
    if extinct and persistent:
        raise RuntimeError(
            "contradictory certificates: extinction and persistence both certified"
        )
    if extinct:
        return Classification.EXTINCT_AS
    if persistent:
        return Classification.PERSISTENT_IN_MEAN
    return Classification.INDETERMINATE


def threshold_report(params: EpidemicParams, weights: ErgodicWeights) -> ThresholdReport:
    """Assemble every threshold quantity into one report."""
    equal = params.equal_rates
    r0 = composite_r0(params, weights) if equal else None
    m_eq = margin_equal(params, weights) if equal else None
    m_pers = margin_pers(params, weights)
    verdict = classify(params, weights)
    bounds = None
    if verdict is Classification.PERSISTENT_IN_MEAN and m_pers > 0.0:
        bounds = persistence_bounds(params, weights)
    return ThresholdReport(
        composite_r0=r0,
        margin_equal=m_eq,
        margin_ext_maxmin=margin_ext_maxmin(params, weights),
        margin_ext_spectral=margin_ext_spectral(params, weights),
        margin_pers=m_pers,
        weight_total=float(_weights_for(params, weights).sum()),
        bounds=bounds,
        classification=verdict,
    )

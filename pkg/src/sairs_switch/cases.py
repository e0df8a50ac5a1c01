"""Built-in two-regime reference scenarios with pinned threshold values.

Three parameter families, each run under several gamma sojourn laws: the
"1x" scenarios have regime-dependent, class-asymmetric transmission, "2"
contrasts the two extinction certificates, and the "3x" scenarios use the
equal-rate model where the composite reproduction number is sharp.  All use
the two-state alternating environment, so the embedded chain is (1/2, 1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import EpidemicParams, EpidemicState4
from .semi_markov import Gamma, SemiMarkovSpec

MU_LIFETIME_60Y = 1.0 / (60.0 * 365.0)

SWAP2 = np.array([[0.0, 1.0], [1.0, 0.0]])

_PARAMS_CASE1 = EpidemicParams(
    beta_A=(0.004, 0.97),
    beta_I=(0.008, 0.99),
    delta_A=0.105,
    delta_I=0.1,
    alpha=0.3,
    gamma=0.03,
    nu=0.01,
    mu=MU_LIFETIME_60Y,
)

_PARAMS_CASE2 = EpidemicParams(
    beta_A=(0.55, 0.68),
    beta_I=(0.5, 0.58),
    delta_A=0.3,
    delta_I=0.4,
    alpha=0.5,
    gamma=0.01,
    nu=0.01,
    mu=MU_LIFETIME_60Y,
)

_PARAMS_CASE3 = EpidemicParams(
    beta_A=(0.05, 0.9),
    beta_I=(0.05, 0.9),
    delta_A=0.07,
    delta_I=0.07,
    alpha=0.5,
    gamma=0.02,
    nu=0.01,
    mu=MU_LIFETIME_60Y,
)

# default simulation start: interior point with a sizeable infectious seed
DEFAULT_X0 = EpidemicState4(S=0.6, A=0.2, I=0.1, R=0.1)
DEFAULT_R0 = 0


@dataclass(frozen=True)
class ExpectedMargin:
    quantity: str  # name of a thresholds.* margin function
    value: float
    tol: float


@dataclass(frozen=True)
class ReferenceCase:
    case_id: str
    params: EpidemicParams
    spec: SemiMarkovSpec
    expected: tuple[ExpectedMargin, ...]

    @property
    def x0(self) -> EpidemicState4:
        return DEFAULT_X0

    @property
    def r0(self) -> int:
        return DEFAULT_R0


def _gamma_pair(k1: float, k2: float, theta: float = 0.8) -> SemiMarkovSpec:
    return SemiMarkovSpec(SWAP2, (Gamma(k1, theta), Gamma(k2, theta)))


CASES: dict[str, ReferenceCase] = {
    "1a": ReferenceCase(
        "1a",
        _PARAMS_CASE1,
        _gamma_pair(6.0, 12.0),  # mean sojourns 7.5 and 15
        (ExpectedMargin("margin_pers", 4.283, 5e-3),),
    ),
    "1b": ReferenceCase(
        "1b",
        _PARAMS_CASE1,
        _gamma_pair(15.0, 2.0),  # mean sojourns 18.75 and 2.5
        (
            ExpectedMargin("margin_ext_maxmin", -0.0782, 5e-4),
            ExpectedMargin("margin_ext_spectral", 1.0084, 5e-4),
        ),
    ),
    "2": ReferenceCase(
        "2",
        _PARAMS_CASE2,
        _gamma_pair(0.9, 2.5),  # mean sojourns 1.125 and 3.125
        (
            ExpectedMargin("margin_ext_maxmin", 0.05, 5e-4),
            ExpectedMargin("margin_ext_spectral", -0.1959, 5e-4),
        ),
    ),
    "3a": ReferenceCase(
        "3a",
        _PARAMS_CASE3,
        _gamma_pair(4.0, 15.0),  # mean sojourns 5 and 18.75
        (ExpectedMargin("margin_equal", 4.8809, 5e-4),),
    ),
    "3b": ReferenceCase(
        "3b",
        _PARAMS_CASE3,
        _gamma_pair(15.0, 3.0),  # mean sojourns 18.75 and 3.75
        (ExpectedMargin("margin_equal", 0.6506, 5e-4),),
    ),
    "3c": ReferenceCase(
        "3c",
        _PARAMS_CASE3,
        _gamma_pair(18.0, 1.0),  # mean sojourns 22.5 and 1.25
        (ExpectedMargin("margin_equal", -0.0812, 5e-4),),
    ),
}

CASE_IDS = tuple(CASES)

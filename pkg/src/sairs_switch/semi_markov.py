"""Semi-Markov environment process: holding-time laws, path sampling, ergodics.

The environment is a finite-state process whose visited states form a Markov
chain (the embedded chain) while the sojourn in each state follows an
arbitrary positive distribution.  This module owns the process description
(:class:`SemiMarkovSpec`), realized switching signals (:class:`RegimePath`),
and the ergodic weights ``pi * m`` that govern every long-run time average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.stats import gamma as _gamma_dist

ROW_SUM_TOL = 1e-12
# entries of the transition matrix below this are treated as structural zeros
# when checking irreducibility
POSITIVITY_EPS = 1e-15


# ---------------------------------------------------------------------------
# Holding-time distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Exponential:
    """Exponential holding time with the given rate (mean ``1/rate``)."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ValueError(f"Exponential rate must be positive, got {self.rate}")

    def mean(self) -> float:
        return 1.0 / self.rate

    def hazard(self, t: float) -> float:
        if t < 0.0:
            raise ValueError(f"hazard is defined on t >= 0, got t={t}")
        return self.rate

    def sample(self, rng: np.random.Generator) -> float:
        u = rng.random()
        while u <= 0.0:
            u = rng.random()
        return -math.log(u) / self.rate


@dataclass(frozen=True)
class Gamma:
    """Gamma holding time with shape ``k`` and *rate* ``theta`` (mean ``k/theta``)."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0.0 and self.rate > 0.0):
            raise ValueError(
                f"Gamma parameters must be positive, got shape={self.shape}, rate={self.rate}"
            )

    def mean(self) -> float:
        return self.shape / self.rate

    def hazard(self, t: float) -> float:
        if t < 0.0:
            raise ValueError(f"hazard is defined on t >= 0, got t={t}")
        if t == 0.0:
            if self.shape < 1.0:
                return math.inf
            return self.rate if self.shape == 1.0 else 0.0
        frozen = _gamma_dist(a=self.shape, scale=1.0 / self.rate)
        sf = frozen.sf(t)
        if sf == 0.0:
            # far right tail: the gamma hazard tends to the rate
            return self.rate
        return frozen.pdf(t) / sf

    def sample(self, rng: np.random.Generator) -> float:
        return rng.standard_gamma(self.shape) / self.rate


@dataclass(frozen=True)
class Weibull:
    """Weibull holding time with shape ``k`` and scale (mean ``scale*Gamma(1+1/k)``)."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0.0 and self.scale > 0.0):
            raise ValueError(
                f"Weibull parameters must be positive, got shape={self.shape}, scale={self.scale}"
            )

    def mean(self) -> float:
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)

    def hazard(self, t: float) -> float:
        if t < 0.0:
            raise ValueError(f"hazard is defined on t >= 0, got t={t}")
        if t == 0.0:
            if self.shape < 1.0:
                return math.inf
            return 1.0 / self.scale if self.shape == 1.0 else 0.0
        return (self.shape / self.scale) * (t / self.scale) ** (self.shape - 1.0)

    def sample(self, rng: np.random.Generator) -> float:
        u = rng.random()
        while u <= 0.0:
            u = rng.random()
        return self.scale * (-math.log(u)) ** (1.0 / self.shape)


HoldingDistribution = Exponential | Gamma | Weibull


def mean_sojourn(dist: HoldingDistribution) -> float:
    """Mean sojourn time of a holding distribution."""
    return dist.mean()


def hazard(dist: HoldingDistribution, t: float) -> float:
    """Hazard rate ``f(t)/(1-F(t))``; ``inf`` sentinel where the density blows up."""
    return dist.hazard(t)


def sample_holding(dist: HoldingDistribution, rng: np.random.Generator) -> float:
    """Draw one holding time."""
    return dist.sample(rng)


# ---------------------------------------------------------------------------
# Process specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SemiMarkovSpec:
    """Transition matrix plus one holding-time law per state.

    Parameters
    ----------
    transition : (M, M) array_like
        Row-stochastic matrix of the embedded chain.  The diagonal must be
        zero (a jump always changes the state).
    holding : sequence of holding distributions
        One per state, same order as the matrix rows.

    Construction only enforces shape consistency; use :func:`validate_spec`
    to obtain a full report on the probabilistic invariants.
    """

    transition: np.ndarray
    holding: tuple

    def __init__(self, transition, holding):
        P = np.array(transition, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {P.shape}")
        holding = tuple(holding)
        if len(holding) != P.shape[0]:
            raise ValueError(
                f"need one holding distribution per state: {len(holding)} given for {P.shape[0]} states"
            )
        P.setflags(write=False)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "holding", holding)

    @property
    def state_count(self) -> int:
        return self.transition.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SemiMarkovSpec):
            return NotImplemented
        return (
            np.array_equal(self.transition, other.transition)
            and self.holding == other.holding
        )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _is_irreducible(P: np.ndarray) -> bool:
    adjacency = sparse.csr_matrix((P > POSITIVITY_EPS).astype(np.int8))
    n_comp, _ = connected_components(adjacency, directed=True, connection="strong")
    return n_comp == 1


def validate_spec(spec: SemiMarkovSpec) -> ValidationReport:
    """Check every invariant of a :class:`SemiMarkovSpec`.

    Violations are reported as data, not raised, so a caller can surface all
    of them at once.
    """
    violations = []
    P = spec.transition
    M = spec.state_count
    if M < 2:
        violations.append(f"state count must be at least 2, got {M}")
    if np.any(P < 0.0) or np.any(P > 1.0):
        violations.append("transition matrix entries must lie in [0, 1]")
    bad_rows = np.nonzero(np.abs(P.sum(axis=1) - 1.0) > ROW_SUM_TOL)[0]
    for i in bad_rows:
        violations.append(f"row {i} of the transition matrix sums to {P[i].sum()!r}, not 1")
    if np.any(np.diag(P) != 0.0):
        violations.append("transition matrix diagonal must be exactly zero (no self-jumps)")
    if M >= 2 and not bad_rows.size and not _is_irreducible(P):
        violations.append("transition matrix is not irreducible (states are not mutually reachable)")
    return ValidationReport(ok=not violations, violations=tuple(violations))


def embedded_stationary(P) -> np.ndarray:
    """Stationary distribution ``pi`` of the embedded chain, ``pi P = pi``.

    Solved as a bordered linear system; the result satisfies
    ``max|pi P - pi| <= 1e-12`` or a ``RuntimeError`` is raised.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {P.shape}")
    if np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-9) or np.any(P < 0.0):
        raise ValueError("matrix is not row-stochastic")
    if not _is_irreducible(P):
        raise ValueError("no unique stationary distribution: matrix is not irreducible")
    M = P.shape[0]
    A = P.T - np.eye(M)
    A[-1, :] = 1.0
    b = np.zeros(M)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    residual = np.max(np.abs(pi @ P - pi))
    if residual > 1e-12 or np.any(pi <= 0.0):
        raise RuntimeError(f"stationary solve failed, residual {residual:.3e}")
    return pi


@dataclass(frozen=True)
class ErgodicWeights:
    """Embedded-chain stationary probabilities and mean sojourn times."""

    pi: np.ndarray
    m: np.ndarray

    def __init__(self, pi, m):
        pi = np.array(pi, dtype=float)
        m = np.array(m, dtype=float)
        if pi.shape != m.shape or pi.ndim != 1:
            raise ValueError("pi and m must be 1-D arrays of equal length")
        if np.any(pi <= 0.0) or abs(pi.sum() - 1.0) > 1e-9:
            raise ValueError("pi must be a strictly positive probability vector")
        if np.any(m <= 0.0):
            raise ValueError("mean sojourn times must be positive")
        pi.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "m", m)

    @property
    def state_count(self) -> int:
        return self.pi.shape[0]

    @property
    def weight(self) -> np.ndarray:
        """Unnormalized occupation weights ``pi_r * m_r``."""
        return self.pi * self.m

    def occupation_fractions(self) -> np.ndarray:
        """Long-run fraction of time spent in each state."""
        w = self.weight
        return w / w.sum()


def ergodic_weights(spec: SemiMarkovSpec) -> ErgodicWeights:
    """Ergodic weights of a validated spec."""
    report = validate_spec(spec)
    if not report.ok:
        raise ValueError("invalid semi-Markov spec: " + "; ".join(report.violations))
    pi = embedded_stationary(spec.transition)
    m = np.array([d.mean() for d in spec.holding])
    return ErgodicWeights(pi, m)


# ---------------------------------------------------------------------------
# Realized switching signals
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RegimePath:
    """One realized switching signal on ``[0, horizon]``.

    ``jump_times[n]`` is the n-th jump instant (with ``jump_times[0] == 0``)
    and ``states[n]`` the state entered there; the final state rules until
    the horizon.
    """

    jump_times: np.ndarray
    states: np.ndarray
    horizon: float

    def __init__(self, jump_times, states, horizon):
        jt = np.array(jump_times, dtype=float)
        st = np.array(states, dtype=np.int64)
        horizon = float(horizon)
        if jt.ndim != 1 or st.shape != jt.shape or jt.size == 0:
            raise ValueError("jump_times and states must be 1-D arrays of equal positive length")
        if jt[0] != 0.0:
            raise ValueError("first jump time must be 0")
        if np.any(np.diff(jt) <= 0.0):
            raise ValueError("jump times must be strictly increasing")
        if not horizon > 0.0 or jt[-1] > horizon:
            raise ValueError("horizon must be positive and at least the last jump time")
        if np.any(st[1:] == st[:-1]):
            raise ValueError("consecutive states must differ")
        jt.setflags(write=False)
        st.setflags(write=False)
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "states", st)
        object.__setattr__(self, "horizon", horizon)

    def __eq__(self, other):
        if not isinstance(other, RegimePath):
            return NotImplemented
        return (
            self.horizon == other.horizon
            and np.array_equal(self.jump_times, other.jump_times)
            and np.array_equal(self.states, other.states)
        )

    @property
    def jump_count(self) -> int:
        """Number of jumps after time zero."""
        return self.jump_times.shape[0] - 1


def sample_path(
    spec: SemiMarkovSpec, r0: int, horizon: float, rng: np.random.Generator
) -> RegimePath:
    """Sample one switching signal.

    Starting from ``r0``, alternately draws a holding time from the current
    state's law and the next state from the matching transition row, stopping
    once a jump would pass the horizon.  Fully deterministic given ``rng``.
    """
    report = validate_spec(spec)
    if not report.ok:
        raise ValueError("invalid semi-Markov spec: " + "; ".join(report.violations))
    M = spec.state_count
    if not 0 <= r0 < M:
        raise ValueError(f"initial state {r0} out of range for {M} states")
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")

    cum_rows = np.cumsum(spec.transition, axis=1)
    times = [0.0]
    states = [int(r0)]
    t = 0.0
    state = int(r0)
    while True:
        t_next = t + spec.holding[state].sample(rng)
        if t_next > horizon:
            break
        state = int(np.searchsorted(cum_rows[state], rng.random(), side="right"))
        state = min(state, M - 1)  # guard against cumsum rounding at 1.0
        times.append(t_next)
        states.append(state)
        t = t_next
    return RegimePath(np.array(times), np.array(states), horizon)


def _segment_index(path: RegimePath, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > path.horizon):
        raise ValueError(f"time outside [0, {path.horizon}]")
    return np.searchsorted(path.jump_times, t, side="right") - 1


def regime_at(path: RegimePath, t):
    """State of the switching signal at time ``t`` (scalar or array)."""
    idx = _segment_index(path, t)
    out = path.states[idx]
    return int(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def eta_at(path: RegimePath, t):
    """Elapsed time since the latest jump at or before ``t`` (scalar or array)."""
    idx = _segment_index(path, t)
    out = np.asarray(t, dtype=float) - path.jump_times[idx]
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


# ---------------------------------------------------------------------------
# Ergodic averages
# ---------------------------------------------------------------------------

def ergodic_limit(weights: ErgodicWeights, f) -> float:
    """Long-run time average of a per-state function under the ergodic law.

    Returns ``sum_r f(r) pi_r m_r / sum_r pi_r m_r``.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != weights.pi.shape:
        raise ValueError("f must assign one value per state")
    w = weights.weight
    return float(np.dot(f, w) / w.sum())


def empirical_time_average(path: RegimePath, f) -> float:
    """Exact time average of ``f(r(t))`` along one realized path."""
    f = np.asarray(f, dtype=float)
    bounds = np.append(path.jump_times, path.horizon)
    durations = np.diff(bounds)
    return float(np.dot(f[path.states], durations) / path.horizon)

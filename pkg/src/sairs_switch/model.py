"""SAIRS vector fields, equilibria, and per-regime spectral quantities.

The compartment fractions are susceptible ``S``, asymptomatic infectious
``A``, symptomatic infectious ``I`` and recovered ``R``; the transmission
rates ``beta_A`` and ``beta_I`` take one value per environmental regime while
all remaining rates are global.  The three-dimensional reduction eliminates
``R = 1 - S - A - I`` and lives on the invariant set
``{S, A, I >= 0, S + A + I <= 1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

GAMMA_SET_TOL = 1e-9


@dataclass(frozen=True)
class EpidemicParams:
    """All model rates; ``beta_A``/``beta_I`` hold one entry per regime."""

    beta_A: tuple
    beta_I: tuple
    delta_A: float
    delta_I: float
    alpha: float
    gamma: float
    nu: float
    mu: float

    def __post_init__(self):
        bA = tuple(float(b) for b in np.atleast_1d(self.beta_A))
        bI = tuple(float(b) for b in np.atleast_1d(self.beta_I))
        object.__setattr__(self, "beta_A", bA)
        object.__setattr__(self, "beta_I", bI)
        if len(bA) != len(bI) or len(bA) == 0:
            raise ValueError("beta_A and beta_I must have the same positive length")
        rates = bA + bI + (self.delta_A, self.delta_I, self.alpha, self.gamma, self.nu, self.mu)
        if any(r < 0.0 for r in rates):
            raise ValueError("all rates must be nonnegative")
        if not self.mu > 0.0:
            raise ValueError("mu must be positive")
        if not self.alpha > 0.0:
            raise ValueError("alpha must be positive")
        if not self.delta_A + self.delta_I > 0.0:
            raise ValueError("delta_A + delta_I must be positive")

    @property
    def n_regimes(self) -> int:
        return len(self.beta_A)

    @property
    def equal_rates(self) -> bool:
        """True when both infectious classes share transmission and recovery rates."""
        return self.beta_A == self.beta_I and self.delta_A == self.delta_I

    def _check_regime(self, r: int) -> int:
        if not 0 <= r < self.n_regimes:
            raise ValueError(f"regime index {r} out of range for {self.n_regimes} regimes")
        return int(r)


@dataclass(frozen=True)
class EpidemicState3:
    """Point of the reduced model; must lie in the invariant simplex slab."""

    S: float
    A: float
    I: float

    def __post_init__(self):
        if min(self.S, self.A, self.I) < 0.0 or self.S + self.A + self.I > 1.0:
            raise ValueError(
                f"state ({self.S}, {self.A}, {self.I}) outside the invariant set"
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.S, self.A, self.I])


@dataclass(frozen=True)
class EpidemicState4:
    """Full compartment vector; fractions must sum to one."""

    S: float
    A: float
    I: float
    R: float

    def __post_init__(self):
        if min(self.S, self.A, self.I, self.R) < 0.0:
            raise ValueError("compartment fractions must be nonnegative")
        total = self.S + self.A + self.I + self.R
        if abs(total - 1.0) > GAMMA_SET_TOL:
            raise ValueError(f"compartment fractions sum to {total!r}, not 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.S, self.A, self.I, self.R])

    def to_state3(self) -> EpidemicState3:
        return EpidemicState3(self.S, self.A, self.I)

    @staticmethod
    def from_array(x) -> "EpidemicState4":
        x = np.asarray(x, dtype=float)
        return EpidemicState4(x[0], x[1], x[2], x[3])


# ---------------------------------------------------------------------------
# Vector fields
# ---------------------------------------------------------------------------

def drift3(params: EpidemicParams, r: int, x) -> np.ndarray:
    """Right-hand side of the reduced (S, A, I) system in regime ``r``."""
    r = params._check_regime(r)
    S, A, I = np.asarray(x, dtype=float)
    foi = (params.beta_A[r] * A + params.beta_I[r] * I) * S
    dS = (
        params.mu
        - foi
        - (params.mu + params.nu + params.gamma) * S
        + params.gamma * (1.0 - A - I)
    )
    dA = foi - (params.alpha + params.delta_A + params.mu) * A
    dI = params.alpha * A - (params.delta_I + params.mu) * I
    return np.array([dS, dA, dI])


def drift4(params: EpidemicParams, r: int, x) -> np.ndarray:
    """Right-hand side of the full (S, A, I, R) system in regime ``r``.

    The R-component is evaluated as the negated sum of the other three so the
    components cancel exactly in floating point; on the simplex this equals
    the recovery/vaccination balance term by term.
    """
    r = params._check_regime(r)
    S, A, I, R = np.asarray(x, dtype=float)
    foi = (params.beta_A[r] * A + params.beta_I[r] * I) * S
    dS = params.mu - foi - (params.mu + params.nu) * S + params.gamma * R
    dA = foi - (params.alpha + params.delta_A + params.mu) * A
    dI = params.alpha * A - (params.delta_I + params.mu) * I
    return np.array([dS, dA, dI, -(dS + dA + dI)])


def jacobian3(params: EpidemicParams, r: int, x) -> np.ndarray:
    """Analytic Jacobian of :func:`drift3` at ``x``."""
    r = params._check_regime(r)
    S, A, I = np.asarray(x, dtype=float)
    bA, bI = params.beta_A[r], params.beta_I[r]
    foi_S = bA * A + bI * I
    return np.array(
        [
            [
                -foi_S - (params.mu + params.nu + params.gamma),
                -bA * S - params.gamma,
                -bI * S - params.gamma,
            ],
            [foi_S, bA * S - (params.alpha + params.delta_A + params.mu), bI * S],
            [0.0, params.alpha, -(params.delta_I + params.mu)],
        ]
    )


# ---------------------------------------------------------------------------
# Equilibria and spectra
# ---------------------------------------------------------------------------

def dfe(params: EpidemicParams) -> np.ndarray:
    """Disease-free equilibrium, shared by every regime."""
    denom = params.mu + params.nu + params.gamma
    if denom <= 0.0:
        raise ValueError("mu + nu + gamma must be positive")
    return np.array([(params.mu + params.gamma) / denom, 0.0, 0.0])


def r0_regime(params: EpidemicParams, r: int) -> float:
    """Basic reproduction number of the frozen regime-``r`` subsystem."""
    r = params._check_regime(r)
    return (
        (params.beta_A[r] + params.alpha * params.beta_I[r] / (params.delta_I + params.mu))
        * (params.gamma + params.mu)
        / ((params.alpha + params.delta_A + params.mu) * (params.nu + params.gamma + params.mu))
    )


def f_minus_v(params: EpidemicParams, r: int) -> np.ndarray:
    """Next-generation difference matrix of the infected block at the DFE."""
    r = params._check_regime(r)
    S0 = dfe(params)[0]
    return np.array(
        [
            [
                params.beta_A[r] * S0 - (params.alpha + params.delta_A + params.mu),
                params.beta_I[r] * S0,
            ],
            [params.alpha, -(params.delta_I + params.mu)],
        ]
    )


def lambda1_sym(params: EpidemicParams, r: int) -> float:
    """Largest eigenvalue of ``B + B^T`` for ``B = f_minus_v(params, r)``.

    Closed form for the symmetrized 2x2 matrix; agrees with a numeric
    eigensolver to machine precision.
    """
    r = params._check_regime(r)
    S0 = dfe(params)[0]
    bAS0 = params.beta_A[r] * S0
    a = params.alpha + params.delta_A
    return (
        bAS0
        - (a + params.mu)
        - (params.delta_I + params.mu)
        + math.hypot(bAS0 - a + params.delta_I, params.beta_I[r] * S0 + params.alpha)
    )


@dataclass(frozen=True)
class RegimeSpectrum:
    """Spectral summary of one frozen regime."""

    r0: float
    fv_matrix: np.ndarray
    lambda1_sym: float


def regime_spectrum(params: EpidemicParams, r: int) -> RegimeSpectrum:
    return RegimeSpectrum(
        r0=r0_regime(params, r),
        fv_matrix=f_minus_v(params, r),
        lambda1_sym=lambda1_sym(params, r),
    )


def _endemic_bisect(params: EpidemicParams, r: int) -> np.ndarray:
    # Scalar reduction: with I tied to A through the symptomatic balance and
    # S eliminated from the susceptible balance, the remaining equation in A
    # is strictly decreasing, so plain bisection always brackets the root.
    bA, bI = params.beta_A[r], params.beta_I[r]
    b_eff = bA + bI * params.alpha / (params.delta_I + params.mu)
    c = 1.0 + params.alpha / (params.delta_I + params.mu)
    mu, nu, ga = params.mu, params.nu, params.gamma
    out_rate = params.alpha + params.delta_A + params.mu

    def s_of_a(a):
        return (mu + ga - ga * c * a) / (mu + nu + ga + b_eff * a)

    def h(a):
        return b_eff * s_of_a(a) - out_rate

    hi = 1.0 / c
    if ga > 0.0:
        hi = min(hi, (mu + ga) / (ga * c))
    lo = 0.0
    if h(hi) > 0.0:
        raise RuntimeError("bisection bracket failed for the endemic equilibrium")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    A = 0.5 * (lo + hi)
    S = out_rate / b_eff
    I = params.alpha * A / (params.delta_I + params.mu)
    return np.array([S, A, I])


def _newton_endemic(params: EpidemicParams, r: int, x0, tol: float, max_iter: int):
    """Damped Newton on the reduced drift; returns the iterate or None."""
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(max_iter):
        F = drift3(params, r, x)
        res = np.max(np.abs(F))
        if res <= tol:
            return x
        try:
            step = np.linalg.solve(jacobian3(params, r, x), -F)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        while lam > 1e-8:
            x_new = x + lam * step
            if np.all(x_new > 0.0) and x_new.sum() < 1.0:
                if np.max(np.abs(drift3(params, r, x_new))) < res:
                    break
            lam *= 0.5
        else:
            return None
        x = x + lam * step
    return None


def _interior_guess(params: EpidemicParams, r: int) -> np.ndarray:
    # the infection balance pins S directly; the susceptible balance then
    # yields A, and the onset balance I
    b_eff = params.beta_A[r] + params.beta_I[r] * params.alpha / (params.delta_I + params.mu)
    c = 1.0 + params.alpha / (params.delta_I + params.mu)
    S = (params.alpha + params.delta_A + params.mu) / b_eff
    A = (params.mu + params.gamma - (params.mu + params.nu + params.gamma) * S) / (
        params.alpha + params.delta_A + params.mu + params.gamma * c
    )
    A = max(A, 1e-12)
    return np.array([S, A, params.alpha * A / (params.delta_I + params.mu)])


def endemic_equilibrium(
    params: EpidemicParams, r: int, tol: float = 1e-13, max_iter: int = 100
) -> np.ndarray:
    """Interior equilibrium of the regime-``r`` subsystem.

    Only defined when ``r0_regime(params, r) > 1``.  Solved by damped Newton
    starting from a point shifted off the disease-free equilibrium; since the
    disease-free state is also a root, a limit with a vanishing infectious
    fraction is rejected and Newton restarts from an interior guess built
    from the balance equations, with bisection on the scalar reduction as the
    last resort.  The symptomatic fraction is substituted from the
    asymptomatic one at the end so their balance holds exactly.
    """
    r = params._check_regime(r)
    R0 = r0_regime(params, r)
    if R0 <= 1.0:
        raise ValueError(f"no endemic equilibrium: regime reproduction number {R0} <= 1")

    shift = min(1.0, R0 - 1.0)
    start = dfe(params) + shift * np.array([-0.1, 0.05, 0.05])
    start = np.maximum(start, 1e-8)
    total = start.sum()
    if total >= 1.0:
        start *= (1.0 - 1e-9) / total

    x = _newton_endemic(params, r, start, tol, max_iter)
    if x is None or min(x[1], x[2]) <= 1e-9:
        x = _newton_endemic(params, r, _interior_guess(params, r), tol, max_iter)
    if x is None or min(x[1], x[2]) <= 0.0:
        x = _endemic_bisect(params, r)

    # enforce the symptomatic balance exactly, then confirm the residual
    x[2] = params.alpha * x[1] / (params.delta_I + params.mu)
    res = np.max(np.abs(drift3(params, r, x)))
    if res > 1e-12:
        raise RuntimeError(f"endemic equilibrium solver did not converge, residual {res:.3e}")
    return x


# ---------------------------------------------------------------------------
# Lie bracket machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VectorField:
    """Vector field paired with (a possibly approximate) Jacobian."""

    fn: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]


def regime_field(params: EpidemicParams, r: int) -> VectorField:
    """Reduced-system vector field of regime ``r`` with its analytic Jacobian."""
    r = params._check_regime(r)
    return VectorField(
        fn=lambda x: drift3(params, r, x),
        jac=lambda x: jacobian3(params, r, x),
    )


def lie_bracket(u: VectorField, v: VectorField, x) -> np.ndarray:
    """Lie bracket ``[u, v](x) = J_v(x) u(x) - J_u(x) v(x)``."""
    x = np.asarray(x, dtype=float)
    return v.jac(x) @ u.fn(x) - u.jac(x) @ v.fn(x)


def _fd_jacobian(fn, x, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.size
    J = np.empty((n, n))
    for j in range(n):
        step = h * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += step
        xm[j] -= step
        J[:, j] = (fn(xp) - fn(xm)) / (2.0 * step)
    return J


def bracket_field(u: VectorField, v: VectorField) -> VectorField:
    """Bracket ``[u, v]`` as a field; its Jacobian uses central differences."""
    fn = lambda x: lie_bracket(u, v, x)
    return VectorField(fn=fn, jac=lambda x: _fd_jacobian(fn, x))


def lie_span_rank(
    params: EpidemicParams, x, depth: int = 2, tol: float = 1e-8
) -> int:
    """Numerical rank of the regime fields and their iterated brackets at ``x``.

    ``depth`` counts bracket nesting: 0 evaluates the fields alone, each
    further level brackets every field with the previous generation.
    Singular values below ``tol`` times the largest are treated as zero.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    x = np.asarray(x, dtype=float)
    fields = [regime_field(params, r) for r in range(params.n_regimes)]
    generation = list(fields)
    vectors = [g.fn(x) for g in generation]
    for _ in range(depth):
        generation = [bracket_field(f, g) for f in fields for g in generation]
        vectors.extend(g.fn(x) for g in generation)
    V = np.stack(vectors)
    svals = np.linalg.svd(V, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.sum(svals > tol * svals[0]))

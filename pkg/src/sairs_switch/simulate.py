"""Event-exact hybrid simulation, ensembles, and occupation statistics.

A trajectory follows the deterministic epidemic flow of whichever regime the
switching signal is in, with the state continuous across jumps.  Integration
is classical fixed-step RK4 that lands exactly on every jump time and output
sample, so the switching is not smeared across a step.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _rk4
from .model import EpidemicParams, EpidemicState4, endemic_equilibrium
from .semi_markov import RegimePath, SemiMarkovSpec, sample_path, validate_spec

GAMMA_SET_TOL = 1e-9

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed RK4 step, output grid spacing, and boundary clamp width."""

    step: float = 0.01
    sample_every: float = 0.1
    clamp_eps: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.step <= self.sample_every:
            raise ValueError("need 0 < step <= sample_every")
        if not 0.0 <= self.clamp_eps <= 1e-9:
            raise ValueError("clamp_eps must lie in [0, 1e-9]")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled hybrid trajectory: uniform grid plus every jump instant.

    ``states`` has one (S, A, I, R) row per sample; ``regimes`` and ``eta``
    give the active regime and the time since the latest jump at each sample
    (a sample taken exactly at a jump reports the new regime and ``eta = 0``).
    """

    times: np.ndarray
    states: np.ndarray
    regimes: np.ndarray
    eta: np.ndarray
    seed: int
    path: RegimePath

    def __post_init__(self):
        for arr in (self.times, self.states, self.regimes, self.eta):
            arr.setflags(write=False)

    @property
    def horizon(self) -> float:
        return self.path.horizon

    @property
    def S(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def A(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def I(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def R(self) -> np.ndarray:
        return self.states[:, 3]

    @property
    def AI(self) -> np.ndarray:
        return self.states[:, 1] + self.states[:, 2]


def derive_seed(master_seed: int, index: int) -> int:
    """Per-trajectory seed from a master seed and trajectory index.

    Counter-style derivation: reproducible and independent of the order in
    which trajectories are evaluated.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _params_arrays(params: EpidemicParams):
    return np.asarray(params.beta_A, dtype=float), np.asarray(params.beta_I, dtype=float)


def _run_kernel(kernel, x0, out_times, interval_regime, params, config, dims):
    bA, bI = _params_arrays(params)
    out_states = np.empty((out_times.shape[0], dims))
    status, where = kernel(
        np.asarray(x0, dtype=float),
        out_times,
        interval_regime,
        bA,
        bI,
        params.delta_A,
        params.delta_I,
        params.alpha,
        params.gamma,
        params.nu,
        params.mu,
        config.step,
        config.clamp_eps,
        out_states,
    )
    if status == 1:
        raise RuntimeError(
            f"integration left the invariant set near t={out_times[where]:.6g} "
            "(reduce the step size)"
        )
    if status == 2:
        raise RuntimeError(
            f"mass conservation broke near t={out_times[where]:.6g} (reduce the step size)"
        )
    return out_states


def integrate_between_jumps(params: EpidemicParams, r: int, x0, t0: float, t1: float,
                            config: IntegratorConfig | None = None):
    """Integrate the full system in one fixed regime over ``[t0, t1]``.

    Returns ``(times, states)`` sampled at ``t0``, every grid multiple of
    ``sample_every`` strictly inside the interval, and exactly at ``t1``.
    """
    if config is None:
        config = IntegratorConfig()
    r = params._check_regime(r)
    if not t1 > t0:
        raise ValueError("need t1 > t0")
    x0 = EpidemicState4.from_array(x0).as_array()
    se = config.sample_every
    k0 = int(np.floor(t0 / se + 1e-9)) + 1
    k1 = int(np.ceil(t1 / se - 1e-9)) - 1
    interior = np.arange(k0, k1 + 1, dtype=float) * se
    interior = interior[(interior > t0) & (interior < t1)]
    times = np.concatenate(([t0], interior, [t1]))
    interval_regime = np.full(times.shape[0] - 1, r, dtype=np.int64)
    states = _run_kernel(_rk4.integrate_grid_4d, x0, times, interval_regime,
                         params, config, dims=4)
    return times, states


def _output_times(path: RegimePath, sample_every: float) -> np.ndarray:
    horizon = path.horizon
    n_grid = int(np.floor(horizon / sample_every + 1e-9))
    grid = np.arange(n_grid + 1, dtype=float) * sample_every
    out = np.union1d(grid, path.jump_times)
    out = np.union1d(out, np.array([horizon]))
    return out[(out >= 0.0) & (out <= horizon)]


def simulate(params: EpidemicParams, spec: SemiMarkovSpec, x0, r0: int, horizon: float,
             config: IntegratorConfig | None = None, seed: int = 0, dims: int = 4) -> Trajectory:
    """Simulate one hybrid trajectory, deterministic given ``seed``.

    One switching signal is sampled, then each inter-jump span is integrated
    with the active regime's transmission rates, stitching the state
    continuously at jumps.  ``dims=3`` integrates the reduced system and
    reconstructs ``R = 1 - S - A - I``; the sampled switching signal is the
    same for both modes at a given seed.
    """
    if config is None:
        config = IntegratorConfig()
    report = validate_spec(spec)
    if not report.ok:
        raise ValueError("invalid semi-Markov spec: " + "; ".join(report.violations))
    if params.n_regimes != spec.state_count:
        raise ValueError(
            f"model has {params.n_regimes} regimes but the spec has {spec.state_count} states"
        )
    if dims not in (3, 4):
        raise ValueError("dims must be 3 or 4")
    x0 = EpidemicState4.from_array(x0).as_array()

    rng = _rng_from_seed(seed)
    path = sample_path(spec, r0, horizon, rng)

    times = _output_times(path, config.sample_every)
    seg = np.searchsorted(path.jump_times, times, side="right") - 1
    regimes = path.states[seg]
    eta = times - path.jump_times[seg]
    interval_regime = regimes[:-1].astype(np.int64)

    if dims == 4:
        states = _run_kernel(_rk4.integrate_grid_4d, x0, times, interval_regime,
                             params, config, dims=4)
    else:
        states3 = _run_kernel(_rk4.integrate_grid_3d, x0[:3], times, interval_regime,
                              params, config, dims=3)
        states = np.empty((times.shape[0], 4))
        states[:, :3] = states3
        states[:, 3] = 1.0 - states3.sum(axis=1)

    return Trajectory(times=times, states=states, regimes=regimes, eta=eta,
                      seed=int(seed), path=path)


# ---------------------------------------------------------------------------
# Trajectory statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeMeans:
    S: float
    A: float
    I: float
    AI: float


def time_means(traj: Trajectory, burn_in: float = 0.0) -> TimeMeans:
    """Trapezoidal time means of S, A, I and A+I over ``[burn_in, horizon]``."""
    horizon = traj.times[-1]
    if not 0.0 <= burn_in < horizon:
        raise ValueError("burn_in must lie in [0, horizon)")
    keep = traj.times > burn_in
    ts = np.concatenate(([burn_in], traj.times[keep]))
    span = horizon - burn_in
    means = []
    for col in range(3):
        y0 = np.interp(burn_in, traj.times, traj.states[:, col])
        ys = np.concatenate(([y0], traj.states[keep, col]))
        means.append(float(_trapezoid(ys, ts) / span))
    return TimeMeans(S=means[0], A=means[1], I=means[2], AI=means[1] + means[2])


@dataclass(frozen=True)
class ExtinctionResult:
    extinct: bool
    time: float | None


def check_extinction(traj: Trajectory, threshold: float = 1e-5,
                     window: float = 500.0) -> ExtinctionResult:
    """Flag sustained extinction: A+I below ``threshold`` for a full window.

    The reported time is the earliest instant by which the infectious
    fraction has stayed below the threshold over the trailing ``window``
    (exclusive of its left endpoint); ``None`` when never certified.
    """
    if not threshold > 0.0:
        raise ValueError("threshold must be positive")
    if not window > 0.0:
        raise ValueError("window must be positive")
    horizon = traj.times[-1]
    ai = traj.AI
    violations = traj.times[ai >= threshold]
    last_violation = violations[-1] if violations.size else traj.times[0]
    certified_at = last_violation + window
    if certified_at <= horizon:
        return ExtinctionResult(extinct=True, time=float(certified_at))
    return ExtinctionResult(extinct=False, time=None)


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    """Per-trajectory time means and extinction outcomes, indexed by seed order."""

    master_seed: int
    seeds: np.ndarray
    mean_S: np.ndarray
    mean_A: np.ndarray
    mean_I: np.ndarray
    mean_AI: np.ndarray
    extinct: np.ndarray
    extinction_time: np.ndarray
    extinction_fraction: float
    quantiles: dict

    @property
    def n(self) -> int:
        return self.seeds.shape[0]


def ensemble(params: EpidemicParams, spec: SemiMarkovSpec, x0, r0: int, horizon: float,
             config: IntegratorConfig | None = None, master_seed: int = 0, n: int = 1,
             burn_in: float = 0.0, threshold: float = 1e-5, window: float = 500.0,
             workers: int = 1) -> EnsembleSummary:
    """Monte Carlo ensemble of independent trajectories.

    Trajectory ``i`` uses the seed derived from ``(master_seed, i)``, so the
    summary is identical regardless of evaluation order or ``workers``.
    """
    if n < 1:
        raise ValueError("ensemble size must be at least 1")
    seeds = np.array([derive_seed(master_seed, i) for i in range(n)], dtype=np.uint64)
    mean_S = np.empty(n)
    mean_A = np.empty(n)
    mean_I = np.empty(n)
    mean_AI = np.empty(n)
    extinct = np.zeros(n, dtype=bool)
    ext_time = np.full(n, np.nan)

    def run(i: int):
        traj = simulate(params, spec, x0, r0, horizon, config, seed=int(seeds[i]))
        tm = time_means(traj, burn_in)
        ext = check_extinction(traj, threshold, window)
        return i, tm, ext

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(n)))
    else:
        results = [run(i) for i in range(n)]

    for i, tm, ext in results:
        mean_S[i] = tm.S
        mean_A[i] = tm.A
        mean_I[i] = tm.I
        mean_AI[i] = tm.AI
        extinct[i] = ext.extinct
        if ext.time is not None:
            ext_time[i] = ext.time

    qs = (0.1, 0.5, 0.9)
    quantiles = {
        name: {f"q{int(100 * q)}": float(np.quantile(vals, q)) for q in qs}
        for name, vals in (("S", mean_S), ("A", mean_A), ("I", mean_I), ("AI", mean_AI))
    }
    return EnsembleSummary(
        master_seed=int(master_seed),
        seeds=seeds,
        mean_S=mean_S,
        mean_A=mean_A,
        mean_I=mean_I,
        mean_AI=mean_AI,
        extinct=extinct,
        extinction_time=ext_time,
        extinction_fraction=float(extinct.mean()),
        quantiles=quantiles,
    )


# ---------------------------------------------------------------------------
# Occupation measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OccupationHistogram:
    """Time-weighted histogram over (S, A, I, eta, regime).

    The last bin of the eta axis pools everything above the cap; counts carry
    time units and sum to ``total_weight``.
    """

    s_edges: np.ndarray
    a_edges: np.ndarray
    i_edges: np.ndarray
    eta_edges: np.ndarray
    counts: np.ndarray
    total_weight: float

    @property
    def eta_cap(self) -> float:
        return float(self.eta_edges[-1])

    @property
    def n_regimes(self) -> int:
        return self.counts.shape[-1]

    def regime_marginal(self) -> np.ndarray:
        """Fraction of time spent in each regime."""
        return self.counts.sum(axis=(0, 1, 2, 3)) / self.total_weight

    def state_marginal(self) -> np.ndarray:
        """Normalized (S, A, I) occupancy."""
        return self.counts.sum(axis=(3, 4)) / self.total_weight


def default_eta_cap(spec: SemiMarkovSpec) -> float:
    """Cap for the since-last-jump axis: three times the longest mean sojourn."""
    return 3.0 * max(d.mean() for d in spec.holding)


def occupation(traj: Trajectory, burn_in: float, bins: int = 32, eta_bins: int = 16,
               eta_cap: float | None = None, t_end: float | None = None) -> OccupationHistogram:
    """Time-weighted occupation histogram of a trajectory window.

    Each inter-sample interval contributes its duration to the bin of its
    left sample, so the counts total exactly ``t_end - burn_in``.  With
    ``eta_cap=None`` the cap defaults to three times the longest observed
    mean sojourn of the underlying switching path.
    """
    horizon = traj.times[-1]
    if t_end is None:
        t_end = horizon
    if not 0.0 <= burn_in < t_end <= horizon:
        raise ValueError("need 0 <= burn_in < t_end <= horizon")
    if bins < 2 or eta_bins < 2:
        raise ValueError("need at least 2 bins per axis")
    if eta_cap is None:
        path = traj.path
        bounds = np.append(path.jump_times, path.horizon)
        durations = np.diff(bounds)
        caps = [
            durations[path.states == s].mean()
            for s in np.unique(path.states)
            if np.any(path.states == s)
        ]
        eta_cap = 3.0 * max(caps)
    if not eta_cap > 0.0:
        raise ValueError("eta_cap must be positive")

    times = traj.times
    j0 = np.searchsorted(times, burn_in, side="right") - 1
    je = np.searchsorted(times, t_end, side="right") - 1
    idx = np.arange(j0, je)
    w = times[j0 + 1 : je + 1] - times[j0:je]
    if idx.size:
        w = w.copy()
        w[0] = times[j0 + 1] - burn_in
    if times[je] < t_end:
        idx = np.append(idx, je)
        w = np.append(w, t_end - max(times[je], burn_in))

    M = int(traj.path.states.max()) + 1
    s_edges = np.linspace(0.0, 1.0, bins + 1)
    eta_edges = np.linspace(0.0, eta_cap, eta_bins + 1)
    shape = (bins, bins, bins, eta_bins + 1, M)

    def axis_bin(vals):
        return np.clip(np.floor(vals * bins).astype(np.int64), 0, bins - 1)

    iS = axis_bin(traj.states[idx, 0])
    iA = axis_bin(traj.states[idx, 1])
    iI = axis_bin(traj.states[idx, 2])
    iE = np.floor(traj.eta[idx] / eta_cap * eta_bins).astype(np.int64)
    iE = np.clip(iE, 0, eta_bins)  # top slot pools the overflow
    iR = traj.regimes[idx]

    flat = np.ravel_multi_index((iS, iA, iI, iE, iR), shape)
    counts = np.bincount(flat, weights=w, minlength=np.prod(shape)).reshape(shape)
    return OccupationHistogram(
        s_edges=s_edges,
        a_edges=s_edges.copy(),
        i_edges=s_edges.copy(),
        eta_edges=eta_edges,
        counts=counts,
        total_weight=float(w.sum()),
    )


def stationarity_tv(h1: OccupationHistogram, h2: OccupationHistogram) -> float:
    """Total-variation distance between two normalized occupation histograms."""
    same = (
        h1.counts.shape == h2.counts.shape
        and np.array_equal(h1.s_edges, h2.s_edges)
        and np.array_equal(h1.a_edges, h2.a_edges)
        and np.array_equal(h1.i_edges, h2.i_edges)
        and np.array_equal(h1.eta_edges, h2.eta_edges)
    )
    if not same:
        raise ValueError("histograms use different binning")
    p = h1.counts / h1.total_weight
    q = h2.counts / h2.total_weight
    return float(0.5 * np.abs(p - q).sum())


# ---------------------------------------------------------------------------
# Composed deterministic flows
# ---------------------------------------------------------------------------

def psi_reachable(params: EpidemicParams, start=None, legs=(),
                  config: IntegratorConfig | None = None) -> np.ndarray:
    """Compose frozen-regime flows: follow regime ``r`` for ``t`` per leg.

    ``start=None`` begins at the endemic equilibrium of regime 0.  Returns
    the reduced (S, A, I) endpoint of the composition.
    """
    if config is None:
        config = IntegratorConfig()
    if start is None:
        start = endemic_equilibrium(params, 0)
    x = np.asarray(start, dtype=float).copy()
    if x.shape != (3,) or np.any(x <= 0.0) or x.sum() >= 1.0:
        raise ValueError("start must be strictly inside the invariant set")
    for r, duration in legs:
        r = params._check_regime(r)
        if duration < 0.0:
            raise ValueError("leg durations must be nonnegative")
        if duration == 0.0:
            continue
        times = np.array([0.0, float(duration)])
        interval_regime = np.array([r], dtype=np.int64)
        states = _run_kernel(_rk4.integrate_grid_3d, x, times, interval_regime,
                             params, config, dims=3)
        x = states[-1]
    return x

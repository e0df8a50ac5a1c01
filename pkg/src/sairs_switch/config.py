"""Scenario configuration files: INI-style sections, strictly validated.

Layout (states are numbered 1..M in files, converted to 0-based indices in
memory)::

    [model]
    beta_A = 0.004, 0.97
    beta_I = 0.008, 0.99
    delta_A = 0.105
    ...

    [switching]
    states = 2
    row_1 = 0, 1
    row_2 = 1, 0

    [switching.state.1]
    distribution = gamma
    shape = 6.0
    rate = 0.8

    [initial]
    S = 0.6
    ...
    regime = 1

    [run]
    horizon = 5000
    seed = 1
    ...

Unknown sections or keys are rejected; every violation is reported with its
key path.  Only integrator and analysis settings carry defaults.
"""

from __future__ import annotations

import configparser
import io as _io
from dataclasses import dataclass, field

from .model import EpidemicParams, EpidemicState4
from .semi_markov import Exponential, Gamma, SemiMarkovSpec, Weibull, validate_spec
from .simulate import IntegratorConfig


class ConfigError(ValueError):
    """Raised with the full list of configuration violations."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


_MODEL_KEYS = ("beta_A", "beta_I", "delta_A", "delta_I", "alpha", "gamma", "nu", "mu")
_INITIAL_KEYS = ("S", "A", "I", "R", "regime")
_RUN_REQUIRED = ("horizon", "seed")
_RUN_OPTIONAL = {
    "trajectories": None,
    "burn_in": 0.0,
    "out": None,
    "step": 0.01,
    "sample_every": 0.1,
    "clamp_eps": 1e-12,
    "bins": 32,
    "eta_bins": 16,
    "eta_cap": None,
    "extinction_threshold": 1e-5,
    "extinction_window": 500.0,
}
_DIST_FIELDS = {
    "gamma": ("shape", "rate"),
    "exponential": ("rate",),
    "weibull": ("shape", "scale"),
}


@dataclass(frozen=True)
class ScenarioConfig:
    params: EpidemicParams
    spec: SemiMarkovSpec
    initial: EpidemicState4
    initial_regime: int  # 0-based
    horizon: float
    seed: int
    trajectories: int | None = None
    burn_in: float = 0.0
    out: str | None = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    bins: int = 32
    eta_bins: int = 16
    eta_cap: float | None = None
    extinction_threshold: float = 1e-5
    extinction_window: float = 500.0


def _parse_float(raw, path, errors):
    try:
        return float(raw)
    except ValueError:
        errors.append(f"{path}: cannot parse {raw!r} as a number")
        return None


def _parse_int(raw, path, errors):
    try:
        return int(raw)
    except ValueError:
        errors.append(f"{path}: cannot parse {raw!r} as an integer")
        return None


def _parse_float_list(raw, path, errors):
    parts = [p for p in raw.replace(",", " ").split() if p]
    out = []
    for p in parts:
        v = _parse_float(p, path, errors)
        if v is None:
            return None
        out.append(v)
    return out


def _build_distribution(section, path, errors):
    kind = section.get("distribution")
    if kind is None:
        errors.append(f"{path}.distribution: missing")
        return None
    kind = kind.strip().lower()
    if kind not in _DIST_FIELDS:
        errors.append(
            f"{path}.distribution: unknown kind {kind!r} "
            f"(expected one of {sorted(_DIST_FIELDS)})"
        )
        return None
    wanted = _DIST_FIELDS[kind]
    for key in section:
        if key != "distribution" and key not in wanted:
            errors.append(f"{path}.{key}: unknown key for a {kind} distribution")
            return None
    values = {}
    for name in wanted:
        if name not in section:
            errors.append(f"{path}.{name}: missing")
            return None
        v = _parse_float(section[name], f"{path}.{name}", errors)
        if v is None:
            return None
        values[name] = v
    try:
        if kind == "gamma":
            return Gamma(values["shape"], values["rate"])
        if kind == "exponential":
            return Exponential(values["rate"])
        return Weibull(values["shape"], values["scale"])
    except ValueError as exc:
        errors.append(f"{path}: {exc}")
        return None


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario; raises :class:`ConfigError`."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    errors: list[str] = []
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from exc

    sections = {name: dict(parser[name]) for name in parser.sections()}

    for required in ("model", "switching", "initial", "run"):
        if required not in sections:
            errors.append(f"{required}: section missing")
    if errors:
        raise ConfigError(errors)

    # ---- model -------------------------------------------------------
    model = sections.pop("model")
    for key in model:
        if key not in _MODEL_KEYS:
            errors.append(f"model.{key}: unknown key")
    model_vals = {}
    for key in _MODEL_KEYS:
        if key not in model:
            errors.append(f"model.{key}: missing")
            continue
        path = f"model.{key}"
        if key in ("beta_A", "beta_I"):
            model_vals[key] = _parse_float_list(model[key], path, errors)
        else:
            model_vals[key] = _parse_float(model[key], path, errors)

    # ---- switching ---------------------------------------------------
    switching = sections.pop("switching")
    n_states = None
    if "states" not in switching:
        errors.append("switching.states: missing")
    else:
        n_states = _parse_int(switching["states"], "switching.states", errors)
        if n_states is not None and n_states < 2:
            errors.append(f"switching.states: need at least 2 states, got {n_states}")
            n_states = None

    rows = None
    if n_states is not None:
        rows = []
        expected_rows = {f"row_{i}" for i in range(1, n_states + 1)}
        for key in switching:
            if key != "states" and key not in expected_rows:
                errors.append(f"switching.{key}: unknown key")
        for i in range(1, n_states + 1):
            key = f"row_{i}"
            if key not in switching:
                errors.append(f"switching.{key}: missing")
                rows = None
                break
            row = _parse_float_list(switching[key], f"switching.{key}", errors)
            if row is None or len(row) != n_states:
                if row is not None:
                    errors.append(
                        f"switching.{key}: expected {n_states} entries, got {len(row)}"
                    )
                rows = None
                break
            rows.append(row)

    holding = None
    if n_states is not None:
        holding = []
        state_sections = {
            name for name in sections if name.startswith("switching.state.")
        }
        expected_sections = {f"switching.state.{i}" for i in range(1, n_states + 1)}
        for name in sorted(state_sections - expected_sections):
            errors.append(f"{name}: unknown section")
        for i in range(1, n_states + 1):
            name = f"switching.state.{i}"
            if name not in sections:
                errors.append(f"{name}: section missing")
                holding = None
                break
            dist = _build_distribution(sections.pop(name), name, errors)
            if dist is None:
                holding = None
                break
            holding.append(dist)
        for name in state_sections & set(sections):
            sections.pop(name)

    # ---- initial -----------------------------------------------------
    initial = sections.pop("initial")
    for key in initial:
        if key not in _INITIAL_KEYS:
            errors.append(f"initial.{key}: unknown key")
    initial_vals = {}
    for key in _INITIAL_KEYS:
        if key not in initial:
            errors.append(f"initial.{key}: missing")
            continue
        path = f"initial.{key}"
        if key == "regime":
            initial_vals[key] = _parse_int(initial[key], path, errors)
        else:
            initial_vals[key] = _parse_float(initial[key], path, errors)

    # ---- run ---------------------------------------------------------
    run = sections.pop("run")
    known_run = set(_RUN_REQUIRED) | set(_RUN_OPTIONAL)
    for key in run:
        if key not in known_run:
            errors.append(f"run.{key}: unknown key")
    run_vals = dict(_RUN_OPTIONAL)
    for key in _RUN_REQUIRED:
        if key not in run:
            errors.append(f"run.{key}: missing")
    if "horizon" in run:
        run_vals["horizon"] = _parse_float(run["horizon"], "run.horizon", errors)
    if "seed" in run:
        run_vals["seed"] = _parse_int(run["seed"], "run.seed", errors)
    for key, kind in (
        ("trajectories", int),
        ("bins", int),
        ("eta_bins", int),
        ("burn_in", float),
        ("step", float),
        ("sample_every", float),
        ("clamp_eps", float),
        ("eta_cap", float),
        ("extinction_threshold", float),
        ("extinction_window", float),
    ):
        if key in run:
            parse = _parse_int if kind is int else _parse_float
            run_vals[key] = parse(run[key], f"run.{key}", errors)
    if "out" in run:
        run_vals["out"] = run["out"].strip()

    for name in sections:
        errors.append(f"{name}: unknown section")
    if errors:
        raise ConfigError(errors)

    # ---- semantic assembly --------------------------------------------
    params = spec = state = integrator = None
    try:
        params = EpidemicParams(
            beta_A=tuple(model_vals["beta_A"]),
            beta_I=tuple(model_vals["beta_I"]),
            delta_A=model_vals["delta_A"],
            delta_I=model_vals["delta_I"],
            alpha=model_vals["alpha"],
            gamma=model_vals["gamma"],
            nu=model_vals["nu"],
            mu=model_vals["mu"],
        )
    except ValueError as exc:
        errors.append(f"model: {exc}")

    try:
        spec = SemiMarkovSpec(rows, holding)
    except ValueError as exc:
        errors.append(f"switching: {exc}")
    if spec is not None:
        report = validate_spec(spec)
        for violation in report.violations:
            errors.append(f"switching: {violation}")
        if not report.ok:
            spec = None

    try:
        state = EpidemicState4(
            S=initial_vals["S"], A=initial_vals["A"],
            I=initial_vals["I"], R=initial_vals["R"],
        )
    except ValueError as exc:
        errors.append(f"initial: {exc}")

    regime0 = initial_vals["regime"]
    if not 1 <= regime0 <= n_states:
        errors.append(
            f"initial.regime: state {regime0} out of range 1..{n_states}"
        )

    if params is not None and params.n_regimes != n_states:
        errors.append(
            f"model: beta lists have {params.n_regimes} entries "
            f"but switching.states = {n_states}"
        )

    try:
        integrator = IntegratorConfig(
            step=run_vals["step"],
            sample_every=run_vals["sample_every"],
            clamp_eps=run_vals["clamp_eps"],
        )
    except ValueError as exc:
        errors.append(f"run: {exc}")

    if not (run_vals["horizon"] and run_vals["horizon"] > 0.0):
        errors.append(f"run.horizon: must be positive, got {run_vals['horizon']}")
    if run_vals["trajectories"] is not None and run_vals["trajectories"] < 1:
        errors.append(f"run.trajectories: must be at least 1, got {run_vals['trajectories']}")
    if run_vals["burn_in"] < 0.0 or (
        run_vals["horizon"] and run_vals["burn_in"] >= run_vals["horizon"]
    ):
        errors.append(f"run.burn_in: must lie in [0, horizon), got {run_vals['burn_in']}")

    if errors:
        raise ConfigError(errors)

    return ScenarioConfig(
        params=params,
        spec=spec,
        initial=state,
        initial_regime=regime0 - 1,
        horizon=run_vals["horizon"],
        seed=run_vals["seed"],
        trajectories=run_vals["trajectories"],
        burn_in=run_vals["burn_in"],
        out=run_vals["out"],
        integrator=integrator,
        bins=run_vals["bins"],
        eta_bins=run_vals["eta_bins"],
        eta_cap=run_vals["eta_cap"],
        extinction_threshold=run_vals["extinction_threshold"],
        extinction_window=run_vals["extinction_window"],
    )


def _dist_lines(dist) -> list[str]:
    if isinstance(dist, Gamma):
        return ["distribution = gamma", f"shape = {dist.shape!r}", f"rate = {dist.rate!r}"]
    if isinstance(dist, Exponential):
        return ["distribution = exponential", f"rate = {dist.rate!r}"]
    return ["distribution = weibull", f"shape = {dist.shape!r}", f"scale = {dist.scale!r}"]


def serialize_config(cfg: ScenarioConfig) -> str:
    """Render a config back to file text; floats keep full precision."""
    p, spec = cfg.params, cfg.spec
    out = _io.StringIO()
    w = out.write
    w("[model]\n")
    w(f"beta_A = {', '.join(repr(b) for b in p.beta_A)}\n")
    w(f"beta_I = {', '.join(repr(b) for b in p.beta_I)}\n")
    for name in ("delta_A", "delta_I", "alpha", "gamma", "nu", "mu"):
        w(f"{name} = {getattr(p, name)!r}\n")
    w("\n[switching]\n")
    w(f"states = {spec.state_count}\n")
    for i in range(spec.state_count):
        w(f"row_{i + 1} = {', '.join(repr(float(v)) for v in spec.transition[i])}\n")
    for i, dist in enumerate(spec.holding):
        w(f"\n[switching.state.{i + 1}]\n")
        for line in _dist_lines(dist):
            w(line + "\n")
    w("\n[initial]\n")
    for name in ("S", "A", "I", "R"):
        w(f"{name} = {getattr(cfg.initial, name)!r}\n")
    w(f"regime = {cfg.initial_regime + 1}\n")
    w("\n[run]\n")
    w(f"horizon = {cfg.horizon!r}\n")
    w(f"seed = {cfg.seed}\n")
    if cfg.trajectories is not None:
        w(f"trajectories = {cfg.trajectories}\n")
    w(f"burn_in = {cfg.burn_in!r}\n")
    if cfg.out is not None:
        w(f"out = {cfg.out}\n")
    w(f"step = {cfg.integrator.step!r}\n")
    w(f"sample_every = {cfg.integrator.sample_every!r}\n")
    w(f"clamp_eps = {cfg.integrator.clamp_eps!r}\n")
    w(f"bins = {cfg.bins}\n")
    w(f"eta_bins = {cfg.eta_bins}\n")
    if cfg.eta_cap is not None:
        w(f"eta_cap = {cfg.eta_cap!r}\n")
    w(f"extinction_threshold = {cfg.extinction_threshold!r}\n")
    w(f"extinction_window = {cfg.extinction_window!r}\n")
    return out.getvalue()

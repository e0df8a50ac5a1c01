"""Command-line front end: validate, thresholds, simulate, ensemble, occupation, reproduce.

Exit codes: 0 success, 1 configuration/validation failure, 2 reference-value
mismatch in ``reproduce``, 3 runtime failure (integration or I/O).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__, cases, thresholds
from .config import ConfigError, ScenarioConfig, parse_config
from .io import (
    ensemble_to_dict,
    histogram_to_dict,
    report_to_dict,
    write_json,
    write_trajectory_csv,
)
from .model import dfe, r0_regime
from .semi_markov import ergodic_weights
from .simulate import default_eta_cap, ensemble, occupation, simulate
from .thresholds import threshold_report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sairs-switch",
        description="SAIRS epidemic model with semi-Markov switching: "
        "thresholds, hybrid simulation, occupation statistics.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_config=True):
        p = sub.add_parser(name, help=help_text)
        if needs_config:
            p.add_argument("--config", required=True, help="scenario config file")
            p.add_argument("--seed", type=int, default=None, help="override run.seed")
            p.add_argument("--horizon", type=float, default=None, help="override run.horizon")
            p.add_argument("--out", default=None, help="override output path")
            p.add_argument("--trajectories", type=int, default=None,
                           help="override ensemble size")
        p.add_argument("--quiet", action="store_true", help="suppress status output")
        return p

    add("validate", "check a scenario config and report every violation")
    add("thresholds", "compute margins, reproduction numbers and the verdict")
    add("simulate", "write one trajectory as CSV")
    add("ensemble", "run independent trajectories and write the summary JSON")
    add("occupation", "estimate the occupation histogram and write it as JSON")
    rep = add("reproduce", "recompute built-in reference scenarios", needs_config=False)
    rep.add_argument("case", choices=cases.CASE_IDS + ("all",))
    return parser


def _load(args) -> ScenarioConfig:
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"]) from exc
    cfg = parse_config(text)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.out is not None:
        overrides["out"] = args.out
    if args.trajectories is not None:
        overrides["trajectories"] = args.trajectories
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _emit(payload: dict, out: str | None) -> None:
    if out is None:
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        write_json(payload, out)


def _cmd_validate(args) -> int:
    _load(args)
    if not args.quiet:
        print("configuration OK")
    return 0


def _cmd_thresholds(args) -> int:
    cfg = _load(args)
    weights = ergodic_weights(cfg.spec)
    report = threshold_report(cfg.params, weights)
    payload = report_to_dict(
        report,
        per_regime_r0=[r0_regime(cfg.params, r) for r in range(cfg.params.n_regimes)],
        s0=float(dfe(cfg.params)[0]),
    )
    _emit(payload, cfg.out)
    if not args.quiet and cfg.out is not None:
        print(f"thresholds written to {cfg.out}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    if cfg.out is None:
        raise ConfigError(["run.out: required for simulate (or pass --out)"])
    traj = simulate(cfg.params, cfg.spec, cfg.initial.as_array(), cfg.initial_regime,
                    cfg.horizon, cfg.integrator, seed=cfg.seed)
    write_trajectory_csv(traj, cfg.out)
    if not args.quiet:
        print(f"trajectory ({traj.times.shape[0]} samples) written to {cfg.out}")
    return 0


def _cmd_ensemble(args) -> int:
    cfg = _load(args)
    if cfg.trajectories is None:
        raise ConfigError(["run.trajectories: required for ensemble (or pass --trajectories)"])
    summary = ensemble(
        cfg.params, cfg.spec, cfg.initial.as_array(), cfg.initial_regime, cfg.horizon,
        cfg.integrator, master_seed=cfg.seed, n=cfg.trajectories, burn_in=cfg.burn_in,
        threshold=cfg.extinction_threshold, window=cfg.extinction_window,
    )
    _emit(ensemble_to_dict(summary), cfg.out)
    if not args.quiet and cfg.out is not None:
        print(f"ensemble summary ({summary.n} trajectories) written to {cfg.out}")
    return 0


def _cmd_occupation(args) -> int:
    cfg = _load(args)
    traj = simulate(cfg.params, cfg.spec, cfg.initial.as_array(), cfg.initial_regime,
                    cfg.horizon, cfg.integrator, seed=cfg.seed)
    eta_cap = cfg.eta_cap if cfg.eta_cap is not None else default_eta_cap(cfg.spec)
    hist = occupation(traj, burn_in=cfg.burn_in, bins=cfg.bins,
                      eta_bins=cfg.eta_bins, eta_cap=eta_cap)
    _emit(histogram_to_dict(hist), cfg.out)
    if not args.quiet and cfg.out is not None:
        print(f"occupation histogram written to {cfg.out}")
    return 0


def _cmd_reproduce(args) -> int:
    ids = cases.CASE_IDS if args.case == "all" else (args.case,)
    failures = 0
    for case_id in ids:
        case = cases.CASES[case_id]
        weights = ergodic_weights(case.spec)
        for expected in case.expected:
            fn = getattr(thresholds, expected.quantity)
            got = fn(case.params, weights)
            diff = abs(got - expected.value)
            ok = diff <= expected.tol
            failures += 0 if ok else 1
            if not args.quiet or not ok:
                print(
                    f"case {case_id:>2}  {expected.quantity:<20} "
                    f"expected {expected.value:>9.4f}  got {got:>12.6f}  "
                    f"|diff| {diff:.2e} <= {expected.tol:.0e}  "
                    f"{'PASS' if ok else 'FAIL'}"
                )
    if failures:
        print(f"{failures} reference value(s) did not reproduce", file=sys.stderr)
        return 2
    if not args.quiet:
        print("all reference values reproduced")
    return 0


_HANDLERS = {
    "validate": _cmd_validate,
    "thresholds": _cmd_thresholds,
    "simulate": _cmd_simulate,
    "ensemble": _cmd_ensemble,
    "occupation": _cmd_occupation,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

#!/usr/bin/env python3
"""The switching environment: holding-time laws, path sampling, ergodics.

Builds the two-state alternating environment with gamma sojourns, samples a
switching signal, and checks the long-run time the signal spends in each
state against the ergodic prediction pi_r * m_r / sum(pi * m).
"""

import numpy as np

from sairs_switch import (
    Gamma,
    SemiMarkovSpec,
    Weibull,
    empirical_time_average,
    ergodic_limit,
    ergodic_weights,
    eta_at,
    hazard,
    mean_sojourn,
    regime_at,
    sample_path,
    validate_spec,
)


def main():
    spec = SemiMarkovSpec(
        transition=[[0.0, 1.0], [1.0, 0.0]],
        holding=(Gamma(shape=6.0, rate=0.8), Gamma(shape=12.0, rate=0.8)),
    )
    report = validate_spec(spec)
    print(f"spec valid: {report.ok}")

    weights = ergodic_weights(spec)
    print(f"embedded stationary pi = {weights.pi}")
    print(f"mean sojourn times   m = {weights.m}")
    print(f"occupation fractions   = {weights.occupation_fractions()}\n")

    print("hazard of the state-0 sojourn law (increasing: aging distribution):")
    for t in (0.5, 2.0, 7.5, 20.0):
        print(f"  t = {t:5.1f}  ->  {hazard(spec.holding[0], t):.4f}")
    wb = Weibull(shape=2.0, scale=10.0)
    print(f"a Weibull(2, 10) law would have mean {mean_sojourn(wb):.3f}\n")

    rng = np.random.default_rng(7)
    path = sample_path(spec, r0=0, horizon=50_000.0, rng=rng)
    print(f"sampled one signal over horizon {path.horizon:g}: {path.jump_count} jumps")
    t_probe = 100.0
    print(f"state at t={t_probe:g}: {regime_at(path, t_probe)}, "
          f"time since last jump: {eta_at(path, t_probe):.3f}\n")

    print("time spent in each state vs the ergodic limit:")
    for state in (0, 1):
        indicator = np.eye(2)[state]
        empirical = empirical_time_average(path, indicator)
        predicted = ergodic_limit(weights, indicator)
        print(f"  state {state}: empirical {empirical:.4f}   predicted {predicted:.4f}")


if __name__ == "__main__":
    main()

"""File formats: trajectory CSV, histogram/report JSON, atomic writes."""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .simulate import EnsembleSummary, OccupationHistogram, Trajectory
from .thresholds import ThresholdReport

TRAJECTORY_HEADER = "t,S,A,I,R,regime,eta"


def _atomic_write_text(path: str, write_body) -> None:
    # temp file in the destination directory, then rename over the target
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            write_body(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv_rows(traj: Trajectory):
    """Yield the header and one CSV row per sample (17 significant digits)."""
    yield TRAJECTORY_HEADER
    for i in range(traj.times.shape[0]):
        s = traj.states[i]
        yield (
            f"{traj.times[i]:.17g},{s[0]:.17g},{s[1]:.17g},{s[2]:.17g},{s[3]:.17g},"
            f"{traj.regimes[i]},{traj.eta[i]:.17g}"
        )


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    def body(fh):
        for row in trajectory_csv_rows(traj):
            fh.write(row)
            fh.write("\n")

    _atomic_write_text(path, body)


def write_json(obj, path: str) -> None:
    _atomic_write_text(path, lambda fh: json.dump(obj, fh, indent=2))


def histogram_to_dict(hist: OccupationHistogram) -> dict:
    return {
        "s_edges": hist.s_edges.tolist(),
        "a_edges": hist.a_edges.tolist(),
        "i_edges": hist.i_edges.tolist(),
        "eta_edges": hist.eta_edges.tolist(),
        "eta_overflow_bin": True,
        "shape": list(hist.counts.shape),
        "counts": hist.counts.ravel().tolist(),
        "total_weight": hist.total_weight,
    }


def histogram_from_dict(d: dict) -> OccupationHistogram:
    shape = tuple(d["shape"])
    return OccupationHistogram(
        s_edges=np.asarray(d["s_edges"], dtype=float),
        a_edges=np.asarray(d["a_edges"], dtype=float),
        i_edges=np.asarray(d["i_edges"], dtype=float),
        eta_edges=np.asarray(d["eta_edges"], dtype=float),
        counts=np.asarray(d["counts"], dtype=float).reshape(shape),
        total_weight=float(d["total_weight"]),
    )


def ensemble_to_dict(summary: EnsembleSummary) -> dict:
    ext_time = [None if np.isnan(t) else t for t in summary.extinction_time]
    return {
        "master_seed": summary.master_seed,
        "n": summary.n,
        "seeds": [int(s) for s in summary.seeds],
        "time_means": {
            "S": summary.mean_S.tolist(),
            "A": summary.mean_A.tolist(),
            "I": summary.mean_I.tolist(),
            "AI": summary.mean_AI.tolist(),
        },
        "extinct": summary.extinct.tolist(),
        "extinction_time": ext_time,
        "extinction_fraction": summary.extinction_fraction,
        "quantiles": summary.quantiles,
    }


def report_to_dict(report: ThresholdReport, per_regime_r0=None, s0: float | None = None) -> dict:
    out = {
        "classification": report.classification.value,
        "composite_r0": report.composite_r0,
        "margins": {
            "equal": report.margin_equal,
            "ext_maxmin": report.margin_ext_maxmin,
            "ext_spectral": report.margin_ext_spectral,
            "pers": report.margin_pers,
        },
        "normalized_margins": {
            "equal": report.normalized(report.margin_equal),
            "ext_maxmin": report.normalized(report.margin_ext_maxmin),
            "ext_spectral": report.normalized(report.margin_ext_spectral),
            "pers": report.normalized(report.margin_pers),
        },
        "weight_total": report.weight_total,
        "bounds": None,
    }
    if report.bounds is not None:
        out["bounds"] = {
            "s_bound": report.bounds.s_bound,
            "ai_bound": report.bounds.ai_bound,
            "i_bound": report.bounds.i_bound,
            "a_bound": report.bounds.a_bound,
        }
    if per_regime_r0 is not None:
        out["per_regime_r0"] = list(per_regime_r0)
    if s0 is not None:
        out["s0"] = s0
    return out

"""One configured experiment end to end: run, audit, write outputs."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from .config import ExperimentConfig
from .diagnostics import (
    CSV_COLUMNS,
    diagnostic_coupling,
    resolved_until,
    riccati_audit,
)
from .evolve import REACHED_T_END, RunResult, estimate_blowup_time, run
from .models import biot_savart
from .spectral import spectral_derivative

# Fit settings for the blow-up estimator; the relaxed residual accepts the
# steeper-than-pole growth a spectral run shows once it leaves resolution.
FIT_FRACTION = 0.25
FIT_RESIDUAL_THRESHOLD = 0.5


def preflight_output_dir(path: str) -> Path:
    """Create the output directory and prove writability before any stepping."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_probe"
    try:
        probe.write_text("ok")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc
    return out


def theorem_audit(result: RunResult, config: ExperimentConfig) -> Dict[str, object]:
    """Pass/fail of every theorem-run invariant, judged inside the resolved phase."""
    c = diagnostic_coupling(config.model)
    L = config.grid.period_L
    records = result.diagnostics
    t_res = resolved_until(records)
    res = [r for r in records if r.t < t_res]
    out: Dict[str, object] = {
        "resolved_until": t_res if np.isfinite(t_res) else None
    }

    F0 = records[0].F
    out["F0"] = F0
    out["bound_L_over_F0"] = L / F0 if F0 > 0 else None

    estimate = None
    if len(records) >= 8:
        estimate = estimate_blowup_time(
            result.sup_series,
            fit_fraction=FIT_FRACTION,
            residual_threshold=FIT_RESIDUAL_THRESHOLD,
        )
    out["estimated_blowup_time"] = estimate
    # the bound is only falsifiable once the horizon passes L/F(0)
    if F0 > 0 and config.stepper.t_end > L / F0:
        out["blowup_bound_holds"] = (
            estimate is not None
            and estimate <= 1.05 * L / F0
            and result.termination != REACHED_T_END
        )

    E0 = records[0].E
    out["energy_conserved"] = bool(
        all(abs(r.E - E0) <= 1e-6 * max(abs(E0), 1.0) for r in res)
    )
    out["F_monotone"] = bool(
        all(
            res[i + 1].F >= res[i].F - 1e-6 * max(abs(res[i].F), 1.0)
            for i in range(len(res) - 1)
        )
    )
    out["G_nonnegative"] = bool(all(r.G >= -1e-9 for r in res))
    out["symmetry_preserved"] = bool(
        all(r.odd_defect_omega <= 1e-9 and r.even_defect_theta <= 1e-9 for r in res)
    )
    out["endpoint_pinned"] = bool(
        all(r.endpoint_omega <= 1e-9 * max(r.sup_omega, 1e-300) for r in res)
    )
    out["sign_preserved"] = bool(
        all(r.min_omega_half >= -1e-8 * max(r.sup_omega, 1e-300) for r in res)
    )
    thetax_ok = True
    for record, state in zip(records, result.states):
        if record.t >= t_res or state.theta is None:
            continue
        theta_x = spectral_derivative(state.theta).values
        sup_tx = max(float(np.max(np.abs(theta_x))), 1e-300)
        if record.min_thetax_half < -1e-8 * sup_tx:
            thetax_ok = False
            break
    out["thetax_sign_preserved"] = thetax_ok

    theta_sups = [
        float(np.max(np.abs(s.theta.values))) if s.theta is not None else 0.0
        for s in result.states
    ]
    ok_theta = True
    for i in range(len(res) - 1):
        dt = res[i + 1].t - res[i].t
        if theta_sups[i + 1] > theta_sups[i] * (1.0 + 1e-9 * dt) + 1e-300:
            ok_theta = False
            break
    out["theta_max_principle"] = ok_theta

    if len(records) >= 3:
        samples = [a for a in riccati_audit(result, c) if a.t < t_res]
        out["riccati_margin_ok"] = bool(
            all(a.riccati_margin >= -1e-4 * max(a.F**2, 1.0) for a in samples)
        )
        out["cauchy_schwarz_ok"] = bool(
            all(a.cauchy_rhs - a.cauchy_lhs >= -1e-9 * a.cauchy_lhs for a in samples)
        )
        if F0 > 0:
            out["envelope_ok"] = bool(
                all(
                    1.0 / a.F <= 1.0 / F0 - a.t / L + 1e-3
                    for a in samples
                    if a.F > 0
                )
            )
    return out


def emit_outputs(
    result: RunResult,
    config: ExperimentConfig,
    audits: Optional[Dict[str, object]] = None,
) -> Dict[str, Path]:
    """Write diagnostics.csv, run.json and any configured state snapshots."""
    out = Path(config.output_dir)
    paths: Dict[str, Path] = {}

    csv_path = out / "diagnostics.csv"
    with open(csv_path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for record in result.diagnostics:
            fh.write(record.to_csv_row() + "\n")
    paths["diagnostics"] = csv_path

    summary = {
        "config": config.raw,
        "termination": result.termination,
        "t_final": result.t_final,
        "n_samples": len(result.diagnostics),
        "estimated_blowup_time": estimate_blowup_time(
            result.sup_series,
            fit_fraction=FIT_FRACTION,
            residual_threshold=FIT_RESIDUAL_THRESHOLD,
        )
        if len(result.diagnostics) >= 8
        else None,
        "audits": audits if audits is not None else {},
    }
    json_path = out / "run.json"
    json_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    paths["run"] = json_path

    times = np.array([s.time for s in result.states])
    for i, t_want in enumerate(config.snapshot_times):
        state = result.states[int(np.argmin(np.abs(times - t_want)))]
        u = biot_savart(config.model, state.omega)
        snap_path = out / f"snapshot_{i:03d}.csv"
        with open(snap_path, "w") as fh:
            fh.write(f"# t = {state.time!r}\n")
            fh.write("x,omega,theta,u\n")
            theta = state.theta.values if state.theta is not None else np.zeros_like(u.values)
            for row in zip(state.grid.nodes, state.omega.values, theta, u.values):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        paths[f"snapshot_{i}"] = snap_path
    return paths


def run_experiment(config: ExperimentConfig) -> Dict[str, object]:
    """Pre-flight, run, audit (when tagged) and emit; returns a summary dict."""
    preflight_output_dir(config.output_dir)
    init = config.initial_state()
    result = run(config.model, init, config.stepper)
    audits = theorem_audit(result, config) if config.theorem_tagged else None
    paths = emit_outputs(result, config, audits)
    failed = []
    if audits:
        failed = [k for k, v in audits.items() if isinstance(v, bool) and not v]
    return {
        "result": result,
        "audits": audits,
        "paths": paths,
        "failed_audits": failed,
    }

"""Adaptive RK4 time integration with blow-up termination and T* estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .diagnostics import DiagnosticRecord, compute_record, diagnostic_coupling, fill_margin_fields
from .grid import PeriodicField
from .models import EvolutionState, ModelSpec, StateRate, biot_savart, rhs

REACHED_T_END = "reached_t_end"
SUP_CAP_HIT = "sup_cap_hit"
DT_UNDERFLOW = "dt_underflow"

_SPEED_FLOOR = 1e-300


@dataclass(frozen=True)
class StepperConfig:
    t_end: float
    cfl: float = 0.4
    dt_min: float = 1e-10
    dt_max: float = 0.05
    omega_sup_cap: float = 1e6
    record_every: int = 10
    dealias: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if not 0 < self.dt_min <= self.dt_max:
            raise ValueError("need 0 < dt_min <= dt_max")
        if self.t_end <= 0 or self.omega_sup_cap <= 0:
            raise ValueError("t_end and omega_sup_cap must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be a positive integer")


@dataclass
class RunResult:
    states: List[EvolutionState]
    diagnostics: List[DiagnosticRecord]
    termination: str
    t_final: float

    @property
    def sup_series(self) -> np.ndarray:
        return np.array([(r.t, r.sup_omega) for r in self.diagnostics])


def _check_finite(values: np.ndarray, stage: int) -> None:
    if not np.all(np.isfinite(values)):
        raise FloatingPointError(f"numerical overflow in stage {stage}")


def _finite_field(s: EvolutionState, values: np.ndarray, stage: int) -> PeriodicField:
    _check_finite(values, stage)
    return PeriodicField(s.grid, values)


def _advanced(s: EvolutionState, rate: StateRate, coef: float, stage: int) -> EvolutionState:
    omega = _finite_field(s, s.omega.values + coef * rate.d_omega, stage)
    theta = None
    if s.theta is not None:
        theta = _finite_field(s, s.theta.values + coef * rate.d_theta, stage)
    return EvolutionState(omega, theta, s.time)


def step_rk4(
    model: ModelSpec, s: EvolutionState, dt: float, dealias: bool = False
) -> EvolutionState:
    """One classical 4-stage explicit step of the model's dynamics."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    k1 = rhs(model, s, dealias)
    _check_finite(k1.d_omega, 1)
    k2 = rhs(model, _advanced(s, k1, dt / 2, 2), dealias)
    _check_finite(k2.d_omega, 2)
    k3 = rhs(model, _advanced(s, k2, dt / 2, 3), dealias)
    _check_finite(k3.d_omega, 3)
    k4 = rhs(model, _advanced(s, k3, dt, 4), dealias)
    _check_finite(k4.d_omega, 4)

    d_omega = (k1.d_omega + 2 * k2.d_omega + 2 * k3.d_omega + k4.d_omega) / 6.0
    omega = _finite_field(s, s.omega.values + dt * d_omega, 4)
    theta = None
    if s.theta is not None:
        d_theta = (k1.d_theta + 2 * k2.d_theta + 2 * k3.d_theta + k4.d_theta) / 6.0
        theta = _finite_field(s, s.theta.values + dt * d_theta, 4)
    return EvolutionState(omega, theta, s.time + dt)


def run(model: ModelSpec, init: EvolutionState, cfg: StepperConfig) -> RunResult:
    """March the model with CFL-limited RK4 steps until a termination event.

    dt = clamp(cfl * dx / max(|u|_inf, eps), dt_min, dt_max), additionally
    shortened to land exactly on t_end.  Diagnostics are recorded at t = 0,
    every ``record_every`` steps and at termination.  A CFL time step below
    dt_min is the recorded termination ``dt_underflow``, not a failure; an
    overflow inside a stage is treated as a sup-cap event at the last finite
    state.
    """
    if model.has_theta != (init.theta is not None):
        raise ValueError("initial state theta presence must match the model")
    dx = init.grid.dx
    c = diagnostic_coupling(model)

    state = init
    states: List[EvolutionState] = [state]
    records: List[DiagnosticRecord] = [compute_record(model, state, 0.0)]
    bkm = 0.0
    step = 0
    recorded_step = 0
    termination = None

    while True:
        sup_omega = state.omega.sup_norm
        if sup_omega >= cfg.omega_sup_cap:
            termination = SUP_CAP_HIT
            break
        if state.time >= cfg.t_end - 1e-14:
            termination = REACHED_T_END
            break
        u = biot_savart(model, state.omega)
        dt_cfl = cfg.cfl * dx / max(u.sup_norm, _SPEED_FLOOR)
        if dt_cfl < cfg.dt_min:
            termination = DT_UNDERFLOW
            break
        dt = min(min(dt_cfl, cfg.dt_max), cfg.t_end - state.time)
        try:
            new_state = step_rk4(model, state, dt, cfg.dealias)
        except FloatingPointError:
            termination = SUP_CAP_HIT  # left the representable range mid-step
            break
        bkm += 0.5 * dt * (sup_omega + new_state.omega.sup_norm)
        state = new_state
        step += 1
        if step % cfg.record_every == 0:
            states.append(state)
            records.append(compute_record(model, state, bkm))
            recorded_step = step

    if recorded_step != step:
        states.append(state)
        records.append(compute_record(model, state, bkm))
    fill_margin_fields(records, states, c)
    return RunResult(states, records, termination, state.time)


def estimate_blowup_time(
    sup_series: Sequence[Tuple[float, float]],
    fit_fraction: float = 0.25,
    residual_threshold: float = 0.1,
) -> Optional[float]:
    """Pole-ansatz blow-up time from a sup-norm history.

    Fits 1/sup against t by least squares over the trailing ``fit_fraction``
    of the samples and returns the root of the fit when the slope is
    negative and the relative RMS residual is below ``residual_threshold``;
    otherwise returns None ("no blow-up detected").  The 1/(T - t) ansatz is
    a detection tool only; no growth rate is asserted.
    """
    arr = np.asarray(sup_series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 8:
        raise ValueError("need at least 8 (t, sup) samples")
    t, sup = arr[:, 0], arr[:, 1]
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly increasing")
    if np.any(sup <= 0):
        return None
    m = max(int(np.ceil(fit_fraction * t.size)), 3)
    tt, yy = t[-m:], 1.0 / sup[-m:]
    slope, intercept = np.polyfit(tt, yy, 1)
    if slope >= 0:
        return None
    fit = slope * tt + intercept
    rms = float(np.sqrt(np.mean((yy - fit) ** 2)))
    scale = max(float(np.max(np.abs(yy))), 1e-300)
    if rms / scale > residual_threshold:
        return None
    return float(-intercept / slope)

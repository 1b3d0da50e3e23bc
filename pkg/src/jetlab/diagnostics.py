"""Conserved/monotone functionals and the blow-up inequality audit.

Everything here is a pure function of immutable run data; post-processing
many runs concurrently is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import List, Sequence

import numpy as np

from .grid import PeriodicField, reflect_values
from .models import Q0, EvolutionState, ModelSpec
from .spectral import (
    half_period_weighted_integral,
    spectral_derivative,
    tail_energy_fraction,
)

_EPS = 1e-300

#: Fixed CSV column order for DiagnosticRecord serialization.
CSV_COLUMNS = (
    "t",
    "E",
    "F",
    "G",
    "F_dot_measured",
    "riccati_margin",
    "strong_margin",
    "sup_omega",
    "bkm_integral",
    "odd_defect_omega",
    "even_defect_theta",
    "endpoint_omega",
    "min_omega_half",
    "min_thetax_half",
    "tail_energy_fraction",
)


@dataclass
class DiagnosticRecord:
    t: float
    E: float
    F: float
    G: float
    F_dot_measured: float
    riccati_margin: float
    strong_margin: float
    sup_omega: float
    bkm_integral: float
    odd_defect_omega: float
    even_defect_theta: float
    endpoint_omega: float
    min_omega_half: float
    min_thetax_half: float
    tail_energy_fraction: float

    def to_csv_row(self) -> str:
        return ",".join(repr(getattr(self, name)) for name in CSV_COLUMNS)


assert tuple(f.name for f in fields(DiagnosticRecord)) == CSV_COLUMNS


def diagnostic_coupling(model: ModelSpec) -> float:
    """Coupling constant used in E/F/G: the model's c for Q0, 1 otherwise."""
    return model.c if model.kind == Q0 else 1.0


def energy(s: EvolutionState, c: float) -> float:
    """E = integral of (u^2/2 - c*theta) with u = -c*omega, by trapezoid rule.

    On a uniform periodic grid the trapezoid rule is spectrally accurate.
    """
    if s.theta is None:
        raise ValueError("model has no theta")
    u = -c * s.omega.values
    integrand = 0.5 * u * u - c * s.theta.values
    return float(np.mean(integrand) * s.grid.period_L)


def functional_F(omega: PeriodicField, c: float) -> float:
    """F = c * integral_0^{L/2} omega(x)/x dx."""
    return c * half_period_weighted_integral(omega, "inv_x")


def functional_G(theta: PeriodicField, c: float) -> float:
    """G = c * integral_0^{L/2} theta_x(x)/x dx with theta_x spectral."""
    return c * half_period_weighted_integral(spectral_derivative(theta), "inv_x")


def strong_term(omega: PeriodicField, c: float) -> float:
    """(c^2/2) * integral_0^{L/2} omega^2/x^2 dx, the lower bound on dF/dt."""
    return 0.5 * c * c * half_period_weighted_integral(omega, "inv_x_squared")


def _guarded_strong_term(omega: PeriodicField, c: float) -> float:
    """strong_term where defined, 0 once omega(0) unpins (post-resolution noise)."""
    return strong_term(omega, c) if _is_pinned_at_zero(omega) else 0.0


def symmetry_and_sign_monitor(s: EvolutionState) -> dict:
    """Odd/even defects, endpoint pinning and half-period minima for a state.

    Reflection about x = 0 and about x = L/2 coincide on the periodic grid,
    so the "combined over both symmetry points" defect is a single number.
    """
    grid = s.grid
    n = grid.n_points
    omega = s.omega.values
    sup_omega = max(float(np.max(np.abs(omega))), _EPS)
    odd_defect = float(np.max(np.abs(omega + reflect_values(omega)))) / sup_omega
    endpoint = max(abs(omega[grid.index_of_zero]), abs(omega[0]))

    # nodes with x in [0, L/2]; node 0 is the wrapped endpoint x = L/2
    half_idx = np.concatenate([np.arange(n // 2, n), [0]])
    min_omega_half = float(np.min(omega[half_idx]))

    if s.theta is not None:
        theta = s.theta.values
        sup_theta = max(float(np.max(np.abs(theta))), _EPS)
        even_defect = float(np.max(np.abs(theta - reflect_values(theta)))) / sup_theta
        theta_x = spectral_derivative(s.theta).values
        min_thetax_half = float(np.min(theta_x[half_idx]))
    else:
        even_defect = 0.0
        min_thetax_half = 0.0

    return {
        "odd_defect_omega": odd_defect,
        "even_defect_theta": even_defect,
        "endpoint_omega": float(endpoint),
        "min_omega_half": min_omega_half,
        "min_thetax_half": min_thetax_half,
    }


def _is_pinned_at_zero(f: PeriodicField) -> bool:
    return abs(f.value_at_zero) <= 1e-10 * max(f.sup_norm, _EPS)


def compute_record(
    model: ModelSpec, s: EvolutionState, bkm_integral: float
) -> DiagnosticRecord:
    """Instantaneous diagnostic row; F-derivative margins are filled later.

    F (and the strong term feeding strong_margin) is computed only when
    omega vanishes at x = 0, G only when theta_x does; otherwise the columns
    carry 0 so that arbitrary exploratory data never aborts a run.
    """
    c = diagnostic_coupling(model)
    monitor = symmetry_and_sign_monitor(s)

    F = functional_F(s.omega, c) if _is_pinned_at_zero(s.omega) else 0.0
    E = energy(s, c) if s.theta is not None else 0.0
    G = 0.0
    if s.theta is not None:
        theta_x = spectral_derivative(s.theta)
        if _is_pinned_at_zero(theta_x):
            G = c * half_period_weighted_integral(theta_x, "inv_x")

    tail = tail_energy_fraction(s.omega)
    if s.theta is not None:
        tail = max(tail, tail_energy_fraction(s.theta))

    return DiagnosticRecord(
        t=s.time,
        E=E,
        F=F,
        G=G,
        F_dot_measured=0.0,
        riccati_margin=0.0,
        strong_margin=0.0,
        sup_omega=s.omega.sup_norm,
        bkm_integral=bkm_integral,
        odd_defect_omega=monitor["odd_defect_omega"],
        even_defect_theta=monitor["even_defect_theta"],
        endpoint_omega=monitor["endpoint_omega"],
        min_omega_half=monitor["min_omega_half"],
        min_thetax_half=monitor["min_thetax_half"],
        tail_energy_fraction=tail,
    )


def _three_point_slopes(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Derivative estimates on a possibly nonuniform time series.

    Interior points use the 3-point formula exact for quadratics; the ends
    fall back to one-sided slopes so every sample gets a finite value.
    """
    m = t.size
    dy = np.empty(m)
    dy[0] = (y[1] - y[0]) / (t[1] - t[0])
    dy[-1] = (y[-1] - y[-2]) / (t[-1] - t[-2])
    for i in range(1, m - 1):
        hl = t[i] - t[i - 1]
        hr = t[i + 1] - t[i]
        dy[i] = (hl / hr * (y[i + 1] - y[i]) + hr / hl * (y[i] - y[i - 1])) / (hl + hr)
    return dy


@dataclass(frozen=True)
class RiccatiSample:
    """Audited inequalities at one interior diagnostic sample."""

    t: float
    F: float
    F_dot: float
    riccati_margin: float  # F_dot - F^2/L
    strong_margin: float  # F_dot - (c^2/2) int omega^2/x^2
    cauchy_lhs: float  # F^2
    cauchy_rhs: float  # c^2 (L/2) int omega^2/x^2


def riccati_audit(run, c: float) -> List[RiccatiSample]:
    """Margins of the blow-up inequality chain along a recorded run.

    dF/dt is estimated from the recorded F series by centered differences;
    the strong term is recomputed from the stored states with the same
    quadrature as F itself, which makes the Cauchy--Schwarz comparison an
    exact weighted-sum inequality.
    """
    records = run.diagnostics
    if len(records) < 3:
        raise ValueError("riccati audit needs at least 3 diagnostic samples")
    t = np.array([r.t for r in records])
    F = np.array([r.F for r in records])
    L = run.states[0].grid.period_L
    F_dot = _three_point_slopes(t, F)
    out = []
    for i in range(1, len(records) - 1):
        state = run.states[i]
        half_strong = _guarded_strong_term(state.omega, c)
        out.append(
            RiccatiSample(
                t=float(t[i]),
                F=float(F[i]),
                F_dot=float(F_dot[i]),
                riccati_margin=float(F_dot[i] - F[i] ** 2 / L),
                strong_margin=float(F_dot[i] - half_strong),
                cauchy_lhs=float(F[i] ** 2),
                cauchy_rhs=float(L * half_strong),  # c^2 (L/2) int = L * strong term
            )
        )
    return out


def fill_margin_fields(records: Sequence[DiagnosticRecord], states, c: float) -> None:
    """Populate F_dot_measured and both margins in-place on recorded rows."""
    if len(records) < 2:
        return
    t = np.array([r.t for r in records])
    F = np.array([r.F for r in records])
    L = states[0].grid.period_L
    F_dot = _three_point_slopes(t, F)
    for i, r in enumerate(records):
        r.F_dot_measured = float(F_dot[i])
        r.riccati_margin = float(F_dot[i] - F[i] ** 2 / L)
        r.strong_margin = float(F_dot[i] - _guarded_strong_term(states[i].omega, c))


def resolved_until(records: Sequence[DiagnosticRecord], threshold: float = 1e-8) -> float:
    """Time of the first tail-energy violation; +inf if the run stays resolved."""
    for r in records:
        if r.tail_energy_fraction > threshold:
            return r.t
    return float("inf")

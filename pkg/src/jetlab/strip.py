"""Degenerate elliptic stream solver on the (x, q) strip and boundary jets.

The stream equation  omega = -(d_xx + 4q d_qq + (4+2m) d_q) phi  is solved
per x-Fourier mode as a two-point problem on q in [0, 1]:

* Dirichlet phi = 0 at q = 1 (boundary stream normalization);
* at the degenerate end q = 0 the ODE itself, evaluated at q = 0, closes
  the system -- no extra boundary data, matching the fact that pole
  conditions are automatic in the squared-radius variable.

Second-order centered differences in q; each mode is an independent banded
solve (bandwidths 1 lower / 2 upper, the upper-2 entry coming from the
one-sided q = 0 row).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.linalg import solve_banded

from .grid import PeriodicField, PeriodicGrid

_EPS = 1e-300


@dataclass(frozen=True)
class StripGrid:
    """Periodic x-grid crossed with M+1 uniform q-nodes on [0, 1]."""

    x_grid: PeriodicGrid
    n_q_intervals: int

    def __post_init__(self) -> None:
        if self.n_q_intervals < 16:
            raise ValueError("need at least 16 q intervals")

    @property
    def dq(self) -> float:
        return 1.0 / self.n_q_intervals

    @property
    def q_nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_q_intervals + 1)


@dataclass(frozen=True)
class StripField:
    """Real function sampled on the strip; values[i, j] = f(x_i, q_j)."""

    grid: StripGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        shape = (self.grid.x_grid.n_points, self.grid.n_q_intervals + 1)
        if values.shape != shape:
            raise ValueError(f"values must have shape {shape}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("strip field values must be finite")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class JetRecord:
    """Boundary Taylor data at q = 1: first two normal jets and the trace of omega."""

    phi1: PeriodicField  # phi_q(x, 1)
    phi2: PeriodicField  # phi_qq(x, 1)
    omega_boundary: PeriodicField
    m: int


def _mode_matrix(m: int, k2: float, M: int, dq: float) -> np.ndarray:
    """Banded (2 upper, 1 lower) matrix for one Fourier mode."""
    ab = np.zeros((4, M + 1))
    b_coef = 4.0 + 2.0 * m
    # row 0: PDE at q = 0 with 2nd-order one-sided phi'(0)
    ab[2, 0] = -3.0 * b_coef / (2 * dq) - k2
    ab[1, 1] = 4.0 * b_coef / (2 * dq)
    ab[0, 2] = -b_coef / (2 * dq)
    # interior rows
    q = dq * np.arange(1, M)
    ab[3, 0:M - 1] = 4.0 * q / dq**2 - b_coef / (2 * dq)  # sub-diagonal a[i, i-1]
    ab[2, 1:M] = -8.0 * q / dq**2 - k2  # diagonal a[i, i]
    ab[1, 2 : M + 1] = 4.0 * q / dq**2 + b_coef / (2 * dq)  # super-diagonal a[i, i+1]
    # row M: Dirichlet phi(1) = 0
    ab[2, M] = 1.0
    ab[3, M - 1] = 0.0
    return ab


def solve_elliptic(m: int, omega: StripField) -> StripField:
    """Solve the degenerate stream equation for phi given omega on the strip."""
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    grid = omega.grid
    M = grid.n_q_intervals
    dq = grid.dq
    k = grid.x_grid.wavenumbers
    omega_hat = np.fft.rfft(omega.values, axis=0)

    phi_hat = np.empty_like(omega_hat)
    for mode in range(k.size):
        ab = _mode_matrix(m, float(k[mode] ** 2), M, dq)
        rhs = -omega_hat[mode].copy()
        rhs[M] = 0.0
        try:
            phi_hat[mode] = solve_banded((1, 2), ab, rhs)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise RuntimeError("degenerate system") from exc
    phi = np.fft.irfft(phi_hat, n=grid.x_grid.n_points, axis=0)
    return StripField(grid, phi)


def elliptic_residual(phi: StripField, omega: StripField, m: int) -> float:
    """Max interior defect of the discretized PDE, recomputed with the same stencils."""
    grid = phi.grid
    M, dq = grid.n_q_intervals, grid.dq
    k = grid.x_grid.wavenumbers
    phi_hat = np.fft.rfft(phi.values, axis=0)
    omega_hat = np.fft.rfft(omega.values, axis=0)
    b_coef = 4.0 + 2.0 * m
    q = dq * np.arange(1, M)
    res = (
        4.0 * q * (phi_hat[:, 2:] - 2 * phi_hat[:, 1:M] + phi_hat[:, : M - 1]) / dq**2
        + b_coef * (phi_hat[:, 2:] - phi_hat[:, : M - 1]) / (2 * dq)
        - (k**2)[:, None] * phi_hat[:, 1:M]
        + omega_hat[:, 1:M]
    )
    res0 = (
        b_coef * (-3 * phi_hat[:, 0] + 4 * phi_hat[:, 1] - phi_hat[:, 2]) / (2 * dq)
        - k**2 * phi_hat[:, 0]
        + omega_hat[:, 0]
    )
    physical = np.fft.irfft(
        np.concatenate([res0[:, None], res], axis=1), n=grid.x_grid.n_points, axis=0
    )
    return float(np.max(np.abs(physical)))


def _boundary_first_derivative(values: np.ndarray, dq: float) -> np.ndarray:
    """4th-order one-sided d/dq at q = 1 (5-point backward stencil)."""
    return (
        25.0 * values[:, -1]
        - 48.0 * values[:, -2]
        + 36.0 * values[:, -3]
        - 16.0 * values[:, -4]
        + 3.0 * values[:, -5]
    ) / (12.0 * dq)


def _boundary_second_derivative(values: np.ndarray, dq: float) -> np.ndarray:
    """2nd-order one-sided d2/dq2 at q = 1 (4-point backward stencil)."""
    return (
        2.0 * values[:, -1]
        - 5.0 * values[:, -2]
        + 4.0 * values[:, -3]
        - 1.0 * values[:, -4]
    ) / dq**2


def extract_jets(
    phi: StripField, omega: StripField, m: int, phi2_route: str = "pde"
) -> JetRecord:
    """Boundary jets at q = 1.

    phi1 is the one-sided 4th-order derivative of the solved phi.  phi2 via
    the default "pde" route comes from the stream equation evaluated at
    q = 1 (where phi = 0 kills the x-derivatives):
    phi2 = (-omega(.,1) - (4+2m)*phi1) / 4, which is exact for the discrete
    solution; the "difference" route is the independent one-sided
    second-derivative cross-check, 2nd order in dq.
    """
    if phi2_route not in ("pde", "difference"):
        raise ValueError(f"unknown phi2 route {phi2_route!r}")
    x_grid = phi.grid.x_grid
    dq = phi.grid.dq
    phi1 = _boundary_first_derivative(phi.values, dq)
    omega_b = omega.values[:, -1].copy()
    if phi2_route == "pde":
        phi2 = (-omega_b - (4.0 + 2.0 * m) * phi1) / 4.0
    else:
        phi2 = _boundary_second_derivative(phi.values, dq)
    return JetRecord(
        phi1=PeriodicField(x_grid, phi1),
        phi2=PeriodicField(x_grid, phi2),
        omega_boundary=PeriodicField(x_grid, omega_b),
        m=m,
    )


def jet_relation_residual(jets: JetRecord) -> float:
    """Sup defect of  omega + 4*phi2 + 2(m+2)*phi1 = 0  relative to |omega|.

    Zero by construction when phi2 came from the PDE route; with the
    difference route it measures the cross-check disagreement instead.
    """
    omega_b = jets.omega_boundary.values
    defect = omega_b + 4.0 * jets.phi2.values + 2.0 * (jets.m + 2) * jets.phi1.values
    return float(np.max(np.abs(defect)) / max(np.max(np.abs(omega_b)), _EPS))


def closure_residual(jets: JetRecord, a_jet: float) -> float:
    """Sup distance of the jet pair from the linear closure phi2 = a_jet*phi1."""
    defect = jets.phi2.values - a_jet * jets.phi1.values
    return float(
        np.max(np.abs(defect)) / max(np.max(np.abs(jets.phi1.values)), _EPS)
    )


def compute_velocities(phi: StripField, m: int) -> Tuple[StripField, StripField]:
    """Velocity components v = phi_x (spectral) and g = m*phi + 2q*phi_q.

    phi_q uses centered differences in the interior and 2nd-order one-sided
    stencils at q = 0 and q = 1.
    """
    grid = phi.grid
    values = phi.values
    dq = grid.dq
    k = grid.x_grid.wavenumbers
    phi_hat = np.fft.rfft(values, axis=0)
    phi_hat *= (1j * k)[:, None]
    phi_hat[-1] = 0.0
    v = np.fft.irfft(phi_hat, n=grid.x_grid.n_points, axis=0)

    phi_q = np.empty_like(values)
    phi_q[:, 1:-1] = (values[:, 2:] - values[:, :-2]) / (2 * dq)
    phi_q[:, 0] = (-3 * values[:, 0] + 4 * values[:, 1] - values[:, 2]) / (2 * dq)
    phi_q[:, -1] = (3 * values[:, -1] - 4 * values[:, -2] + values[:, -3]) / (2 * dq)
    g = m * values + 2.0 * grid.q_nodes[None, :] * phi_q
    return StripField(grid, v), StripField(grid, g)


# -- manufactured solutions ---------------------------------------------------

_CASE_PROFILES: Dict[str, Tuple[Callable, Callable, Callable]] = {
    # name -> (h(q), h'(q), h''(q)) with phi = h(q) sin(k1 x)
    "linear": (lambda q: 1 - q, lambda q: -np.ones_like(q), lambda q: np.zeros_like(q)),
    "quadratic": (
        lambda q: (1 - q) + 0.5 * (1 - q) ** 2,
        lambda q: -1.0 - (1 - q),
        lambda q: np.ones_like(q),
    ),
    "quadratic_minus": (
        lambda q: (1 - q) - 0.5 * (1 - q) ** 2,
        lambda q: -q,
        lambda q: -np.ones_like(q),
    ),
    "exp": (
        lambda q: (1 - q) * np.exp(q),
        lambda q: -q * np.exp(q),
        lambda q: -(1 + q) * np.exp(q),
    ),
}

MANUFACTURED_CASES = tuple(_CASE_PROFILES)


def manufactured_case(
    name: str, m: int, grid: StripGrid
) -> Tuple[StripField, StripField]:
    """Exact (phi, omega) pair with phi = h(q) sin of the fundamental x-mode."""
    if name not in _CASE_PROFILES:
        raise ValueError(f"unknown manufactured case {name!r}")
    h, hp, hpp = _CASE_PROFILES[name]
    q = grid.q_nodes
    k1 = 2.0 * np.pi / grid.x_grid.period_L
    sin_x = np.sin(k1 * grid.x_grid.nodes)
    profile_omega = k1**2 * h(q) - 4.0 * q * hpp(q) - (4.0 + 2.0 * m) * hp(q)
    phi = StripField(grid, sin_x[:, None] * h(q)[None, :])
    omega = StripField(grid, sin_x[:, None] * profile_omega[None, :])
    return phi, omega


# -- serialization ------------------------------------------------------------

_HEADER = struct.Struct("<qqd")  # n_x, M, period_L; payload is row-major <f8


def save_strip_field(field: StripField, path) -> None:
    """Flat little-endian binary (header n, M, L then row-major float64)
    plus a JSON sidecar describing the layout."""
    path = Path(path)
    grid = field.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(grid.x_grid.n_points, grid.n_q_intervals, grid.x_grid.period_L))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    sidecar = {
        "n_x": grid.x_grid.n_points,
        "n_q_intervals": grid.n_q_intervals,
        "period_L": grid.x_grid.period_L,
        "byte_order": "little",
        "header": "int64 n_x, int64 M, float64 L",
        "dtype": "<f8",
        "layout": "row-major, x index outermost",
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n"
    )


def load_strip_field(path) -> StripField:
    path = Path(path)
    raw = path.read_bytes()
    n, M, L = _HEADER.unpack_from(raw)
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n, M + 1)
    grid = StripGrid(PeriodicGrid(int(n), float(L)), int(M))
    return StripField(grid, values.copy())

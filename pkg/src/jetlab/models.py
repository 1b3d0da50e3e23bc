"""The seven 1D vorticity models: velocity laws, closure algebra, right-hand sides."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .grid import PeriodicField, PeriodicGrid
from .spectral import (
    antiderivative_zero_mean,
    composite_weights,
    dealias_filter,
    hilbert_transform,
    spectral_derivative,
)

CLM = "clm"
DE_GREGORIO = "de_gregorio"
CCF = "ccf"
OKAMOTO = "okamoto"
HOU_LUO = "hou_luo"
CKY = "cky"
Q0 = "q0"

KINDS = (CLM, DE_GREGORIO, CCF, OKAMOTO, HOU_LUO, CKY, Q0)
THETA_KINDS = (HOU_LUO, CKY, Q0)


@dataclass(frozen=True)
class ClosureParams:
    """Normal-jet closure exponents: boundary weight m and jet slope a_jet."""

    m: int
    a_jet: float

    def __post_init__(self) -> None:
        if self.m not in (1, 2):
            raise ValueError("m must be 1 or 2")


def closure_coefficient(p: ClosureParams) -> float:
    """Local-law coefficient c = 1/(2*a_jet + m + 2) of the closed boundary system."""
    denom = 2.0 * p.a_jet + p.m + 2.0
    if denom <= 0:
        raise ValueError(
            f"positivity condition violated: 2a + m + 2 = {denom:g} must be > 0"
        )
    return 1.0 / denom


@dataclass(frozen=True)
class ModelSpec:
    """One of the seven 1D models: a velocity law paired with a dynamical equation."""

    kind: str
    a_ok: float = 1.0  # Okamoto transport weight; a_ok = 1 recovers De Gregorio
    truncation_X: Optional[float] = None
    c: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == Q0:
            if self.c is None or not self.c > 0:
                raise ValueError("Q0 requires a coefficient c > 0")
        if self.kind == CKY:
            if self.truncation_X is None or not self.truncation_X > 0:
                raise ValueError("CKY requires a truncation bound X > 0")

    @property
    def has_theta(self) -> bool:
        return self.kind in THETA_KINDS

    @classmethod
    def clm(cls) -> "ModelSpec":
        return cls(CLM)

    @classmethod
    def de_gregorio(cls) -> "ModelSpec":
        return cls(DE_GREGORIO)

    @classmethod
    def ccf(cls) -> "ModelSpec":
        return cls(CCF)

    @classmethod
    def okamoto(cls, a_ok: float = 1.0) -> "ModelSpec":
        return cls(OKAMOTO, a_ok=a_ok)

    @classmethod
    def hou_luo(cls) -> "ModelSpec":
        return cls(HOU_LUO)

    @classmethod
    def cky(cls, truncation_X: float) -> "ModelSpec":
        return cls(CKY, truncation_X=truncation_X)

    @classmethod
    def q0(cls, c: float) -> "ModelSpec":
        return cls(Q0, c=c)

    @classmethod
    def q0_from_closure(cls, m: int, a_jet: float = 0.0) -> "ModelSpec":
        return cls.q0(closure_coefficient(ClosureParams(m, a_jet)))


@dataclass(frozen=True)
class EvolutionState:
    """(omega, theta, t) carrier; theta is present exactly for the theta models."""

    omega: PeriodicField
    theta: Optional[PeriodicField]
    time: float

    def __post_init__(self) -> None:
        if self.theta is not None and self.theta.grid != self.omega.grid:
            raise ValueError("omega and theta must share one grid")
        if self.time < 0:
            raise ValueError("time must be >= 0")

    @property
    def grid(self) -> PeriodicGrid:
        return self.omega.grid


@dataclass(frozen=True)
class StateRate:
    """Time derivative of an EvolutionState, as raw node values."""

    d_omega: np.ndarray
    d_theta: Optional[np.ndarray]


@lru_cache(maxsize=32)
def _cky_quadrature(n: int, period_L: float, X: float):
    """Node indices and per-start weight rows for integral_x^X on [0, X].

    X must coincide with a grid node at or below L/2; the law is a half-line
    model squeezed onto the grid, so we refuse silently misaligned bounds.
    """
    dx = period_L / n
    p_float = X / dx
    p = int(round(p_float))
    if abs(p_float - p) > 1e-8 * n:
        raise ValueError("CKY truncation bound must coincide with a grid node")
    if p < 2 or p > n // 2:
        raise ValueError("CKY truncation bound must lie in (0, L/2]")
    idx = (n // 2 + np.arange(p + 1)) % n
    rows = np.zeros((p + 1, p + 1))
    for i in range(p):
        rows[i, i:] = composite_weights(p - i)
    return idx, rows * dx


def biot_savart(model: ModelSpec, omega: PeriodicField) -> PeriodicField:
    """Velocity from vorticity under the model's law.

    Q0 is the local algebraic law u = -c*omega; CCF takes u = H(omega);
    CLM, De Gregorio, Okamoto and Hou--Luo integrate u_x = H(omega) to the
    zero-mean periodic velocity; CKY evaluates the weighted half-line
    integral on [0, X] and leaves u = 0 elsewhere.
    """
    if model.kind == Q0:
        return PeriodicField(omega.grid, -model.c * omega.values)
    if model.kind == CCF:
        return hilbert_transform(omega)
    if model.kind in (CLM, DE_GREGORIO, OKAMOTO, HOU_LUO):
        return antiderivative_zero_mean(hilbert_transform(omega))
    # CKY: u(x) = -x * integral_x^X omega(y)/y dy on the nodes of [0, X]
    grid = omega.grid
    idx, rows = _cky_quadrature(grid.n_points, grid.period_L, model.truncation_X)
    x = grid.dx * np.arange(idx.size)
    integrand = np.zeros(idx.size)
    integrand[1:] = omega.values[idx[1:]] / x[1:]
    u = np.zeros(grid.n_points)
    u[idx[1:-1]] = -x[1:-1] * (rows[1:-1] @ integrand)
    return PeriodicField(grid, u)


def rhs(model: ModelSpec, s: EvolutionState, dealias: bool = False) -> StateRate:
    """Right-hand side of the model's dynamical equation at state ``s``.

    All x-derivatives are spectral; with ``dealias`` the 2/3-rule filter is
    applied to the nonlinear products.
    """
    if model.has_theta != (s.theta is not None):
        raise ValueError("state theta presence must match the model")
    u = biot_savart(model, s.omega)
    omega_x = spectral_derivative(s.omega).values

    def product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        ab = a * b
        return dealias_filter(ab) if dealias else ab

    if model.kind == CLM:
        u_x = spectral_derivative(u).values
        return StateRate(product(u_x, s.omega.values), None)
    if model.kind == DE_GREGORIO:
        u_x = spectral_derivative(u).values
        return StateRate(
            -product(u.values, omega_x) + product(u_x, s.omega.values), None
        )
    if model.kind == OKAMOTO:
        u_x = spectral_derivative(u).values
        return StateRate(
            -model.a_ok * product(u.values, omega_x) + product(u_x, s.omega.values),
            None,
        )
    if model.kind == CCF:
        return StateRate(-product(u.values, omega_x), None)

    theta_x = spectral_derivative(s.theta).values
    d_omega = -product(u.values, omega_x) + theta_x
    d_theta = -product(u.values, theta_x)
    return StateRate(d_omega, d_theta)


def reconstruct_rho(theta: PeriodicField) -> PeriodicField:
    """Square-root carrier sqrt(theta), clamped at 0 where theta dips below -1e-12."""
    values = theta.values
    if np.any(values < -1e-12 * max(theta.sup_norm, 1e-300)):
        raise ValueError("theta is significantly negative; no real square root")
    return PeriodicField(theta.grid, np.sqrt(np.maximum(values, 0.0)))

"""JSON experiment configuration: schema, defaults, validation.

The configuration document is plain JSON (see README for the schema).
Validation failures raise :class:`ConfigError` carrying the dotted path of
the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .evolve import StepperConfig
from .grid import PeriodicGrid, reflect_values
from .initial_data import build_field
from .models import ClosureParams, EvolutionState, ModelSpec, closure_coefficient

DEFAULTS = {
    "n": 1024,
    "L": 2.0,
    "cfl": 0.4,
    "dt_min": 1e-10,
    "dt_max": 0.05,
    "t_end": 10.0,
    "omega_sup_cap": 1e6,
    "record_every": 10,
    "dealias": False,
}

THEOREM_TAG = "theorem-hypotheses"
_SYMMETRY_TOL = 1e-12

_MODEL_NAMES = {
    "clm": ModelSpec.clm,
    "degregorio": ModelSpec.de_gregorio,
    "ccf": ModelSpec.ccf,
}


class ConfigError(ValueError):
    """Configuration problem located at a dotted field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    grid: PeriodicGrid
    omega0_spec: dict
    theta0_spec: Optional[dict]
    stepper: StepperConfig
    output_dir: str
    snapshot_times: tuple
    tags: tuple
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def theorem_tagged(self) -> bool:
        return THEOREM_TAG in self.tags

    def initial_state(self) -> EvolutionState:
        omega0 = build_field(self.grid, self.omega0_spec)
        theta0 = (
            build_field(self.grid, self.theta0_spec)
            if self.theta0_spec is not None
            else None
        )
        if self.theorem_tagged:
            _check_theorem_symmetries(omega0, theta0)
        return EvolutionState(omega0, theta0, 0.0)


def _check_theorem_symmetries(omega0, theta0) -> None:
    odd = np.max(np.abs(omega0.values + reflect_values(omega0.values)))
    if odd > _SYMMETRY_TOL * max(omega0.sup_norm, 1e-300):
        raise ConfigError("initial_data.omega", "omega0 must be odd about 0 and L/2")
    if theta0 is None:
        raise ConfigError("initial_data.theta", "theorem runs need a theta field")
    even = np.max(np.abs(theta0.values - reflect_values(theta0.values)))
    if even > _SYMMETRY_TOL * max(theta0.sup_norm, 1.0):
        raise ConfigError("initial_data.theta", "theta0 must be even about 0 and L/2")


def _parse_model(doc: dict) -> ModelSpec:
    section = doc.get("model")
    if not isinstance(section, dict) or "name" not in section:
        raise ConfigError("model.name", "a model name is required")
    name = str(section["name"]).lower().replace("_", "").replace("-", "")
    try:
        if name in _MODEL_NAMES:
            return _MODEL_NAMES[name]()
        if name == "okamoto":
            return ModelSpec.okamoto(float(section.get("a_ok", 1.0)))
        if name == "houluo":
            return ModelSpec.hou_luo()
        if name == "cky":
            if "X" not in section:
                raise ConfigError("model.X", "CKY requires a truncation bound X")
            return ModelSpec.cky(float(section["X"]))
        if name == "q0":
            if "c" in section:
                return ModelSpec.q0(float(section["c"]))
            m = int(section.get("m", 1))
            a_jet = float(section.get("a", 0.0))
            try:
                return ModelSpec.q0(closure_coefficient(ClosureParams(m, a_jet)))
            except ValueError as exc:
                raise ConfigError("model.a", str(exc)) from None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("model", str(exc)) from None
    raise ConfigError("model.name", f"unknown model name {section['name']!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment document, filling defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "top level must be an object")

    model = _parse_model(doc)

    grid_doc = doc.get("grid", {})
    n = int(grid_doc.get("n", DEFAULTS["n"]))
    L = float(grid_doc.get("L", DEFAULTS["L"]))
    if n <= 0 or n % 2 != 0:
        raise ConfigError("grid.n", "n must be a positive even integer")
    if L <= 0:
        raise ConfigError("grid.L", "L must be positive")
    try:
        grid = PeriodicGrid(n, L)
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from None

    if model.kind == "cky":
        cells = model.truncation_X / grid.dx
        if abs(cells - round(cells)) > 1e-8 * n or not 2 <= round(cells) <= n // 2:
            raise ConfigError(
                "model.X",
                "truncation bound must coincide with a grid node in (0, L/2]",
            )

    init_doc = doc.get("initial_data", {})
    omega0_spec = init_doc.get("omega", {"name": "sin_fundamental"})
    theta0_spec = init_doc.get("theta", {"name": "zero"} if model.has_theta else None)
    if model.has_theta and theta0_spec is None:
        theta0_spec = {"name": "zero"}
    if not model.has_theta:
        theta0_spec = None

    step_doc = doc.get("stepper", {})
    try:
        stepper = StepperConfig(
            t_end=float(step_doc.get("t_end", DEFAULTS["t_end"])),
            cfl=float(step_doc.get("cfl", DEFAULTS["cfl"])),
            dt_min=float(step_doc.get("dt_min", DEFAULTS["dt_min"])),
            dt_max=float(step_doc.get("dt_max", DEFAULTS["dt_max"])),
            omega_sup_cap=float(step_doc.get("omega_sup_cap", DEFAULTS["omega_sup_cap"])),
            record_every=int(step_doc.get("record_every", DEFAULTS["record_every"])),
            dealias=bool(step_doc.get("dealias", DEFAULTS["dealias"])),
        )
    except ValueError as exc:
        raise ConfigError("stepper", str(exc)) from None

    out_doc = doc.get("outputs", {})
    output_dir = str(out_doc.get("directory", "out"))
    snapshot_times = tuple(float(t) for t in out_doc.get("snapshot_times", ()))

    tags = tuple(str(t) for t in doc.get("tags", ()))

    config = ExperimentConfig(
        model=model,
        grid=grid,
        omega0_spec=omega0_spec,
        theta0_spec=theta0_spec,
        stepper=stepper,
        output_dir=output_dir,
        snapshot_times=snapshot_times,
        tags=tags,
        raw=doc,
    )
    if config.theorem_tagged:
        config.initial_state()  # validates the generated symmetries up front
    return config

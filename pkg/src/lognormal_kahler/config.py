"""Run configuration: one table of defaults, a flat ``key = value`` file, and overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import LognormalKahlerError

OUT_DIR_ENV = "LOGNORMAL_KAHLER_OUT"

COMMANDS = (
    "metric", "kahler-check", "pde-check", "isometry-check", "fields", "flow", "schrodinger", "report-all",
)

# key: (type, default, description)
DEFAULTS: dict[str, tuple[type, Any, str]] = {
    "seed": (int, 20240501, "seed for random tangent states and coefficient vectors"),
    "out_dir": (str, "out", "directory for JSON and CSV outputs"),
    "n_states": (int, 100, "random tangent states per axiom and field check"),
    "n_pde_alphas": (int, 20, "random coefficient vectors for the Kähler-function family"),
    "n_pde_states": (int, 50, "random states per coefficient vector"),
    "quadrature_order": (int, 40, "Gauss-Hermite nodes for the quadrature oracle"),
    "fd_step": (float, 1e-5, "relative step for first-derivative finite differences"),
    "pde_step": (float, 1e-3, "absolute step for second derivatives in the PDE residual"),
    "domega_step": (float, 1e-4, "relative step for the closedness check of omega"),
    "flow_step": (float, 1e-3, "RK4 step along flows"),
    "flow_s_end": (float, 0.1, "flow length for conservation and residual checks"),
    "grid_lo": (float, -4.0, "left end of the log-grid"),
    "grid_hi": (float, 4.0, "right end of the log-grid"),
    "grid_n": (int, 257, "points on the log-grid"),
    "energy_s_end": (float, 0.3, "length of the P-flow used for the energy-variation check"),
    "tol_oracle": (float, 1e-8, "closed-form metric and Christoffels against quadrature"),
    "tol_inverse": (float, 1e-12, "h times its inverse against the identity"),
    "tol_dual": (float, 1e-6, "dual coordinates against finite differences"),
    "tol_axioms": (float, 1e-10, "algebraic identities of (g, J, omega)"),
    "tol_det": (float, 1e-10, "relative tolerance of the omega determinant formula"),
    "tol_domega": (float, 1e-6, "finite-difference closedness of omega"),
    "tol_pde": (float, 1e-7, "Kähler-function PDE residuals"),
    "tol_fields": (float, 1e-10, "Hamiltonian fields against closed forms"),
    "tol_translation": (float, 1e-10, "holomorphy and isometry of translations"),
    "tol_conservation": (float, 1e-8, "observable drift along flows"),
    "tol_symplectic": (float, 1e-5, "symplecticity of the flow map"),
    "tol_endpoint": (float, 1e-10, "exact endpoints of affine flows"),
    "tol_mult": (float, 1e-10, "multiplication operators against closed-form actions"),
    "tol_schrodinger": (float, 1e-6, "chain-rule residual on theta-constant flows"),
    "energy_min_spread": (float, 0.1, "minimum spread of the energy along the P-flow"),
    # subcommand inputs
    "theta": (str, "0,-0.5", "natural point for the metric command"),
    "gen": (str, "Q", "generator for flow and schrodinger commands, e.g. Q or P=1,Q=-0.5"),
    "start": (str, "1,-1,0,0", "start state for flow and schrodinger commands"),
    "s_end": (float, 1.0, "flow length for the flow command"),
    "flags": (str, "calibrated", "convention flags for the schrodinger command: calibrated or literal"),
}


class ConfigError(LognormalKahlerError, ValueError):
    """Unparseable or invalid configuration (exit code 2)."""


def _coerce(key: str, raw: Any) -> Any:
    if key not in DEFAULTS:
        raise ConfigError(f"unknown configuration key {key!r}")
    typ = DEFAULTS[key][0]
    try:
        val = typ(raw) if not isinstance(raw, str) or typ is str else typ(raw.strip())
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: cannot read {raw!r} as {typ.__name__}") from exc
    if key.startswith("tol_") and not val > 0:
        raise ConfigError(f"{key} must be positive, got {val}")
    if key.startswith("n_") and val < 1:
        raise ConfigError(f"{key} must be at least 1, got {val}")
    return val


def parse_config_text(text: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key = key.strip()
        out[key] = _coerce(key, val.strip())
    return out


@dataclass(frozen=True)
class RunConfig:
    command: str
    values: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        merged = {k: spec[1] for k, spec in DEFAULTS.items()}
        for k, v in self.values.items():
            merged[k] = _coerce(k, v)
        object.__setattr__(self, "values", merged)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def seed(self) -> int:
        return self.values["seed"]

    def echo(self) -> dict[str, Any]:
        """Configuration as echoed into reports; the output directory is left out."""
        return {k: v for k, v in sorted(self.values.items()) if k != "out_dir"}

    def out_dir(self) -> Path:
        env = os.environ.get(OUT_DIR_ENV)
        return Path(env) if env else Path(self.values["out_dir"])


def load_config(command: str, path: str | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    values: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        values.update(parse_config_text(text))
    values.update(overrides or {})
    return RunConfig(command, values)


def parse_floats(text: str, n: int, key: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected {n} numbers, got {text!r}") from exc
    if len(vals) != n:
        raise ConfigError(f"{key}: expected {n} numbers, got {len(vals)}")
    return vals

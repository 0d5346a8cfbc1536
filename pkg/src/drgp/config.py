"""Experiment configuration: flat dotted-key text format and validation.

One ``key = value`` pair per line, ``#`` comments allowed.  The format is
diff-friendly and round-trips exactly: ``parse_config(serialize_config(c))``
reproduces ``c``.
"""

from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .solver import SolverConfig

__all__ = ["ExperimentConfig", "parse_config", "serialize_config", "load_config"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one experiment run."""

    alpha: float = 2.0
    kappa: float = 0.0
    beta: float = 0.51
    delta_sq: float = 0.1
    sigma: float = 0.1
    n_modes: int = 200
    design_kind: str = "whole"
    m: int = 10
    design_points: tuple | None = None
    operator_kind: str = "identity"
    heat_time: float | None = None
    target: str = "regression"
    grid_points: int = 201
    seed: int = 1729
    observations: tuple | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def validate(self) -> "ExperimentConfig":
        if self.alpha <= 0.5:
            raise ConfigError(f"prior.alpha must exceed 1/2, got {self.alpha}")
        if self.kappa < 0.0:
            raise ConfigError(f"prior.kappa must be >= 0, got {self.kappa}")
        if self.beta <= 0.5:
            raise ConfigError(f"cost.beta must exceed 1/2, got {self.beta}")
        if self.delta_sq <= 0.0:
            raise ConfigError(f"ball.delta_sq must be > 0, got {self.delta_sq}")
        if self.sigma <= 0.0:
            raise ConfigError(f"noise.sigma must be > 0, got {self.sigma}")
        if self.n_modes < 1:
            raise ConfigError(f"model.n_modes must be >= 1, got {self.n_modes}")
        if self.design_kind not in ("whole", "half", "custom"):
            raise ConfigError(f"unknown design.kind {self.design_kind!r}")
        if self.design_kind == "custom" and not self.design_points:
            raise ConfigError("design.kind = custom requires design.points")
        if self.design_kind != "custom" and self.m < 1:
            raise ConfigError(f"design.m must be >= 1, got {self.m}")
        if self.operator_kind not in ("identity", "inverse_laplacian", "heat"):
            raise ConfigError(f"unknown operator.kind {self.operator_kind!r}")
        if self.operator_kind == "heat" and (self.heat_time is None or self.heat_time < 0):
            raise ConfigError("operator.kind = heat requires operator.heat_time >= 0")
        if self.target not in ("regression", "inverse"):
            raise ConfigError(f"unknown target {self.target!r}")
        if self.grid_points < 2:
            raise ConfigError(f"grid.points must be >= 2, got {self.grid_points}")
        n_obs = len(self.design_points) if self.design_kind == "custom" else self.m
        if self.observations is not None and len(self.observations) != n_obs:
            raise ConfigError(
                f"observations length {len(self.observations)} does not match "
                f"design size {n_obs}"
            )
        return self

    @property
    def n_obs(self) -> int:
        return len(self.design_points) if self.design_kind == "custom" else self.m


# key -> (attribute, type tag); attribute None means nested in solver
_SCHEMA = {
    "prior.alpha": ("alpha", "float"),
    "prior.kappa": ("kappa", "float"),
    "cost.beta": ("beta", "float"),
    "ball.delta_sq": ("delta_sq", "float"),
    "noise.sigma": ("sigma", "float"),
    "model.n_modes": ("n_modes", "int"),
    "design.kind": ("design_kind", "str"),
    "design.m": ("m", "int"),
    "design.points": ("design_points", "floats"),
    "operator.kind": ("operator_kind", "str"),
    "operator.heat_time": ("heat_time", "float"),
    "target": ("target", "str"),
    "grid.points": ("grid_points", "int"),
    "seed": ("seed", "int"),
    "observations": ("observations", "floats"),
    "solver.max_iters": ("solver.max_iters", "int"),
    "solver.gap_tol": ("solver.gap_tol", "float"),
    "solver.bisect_tol": ("solver.bisect_tol", "float"),
    "solver.line_search": ("solver.line_search", "str"),
    "solver.golden_iters": ("solver.golden_iters", "int"),
    "solver.record_trace": ("solver.record_trace", "bool"),
}


def _parse_value(raw: str, kind: str, key: str):
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip() != "")
        return raw
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} = {raw!r} as {kind}") from exc


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key-value format into a validated configuration."""
    cfg_kwargs: dict = {}
    solver_kwargs: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, kind = _SCHEMA[key]
        value = _parse_value(raw, kind, key)
        if attr.startswith("solver."):
            solver_kwargs[attr.split(".", 1)[1]] = value
        else:
            cfg_kwargs[attr] = value
    try:
        solver = SolverConfig(**solver_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(solver=solver, **cfg_kwargs).validate()


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    return str(value)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Emit the canonical flat key-value form (all keys, canonical order)."""
    lines = []
    for key, (attr, _kind) in _SCHEMA.items():
        if attr.startswith("solver."):
            value = getattr(cfg.solver, attr.split(".", 1)[1])
        else:
            value = getattr(cfg, attr)
        if value is None:
            continue
        lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_overrides(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    """Functional update helper used by sweeps."""
    solver_updates = {k[len("solver_"):]: v for k, v in kwargs.items() if k.startswith("solver_")}
    plain = {k: v for k, v in kwargs.items() if not k.startswith("solver_")}
    if solver_updates:
        plain["solver"] = replace(cfg.solver, **solver_updates)
    return replace(cfg, **plain).validate()

"""Experiment orchestration: assembly, runs, sweeps and artifact persistence.

Every run writes its artifacts (delimited CSV data plus a JSON summary) into
an output directory together with a ``manifest.json`` listing each file and
its SHA-256, so downstream consumers can verify and locate outputs without
guessing file names.
"""

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import correlation_from_covariance, prior_posterior_distance
from .config import ExperimentConfig, serialize_config, with_overrides
from .gelbrich import GelbrichBall, joint_ball
from .model import (
    JointGaussian,
    ObservationMap,
    design_points,
    field_second_moments,
    marginal_intervals,
    nominal_covariance,
    observation_map,
    sample_paths,
    signal_block_posterior,
)
from .operators import make_operator
from .solver import (
    EquilibriumResult,
    determinant_diagnostic,
    solve_equilibrium,
    truncation_convergence,
)
from .spectral import (
    build_dirichlet_basis_1d,
    evaluate_basis,
    matern_coefficients,
    roughness_weights,
)
from .errors import ConfigError

__all__ = [
    "Components",
    "assemble",
    "run_solve",
    "run_figures",
    "run_table1",
    "run_sweep",
    "run_convergence",
    "TABLE1_COLUMNS",
    "DEFAULT_OBSERVATIONS",
]

# Observation vectors used for posterior figures when none are configured;
# one draw from the nominal prior at each standard design.
DEFAULT_OBSERVATIONS = {
    "whole": (-0.17, -0.09, 0.02, 0.04, 0.12, 0.05, -0.03, 0.03, -0.28, -0.15),
    "half": (0.03, -0.05, 0.08, -0.08, 0.15, 0.12, -0.25, -0.24, 0.16, 0.02),
}

TABLE1_COLUMNS = (
    ("baseline", {}),
    ("alpha=0.51", {"alpha": 0.51}),
    ("alpha=4", {"alpha": 4.0}),
    ("beta=0.7", {"beta": 0.7}),
    ("beta=1", {"beta": 1.0}),
    ("delta_sq=0.01", {"delta_sq": 0.01}),
    ("delta_sq=1", {"delta_sq": 1.0}),
    ("sigma=0.01", {"sigma": 0.01}),
    ("sigma=1", {"sigma": 1.0}),
)


@dataclass(frozen=True)
class Components:
    """Model objects assembled from one configuration."""

    basis: object
    prior: object
    weights: object
    op: object
    design: object
    obs_map: ObservationMap
    sigma0: JointGaussian
    ball: GelbrichBall


def assemble(cfg: ExperimentConfig) -> Components:
    """Build basis, prior, weights, operator, maps and ball from a config."""
    cfg.validate()
    basis = build_dirichlet_basis_1d(cfg.n_modes)
    prior = matern_coefficients(basis, cfg.alpha, cfg.kappa)
    weights = roughness_weights(basis, cfg.beta)
    op = make_operator(cfg.operator_kind, basis, heat_time=cfg.heat_time)
    if cfg.design_kind == "custom":
        design = design_points("custom", xs=cfg.design_points)
    else:
        design = design_points(cfg.design_kind, m=cfg.m)
    obs_map = observation_map(basis, op, design, target=cfg.target)
    sigma0 = nominal_covariance(prior, cfg.sigma, design.m)
    ball = joint_ball(sigma0, weights, design.m, np.sqrt(cfg.delta_sq))
    return Components(
        basis=basis, prior=prior, weights=weights, op=op, design=design,
        obs_map=obs_map, sigma0=sigma0, ball=ball,
    )


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header, rows) -> Path:
    lines = [",".join(str(h) for h in header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _matrix_rows(grid, matrix):
    for x, row in zip(grid, matrix):
        yield (x, *row)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class ArtifactWriter:
    """Collects written files and finalizes the manifest."""

    def __init__(self, outdir: Path, command: str, cfg: ExperimentConfig | None):
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.cfg = cfg
        self.entries = []

    def add(self, path: Path, kind: str, **meta):
        entry = {"path": path.name, "kind": kind, "sha256": _sha256(path)}
        entry.update(meta)
        self.entries.append(entry)

    def csv(self, name: str, header, rows, kind: str, **meta) -> Path:
        path = write_csv(self.outdir / name, header, rows)
        self.add(path, kind, **meta)
        return path

    def json(self, name: str, payload: dict, kind: str = "summary") -> Path:
        path = self.outdir / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.add(path, kind)
        return path

    def finalize(self) -> Path:
        manifest = {
            "tool": "drgp",
            "version": __version__,
            "command": self.command,
            "files": sorted(self.entries, key=lambda e: e["path"]),
        }
        if self.cfg is not None:
            manifest["config"] = serialize_config(self.cfg)
        path = self.outdir / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def _solve(cfg: ExperimentConfig, comps: Components | None = None) -> EquilibriumResult:
    comps = comps or assemble(cfg)
    return solve_equilibrium(comps.ball, comps.obs_map, cfg.solver)


def _summary_payload(cfg: ExperimentConfig, comps: Components, result: EquilibriumResult) -> dict:
    return {
        "version": __version__,
        "config": serialize_config(cfg),
        "value": result.value,
        "nominal_value": float(_nominal_value(comps)),
        "gap": result.gap,
        "iterations": result.iterations,
        "stop_reason": result.stop_reason,
        "det_K_eps": result.det_K_eps,
        "distance_sq": result.distance_sq,
        "foerstner_nominal": prior_posterior_distance(comps.sigma0, comps.obs_map),
        "foerstner_worst": prior_posterior_distance(result.sigma_star, comps.obs_map),
        "n_modes": result.n_modes,
        "n_obs": result.n_obs,
    }


def _nominal_value(comps: Components) -> float:
    from .model import mmse_value

    return mmse_value(comps.sigma0, comps.obs_map)


def run_solve(cfg: ExperimentConfig, outdir) -> dict:
    """Solve one configuration and persist summary (and optional trace)."""
    comps = assemble(cfg)
    result = _solve(cfg, comps)
    writer = ArtifactWriter(Path(outdir), "solve", cfg)
    payload = _summary_payload(cfg, comps, result)
    writer.json("summary.json", payload)
    if result.trace is not None:
        writer.csv(
            "trace.csv",
            ("iteration", "value", "gap"),
            [(i, v, g) for i, (v, g) in enumerate(result.trace)],
            kind="trace",
        )
    writer.finalize()
    return payload


def _figure_observations(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.observations is not None:
        return np.asarray(cfg.observations, dtype=float)
    if cfg.design_kind in DEFAULT_OBSERVATIONS and cfg.m == 10:
        return np.asarray(DEFAULT_OBSERVATIONS[cfg.design_kind], dtype=float)
    raise ConfigError(
        "posterior figures need observations; set the 'observations' key "
        "(defaults exist only for the standard 10-point designs)"
    )


def run_figures(cfg: ExperimentConfig, outdir, n_paths: int = 5) -> dict:
    """Emit correlation matrices, 95% bands and sample paths as CSV data.

    Four measure/stage combinations are produced: nominal/worst-case times
    prior/posterior.  Correlation grids exclude the boundary points, where
    the field variance vanishes.
    """
    comps = assemble(cfg)
    result = _solve(cfg, comps)
    y = _figure_observations(cfg)
    grid = np.linspace(0.0, 1.0, cfg.grid_points)
    interior = grid[1:-1]

    writer = ArtifactWriter(Path(outdir), "figures", cfg)
    measures = (
        ("nominal", comps.sigma0),
        ("worst", result.sigma_star),
    )
    for measure, sigma in measures:
        mean_post, prior_cov, post_cov = signal_block_posterior(sigma, comps.obs_map, y)
        for stage_idx, (stage, mean, cov) in enumerate((
            ("prior", np.zeros(comps.obs_map.n_modes), prior_cov),
            ("posterior", mean_post, post_cov),
        )):
            corr = correlation_from_covariance(
                field_second_moments(cov, comps.basis, interior)
            )
            writer.csv(
                f"correlation_{measure}_{stage}.csv",
                ("x", *[_fmt(x) for x in interior]),
                _matrix_rows(interior, corr),
                kind="correlation", measure=measure, stage=stage, group="correlations",
            )
            lower, upper = marginal_intervals((mean, cov), comps.basis, grid)
            mean_path = evaluate_basis(comps.basis, grid) @ mean
            writer.csv(
                f"bands_{measure}_{stage}.csv",
                ("x", "mean", "lower", "upper"),
                zip(grid, mean_path, lower, upper),
                kind="bands", measure=measure, stage=stage, group="bands",
            )
            # common random numbers across measures: the same stage uses the
            # same seed, so covariance differences alone drive path differences
            paths = sample_paths((mean, cov), comps.basis, grid, n_paths,
                                 cfg.seed + stage_idx)
            writer.csv(
                f"paths_{measure}_{stage}.csv",
                ("x", *[f"path_{i + 1}" for i in range(n_paths)]),
                zip(grid, *paths),
                kind="paths", measure=measure, stage=stage, group="paths",
            )

    payload = _summary_payload(cfg, comps, result)
    writer.json("summary.json", payload)
    writer.finalize()
    return payload


def _table1_worker(args):
    """Solve one table column; returns a row dict (picklable)."""
    from .config import parse_config

    cfg_text, label, overrides = args
    cfg = with_overrides(parse_config(cfg_text), **overrides)
    row = {
        "label": label,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "delta_sq": cfg.delta_sq,
        "sigma": cfg.sigma,
        "status": "ok",
        "nominal": float("nan"),
        "worst_case": float("nan"),
        "value": float("nan"),
        "gap": float("nan"),
        "iterations": 0,
    }
    try:
        comps = assemble(cfg)
        row["nominal"] = prior_posterior_distance(comps.sigma0, comps.obs_map)
        result = _solve(cfg, comps)
        row["worst_case"] = prior_posterior_distance(result.sigma_star, comps.obs_map)
        row["value"] = result.value
        row["gap"] = result.gap
        row["iterations"] = result.iterations
    except Exception as exc:  # partial table still gets written
        row["status"] = f"error: {type(exc).__name__}: {exc}"
    return row


def run_table1(cfg: ExperimentConfig, outdir, jobs: int = 1) -> list:
    """Run the nine standard parameter columns and emit the distance table."""
    tasks = [(serialize_config(cfg), label, overrides) for label, overrides in TABLE1_COLUMNS]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_table1_worker, tasks))
    else:
        rows = [_table1_worker(t) for t in tasks]

    writer = ArtifactWriter(Path(outdir), "table1", cfg)
    header = ("label", "alpha", "beta", "delta_sq", "sigma", "nominal",
              "worst_case", "value", "gap", "iterations", "status")
    writer.csv("table1.csv", header, [[r[h] for h in header] for r in rows], kind="table")
    writer.json("summary.json", {"version": __version__, "columns": rows,
                                 "config": serialize_config(cfg)})
    writer.finalize()
    return rows


def _sweep_worker(args):
    cfg_text, key, value, outdir = args
    from .config import parse_config

    cfg = with_overrides(parse_config(cfg_text), **{key: value})
    payload = run_solve(cfg, outdir)
    payload["vary_key"] = key
    payload["vary_value"] = value
    return payload


def run_sweep(cfg: ExperimentConfig, key: str, values, outdir, jobs: int = 1) -> list:
    """Run one solve per value of a single varied configuration key."""
    outdir = Path(outdir)
    tasks = []
    for value in values:
        sub = outdir / f"{key}_{_fmt(value)}"
        tasks.append((serialize_config(cfg), key, value, str(sub)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            payloads = list(pool.map(_sweep_worker, tasks))
    else:
        payloads = [_sweep_worker(t) for t in tasks]

    writer = ArtifactWriter(outdir, "sweep", cfg)
    header = ("vary_key", "vary_value", "value", "nominal_value", "gap",
              "iterations", "foerstner_nominal", "foerstner_worst")
    writer.csv("sweep.csv", header,
               [[p[h] for h in header] for p in payloads], kind="table")
    writer.finalize()
    return payloads


def run_convergence(cfg: ExperimentConfig, levels, outdir) -> dict:
    """Solve at several truncation levels and report value/determinant trends."""
    levels = sorted(int(n) for n in levels)
    if len(levels) < 2:
        raise ConfigError("convergence needs at least two truncation levels")
    results = []
    for n in levels:
        sub_cfg = with_overrides(cfg, n_modes=n)
        results.append(_solve(sub_cfg))
    trunc = truncation_convergence(results)
    dets = determinant_diagnostic(results)

    writer = ArtifactWriter(Path(outdir), "convergence", cfg)
    rows = []
    for i, (n, res) in enumerate(zip(trunc.levels, results)):
        inc = trunc.rel_increments[i - 1] if i > 0 else float("nan")
        rows.append((n, res.value, res.gap, res.iterations, res.det_K_eps, inc))
    writer.csv("convergence.csv",
               ("n_modes", "value", "gap", "iterations", "det_K_eps", "rel_increment"),
               rows, kind="convergence")
    payload = {
        "version": __version__,
        "config": serialize_config(cfg),
        "levels": list(trunc.levels),
        "values": list(trunc.values),
        "rel_increments": list(trunc.rel_increments),
        "dets": list(dets.dets),
        "det_decaying": dets.decaying,
    }
    writer.json("summary.json", payload)
    writer.finalize()
    return payload

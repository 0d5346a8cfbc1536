import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

GOLDEN_PATH = Path(__file__).parent / "golden_hashes.json"


def pytest_addoption(parser):
    parser.addoption(
        "--update-goldens", action="store_true", default=False,
        help="rewrite golden_hashes.json from the current renderer output",
    )


@pytest.fixture(scope="session")
def update_goldens(request):
    return request.config.getoption("--update-goldens")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture(scope="session")
def synthetic_run(tmp_path_factory):
    """A miniature run directory: manifest plus one CSV per figure panel."""
    root = tmp_path_factory.mktemp("synthetic_run")
    xs = np.linspace(0.05, 0.95, 10)
    grid = np.linspace(0.0, 1.0, 21)
    entries = []
    rng = np.random.default_rng(12345)
    for measure in ("nominal", "worst"):
        for stage in ("prior", "posterior"):
            name = f"correlation_{measure}_{stage}.csv"
            if measure == "nominal" and stage == "prior":
                corr = np.ones((10, 10))  # uniform heatmap case
            else:
                base = rng.uniform(-0.5, 0.5, size=(10, 10))
                corr = np.clip(0.5 * (base + base.T), -1, 1)
                np.fill_diagonal(corr, 1.0)
            write_csv(root / name, ["x", *[repr(float(x)) for x in xs]],
                      [[x, *row] for x, row in zip(xs, corr)])
            entries.append({"path": name, "kind": "correlation", "measure": measure,
                            "stage": stage, "group": "correlations"})

            name = f"bands_{measure}_{stage}.csv"
            mean = np.sin(np.pi * grid) * (0.5 if stage == "prior" else 0.2)
            width = 0.0 if (measure == "nominal" and stage == "prior") else 0.3
            write_csv(root / name, ["x", "mean", "lower", "upper"],
                      [[x, m, m - width, m + width] for x, m in zip(grid, mean)])
            entries.append({"path": name, "kind": "bands", "measure": measure,
                            "stage": stage, "group": "bands"})

            name = f"paths_{measure}_{stage}.csv"
            paths = rng.standard_normal((5, grid.size)) * 0.2
            write_csv(root / name, ["x"] + [f"path_{i+1}" for i in range(5)],
                      [[x, *paths[:, j]] for j, x in enumerate(grid)])
            entries.append({"path": name, "kind": "paths", "measure": measure,
                            "stage": stage, "group": "paths"})

    manifest = {"tool": "drgp", "version": "0.1.0", "command": "figures",
                "files": entries}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return root


@pytest.fixture(scope="session")
def baseline_run(tmp_path_factory):
    """Real output of the experiment CLI at its default configuration."""
    root = tmp_path_factory.mktemp("baseline_run")
    cfg = root / "baseline.cfg"
    cfg.write_text("")  # defaults are the standard baseline
    out = root / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "drgp.cli", "figures", str(cfg), "--out", str(out)],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        pytest.skip(f"experiment CLI unavailable: {proc.stderr.strip()[:200]}")
    return out


def load_goldens():
    if GOLDEN_PATH.exists():
        return json.loads(GOLDEN_PATH.read_text())
    return {}


def save_goldens(data):
    GOLDEN_PATH.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")

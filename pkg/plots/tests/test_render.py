import hashlib
import json

import matplotlib
import numpy as np
import pytest

from drgp_plots import build_specs, render, render_manifest
from drgp_plots.cli import main
from drgp_plots.render import build_figure

from conftest import GOLDEN_PATH, load_goldens, save_goldens


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestSpecs:
    def test_groups_and_panel_order(self, synthetic_run, tmp_path):
        specs = build_specs(synthetic_run / "manifest.json", tmp_path)
        kinds = {s.kind for s in specs}
        assert kinds == {"heatmap", "bands", "paths"}
        for spec in specs:
            assert spec.titles == (
                "Nominal prior", "Worst-case prior",
                "Nominal posterior", "Worst-case posterior",
            )

    def test_panel_titles_on_axes(self, synthetic_run, tmp_path):
        specs = {s.kind: s for s in build_specs(synthetic_run / "manifest.json", tmp_path)}
        fig = build_figure(specs["heatmap"])
        titles = [ax.get_title() for ax in fig.axes if ax.get_title()]
        assert titles == [
            "Nominal prior", "Worst-case prior",
            "Nominal posterior", "Worst-case posterior",
        ]
        matplotlib.pyplot.close(fig)


class TestHeatmap:
    def test_uniform_correlation_panel(self, synthetic_run, tmp_path):
        specs = {s.kind: s for s in build_specs(synthetic_run / "manifest.json", tmp_path)}
        fig = build_figure(specs["heatmap"])
        first = fig.axes[0].images[0]
        assert first.get_clim() == (-1.0, 1.0)
        assert np.all(np.asarray(first.get_array()) == 1.0)
        matplotlib.pyplot.close(fig)

    def test_symmetric_color_scale_everywhere(self, synthetic_run, tmp_path):
        specs = {s.kind: s for s in build_specs(synthetic_run / "manifest.json", tmp_path)}
        fig = build_figure(specs["heatmap"])
        for ax in fig.axes:
            for image in ax.images:
                assert image.get_clim() == (-1.0, 1.0)
        matplotlib.pyplot.close(fig)


class TestBands:
    def test_shared_vertical_range(self, synthetic_run, tmp_path):
        specs = {s.kind: s for s in build_specs(synthetic_run / "manifest.json", tmp_path)}
        fig = build_figure(specs["bands"])
        limits = {ax.get_ylim() for ax in fig.axes if ax.get_title()}
        assert len(limits) == 1
        matplotlib.pyplot.close(fig)

    def test_zero_width_band_collapses_to_mean(self, synthetic_run, tmp_path):
        # the nominal prior band CSV has upper == lower == mean
        text = (synthetic_run / "bands_nominal_prior.csv").read_text().splitlines()
        row = text[5].split(",")
        assert row[1] == row[2] == row[3]
        specs = {s.kind: s for s in build_specs(synthetic_run / "manifest.json", tmp_path)}
        out = render(specs["bands"])
        assert out.exists() and out.stat().st_size > 0


class TestPathsFigure:
    def test_five_series_per_panel(self, synthetic_run, tmp_path):
        specs = {s.kind: s for s in build_specs(synthetic_run / "manifest.json", tmp_path)}
        fig = build_figure(specs["paths"])
        panels = [ax for ax in fig.axes if ax.get_title()]
        assert all(len(ax.lines) == 5 for ax in panels)
        limits = {ax.get_ylim() for ax in panels}
        assert len(limits) == 1
        matplotlib.pyplot.close(fig)


class TestCli:
    def test_renders_all_groups(self, synthetic_run, tmp_path):
        out = tmp_path / "imgs"
        assert main(["--manifest", str(synthetic_run / "manifest.json"),
                     "--out", str(out)]) == 0
        names = {p.name for p in out.iterdir()}
        assert names == {"correlations.png", "bands.png", "paths.png"}

    def test_missing_column_names_it(self, synthetic_run, tmp_path, capsys):
        broken = tmp_path / "broken"
        broken.mkdir()
        for f in synthetic_run.iterdir():
            (broken / f.name).write_bytes(f.read_bytes())
        target = broken / "bands_worst_posterior.csv"
        lines = target.read_text().splitlines()
        lines[0] = "x,mean,lower,middle"
        target.write_text("\n".join(lines) + "\n")
        rc = main(["--manifest", str(broken / "manifest.json"), "--out", str(tmp_path / "o")])
        assert rc != 0
        assert "upper" in capsys.readouterr().err

    def test_empty_manifest_fails(self, tmp_path, capsys):
        m = tmp_path / "manifest.json"
        m.write_text(json.dumps({"files": []}))
        assert main(["--manifest", str(m), "--out", str(tmp_path / "o")]) != 0


class TestDeterminism:
    def test_rerender_is_pixel_identical(self, synthetic_run, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        render_manifest(synthetic_run / "manifest.json", out1)
        render_manifest(synthetic_run / "manifest.json", out2)
        for name in ("correlations.png", "bands.png", "paths.png"):
            assert sha256(out1 / name) == sha256(out2 / name)

    def test_golden_hashes_synthetic(self, synthetic_run, tmp_path, update_goldens):
        out = tmp_path / "golden"
        render_manifest(synthetic_run / "manifest.json", out)
        hashes = {name: sha256(out / name)
                  for name in ("correlations.png", "bands.png", "paths.png")}
        goldens = load_goldens()
        if update_goldens:
            goldens["matplotlib"] = matplotlib.__version__
            goldens["synthetic"] = hashes
            save_goldens(goldens)
            pytest.skip("goldens updated")
        if not GOLDEN_PATH.exists():
            pytest.skip("no golden hashes recorded")
        if goldens.get("matplotlib") != matplotlib.__version__:
            pytest.skip(
                f"goldens pinned to matplotlib {goldens.get('matplotlib')}, "
                f"running {matplotlib.__version__}"
            )
        assert hashes == goldens["synthetic"]


class TestBaselinePipeline:
    def test_baseline_manifest_renders_with_golden_hash(self, baseline_run, tmp_path,
                                                        update_goldens):
        out = tmp_path / "imgs"
        written = render_manifest(baseline_run / "manifest.json", out)
        names = {p.name for p in written}
        assert names == {"correlations.png", "bands.png", "paths.png"}

        specs = {s.kind: s for s in build_specs(baseline_run / "manifest.json", out)}
        fig = build_figure(specs["heatmap"])
        titles = [ax.get_title() for ax in fig.axes if ax.get_title()]
        assert titles == [
            "Nominal prior", "Worst-case prior",
            "Nominal posterior", "Worst-case posterior",
        ]
        matplotlib.pyplot.close(fig)

        hashes = {name: sha256(out / name) for name in sorted(names)}
        goldens = load_goldens()
        if update_goldens:
            goldens["matplotlib"] = matplotlib.__version__
            goldens["baseline"] = hashes
            save_goldens(goldens)
            pytest.skip("goldens updated")
        if goldens.get("matplotlib") != matplotlib.__version__ or "baseline" not in goldens:
            pytest.skip("no matching golden hashes recorded")
        assert hashes == goldens["baseline"]

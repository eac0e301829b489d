"""Secondary-component tests: schema-validated rendering from primary artifacts."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

mpl = pytest.importorskip("matplotlib")

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

import render  # noqa: E402
from render import PlotJob, load_csv  # noqa: E402


def make_csv(path: Path, schema: str, header, rows, manifest=True):
    lines = [f"# schema={schema}", ",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    if manifest:
        path.with_suffix(".manifest.json").write_text(
            json.dumps({"config_hash": "test", "schema": schema}) + "\n")
    return path


@pytest.fixture()
def scan_csv(tmp_path):
    z = np.arange(-4.0, 4.01, 0.25)
    absu = 0.05 + 0.3 * np.isin(z, [-4, -2, 0, 2, 4])
    rows = [[1.5, float(zi), float(a), 0.0, float(a)] for zi, a in zip(z, absu)]
    return make_csv(tmp_path / "scan.csv", "interference-scan v1",
                    ["T", "z", "ReU", "ImU", "absU"], rows)


class TestValidation:
    def test_refuses_unmanifested(self, tmp_path):
        p = make_csv(tmp_path / "x.csv", "interference-scan v1",
                     ["T", "z", "ReU", "ImU", "absU"],
                     [[1.5, 0.0, 1.0, 0.0, 1.0]], manifest=False)
        with pytest.raises(FileNotFoundError, match="unmanifested"):
            render.render(PlotJob("interference_scan", str(p), str(tmp_path / "o.png")))

    def test_schema_mismatch(self, tmp_path, scan_csv):
        job = PlotJob("dispersion_curve", str(scan_csv), str(tmp_path / "o.png"))
        with pytest.raises(ValueError, match="schema mismatch"):
            render.render(job)

    def test_unknown_kind(self, tmp_path, scan_csv):
        with pytest.raises(ValueError, match="unknown figure kind"):
            render.render(PlotJob("volcano", str(scan_csv), str(tmp_path / "o.png")))

    def test_job_file_validation(self, tmp_path):
        bad = tmp_path / "job.json"
        bad.write_text(json.dumps({"kind": "x"}))
        with pytest.raises(ValueError, match="missing required key"):
            PlotJob.from_file(str(bad))

    def test_empty_csv_warning_figure(self, tmp_path):
        p = make_csv(tmp_path / "empty.csv", "interference-scan v1",
                     ["T", "z", "ReU", "ImU", "absU"], [])
        out = render.render(PlotJob("interference_scan", str(p),
                                    str(tmp_path / "empty.png")))
        assert out.exists() and out.stat().st_size > 0


class TestKinds:
    def test_interference_scan_png(self, tmp_path, scan_csv):
        out = render.render(PlotJob("interference_scan", str(scan_csv),
                                    str(tmp_path / "scan.png")))
        assert out.exists() and out.stat().st_size > 5000
        # numeric stand-in for the visual spot check: even-lattice peaks
        _, header, rows = load_csv(scan_csv)
        z = np.array([r[1] for r in rows])
        a = np.array([r[4] for r in rows])
        even = np.isin(z, [-4.0, -2.0, 0.0, 2.0, 4.0])
        assert a[even].min() > a[~even].max()

    def test_dispersion_curve_png(self, tmp_path):
        xi = np.linspace(0, 40, 60)
        rows = [[float(x), float(x**2 / (1 + x**2)), float(x**2 / (1 + x**2)), 1.0]
                for x in xi]
        p = make_csv(tmp_path / "disp.csv", "dispersion-curve v1",
                     ["xi", "p_whistler", "p_model", "asymptote"], rows)
        out = render.render(PlotJob("dispersion_curve", str(p),
                                    str(tmp_path / "disp.png")))
        assert out.exists() and out.stat().st_size > 5000

    def test_convergence_png(self, tmp_path):
        rows = [[0.02, 0.011], [0.01, 0.005], [0.0025, 0.0012]]
        p = make_csv(tmp_path / "conv.csv", "toy-tan v1", ["eps", "err"], rows)
        out = render.render(PlotJob("convergence", str(p),
                                    str(tmp_path / "conv.png")))
        assert out.exists() and out.stat().st_size > 5000

    def test_cli_job_roundtrip(self, tmp_path, scan_csv):
        job = {"kind": "interference_scan", "csv": str(scan_csv),
               "out": str(tmp_path / "cli.png")}
        jf = tmp_path / "job.json"
        jf.write_text(json.dumps(job))
        r = subprocess.run([sys.executable, str(HERE / "render.py"),
                            "--job", str(jf)], capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        assert Path(job["out"]).exists()


class TestFromPrimaryArtifacts:
    """Criterion 11: render the three headline figures from real primary CSVs."""

    @pytest.fixture(scope="class")
    def artifacts(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("primary")
        from quasirect.acceptance import criterion_6, OracleCache
        from quasirect.config import build_experiment, load_config
        exp = build_experiment(load_config(
            overrides=["ladder.eps=[0.02,0.01]", "ladder.cos_floor=0.0"]))
        # dispersion CSV via the demo path
        subprocess.run([sys.executable, str(HERE.parent / "demos" / "demo_01_symbols.py")],
                       check=True, capture_output=True, cwd=out)
        # interference scan via the CLI (packets solver, fast)
        subprocess.run([sys.executable, "-m", "quasirect.cli", "interference-scan",
                        "--eps", "0.02", "--out", str(out), "--solver", "packets"],
                       check=True, capture_output=True)
        # dichotomy ladder CSV via criterion 6 on the reduced ladder
        cache = OracleCache(exp)
        try:
            criterion_6(exp, out, cache, eps_track=0.01)
        except Exception:
            pass   # sub-clause outcomes are irrelevant here; the CSV is the artifact
        return out

    def test_render_headline_figures(self, artifacts, tmp_path):
        jobs = [("dispersion_curve", artifacts / "out" / "demos" / "dispersion_curve.csv"),
                ("interference_scan", artifacts / "interference_scan.csv"),
                ("convergence", artifacts / "c6_dichotomy.csv")]
        for kind, csv in jobs:
            assert csv.exists(), f"missing primary artifact {csv}"
            out = render.render(PlotJob(kind, str(csv), str(tmp_path / f"{kind}.png")))
            assert out.exists() and out.stat().st_size > 5000

    def test_even_lattice_peaks_visible(self, artifacts):
        _, header, rows = load_csv(artifacts / "interference_scan.csv")
        z = np.array([r[1] for r in rows])
        a = np.array([r[4] for r in rows])
        even = np.isin(z, [-2.0, 0.0, 2.0])
        frac = np.isclose(np.mod(z, 1.0), 0.5)
        assert a[even].min() > a[frac].max()

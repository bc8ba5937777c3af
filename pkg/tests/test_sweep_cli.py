import json
import math
import subprocess
import sys

import numpy as np
import pytest

from geophase.cli import main
from geophase.engine import phase_for
from geophase.model import InitialStateSpec, SystemParams
from geophase.sweep import (
    FIELDS,
    FIGURES,
    Axis,
    SweepConfig,
    evaluate_point,
    figure_config,
    format_records,
    load_config,
    parse_number,
    parse_values,
    read_csv_records,
    run_sweep,
)

PI = math.pi

# caption values for every preset: (family, fixed parameters, swept axis names)
CAPTIONS = {
    "fig1a": ("phi", {"n": 1.0, "J": 0.0, "omega1t": PI / 2}, ("theta", "r")),
    "fig1b": ("psi", {"n": 0.5, "J": 0.0, "omega1t": PI}, ("theta", "r")),
    "fig2a": ("phi", {"r": 1.0, "J": 0.0, "omega1t": PI / 2}, ("n", "theta")),
    "fig2b": ("psi", {"r": 1.0, "J": 0.0, "omega1t": PI}, ("n", "theta")),
    "fig2c": ("phi", {"r": 1.0, "J": 0.0, "omega1t": PI / 4}, ("n", "theta")),
    "fig2d": ("psi", {"r": 1.0, "J": 0.0, "omega1t": PI / 2}, ("n", "theta")),
    "fig3a": ("psi", {"theta": PI / 4, "n": 0.5, "omega1t": PI}, ("r", "J")),
    "fig3b": ("psi", {"theta": 3 * PI / 4, "n": 0.5, "omega1t": PI}, ("r", "J")),
    "fig4": ("psi", {"theta": PI / 4, "r": 1.0, "omega1t": PI}, ("n", "J")),
    "fig5a": ("psi", {"theta": PI / 4, "n": 0.0, "omega1t": PI}, ("r", "J")),
    "fig5b": ("psi", {"theta": 3 * PI / 4, "n": 0.0, "omega1t": PI}, ("r", "J")),
    "fig6a": ("psi", {"theta": PI / 4, "r": 1.0, "n": 0.5, "omega1t": PI}, ("J",)),
    "fig6b": ("psi", {"theta": 3 * PI / 4, "r": 1.0, "n": 0.5, "omega1t": PI}, ("J",)),
}


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def data_lines(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


class TestParsing:
    @pytest.mark.parametrize("text,value", [
        ("0.5", 0.5), ("pi", PI), ("pi/4", PI / 4), ("3*pi/4", 3 * PI / 4), ("-2", -2.0),
    ])
    def test_numbers(self, text, value):
        assert parse_number(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("text", ["__import__('os')", "pi**2", "abc", ""])
    def test_rejects_non_arithmetic(self, text):
        with pytest.raises(ValueError):
            parse_number(text)

    def test_values(self):
        assert parse_values("0:1:3") == [0.0, 0.5, 1.0]
        assert parse_values("0.1, 0.2") == [0.1, 0.2]

    def test_axis(self):
        assert Axis.parse("J:0:3:61").values == tuple(np.linspace(0, 3, 61))
        assert Axis.parse("n=0.1,0.5").values == (0.1, 0.5)
        with pytest.raises(ValueError, match="steps must be >= 2"):
            Axis.parse("r:0.1:1:1")
        with pytest.raises(ValueError, match="min < max"):
            Axis.parse("r:1:0.1:5")
        with pytest.raises(ValueError, match="unknown axis"):
            Axis.parse("g:0:1:5")


class TestConfig:
    def test_domain_checks(self):
        with pytest.raises(ValueError, match="r must lie"):
            SweepConfig("phi", (Axis.linspace("r", 0.0, 1.0, 5),))
        with pytest.raises(ValueError, match="n must be >= 0"):
            SweepConfig("phi", (), {"n": -1})
        with pytest.raises(ValueError, match="at most 2"):
            SweepConfig("phi", tuple(Axis.linspace(a, 0.1, 1, 2) for a in ("theta", "r", "J")))

    def test_load(self):
        cfg, io_opts = load_config(
            "# comment\nfamily = psi\naxis1 = r:0.01:1:100\naxis2 = J:0:3:61\n"
            "theta = pi/4\nn = 0.5\nomega1t = pi\nformat = jsonl\n"
        )
        assert cfg == FIGURES["fig3a"]
        assert io_opts == {"format": "jsonl"}

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            load_config("family = phi\ncolour = red\n")


class TestRecords:
    def test_row_count_and_order(self):
        cfg = SweepConfig("phi", (Axis.linspace("theta", 0, PI, 50), Axis.linspace("r", 0.02, 1, 50)),
                          {"n": 0.5, "omega1t": 1.0})
        recs = run_sweep(cfg)
        assert len(recs) == 2500
        text = format_records(recs)
        assert text.endswith("\n")
        lines = data_lines(text)
        assert len(lines) == 2501
        assert lines[0] == ",".join(FIELDS)
        # second axis varies fastest
        assert recs[0].r == 0.02 and recs[1].r != 0.02 and recs[1].theta == 0
        assert recs[50].theta == pytest.approx(PI / 49)

    def test_singular_rows_have_empty_phase(self):
        cfg = SweepConfig("phi", (Axis("r", (0.99, 1.0)),), {"theta": PI / 4, "n": 1, "omega1t": PI / 2})
        rows = read_csv_records(format_records(run_sweep(cfg)))
        assert [r["singular"] for r in rows] == [False, True]
        assert rows[1]["phase"] is None
        raw = data_lines(format_records(run_sweep(cfg)))[2].split(",")
        assert raw[FIELDS.index("phase")] == ""

    def test_csv_round_trip(self):
        recs = run_sweep(SweepConfig("psi", (Axis.linspace("J", 0, 3, 7), Axis.linspace("r", 0.1, 1, 4)),
                                     {"theta": 0.4, "n": 0.3, "omega1t": 2.2}))
        rows = read_csv_records(format_records(recs))
        for rec, row in zip(recs, rows):
            for name in FIELDS:
                v = getattr(rec, name)
                if isinstance(v, float):
                    assert row[name] == pytest.approx(v, rel=5e-12, abs=1e-300)
                else:
                    assert row[name] == v

    def test_jsonl(self):
        cfg = FIGURES["fig6a"]
        recs = run_sweep(SweepConfig(cfg.family, (Axis("J", (1.0, 2.0)),), cfg.fixed))
        lines = format_records(recs, "jsonl", ["family: psi"]).splitlines()
        assert json.loads(lines[0]) == {"meta": {"family": "psi"}}
        first = json.loads(lines[1])
        assert list(first) == list(FIELDS)
        assert first["phase"] == pytest.approx(recs[0].phase, rel=1e-11)

    def test_evaluate_point_matches_engine(self):
        rec = evaluate_point("psi", 0.3, 0.6, 0.5, 0.7, 2.0, omega1=2.0)
        ref = phase_for(InitialStateSpec("psi", 0.3, 0.6), SystemParams(2.0, 1.0, 1.4), 1.0)
        assert rec.phase == ref.phase and rec.t == 1.0 and rec.g == 1.4


class TestPresets:
    @pytest.mark.parametrize("fig_id", list(CAPTIONS))
    def test_caption_values(self, fig_id):
        family, fixed, axes = CAPTIONS[fig_id]
        cfg = figure_config(fig_id)
        assert cfg.family.value == family
        assert tuple(a.name for a in cfg.axes) == axes
        for k, v in fixed.items():
            assert cfg.fixed[k] == v

    def test_all_presets_covered(self):
        assert set(FIGURES) == set(CAPTIONS)

    def test_axis_extents(self):
        assert figure_config("fig1a").axis("r").values[0] == 0.01
        assert figure_config("fig2a").axis("n").values == (0.99, 0.9, 0.5, 0.0)
        assert figure_config("fig2b").axis("n").values == (0.5, 0.1, 0.01)
        assert figure_config("fig2c").axis("theta").values[-1] == PI / 2
        assert figure_config("fig4").axis("n").values == (0.001, 0.1, 0.5, 0.8)
        assert np.diff(figure_config("fig4").axis("J").values) == pytest.approx(0.005)
        assert figure_config("fig6a").axis("J").values[-1] == 100.0

    def test_unknown(self):
        with pytest.raises(ValueError, match="valid ids: fig1a"):
            figure_config("fig7")

    def test_fig1a_zero_ridge(self):
        cfg = figure_config("fig1a")
        recs = [rec for rec in run_sweep(cfg) if rec.theta == pytest.approx(PI / 4)]
        assert len(recs) == 100
        assert recs[-1].singular and recs[-1].r == 1.0
        assert all(abs(rec.phase) < 1e-10 for rec in recs[:-1])


class TestCli:
    def test_compute_werner_zero(self, capsys):
        code, out, _ = run_cli(capsys, "compute", "--family", "psi", "--theta", "0.7853981634",
                               "--r", "0.9", "--n", "1", "--J", "0", "--omega1t", "0.7853981634")
        assert code == 0
        assert "phase:           0\n" in out
        assert "singular:        false" in out

    def test_compute_singular(self, capsys):
        code, out, _ = run_cli(capsys, "compute", "--family", "phi", "--theta", "0.7853981634",
                               "--r", "1", "--n", "1", "--J", "0", "--omega1t", "1.5707963268")
        assert code == 0
        assert "phase:           undefined" in out
        assert "singular:        true" in out

    def test_compute_time_zero(self, capsys):
        code, out, _ = run_cli(capsys, "compute", "--family", "phi", "--theta", "1.1", "--r", "0.3",
                               "--n", "0.2", "--J", "4", "--omega1t", "0")
        assert code == 0 and "phase:           0\n" in out

    def test_compute_prints_twelve_digits(self, capsys):
        _, out, _ = run_cli(capsys, "compute", "--family", "phi", "--theta", "1.1", "--r", "0.3",
                            "--omega1t", "2")
        line = next(ln for ln in out.splitlines() if ln.startswith("phase:"))
        ref = phase_for(InitialStateSpec("phi", 1.1, 0.3), SystemParams(1, 1), 2.0).phase
        assert line.split()[1] == f"{ref:.12g}"

    @pytest.mark.parametrize("argv", [
        ["compute", "--family", "phi", "--r", "0", "--omega1t", "1"],
        ["compute", "--family", "phi", "--r", "1.5", "--omega1t", "1"],
        ["compute", "--family", "phi", "--omega1t", "-1"],
        ["compute", "--family", "chi", "--omega1t", "1"],
        ["verify", "--points", "0"],
        ["sweep", "--family", "phi"],
    ])
    def test_usage_errors(self, capsys, argv):
        try:
            code = main(argv)
        except SystemExit as exc:  # argparse-level rejection
            code = exc.code
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_unknown_figure_lists_ids(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["figure", "fig9"])
        assert exc.value.code == 2
        assert "fig6b" in capsys.readouterr().err

    def test_io_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "figure", "fig6a", "--out", str(tmp_path / "no" / "x.csv"))
        assert code == 3 and "cannot write" in err

    def test_sweep_config_file_matches_preset(self, capsys, tmp_path):
        conf = tmp_path / "fig3.conf"
        conf.write_text("family = psi\naxis1 = r:0.01:1:100\naxis2 = J:0:3:61\n"
                        "theta = pi/4\nn = 0.5\nomega1t = pi\n")
        manual, preset = tmp_path / "manual.csv", tmp_path / "preset.csv"
        assert main(["sweep", "--config", str(conf), "--out", str(manual)]) == 0
        assert main(["figure", "fig3a", "--out", str(preset)]) == 0
        assert manual.read_bytes() == preset.read_bytes()

    def test_sweep_flags(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--family", "phi", "--axis", "theta:0:pi:5",
                               "--axis", "r=0.5,1", "--n", "1", "--omega1t", "pi/2")
        assert code == 0
        rows = read_csv_records(out)
        assert len(rows) == 10
        assert [r["singular"] for r in rows].count(True) == 2  # pi/4 and 3pi/4 at r = 1

    def test_scan_singular(self, capsys):
        code, out, _ = run_cli(capsys, "scan-singular", "--family", "phi", "--thetas", "0:pi:5",
                               "--rs", "0.5,1", "--omega1ts", "pi/2")
        assert code == 0
        rows = read_csv_records(out)
        assert len(rows) == 2  # theta = pi/4 and 3pi/4 at r = 1
        assert {round(r["theta"], 9) for r in rows} == {round(PI / 4, 9), round(3 * PI / 4, 9)}
        mags = [r["trace_magnitude"] for r in rows]
        assert mags == sorted(mags)

    def test_verify_forced_singular(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--family", "phi", "--thetas", "pi/4", "--rs", "1",
                               "--ns", "1", "--Js", "0", "--omega1ts", "pi/2")
        assert code == 0
        assert "singular skipped:  1" in out

    def test_verify_failure_exit_code(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--points", "3", "--rs", "0.5", "--ns", "0.5",
                               "--Js", "0.3", "--omega1ts", "1", "--tol", "0")
        assert code == 4 and "FAIL" in out

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "geophase", "compute", "--family", "psi", "--omega1t", "1"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0 and "phase:" in proc.stdout

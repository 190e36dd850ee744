import json
import math
import subprocess
import sys

import jsonschema
import pytest

from hidden_angle.cli import load_schema

from conftest import gaussian_table


def csv_rows(text):
    lines = [l for l in text.strip().splitlines() if l]
    header, rows = lines[0], lines[1:]
    return header, [r.split(",") for r in rows]


class TestStateReport:
    def test_oscillator_111(self, run_cli):
        code, out, err = run_cli("state-report", "--family", "ho", "--n", "1,1,1")
        assert code == 0
        data = json.loads(out)
        assert data["cos_saturation"] == pytest.approx(1.0 / 9.0, rel=1e-12)
        assert data["aggregated_holds"] is True
        jsonschema.validate(data, load_schema("state_report.schema.json"))

    def test_well_invalid_level(self, run_cli):
        code, out, err = run_cli(
            "state-report", "--family", "well", "--n", "0,1,1", "--L", "1"
        )
        assert code == 1
        assert out == ""
        assert "InvalidQuantumNumber" in err

    def test_gaussian_equality(self, run_cli):
        code, out, _ = run_cli("state-report", "--family", "gauss", "--sigma", "1,1,1")
        assert code == 0
        data = json.loads(out)
        assert abs(data["slack"]) < 1e-10
        assert data["cos_geometric"] == 1.0
        jsonschema.validate(data, load_schema("state_report.schema.json"))

    def test_anisotropic_parameters(self, run_cli):
        code, out, _ = run_cli(
            "state-report", "--family", "gauss", "--sigma", "1,2,3"
        )
        data = json.loads(out)
        assert data["R2"] == pytest.approx([1.0, 4.0, 9.0])

    def test_tabulated_axes(self, run_cli, tmp_path):
        # sampled first excited oscillator state: product 2.25, wide margin
        import numpy as np
        from hidden_angle import eval_psi, harmonic_oscillator

        grid = np.linspace(-9.0, 9.0, 512)
        values = eval_psi(harmonic_oscillator(1), grid)
        path = tmp_path / "excited.txt"
        path.write_text("\n".join(f"{x} {v}" for x, v in zip(grid, values)))
        code, out, _ = run_cli("state-report", "--family", "table", "--file", str(path))
        assert code == 0
        data = json.loads(out)
        assert data["per_axis_products"] == pytest.approx([2.25] * 3, rel=1e-4)
        assert data["aggregated_holds"] is True
        jsonschema.validate(data, load_schema("state_report.schema.json"))

    def test_human_format(self, run_cli):
        code, out, _ = run_cli(
            "state-report", "--family", "ho", "--n", "0", "--format", "human"
        )
        assert code == 0
        assert "cos_saturation" in out and "{" not in out.splitlines()[1]

    def test_csv_format_rejected(self, run_cli):
        code, out, err = run_cli(
            "state-report", "--family", "ho", "--n", "0", "--format", "csv"
        )
        assert code == 1 and out == "" and "sweep" in err

    def test_aggregated_failure_exits_two(self, run_cli, monkeypatch):
        import hidden_angle.cli as cli
        import hidden_angle.relations as relations

        real = relations.hur_report

        def pessimist(*args, **kwargs):
            report = real(*args, **kwargs)
            object.__setattr__(report, "aggregated_holds", False)
            return report

        monkeypatch.setattr(cli, "hur_report", pessimist)
        code, out, _ = run_cli("state-report", "--family", "ho", "--n", "0")
        assert code == 2
        assert json.loads(out)["aggregated_holds"] is False

    def test_bad_triple(self, run_cli):
        code, _, err = run_cli("state-report", "--family", "ho", "--n", "1,2")
        assert code == 1 and "comma-separated" in err


class TestSweep:
    def test_oscillator_ladder(self, run_cli):
        code, out, _ = run_cli("sweep", "--family", "ho", "--n-max", "3")
        assert code == 0
        header, rows = csv_rows(out)
        assert header == "n,cos_closed,cos_saturation_numeric,abs_diff"
        assert [int(r[0]) for r in rows] == [0, 1, 2, 3]
        closed = [float(r[1]) for r in rows]
        assert closed == pytest.approx([1.0, 1 / 9, 1 / 25, 1 / 49], rel=1e-14)
        assert all(float(r[3]) < 1e-12 for r in rows)

    def test_well_ladder(self, run_cli):
        code, out, _ = run_cli("sweep", "--family", "well", "--n-max", "2")
        assert code == 0
        _, rows = csv_rows(out)
        assert [float(r[1]) for r in rows] == pytest.approx(
            [0.7752730483652154, 0.08960997008441435], rel=1e-13
        )

    def test_well_zero_invalid(self, run_cli):
        code, out, err = run_cli("sweep", "--family", "well", "--n-max", "0")
        assert code == 1 and out == "" and "n-max" in err

    def test_quadrature_comparison(self, run_cli):
        code, out, _ = run_cli(
            "sweep", "--family", "well", "--n-max", "4", "--compare-quadrature"
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert all(float(r[3]) < 1e-6 for r in rows)

    def test_oscillator_quadrature_comparison(self, run_cli):
        code, out, _ = run_cli(
            "sweep", "--family", "ho", "--n-max", "6", "--compare-quadrature"
        )
        _, rows = csv_rows(out)
        assert all(float(r[3]) < 1e-8 for r in rows)


@pytest.fixture
def onshell_csv(write_events_csv):
    import numpy as np

    rng = np.random.default_rng(17)
    n = 600
    rows = zip(
        rng.normal(12.0, 0.7, n),
        rng.normal(0.0, 0.9, n),
        rng.normal(1.0, 1.1, n),
        rng.normal(5.0, 0.6, n),
    )
    return write_events_csv(rows)


class TestVelocity:
    def test_self_calibration(self, run_cli, onshell_csv):
        code, out, _ = run_cli(
            "velocity", "--events", str(onshell_csv),
            "--calibrate", str(onshell_csv), "--u-ref", "1",
        )
        assert code == 0
        data = json.loads(out)
        assert data["u_bound"] == pytest.approx(1.0, abs=1e-9)
        assert data["calibration_mode"] == "reference_sample"
        jsonschema.validate(data, load_schema("velocity_report.schema.json"))

    def test_direct_A(self, run_cli, write_events_csv):
        c = math.sqrt(2.0 * math.sqrt(3.0))
        path = write_events_csv([(0.0, 0.0, 0.0, 0.0), (math.sqrt(2.0), c, c, c)])
        code, out, _ = run_cli("velocity", "--events", str(path), "--A", "3")
        assert code == 0
        data = json.loads(out)
        assert data["u_bound"] == pytest.approx(1.7320508, rel=1e-6)
        jsonschema.validate(data, load_schema("velocity_report.schema.json"))

    def test_delta_cos_mode(self, run_cli, onshell_csv):
        code, out, _ = run_cli(
            "velocity", "--events", str(onshell_csv), "--delta", "0.5", "--cos-u", "0.8"
        )
        assert code == 0
        data = json.loads(out)
        assert data["A"] == pytest.approx(3.0 / (0.25 * 0.8))
        assert data["delta"] == 0.5 and data["cos_u"] == 0.8
        jsonschema.validate(data, load_schema("velocity_report.schema.json"))

    def test_conflicting_modes_exit_three(self, run_cli, onshell_csv):
        code, out, err = run_cli(
            "velocity", "--events", str(onshell_csv), "--A", "3", "--delta", "0.5"
        )
        assert code == 3 and out == "" and "mutually exclusive" in err

    def test_no_mode_exit_one(self, run_cli, onshell_csv):
        code, out, err = run_cli("velocity", "--events", str(onshell_csv))
        assert code == 1 and out == ""

    def test_partial_group_exit_one(self, run_cli, onshell_csv):
        code, _, err = run_cli(
            "velocity", "--events", str(onshell_csv), "--cos-u", "0.5"
        )
        assert code == 1 and "together" in err

    def test_malformed_file_exit_one(self, run_cli, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("E,px,py,pz\n1.0,oops,0,0\n")
        code, out, err = run_cli("velocity", "--events", str(bad), "--A", "1")
        assert code == 1 and out == "" and "line 2" in err

    def test_missing_file_exit_one(self, run_cli):
        code, out, err = run_cli("velocity", "--events", "no/such/file.csv", "--A", "1")
        assert code == 1 and out == ""

    def test_jsonl_input(self, run_cli, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text(
            "\n".join(
                json.dumps({"E": 1.0 + i, "px": 0.5 * i, "py": 0.1, "pz": 2.0 - 0.3 * i})
                for i in range(5)
            )
        )
        code, out, _ = run_cli("velocity", "--events", str(path), "--A", "2")
        assert code == 0
        assert json.loads(out)["n_events"] == 5


class TestVerify:
    def test_passes_with_seed(self, run_cli):
        code, out, err = run_cli("verify", "--cases", "200", "--seed", "42")
        assert code == 0
        assert out.count("PASS") == 5
        assert "FAIL" not in out

    def test_deterministic_output(self, run_cli):
        a = run_cli("verify", "--cases", "100", "--seed", "9")
        b = run_cli("verify", "--cases", "100", "--seed", "9")
        assert a == b

    def test_zero_cases_invalid(self, run_cli):
        code, out, err = run_cli("verify", "--cases", "0")
        assert code == 1 and out == ""

    def test_corrupted_bound_detected(self, run_cli, monkeypatch):
        # flip the per-axis constant from (hbar/2)^2 to hbar^2/2: the
        # minimal-uncertainty states must now fail and verify must exit 2
        import hidden_angle.relations as relations

        monkeypatch.setattr(relations, "hur_axis_bound", lambda hbar: hbar * hbar / 2.0)
        code, out, err = run_cli("verify", "--cases", "50", "--seed", "1")
        assert code == 2
        assert out == ""
        assert "FAIL" in err and "first failing case" in err


class TestConfigResolution:
    def test_env_hbar(self, run_cli, monkeypatch):
        monkeypatch.setenv("HIDDEN_ANGLE_HBAR", "2.0")
        _, out, _ = run_cli("state-report", "--family", "gauss", "--sigma", "1")
        data = json.loads(out)
        assert data["hbar"] == 2.0
        assert data["per_axis_products"] == pytest.approx([1.0, 1.0, 1.0])

    def test_flag_beats_env(self, run_cli, monkeypatch):
        monkeypatch.setenv("HIDDEN_ANGLE_HBAR", "2.0")
        _, out, _ = run_cli(
            "state-report", "--family", "gauss", "--sigma", "1", "--hbar", "3.0"
        )
        assert json.loads(out)["hbar"] == 3.0

    def test_env_beats_config_file(self, run_cli, tmp_path, monkeypatch):
        cfg = tmp_path / "settings.conf"
        cfg.write_text("hbar = 5.0\npoints = 64\n")
        monkeypatch.setenv("HIDDEN_ANGLE_HBAR", "2.0")
        _, out, _ = run_cli(
            "state-report", "--family", "gauss", "--sigma", "1", "--config", str(cfg)
        )
        assert json.loads(out)["hbar"] == 2.0

    def test_config_file_applies(self, run_cli, tmp_path):
        cfg = tmp_path / "settings.conf"
        cfg.write_text("# defaults for this detector\nhbar = 4.0\n")
        _, out, _ = run_cli(
            "state-report", "--family", "gauss", "--sigma", "1", "--config", str(cfg)
        )
        assert json.loads(out)["hbar"] == 4.0

    def test_unknown_config_key(self, run_cli, tmp_path):
        cfg = tmp_path / "settings.conf"
        cfg.write_text("hbsr = 4.0\n")
        code, out, err = run_cli(
            "state-report", "--family", "gauss", "--config", str(cfg)
        )
        assert code == 1 and "unknown key" in err

    def test_invalid_env_value(self, run_cli, monkeypatch):
        monkeypatch.setenv("HIDDEN_ANGLE_HBAR", "not-a-number")
        code, out, err = run_cli("state-report", "--family", "gauss")
        assert code == 1 and out == ""


def test_console_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "hidden_angle", "sweep", "--family", "ho", "--n-max", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("n,cos_closed")

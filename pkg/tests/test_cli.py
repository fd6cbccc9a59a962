"""Command-line interface: outputs, determinism, exit codes, sweeps."""

import json

import numpy as np
import pytest

from qredshift.cli import main, read_result_csv


def run_cli(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def scenario_file(tmp_path, **overrides) -> str:
    doc = {
        "version": 1,
        "geometry": {"layout": "line", "n": 8, "spacing_m": 1e-3, "orientation_deg": 0.0},
        "qubits": {"frequency_ghz": 10.0},
        "perturbation": {"kind": "rotation", "angle_deg": 90.0},
        "run": {"time_s": 1e-3, "shots": 10**5, "seed": 42, "backend": "branch"},
    }
    doc.update(overrides)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def single_row(text: str) -> dict:
    _, columns, rows = read_result_csv(text)
    assert len(rows) == 1
    return dict(zip(columns, rows[0]))


class TestRedshift:
    def test_vertical_example(self, capsys):
        code, out = run_cli(
            capsys, "--reproducible", "redshift", "--delta-x", "0.01", "--freq-ghz", "10"
        )
        assert code == 0
        row = single_row(out)
        assert row["fractional_shift"] == pytest.approx(1.0911369672198218e-18, rel=1e-15)
        assert row["phase_rate_rad_s"] == pytest.approx(6.855815760556077e-08, rel=1e-15)

    def test_mass_example(self, capsys):
        code, out = run_cli(capsys, "redshift", "--mass", "1000", "--distance", "0.1")
        assert code == 0
        assert single_row(out)["fractional_shift"] == pytest.approx(-7.426160269118664e-24, rel=1e-15)

    def test_zero_displacement(self, capsys):
        code, out = run_cli(capsys, "redshift", "--delta-x", "0")
        assert code == 0
        row = single_row(out)
        assert row["fractional_shift"] == 0 and row["phase_rate_rad_s"] == 0

    def test_conflicting_flags_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["redshift", "--delta-x", "0.01", "--mass", "10"])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_mass_without_distance(self, capsys):
        code, _ = run_cli(capsys, "redshift", "--mass", "10")
        assert code == 2


class TestProtocol:
    def test_reproducible_runs_byte_identical(self, tmp_path, capsys):
        path = scenario_file(tmp_path)
        code_a, out_a = run_cli(capsys, "--reproducible", "protocol", path)
        code_b, out_b = run_cli(capsys, "--reproducible", "protocol", path)
        assert code_a == code_b == 0
        assert out_a == out_b

    def test_backends_agree_on_estimate(self, tmp_path, capsys):
        path = scenario_file(tmp_path)
        _, out_branch = run_cli(capsys, "--reproducible", "protocol", path, "--backend", "branch")
        _, out_sv = run_cli(capsys, "--reproducible", "protocol", path, "--backend", "statevector")
        row_b, row_s = single_row(out_branch), single_row(out_sv)
        assert row_b["delta_phi_hat_rad"] == row_s["delta_phi_hat_rad"]
        assert row_b["count_one"] == row_s["count_one"]

    def test_json_output_structure(self, tmp_path, capsys):
        path = scenario_file(tmp_path)
        code, out = run_cli(capsys, "--reproducible", "--out", "json", "protocol", path)
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"inputs", "results", "provenance"}
        assert doc["results"]["shots"] == 10**5
        assert doc["provenance"]["tool"] == "qredshift"

    def test_zero_shots_rejected(self, tmp_path, capsys):
        path = scenario_file(tmp_path)
        code, _ = run_cli(capsys, "protocol", path, "--shots", "0")
        assert code == 2

    def test_malformed_scenario_names_field(self, tmp_path, capsys):
        path = scenario_file(tmp_path, geometry={"layout": "line", "n": 8, "spacing_m": 1e-3, "frobnicate": 1})
        code = main(["protocol", path])
        err = capsys.readouterr().err
        assert code == 2
        assert "frobnicate" in err

    def test_statevector_cap_exit_code(self, tmp_path, capsys):
        path = scenario_file(
            tmp_path,
            geometry={"layout": "line", "n": 40, "spacing_m": 1e-3, "orientation_deg": 0.0},
        )
        code = main(["protocol", path, "--backend", "statevector", "--shots", "10"])
        err = capsys.readouterr().err
        assert code == 3
        assert "branch" in err

    def test_seed_override_changes_shots(self, tmp_path, capsys):
        path = scenario_file(tmp_path)
        _, out_a = run_cli(capsys, "--reproducible", "--seed", "1", "protocol", path)
        _, out_b = run_cli(capsys, "--reproducible", "--seed", "2", "protocol", path)
        assert single_row(out_a)["count_one"] != single_row(out_b)["count_one"]


class TestSensingCommands:
    def test_gravimeter_example(self, capsys):
        code, out = run_cli(capsys, "gravimeter", "--n", "1e3", "--tc", "1e-3", "--freq-ghz", "10")
        assert code == 0
        row = single_row(out)
        assert row["delta_g_over_g"] == pytest.approx(0.0022894610365567425, rel=1e-14)

    def test_required_qubits_example(self, capsys):
        code, out = run_cli(capsys, "required-qubits", "--geometry", "1d", "--tc", "1")
        assert code == 0
        assert single_row(out)["n_required"] == 7639

    def test_strain_example(self, capsys):
        code, out = run_cli(capsys, "strain", "--n", "1e3", "--tc", "1e-3")
        assert code == 0
        assert single_row(out)["min_strain"] == pytest.approx(14586156.263903009, rel=1e-12)

    def test_nonpositive_parameter_rejected(self, capsys):
        code, _ = run_cli(capsys, "gravimeter", "--n", "1e3", "--tc", "0")
        assert code == 2

    def test_constants_file_override(self, tmp_path, capsys):
        path = tmp_path / "constants.json"
        path.write_text(json.dumps({"g0": 9.8}), encoding="utf-8")
        code, out = run_cli(
            capsys, "--constants-file", str(path), "gravimeter", "--n", "1e3", "--tc", "1e-3"
        )
        assert code == 0
        row = single_row(out)
        assert row["delta_g_over_g"] == pytest.approx(row["delta_g"] / 9.8, rel=1e-14)

    def test_constants_file_unknown_key(self, tmp_path, capsys):
        path = tmp_path / "constants.json"
        path.write_text(json.dumps({"hbar": 1.0}), encoding="utf-8")
        code = main(["--constants-file", str(path), "gravimeter"])
        assert code == 2
        assert "hbar" in capsys.readouterr().err


class TestCsvFormat:
    def test_round_trip_at_full_precision(self, capsys):
        code, out = run_cli(capsys, "--reproducible", "gravimeter", "--n", "1e3", "--tc", "1e-3")
        assert code == 0
        provenance, columns, rows = read_result_csv(out)
        assert provenance["tool"] == "qredshift"
        # parse -> re-serialize reproduces the CSV byte for byte: the
        # 17-significant-digit text pins the exact binary values
        from qredshift.cli import ResultTable

        table = ResultTable(columns=columns, provenance=provenance)
        for row in rows:
            table.add_row(*row)
        import io

        buffer = io.StringIO()
        table.write_csv(buffer)
        assert buffer.getvalue() == out

    def test_lf_line_endings(self, capsys):
        _, out = run_cli(capsys, "--reproducible", "redshift", "--delta-x", "0.01")
        assert "\r" not in out

    def test_timestamp_suppressed_only_when_reproducible(self, capsys):
        _, out_repro = run_cli(capsys, "--reproducible", "redshift", "--delta-x", "0.01")
        _, out_stamped = run_cli(capsys, "redshift", "--delta-x", "0.01")
        assert "timestamp" not in out_repro
        assert "timestamp" in out_stamped


class TestSweep:
    def test_gravimeter_slope(self, tmp_path, capsys):
        out_csv = tmp_path / "sweep.csv"
        code, _ = run_cli(
            capsys, "--reproducible", "sweep", "--target", "gravimeter", "--param", "n",
            "--from", "1e2", "--to", "1e6", "--steps", "9", "--log", "--out", str(out_csv),
        )
        assert code == 0
        _, columns, rows = read_result_csv(out_csv.read_text(encoding="utf-8"))
        n = np.array([r[columns.index("n")] for r in rows], dtype=float)
        dg = np.array([r[columns.index("delta_g")] for r in rows], dtype=float)
        slope = np.polyfit(np.log(n), np.log(dg), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.01)

    def test_phase_slopes(self, tmp_path, capsys):
        for geometry, expected in (("1d", 2.0), ("2d", 1.5)):
            out_csv = tmp_path / f"phase_{geometry}.csv"
            code, _ = run_cli(
                capsys, "--reproducible", "sweep", "--target", "phase", "--param", "n",
                "--from", "1e2", "--to", "1e6", "--steps", "9", "--log",
                "--geometry", geometry, "--out", str(out_csv),
            )
            assert code == 0
            _, columns, rows = read_result_csv(out_csv.read_text(encoding="utf-8"))
            n = np.array([r[0] for r in rows], dtype=float)
            phase = np.array([r[columns.index("phase_rad")] for r in rows], dtype=float)
            slope = np.polyfit(np.log(n), np.log(phase), 1)[0]
            assert slope == pytest.approx(expected, abs=0.01)

    def test_protocol_sweep_rows_ordered(self, tmp_path, capsys):
        out_csv = tmp_path / "proto.csv"
        path = scenario_file(tmp_path)
        code, _ = run_cli(
            capsys, "--reproducible", "sweep", "--target", "protocol", "--param", "shots",
            "--from", "100", "--to", "500", "--steps", "3",
            "--scenario", path, "--out", str(out_csv),
        )
        assert code == 0
        _, columns, rows = read_result_csv(out_csv.read_text(encoding="utf-8"))
        assert [r[0] for r in rows] == [100, 300, 500]

    def test_sweep_deterministic_files(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["--reproducible", "sweep", "--target", "strain", "--param", "tc",
                "--from", "1e-4", "--to", "1e-2", "--steps", "5", "--log"]
        assert run_cli(capsys, *base, "--out", str(a))[0] == 0
        assert run_cli(capsys, *base, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_single_step_rejected(self, tmp_path, capsys):
        code, _ = run_cli(
            capsys, "sweep", "--target", "gravimeter", "--param", "n",
            "--from", "10", "--to", "20", "--steps", "1", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2

    def test_incompatible_param_rejected(self, tmp_path, capsys):
        code = main(["sweep", "--target", "gravimeter", "--param", "shots",
                     "--from", "1", "--to", "2", "--steps", "2", "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "shots" in capsys.readouterr().err

    def test_unwritable_path_io_error(self, tmp_path, capsys):
        code = main(["sweep", "--target", "gravimeter", "--param", "n",
                     "--from", "10", "--to", "20", "--steps", "2",
                     "--out", str(tmp_path / "missing" / "x.csv")])
        assert code == 4
        capsys.readouterr()

"""Command line: exit codes, output determinism, format round-trips."""

import json

import numpy as np
import pytest

from elliptica import (
    DistortionBound,
    EllipticityParams,
    HarmonicMap,
    bloch_jacobian_normalized,
    bloch_lambda_normalized,
    growth_rate,
    landau,
)
from elliptica.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def csv_to_dict(text: str) -> dict:
    rows = text.strip().splitlines()
    assert rows[0] == "name,value"
    return dict(line.split(",", 1) for line in rows[1:])


class TestConstantsCommand:
    def test_json_payload(self, capsys):
        code, out, err = run(capsys, "constants", "--K", "1", "--Kp", "0", "--lam", "2")
        assert code == 0 and err == ""
        data = json.loads(out)
        res = landau(EllipticityParams(1, 0), DistortionBound(2))
        assert data["growth_rate"] == res.T
        assert data["r1"] == res.r1
        assert data["sigma1"] == res.sigma1
        assert data["bloch_lambda0"]["rho"] == bloch_lambda_normalized(EllipticityParams(1, 0)).rho
        assert data["bloch_jacobian0"]["t"] == bloch_jacobian_normalized(EllipticityParams(1, 0)).t
        assert "classical" not in data

    def test_csv_reparses_to_identical_doubles(self, capsys):
        _, json_out, _ = run(capsys, "constants", "--K", "2", "--Kp", "0.5", "--lam", "1.5")
        _, csv_out, _ = run(capsys, "constants", "--K", "2", "--Kp", "0.5", "--lam", "1.5", "--csv")
        data = json.loads(json_out)
        table = csv_to_dict(csv_out)
        # fixed, documented column order
        assert list(table) == [
            "params.K", "params.Kp", "params.lam", "growth_rate", "r1", "sigma1",
            "bloch_lambda0.t", "bloch_lambda0.rho",
            "bloch_jacobian0.t", "bloch_jacobian0.rho",
        ]
        assert float(table["r1"]) == data["r1"]
        assert float(table["sigma1"]) == data["sigma1"]
        assert float(table["bloch_jacobian0.rho"]) == data["bloch_jacobian0"]["rho"]

    def test_classical_block(self, capsys):
        code, out, _ = run(capsys, "constants", "--K", "1", "--lam", "2", "--M", "2", "--csv")
        table = csv_to_dict(out)
        assert float(table["classical.r0"]) == pytest.approx(0.2679491924311227, abs=1e-16)
        assert list(table)[-3:] == ["classical.M", "classical.r0", "classical.R0"]
        assert code == 0

    def test_byte_deterministic(self, capsys):
        _, a, _ = run(capsys, "constants", "--K", "3", "--Kp", "2", "--lam", "4")
        _, b, _ = run(capsys, "constants", "--K", "3", "--Kp", "2", "--lam", "4")
        assert a == b

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "c.json"
        code, out, _ = run(capsys, "constants", "--K", "1", "--lam", "2", "--out", str(target))
        assert code == 0
        assert f"wrote {target}" in out
        assert json.loads(target.read_text())["r1"] == 0.4

    def test_unwritable_out_is_exit_1(self, capsys, tmp_path):
        target = tmp_path / "missing" / "c.json"
        code, _, err = run(capsys, "constants", "--K", "1", "--lam", "2", "--out", str(target))
        assert code == 1
        assert "cannot write" in err

    def test_bad_parameter_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["constants", "--K", "0.5", "--lam", "2"])
        assert exc.value.code == 2


class TestExtremalAndCheckMap:
    def test_round_trip_probe(self, capsys, tmp_path):
        path = tmp_path / "f2.json"
        code, _, _ = run(capsys, "extremal", "--family", "Fn", "--n", "2",
                         "--lam", "2", "--out", str(path))
        assert code == 0
        f = HarmonicMap.load(path)
        assert f.a_n(2) == 0.75

        code, out, _ = run(capsys, "check-map", "--map", str(path), "--r", "0.35",
                           "--mode", "univalence")
        assert code == 0
        verdict = json.loads(out)
        assert verdict["status"] == "certified"

    def test_refutation_exit_code(self, capsys, tmp_path):
        # the verdict still goes to stdout; the exit status carries the answer
        path = tmp_path / "sq.json"
        HarmonicMap([0.0, 0.0, 1.0]).save(path)
        code, out, _ = run(capsys, "check-map", "--map", str(path), "--r", "0.9",
                           "--mode", "univalence")
        assert code == 1
        assert json.loads(out)["status"] == "refuted"

    def test_coverage_mode(self, capsys, tmp_path):
        path = tmp_path / "id.json"
        HarmonicMap.identity().save(path)
        code, out, _ = run(capsys, "check-map", "--map", str(path), "--r", "0.5",
                           "--mode", "coverage", "--rho", "0.45")
        assert code == 0
        assert json.loads(out)["status"] == "certified"

    def test_coverage_requires_rho(self, tmp_path):
        path = tmp_path / "id.json"
        HarmonicMap.identity().save(path)
        with pytest.raises(SystemExit) as exc:
            main(["check-map", "--map", str(path), "--r", "0.5", "--mode", "coverage"])
        assert exc.value.code == 2

    def test_missing_map_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "check-map", "--map", str(tmp_path / "no.json"),
                           "--r", "0.5", "--mode", "univalence")
        assert code == 2
        assert "error" in err

    def test_malformed_map_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"a": "nope"}')
        code, _, err = run(capsys, "check-map", "--map", str(path),
                           "--r", "0.5", "--mode", "univalence")
        assert code == 2

    def test_extremal_family_argument_coupling(self):
        with pytest.raises(SystemExit) as exc:
            main(["extremal", "--family", "Fn", "--lam", "2"])  # --n missing
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["extremal", "--family", "classical"])  # --M missing
        assert exc.value.code == 2


class TestVerifyCommand:
    def test_coefficient_suite(self, capsys):
        code, out, _ = run(capsys, "verify-theorem", "--which", "1",
                           "--K", "1", "--Kp", "0", "--lam", "2", "--n-random", "1")
        assert code == 0
        rep = json.loads(out)
        assert rep["theorem"] == "coefficient-bounds"
        assert not rep["worst_case"]["refuted"]
        assert rep["runtime_ms"] is None

    def test_remarks_deterministic(self, capsys):
        args = ("verify-theorem", "--which", "remarks", "--samples", "50")
        code_a, a, _ = run(capsys, *args)
        code_b, b, _ = run(capsys, *args)
        assert code_a == code_b == 0
        assert a == b

    def test_timestamp_breaks_reproducibility_on_purpose(self, capsys):
        args = ("verify-theorem", "--which", "remarks", "--samples", "20", "--timestamp")
        _, a, _ = run(capsys, *args)
        _, b, _ = run(capsys, *args)
        rep = json.loads(a)
        assert rep["runtime_ms"] is not None and "timestamp" in rep
        assert a != b

    def test_jacobian_route_exit_codes(self, capsys):
        # the fixture violates the origin bound at K = 1 and satisfies it at K = 4
        code_bad, out_bad, _ = run(capsys, "verify-theorem", "--which", "c1", "--K", "1")
        assert code_bad == 1
        assert json.loads(out_bad)["worst_case"]["refuted"]
        code_ok, out_ok, _ = run(capsys, "verify-theorem", "--which", "c1", "--K", "4")
        assert code_ok == 0
        assert not json.loads(out_ok)["worst_case"]["refuted"]


class TestReportAndBoundary:
    def test_aggregate_report(self, capsys):
        code, out, _ = run(capsys, "report", "--K", "1", "--Kp", "0", "--lam", "2",
                           "--n-random", "1", "--samples", "30")
        assert code == 0
        rep = json.loads(out)
        assert set(rep) == {"constants", "coefficient_bounds", "remarks",
                            "runtime_ms", "version"}
        assert rep["constants"]["r1"] == 0.4

    def test_boundary_csv(self, capsys, tmp_path):
        path = tmp_path / "id.json"
        HarmonicMap.identity().save(path)
        code, out, _ = run(capsys, "boundary", "--map", str(path), "--r", "0.4", "--n", "8")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "theta,re,im"
        assert len(lines) == 9
        theta, re, im = map(float, lines[3].split(","))
        assert complex(re, im) == pytest.approx(0.4 * np.exp(1j * theta), abs=1e-16)


class TestTopLevel:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "elliptica 0.1.0" in capsys.readouterr().out

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

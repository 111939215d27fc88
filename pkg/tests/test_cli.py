import json

import pytest

from brl.cli import (
    EXIT_CLAIM_FAILURE,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    _parse_grid,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_constants_ok(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--N", "5", "--p", "2.0")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["command"] == "constants"
        assert report["outputs"]["alpha"] == pytest.approx(4.0 / 3.0)

    def test_inadmissible_parameters(self, capsys):
        code, out, err = run_cli(capsys, "constants", "--N", "3", "--p", "5.0")
        assert code == EXIT_INPUT_ERROR
        assert out == ""
        assert "message" in json.loads(err)

    def test_invalid_dimension(self, capsys):
        code, _, err = run_cli(capsys, "constants", "--N", "2", "--p", "2.0")
        assert code == EXIT_INPUT_ERROR
        assert err

    def test_missing_p(self, capsys):
        code, _, _ = run_cli(capsys, "constants", "--N", "5")
        assert code == EXIT_INPUT_ERROR

    def test_verify_claims_ok(self, capsys):
        code, out, _ = run_cli(capsys, "verify-claims", "--N", "5",
                               "--p", "2.0", "--k-max", "10")
        assert code == EXIT_OK
        assert json.loads(out)["outputs"]["all_passed"] is True


class TestRoots:
    def test_mode_table(self, capsys):
        code, out, _ = run_cli(capsys, "roots", "--N", "5", "--p", "3.0",
                               "--k-max", "2")
        assert code == EXIT_OK
        rows = json.loads(out)["outputs"]["rows"]
        assert [r["index"] for r in rows] == [0, 1, 2]

    def test_nonminimal_family_needs_no_p(self, capsys):
        code, out, _ = run_cli(capsys, "roots", "--N", "6",
                               "--family", "nm-mode", "--i", "2")
        assert code == EXIT_OK
        assert len(json.loads(out)["outputs"]["rows"]) == 1


class TestShoot:
    def test_emit_csv(self, capsys, tmp_path):
        path = tmp_path / "traj.csv"
        code, out, _ = run_cli(capsys, "shoot", "--N", "5", "--p", "2.0",
                               "--r-max", "100", "--emit-csv", str(path))
        assert code == EXIT_OK
        report = json.loads(out)
        assert "trajectory_csv" not in report["outputs"]
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "r,u,du,v,dv"
        assert len(lines) > 10

    def test_grid_sweep(self, capsys, monkeypatch):
        monkeypatch.setenv("BRL_THREADS", "2")
        code, out, _ = run_cli(capsys, "shoot", "--N", "5",
                               "--r-max", "100", "--grid", "1.8:2.2:3")
        assert code == EXIT_OK
        lines = out.strip().split("\n")
        assert len(lines) == 3
        ps = [json.loads(line)["inputs"]["p"] for line in lines]
        assert ps == pytest.approx([1.8, 2.0, 2.2])

    def test_grid_with_inadmissible_point(self, capsys):
        # N=3 admits only p < 3; the sweep must report the bad point and
        # return the input-error code while still printing every line
        code, out, err = run_cli(capsys, "shoot", "--N", "3",
                                 "--r-max", "100", "--grid", "2.5:3.5:2")
        assert code == EXIT_INPUT_ERROR
        lines = out.strip().split("\n")
        assert len(lines) == 2
        assert "error" in json.loads(lines[1])


class TestGridParsing:
    def test_linear_grid(self):
        assert _parse_grid("1:2:3") == pytest.approx([1.0, 1.5, 2.0])

    def test_single_point(self):
        assert _parse_grid("2:9:1") == [2.0]

    def test_malformed(self):
        with pytest.raises(ValueError):
            _parse_grid("1:2")
        with pytest.raises(ValueError):
            _parse_grid("1:2:0")


class TestDeterminism:
    def test_constants_byte_identical_modulo_timing(self, capsys):
        _, out1, _ = run_cli(capsys, "constants", "--N", "7", "--p", "2.5")
        _, out2, _ = run_cli(capsys, "constants", "--N", "7", "--p", "2.5")
        a, b = json.loads(out1), json.loads(out2)
        a.pop("wall_time_ms"), b.pop("wall_time_ms")
        assert json.dumps(a) == json.dumps(b)

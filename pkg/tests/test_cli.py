import json

import numpy as np
import pandas as pd
import pytest

import cli
from services import property_service


def run(*argv):
    return cli.main([str(a) for a in argv])


def parse_vector(out: str, key: str) -> np.ndarray:
    for line in out.splitlines():
        if line.startswith(f"{key}:"):
            return np.array([float(v) for v in line.split(":", 1)[1].split(",")])
    raise AssertionError(f"{key} not printed")


class TestSimulate:
    def test_rps_converges(self, rps_file, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        code = run("simulate", "--game", rps_file, "--lambda", 1, "--z0", "1,0.5,0",
                   "--t-end", 50, "--dt", 0.01, "--out", out)
        assert code == cli.EXIT_OK
        printed = capsys.readouterr().out
        assert np.abs(parse_vector(printed, "final_x") - 1 / 3).max() <= 1e-6
        assert "final_V: n/a" not in printed
        frame = pd.read_csv(out)
        assert frame.columns[0] == "t"
        assert frame["t"].iloc[-1] == 50.0

    def test_zero_game_decays(self, write_game, tmp_path, capsys):
        game = write_game("zero.json", [[0, 0], [0, 0]])
        code = run("simulate", "--game", game, "--z0", "2,1", "--t-end", 3,
                   "--out", tmp_path / "z.csv")
        assert code == cli.EXIT_OK
        final_z = parse_vector(capsys.readouterr().out, "final_z")
        np.testing.assert_allclose(final_z, np.exp(-3.0) * np.array([2.0, 1.0]), atol=1e-8)

    def test_zero_step_is_usage_error(self, rps_file, tmp_path):
        assert run("simulate", "--game", rps_file, "--dt", 0, "--out", tmp_path / "t.csv") == 2

    def test_missing_game_file(self, tmp_path):
        assert run("simulate", "--game", tmp_path / "nope.json") == cli.EXIT_USAGE

    def test_game_flag_required(self):
        assert run("simulate", "--lambda", 1) == cli.EXIT_USAGE

    def test_single_lambda_only(self, rps_file):
        assert run("simulate", "--game", rps_file, "--lambda", "1,2") == cli.EXIT_USAGE

    def test_negative_initial_scores(self, rps_file, tmp_path, capsys):
        code = run("simulate", "--game", rps_file, "--z0", "-1,0.5,0", "--t-end", 1,
                   "--out", tmp_path / "neg.csv")
        assert code == cli.EXIT_OK
        assert parse_vector(capsys.readouterr().out, "final_z").size == 3

    def test_byte_identical_outputs(self, rps_file, tmp_path):
        for name in ("a.csv", "b.csv"):
            assert run("simulate", "--game", rps_file, "--z0", "1,0.5,0", "--t-end", 2,
                       "--out", tmp_path / name) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestEquilibrium:
    def test_rps(self, rps_file, tmp_path, capsys):
        out = tmp_path / "eq.json"
        assert run("equilibrium", "--game", rps_file, "--lambda", 1, "--out", out) == 0
        payload = json.loads(out.read_text())
        assert payload["converged"] is True
        np.testing.assert_allclose(payload["x_star"], 1 / 3, atol=1e-9)
        assert "converged: true" in capsys.readouterr().out

    def test_zero_game(self, write_game, tmp_path):
        game = write_game("zero.json", [[0, 0, 0], [0, 0, 0], [0, 0, 0]])
        out = tmp_path / "eq.json"
        assert run("equilibrium", "--game", game, "--out", out) == 0
        np.testing.assert_allclose(json.loads(out.read_text())["x_star"], 1 / 3)

    def test_budget_exhausted(self, write_game, tmp_path, capsys):
        game = write_game("unstable.json", [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        out = tmp_path / "eq.json"
        code = run("equilibrium", "--game", game, "--lambda", 5, "--max-iter", 10, "--out", out)
        assert code == cli.EXIT_NUMERICAL
        assert json.loads(out.read_text())["converged"] is False
        assert "residual" in capsys.readouterr().err


@pytest.mark.usefixtures("few_gumbel_draws")
class TestVerify:
    def test_small_suite_passes(self, tmp_path):
        out = tmp_path / "verify.json"
        code = run("verify", "--n", "2,3", "--lambda", "0.5,2", "--samples", 200,
                   "--seed", 7, "--out", out)
        assert code == cli.EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["passed"] is True
        assert {r["lambda"] for r in payload["reports"]} == {0.5, 1.0, 2.0}

    def test_single_sample(self, tmp_path):
        assert run("verify", "--n", 3, "--lambda", 1, "--samples", 1,
                   "--out", tmp_path / "v.json") == cli.EXIT_OK

    def test_corrupted_softmax_fails(self, monkeypatch, tmp_path, capsys):
        real = property_service.batch_softmax
        monkeypatch.setattr(
            property_service, "batch_softmax", lambda z, lam: real(z, 1.5 * lam)
        )
        out = tmp_path / "v.json"
        code = run("verify", "--n", 3, "--lambda", 1, "--samples", 200, "--out", out)
        assert code == cli.EXIT_NUMERICAL
        assert json.loads(out.read_text())["passed"] is False
        assert "failed:" in capsys.readouterr().out

    def test_byte_identical_reports(self, tmp_path):
        for name in ("a.json", "b.json"):
            run("verify", "--n", 2, "--lambda", 1, "--samples", 100, "--seed", 3,
                "--out", tmp_path / name)
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


class TestReplicator:
    def test_uniform(self, capsys):
        third = repr(1 / 3)
        assert run("replicator", "--x", f"{third},{third},{third}", "--u", "1,0,0") == 0
        field = parse_vector(capsys.readouterr().out, "field")
        np.testing.assert_allclose(field, [2 / 9, -1 / 9, -1 / 9], atol=1e-15)

    def test_negative_payoff(self, capsys):
        third = repr(1 / 3)
        assert run("replicator", "--x", f"{third},{third},{third}", "--u", "-1,0,0") == 0
        field = parse_vector(capsys.readouterr().out, "field")
        np.testing.assert_allclose(field, [-2 / 9, 1 / 9, 1 / 9], atol=1e-15)

    def test_constant_payoff(self, capsys):
        assert run("replicator", "--x", "0.2,0.3,0.5", "--u", "2,2,2", "--lambda", 3) == 0
        np.testing.assert_allclose(parse_vector(capsys.readouterr().out, "field"), 0.0, atol=1e-15)

    def test_vertex_written_to_file(self, tmp_path):
        out = tmp_path / "field.json"
        assert run("replicator", "--x", "0,1,0", "--u", "-1,4,2", "--out", out) == 0
        assert json.loads(out.read_text()) == {"field": [0.0, 0.0, 0.0]}

    def test_off_simplex(self):
        assert run("replicator", "--x", "0.5,0.6", "--u", "1,0") == cli.EXIT_USAGE

    def test_missing_required_flag(self):
        assert run("replicator", "--x", "0.5,0.5") == cli.EXIT_USAGE


def test_unknown_subcommand():
    assert run("plot") == cli.EXIT_USAGE


def test_vector_flags_are_joined_with_their_values():
    argv = ["simulate", "--z0", "-1,0", "--lambda", "2", "--game", "g.json"]
    expected = ["simulate", "--z0=-1,0", "--lambda=2", "--game", "g.json"]
    assert cli._join_vector_flags(argv) == expected

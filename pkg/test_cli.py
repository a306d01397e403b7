"""Testy aplikacji wiersza poleceń."""
import logging

import pandas as pd
import pytest

from cli.app import SimulatorApp, EXIT_OK, EXIT_CONFIG, EXIT_IO
from harness import RAW_COLUMNS


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger('')
    handlers, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        if handler not in handlers:
            root.removeHandler(handler)
            handler.close()
    for handler in handlers:
        if handler not in root.handlers:
            root.addHandler(handler)
    root.setLevel(level)


@pytest.fixture
def app(clean_environment):
    return SimulatorApp(env_path=str(clean_environment / ".env"))


class TestSimulate:
    """Podkomenda simulate."""

    def test_writes_raw_and_summary(self, app, tmp_path) -> None:
        out = tmp_path / "raw.csv"
        code = app.run(["simulate", "--env", "abrupt", "--policy", "adr-ts,ducb", "--K", "4",
                        "--T", "120", "--runs", "2", "--cadence", "10", "--out", str(out)])
        assert code == EXIT_OK
        raw = pd.read_csv(out)
        assert list(raw.columns) == RAW_COLUMNS
        assert list(dict.fromkeys(raw["policy"])) == ["adr-ts", "ducb"]
        assert sorted(raw["run"].unique()) == [0, 1]
        assert (tmp_path / "raw_summary.csv").exists()

    def test_unknown_policy(self, app, tmp_path) -> None:
        code = app.run(["simulate", "--policy", "ucb1", "--out", str(tmp_path / "raw.csv")])
        assert code == EXIT_CONFIG

    def test_missing_output(self, app) -> None:
        assert app.run(["simulate", "--T", "10", "--K", "3", "--runs", "1"]) == EXIT_CONFIG

    def test_invalid_param(self, app, tmp_path) -> None:
        code = app.run(["simulate", "--policy", "ducb", "--param", "gamma", "--out",
                        str(tmp_path / "raw.csv")])
        assert code == EXIT_CONFIG

    def test_missing_replay_log(self, app, tmp_path) -> None:
        code = app.run(["simulate", "--env", f"replay:{tmp_path / 'missing.csv'}", "--policy", "ts",
                        "--K", "3", "--T", "10", "--runs", "1", "--out", str(tmp_path / "raw.csv")])
        assert code == EXIT_IO

    def test_malformed_replay_log(self, app, tmp_path, write_log) -> None:
        path = write_log([(1, 1, 1), (2, "x", 0)])
        code = app.run(["simulate", "--env", f"replay:{path}", "--policy", "ts", "--runs", "1",
                        "--out", str(tmp_path / "raw.csv")])
        assert code == EXIT_IO

    def test_replay_uses_whole_log_unless_limited(self, app, tmp_path, write_log) -> None:
        path = write_log([(t, 1, t % 2) for t in range(1, 41)])
        out = tmp_path / "replay.csv"
        base = ["simulate", "--env", f"replay:{path}", "--policy", "ts", "--runs", "1",
                "--cadence", "1", "--out", str(out)]
        assert app.run(base + ["--T", "10"]) == EXIT_OK
        assert pd.read_csv(out)["t"].max() == 10
        assert app.run(base) == EXIT_OK
        raw = pd.read_csv(out)
        assert raw["t"].max() == 40
        assert raw[raw["t"] == 40]["value"].tolist() == [20.0]

    def test_float_format_from_environment(self, app, tmp_path, monkeypatch) -> None:
        monkeypatch.setenv("SIM_FLOAT_FORMAT", "%.2f")
        out = tmp_path / "raw.csv"
        code = app.run(["simulate", "--env", "abrupt", "--policy", "ts", "--K", "3", "--T", "30",
                        "--runs", "1", "--cadence", "1", "--out", str(out)])
        assert code == EXIT_OK
        values = pd.read_csv(out, dtype=str)["value"]
        assert all(len(v.split(".")[1]) == 2 for v in values)
        err_out = tmp_path / "err.csv"
        code = app.run(["adwin-error", "--stream", "stationary", "--noiseless", "--T", "50",
                        "--runs", "2", "--out", str(err_out)])
        assert code == EXIT_OK
        assert pd.read_csv(err_out, dtype=str)["err"].tolist() == ["0.00", "0.00"]

    def test_precedence_of_sources(self, app, clean_environment, monkeypatch) -> None:
        monkeypatch.setenv("SIM_RUNS", "3")
        monkeypatch.setenv("SIM_K", "4")
        config_file = clean_environment / "experiment.cfg"
        config_file.write_text("env=gradual\npolicy=ts\nT=80\nruns=2\ncadence=1\n", encoding="utf-8")
        out = clean_environment / "raw.csv"
        code = app.run(["simulate", "--config", str(config_file), "--T", "60", "--out", str(out)])
        assert code == EXIT_OK
        raw = pd.read_csv(out)
        assert raw["t"].max() == 60
        assert sorted(raw["run"].unique()) == [0, 1]

    def test_delta_sweep(self, app, tmp_path) -> None:
        summary = tmp_path / "sweep.csv"
        code = app.run(["simulate", "--env", "abrupt", "--policy", "adr-ts", "--K", "3", "--T", "90",
                        "--runs", "1", "--sweep-deltas", "0.1,0.01", "--summary-out", str(summary)])
        assert code == EXIT_OK
        frame = pd.read_csv(summary)
        assert frame["delta"].unique().tolist() == [0.1, 0.01]

    def test_log_file(self, app, tmp_path) -> None:
        log_file = tmp_path / "run.log"
        code = app.run(["--log-file", str(log_file), "simulate", "--policy", "ts", "--K", "3",
                        "--T", "20", "--runs", "1", "--out", str(tmp_path / "raw.csv")])
        assert code == EXIT_OK
        assert log_file.read_text(encoding="utf-8")


class TestOtherCommands:
    """Podkomendy adwin, diagnose i adwin-error."""

    def test_adwin_detects_step(self, app, tmp_path) -> None:
        source = tmp_path / "stream.txt"
        source.write_text("\n".join(["0"] * 10 + ["1"] * 9) + "\n", encoding="utf-8")
        out = tmp_path / "adwin.csv"
        code = app.run(["adwin", "--delta", "0.01", "--input", str(source), "--out", str(out)])
        assert code == EXIT_OK
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["t", "estimate", "detected", "window_size"]
        assert frame[frame["detected"] == 1]["t"].tolist() == [19]

    def test_adwin_stream_longer_than_horizon(self, app, tmp_path) -> None:
        source = tmp_path / "stream.txt"
        source.write_text("\n".join(["0"] * 10 + ["1"] * 9) + "\n", encoding="utf-8")
        out = str(tmp_path / "adwin.csv")
        assert app.run(["adwin", "--delta", "0.01", "--T", "18", "--input", str(source),
                        "--out", out]) == EXIT_CONFIG
        assert app.run(["adwin", "--delta", "0.01", "--T", "19", "--input", str(source),
                        "--out", out]) == EXIT_OK

    @pytest.mark.parametrize("content", ["0\nabc\n", "0\n1.5\n"])
    def test_adwin_rejects_invalid_values(self, app, tmp_path, content) -> None:
        source = tmp_path / "stream.txt"
        source.write_text(content, encoding="utf-8")
        code = app.run(["adwin", "--input", str(source), "--out", str(tmp_path / "adwin.csv")])
        assert code == EXIT_CONFIG

    def test_diagnose_abrupt(self, app, tmp_path) -> None:
        out = tmp_path / "diag.csv"
        code = app.run(["diagnose", "--env", "abrupt", "--K", "100", "--T", "30000", "--out", str(out)])
        assert code == EXIT_OK
        values = dict(pd.read_csv(out, dtype=str).itertuples(index=False, name=None))
        assert values["applicable"] == "tak"
        assert values["changepoints"] == "10000 20000"
        assert float(values["ratio_all"]) == float("inf")
        assert float(values["ratio_nonzero"]) == pytest.approx(50.0)

    def test_diagnose_stationary(self, app, tmp_path) -> None:
        out = tmp_path / "diag.csv"
        assert app.run(["diagnose", "--env", "stationary", "--K", "5", "--out", str(out)]) == EXIT_OK
        values = dict(pd.read_csv(out, dtype=str).itertuples(index=False, name=None))
        assert values["applicable"] == "nie dotyczy"

    def test_diagnose_unknown_environment(self, app, tmp_path) -> None:
        code = app.run(["diagnose", "--env", "seasonal", "--out", str(tmp_path / "diag.csv")])
        assert code == EXIT_CONFIG

    def test_adwin_error_noiseless(self, app, tmp_path) -> None:
        out = tmp_path / "err.csv"
        code = app.run(["adwin-error", "--stream", "stationary", "--mean", "0.25", "--noiseless",
                        "--T", "200", "--runs", "2", "--out", str(out)])
        assert code == EXIT_OK
        frame = pd.read_csv(out)
        assert frame["run"].tolist() == [0, 1]
        assert frame["err"].tolist() == [0.0, 0.0]

    def test_adwin_error_invalid_delta(self, app, tmp_path) -> None:
        code = app.run(["adwin-error", "--T", "50", "--delta", "2", "--out", str(tmp_path / "e.csv")])
        assert code == EXIT_CONFIG


def test_argparse_error_exit_code(app) -> None:
    assert app.run(["unknown-command"]) == EXIT_CONFIG
    assert app.run(["simulate", "--K", "many"]) == EXIT_CONFIG


def test_invalid_environment_variable(app, monkeypatch) -> None:
    monkeypatch.setenv("SIM_DELTA", "abc")
    assert app.run(["diagnose", "--env", "abrupt"]) == EXIT_CONFIG

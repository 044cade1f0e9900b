import json

from src.experiments.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, EXIT_RUNTIME, main
from src.experiments.reporting import RESULTS_COLUMNS


SMALL = ["--n-vectors", "40", "--iterations", "2", "--steps", "2", "--particles", "4"]


def test_demo_prints_example_vectors(capsys):
    assert main(["demo"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "(0.2109, 0.4218, 0.6327)" in out
    assert "(0.7616, 0.9640, 0.9951)" in out
    assert "before=0.0000 tanh=0.72" in out


def test_run_writes_outputs_and_refuses_to_overwrite(tmp_path):
    args = ["run", "--normalizer", "tanh", *SMALL, "--out", tmp_path.as_posix()]
    assert main(args) == EXIT_OK
    lines = (tmp_path / "results_tanh.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(RESULTS_COLUMNS)
    assert len(lines) == 3
    assert (tmp_path / "run_tanh.json").exists()
    assert (tmp_path / "plot_tanh.json").exists()

    assert main(args) == EXIT_RUNTIME
    assert main(args + ["--force"]) == EXIT_OK


def test_runs_are_reproducible_apart_from_timing(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        assert main(["run", "--normalizer", "holonorm", *SMALL, "--out", out.as_posix()]) == EXIT_OK

    def untimed(path):
        rows = [line.split(",") for line in (path / "results_holonorm.csv").read_text(encoding="utf-8").splitlines()]
        return [[row[0]] + row[3:] for row in rows]

    assert untimed(first) == untimed(second)


def test_compare_writes_summary(tmp_path, capsys):
    assert main(["compare", *SMALL, "--out", tmp_path.as_posix(), "--format", "markdown"]) == EXIT_OK
    summary = (tmp_path / "compare_summary.md").read_text(encoding="utf-8").splitlines()
    assert len(summary) == 6
    for kind in ("holonorm", "tanh", "layernorm", "identity"):
        assert (tmp_path / f"results_{kind}.md").exists()
    assert "holonorm" in capsys.readouterr().out


def test_table_and_plot_data_from_artifact(tmp_path):
    assert main(["run", *SMALL, "--out", tmp_path.as_posix()]) == EXIT_OK
    artifact = (tmp_path / "run_holonorm.json").as_posix()

    assert main(["table", "--artifact", artifact, "--format", "markdown"]) == EXIT_OK
    assert (tmp_path / "results_holonorm.md").exists()

    assert main(["plot-data", "--artifact", artifact]) == EXIT_RUNTIME
    assert main(["plot-data", "--artifact", artifact, "--force"]) == EXIT_OK
    data = json.loads((tmp_path / "plot_holonorm.json").read_text(encoding="utf-8"))
    assert len(data["series"]["rmse"]) == 2


def test_gen_data_feeds_a_run(tmp_path):
    assert main(["gen-data", "--n-vectors", "30", "--seed", "3", "--out", tmp_path.as_posix()]) == EXIT_OK
    dataset = tmp_path / "orthogonal3d.csv"
    assert dataset.read_text(encoding="utf-8").splitlines()[0] == "x0,x1,x2,y0,y1,y2"
    out = tmp_path / "results"
    assert main(["run", *SMALL, "--dataset", dataset.as_posix(), "--out", out.as_posix()]) == EXIT_OK


def test_config_errors_exit_2(tmp_path):
    assert main(["run", *SMALL, "--config", (tmp_path / "missing.json").as_posix()]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text('{"n_partcles": 3}', encoding="utf-8")
    assert main(["run", "--config", bad.as_posix(), "--out", tmp_path.as_posix()]) == EXIT_CONFIG

    flat = tmp_path / "flat.csv"
    flat.write_text("x0,x1,y0,y1\n1,2,1,2\n3,4,3,4\n", encoding="utf-8")
    assert main(["run", *SMALL, "--dataset", flat.as_posix(), "--out", tmp_path.as_posix()]) == EXIT_CONFIG


def test_data_errors_exit_3(tmp_path):
    broken = tmp_path / "broken.csv"
    broken.write_text("x0,x1,x2,y0,y1,y2\n1,2,3,4,5\n", encoding="utf-8")
    assert main(["run", *SMALL, "--dataset", broken.as_posix(), "--out", tmp_path.as_posix()]) == EXIT_DATA
    missing = (tmp_path / "nope.csv").as_posix()
    assert main(["run", *SMALL, "--dataset", missing, "--out", tmp_path.as_posix()]) == EXIT_DATA


def test_unwritable_output_exits_4_before_training(tmp_path, monkeypatch):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory\n", encoding="utf-8")
    out = (blocker / "results").as_posix()

    def no_training(*args, **kwargs):
        raise AssertionError("training started")

    monkeypatch.setattr("src.experiments.cli.run_experiment", no_training)
    monkeypatch.setattr("src.experiments.cli.compare_normalizers", no_training)
    assert main(["run", *SMALL, "--out", out]) == EXIT_RUNTIME
    assert main(["compare", *SMALL, "--out", out]) == EXIT_RUNTIME
    assert main(["gen-data", "--n-vectors", "10", "--out", out]) == EXIT_RUNTIME

import json
import subprocess
import sys

import pytest

from delay_esn.cli import main
from delay_esn.persistence import ingest_csv, read_csv_table


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def usage_error(*argv):
    with pytest.raises(SystemExit) as exc:
        main([str(a) for a in argv])
    return exc.value.code


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Lorenz data and a small trained model shared by the CLI tests."""
    d = tmp_path_factory.mktemp("cli")
    assert main(["gen-data", "--system", "lorenz", "--observe", "x", "--steps", "1300", "--dt", "0.1",
                 "--seed", "7", "-o", str(d / "lx.csv")]) == 0
    assert main(["train", "--profile", "lorenz", "--m", "5", "--n", "150", "-i", str(d / "lx.csv"),
                 "-o", str(d / "model.json")]) == 0
    return d


def test_gen_data_row_count(workdir):
    assert len(ingest_csv(workdir / "lx.csv")) == 1300


def test_gen_data_byte_identical(tmp_path, capsys, workdir):
    code, out, _ = run(capsys, "gen-data", "--system", "lorenz", "--steps", "1300", "--seed", "7",
                       "-o", tmp_path / "again.csv")
    assert code == 0 and json.loads(out)["samples"] == 1300
    assert (tmp_path / "again.csv").read_bytes() == (workdir / "lx.csv").read_bytes()


def test_gen_data_seed_changes_initial_condition(tmp_path, capsys, workdir):
    run(capsys, "gen-data", "--steps", "1300", "--seed", "8", "-o", tmp_path / "b.csv")
    assert (tmp_path / "b.csv").read_bytes() != (workdir / "lx.csv").read_bytes()


def test_gen_data_z_and_full_state(tmp_path, capsys):
    code, _, _ = run(capsys, "gen-data", "--observe", "z", "--steps", "50", "--x0", "1,1,1",
                     "--full-state", tmp_path / "full.csv", "-o", tmp_path / "z.csv")
    assert code == 0
    _, header, rows = read_csv_table(tmp_path / "full.csv")
    assert header == ["t", "x", "y", "z"]
    z = ingest_csv(tmp_path / "z.csv").samples
    assert [float(c[3]) for _, c in rows] == list(z)


def test_gen_data_traffic_and_rossler(tmp_path, capsys):
    assert run(capsys, "gen-data", "--system", "traffic", "--steps", "200", "-o", tmp_path / "t.csv")[0] == 0
    assert len(ingest_csv(tmp_path / "t.csv")) == 200
    assert run(capsys, "gen-data", "--system", "rossler", "--steps", "20", "-o", tmp_path / "r.csv")[0] == 0


def test_train_prints_summary(tmp_path, capsys, workdir):
    code, out, _ = run(capsys, "train", "--profile", "lorenz", "--m", "5", "--n", "150", "-i", workdir / "lx.csv",
                       "-o", tmp_path / "m.json")
    info = json.loads(out)
    assert code == 0 and info["embedding_dimension"] == 5 and info["training_nrmse"] < 0.05
    assert (tmp_path / "m.json").read_bytes() == (workdir / "model.json").read_bytes()


def test_train_rejects_m_zero(workdir, tmp_path):
    assert usage_error("train", "--m", "0", "-i", workdir / "lx.csv", "-o", tmp_path / "m.json") == 2


def test_train_insufficient_data_exit_code(tmp_path, capsys):
    (tmp_path / "short.csv").write_text("t,value\n0,1\n1,2\n2,3\n")
    code, _, err = run(capsys, "train", "--m", "5", "-i", tmp_path / "short.csv", "-o", tmp_path / "m.json")
    assert code == 3 and "error" in err


def test_train_bad_csv_exit_code(tmp_path, capsys):
    (tmp_path / "bad.csv").write_text("t,value\n0,1\n1,\n")
    code, _, err = run(capsys, "train", "-i", tmp_path / "bad.csv", "-o", tmp_path / "m.json")
    assert code == 3 and "row 3" in err


def test_predict_zero_horizon(tmp_path, capsys, workdir):
    code, _, _ = run(capsys, "predict", "-m", workdir / "model.json", "-l", "0", "-o", tmp_path / "f.csv")
    _, header, rows = read_csv_table(tmp_path / "f.csv")
    assert code == 0 and header == ["t", "prediction"] and rows == []


def test_predict_with_truth_prints_metrics(tmp_path, capsys, workdir):
    code, out, _ = run(capsys, "predict", "-m", workdir / "model.json", "-l", "300", "--truth", workdir / "lx.csv",
                       "-o", tmp_path / "f.csv")
    report = json.loads(out)
    assert code == 0 and report["horizon"] == 300 and len(report["nmae_profile"]) == 300
    meta, header, rows = read_csv_table(tmp_path / "f.csv")
    assert header == ["t", "prediction", "truth"] and len(rows) == 300 and meta["start_index"] == 1000
    assert float(rows[0][1][0]) == pytest.approx(100.0)


def test_predict_deterministic(tmp_path, capsys, workdir):
    for name in ("a.csv", "b.csv"):
        run(capsys, "predict", "-m", workdir / "model.json", "-l", "50", "-o", tmp_path / name)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_predict_corrupt_model(tmp_path, capsys):
    (tmp_path / "m.json").write_text('{"format": "nope"}')
    assert run(capsys, "predict", "-m", tmp_path / "m.json", "-o", tmp_path / "f.csv")[0] == 3


def test_predict_missing_model(tmp_path, capsys):
    assert run(capsys, "predict", "-m", tmp_path / "absent.json", "-o", tmp_path / "f.csv")[0] == 3


def test_predict_truth_too_short(tmp_path, capsys, workdir):
    code, _, _ = run(capsys, "predict", "-m", workdir / "model.json", "-l", "400", "--truth", workdir / "lx.csv",
                     "-o", tmp_path / "f.csv")
    assert code == 3


def test_evaluate_matches_predict(tmp_path, capsys, workdir):
    _, predicted, _ = run(capsys, "predict", "-m", workdir / "model.json", "-l", "120", "--truth",
                          workdir / "lx.csv", "-o", tmp_path / "f.csv")
    code, evaluated, _ = run(capsys, "evaluate", "--truth", workdir / "lx.csv", "--forecast", tmp_path / "f.csv",
                             "-o", tmp_path / "metrics.json")
    assert code == 0 and json.loads(evaluated) == json.loads(predicted)
    assert json.loads((tmp_path / "metrics.json").read_text()) == json.loads(predicted)


def test_config_file_and_flag_precedence(tmp_path, capsys, workdir):
    (tmp_path / "cfg.json").write_text(json.dumps({"profile": "lorenz", "m": 2, "n": 100, "train-length": 800}))
    code, out, _ = run(capsys, "train", "--config", tmp_path / "cfg.json", "--m", "3", "-i", workdir / "lx.csv",
                       "-o", tmp_path / "m.json")
    info = json.loads(out)
    assert code == 0 and info["embedding_dimension"] == 3 and info["train_length"] == 800


@pytest.mark.parametrize("cfg", [{"bogus": 1}, {"m": 0}, {"scale": "log"}, [1, 2]])
def test_config_file_validation(tmp_path, workdir, cfg):
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert usage_error("train", "--config", tmp_path / "cfg.json", "-i", workdir / "lx.csv",
                       "-o", tmp_path / "m.json") == 2


def test_seed_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("DELAY_ESN_SEED", "7")
    run(capsys, "gen-data", "--steps", "30", "-o", tmp_path / "env.csv")
    monkeypatch.delenv("DELAY_ESN_SEED")
    run(capsys, "gen-data", "--steps", "30", "--seed", "7", "-o", tmp_path / "flag.csv")
    assert (tmp_path / "env.csv").read_bytes() == (tmp_path / "flag.csv").read_bytes()


def test_ablate_small_grid(tmp_path, capsys):
    code, out, _ = run(capsys, "ablate", "--system", "lorenz_x", "--m-grid", "1,3", "--trials", "2", "-l", "20",
                       "--n", "60", "--train-length", "300", "-o", tmp_path / "rep")
    assert code == 0 and "records: 4" in out
    report = json.loads((tmp_path / "rep.json").read_text())
    assert len(report["records"]) == 4 and report["spec"]["m_grid"] == [1, 3]
    assert (tmp_path / "rep.csv").read_text().count("\n") == 5


def test_ablate_csv_input(tmp_path, capsys, workdir):
    code, out, _ = run(capsys, "ablate", "--system", "csv_input", "-i", workdir / "lx.csv", "--m-grid", "2",
                       "--trials", "2", "-l", "50", "--n", "60", "-o", tmp_path / "rep")
    assert code == 0 and "records: 2" in out


def test_ablate_rejects_bad_grid():
    assert usage_error("ablate", "--m-grid", "5,2") == 2


@pytest.mark.slow
def test_ablate_default_grid_record_count(tmp_path, capsys):
    code, out, _ = run(capsys, "ablate", "--system", "lorenz_x", "--m-grid", "1,2,5,8", "--trials", "20",
                       "--jobs", "4", "-o", tmp_path / "rep")
    assert code == 0
    assert len(json.loads((tmp_path / "rep.json").read_text())["records"]) == 80


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "delay_esn", "gen-data", "--steps", "5", "-o", str(tmp_path / "a.csv")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["samples"] == 5


def test_missing_subcommand():
    assert usage_error() == 2

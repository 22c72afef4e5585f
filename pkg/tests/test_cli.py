import csv
import subprocess
import sys

import numpy as np
import pytest

from sammec2.boosting import Ensemble, Variant, load_model, save_model
from sammec2.cli import main, parse_args
from sammec2.stump import Stump

SMALL = ["--n-samples", "800", "--n-features", "6", "--n-informative", "4",
         "--weights", "0.8,0.15,0.05"]


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["generate", *SMALL, "--seed", "3", "--out", str(d / "data.csv")]) == 0
    assert main(["train", "--data", str(d / "data.csv"), "--variant", "SAMME_C2",
                 "--costs", "0.5,0.8,1", "--rounds", "20", "--model", str(d / "m.json")]) == 0
    return d


def test_generate_writes_expected_shape(workspace):
    rows = read_rows(workspace / "data.csv")
    assert rows[0] == [f"x{j}" for j in range(6)] + ["ACC_FREQ"]
    labels = [int(r[-1]) for r in rows[1:]]
    assert np.bincount(labels).tolist() == [640, 120, 40]


def test_seed_and_env_override(tmp_path, monkeypatch):
    main(["generate", *SMALL, "--seed", "9", "--out", str(tmp_path / "a.csv")])
    monkeypatch.setenv("RNG_SEED", "9")
    main(["generate", *SMALL, "--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    main(["generate", *SMALL, "--seed", "10", "--out", str(tmp_path / "c.csv")])
    assert (tmp_path / "a.csv").read_bytes() != (tmp_path / "c.csv").read_bytes()
    monkeypatch.delenv("RNG_SEED")
    assert parse_args(["generate", "--out", "x"]).seed == 16


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("# generator settings\nn-samples = 500\nn_features=5\nn-informative=3\n"
                   "weights=0.8,0.15,0.05\nseed=4\n")
    args = parse_args(["generate", "--config", str(cfg), "--out", "o.csv", "--n-features", "7"])
    assert args.n_samples == 500 and args.n_features == 7 and args.n_informative == 3
    assert args.weights == [0.8, 0.15, 0.05] and args.seed == 4


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour=blue\n")
    with pytest.raises(SystemExit) as exc:
        parse_args(["generate", "--config", str(cfg), "--out", "o.csv"])
    assert exc.value.code != 0
    assert "colour" in capsys.readouterr().err


def test_evaluate_writes_reports(workspace, capsys):
    out = workspace / "eval"
    assert main(["evaluate", "--model", str(workspace / "m.json"),
                 "--data", str(workspace / "data.csv"), "--out-dir", str(out)]) == 0
    assert "G-mean" in capsys.readouterr().out
    rows = read_rows(out / "metrics.csv")
    assert [r[0] for r in rows[1:]] == ["class 1", "class 2", "class 3", "macro", "gmean"]
    assert read_rows(out / "confusion.csv")[-1][-1] == "800"


def test_predict_matches_model_and_ignores_column_order(workspace):
    rows = read_rows(workspace / "data.csv")
    header, body = rows[0], rows[1:]
    order = list(reversed(range(len(header))))
    permuted = workspace / "perm.csv"
    with open(permuted, "w", newline="") as fh:
        w = csv.writer(fh)
        for r in rows:
            w.writerow([r[i] for i in order])
    assert main(["predict", "--model", str(workspace / "m.json"), "--input", str(workspace / "data.csv"),
                 "--output", str(workspace / "p1.csv")]) == 0
    assert main(["predict", "--model", str(workspace / "m.json"), "--input", str(permuted),
                 "--output", str(workspace / "p2.csv")]) == 0
    assert (workspace / "p1.csv").read_bytes() == (workspace / "p2.csv").read_bytes()
    out = read_rows(workspace / "p1.csv")
    assert out[0] == ["predicted", "p_0", "p_1", "p_2"]
    ens = load_model(workspace / "m.json")
    X = np.array([[float(v) for v in r[:-1]] for r in body])
    assert [int(r[0]) for r in out[1:]] == ens.predict(X).tolist()
    np.testing.assert_allclose([[float(v) for v in r[1:]] for r in out[1:]], ens.predict_proba(X))


def test_predict_header_only(workspace):
    src = workspace / "empty.csv"
    src.write_text(",".join(f"x{j}" for j in range(6)) + "\n")
    assert main(["predict", "--model", str(workspace / "m.json"), "--input", str(src),
                 "--output", str(workspace / "pe.csv")]) == 0
    assert (workspace / "pe.csv").read_text() == "predicted,p_0,p_1,p_2\n"


def test_predict_single_stump_one_hot(tmp_path):
    ens = Ensemble([(Stump(0, 0.0, 1, 2), 1.0)], 3, ("a", "b"), Variant.SAMME)
    save_model(ens, tmp_path / "s.json")
    (tmp_path / "in.csv").write_text("b,a\n0,5\n")
    assert main(["predict", "--model", str(tmp_path / "s.json"), "--input", str(tmp_path / "in.csv"),
                 "--output", str(tmp_path / "o.csv")]) == 0
    assert read_rows(tmp_path / "o.csv")[1] == ["2", "0.0", "0.0", "1.0"]


def test_schema_mismatch_names_columns(workspace, capsys):
    bad = workspace / "bad.csv"
    bad.write_text("x0,x1,x2,x3,x4,zz\n1,2,3,4,5,6\n")
    code = main(["predict", "--model", str(workspace / "m.json"), "--input", str(bad),
                 "--output", str(workspace / "pb.csv")])
    err = capsys.readouterr().err
    assert code != 0
    assert err.startswith("error: DataError:")
    assert "'x5'" in err and "'zz'" in err


def test_ga_search_outputs(workspace):
    out = workspace / "ga"
    assert main(["ga-search", "--data", str(workspace / "data.csv"), "--population", "4",
                 "--generations", "2", "--fitness-rounds", "5", "--out-dir", str(out)]) == 0
    costs = read_rows(out / "best_costs.csv")
    assert costs[0] == ["class", "cost"] and len(costs) == 4
    assert all(0 < float(r[1]) <= 1 for r in costs[1:])
    hist = read_rows(out / "ga_history.csv")
    assert len(hist) == 4
    best = [float(r[1]) for r in hist[1:]]
    assert best == sorted(best)


def test_benchmark_and_manifest_replay(tmp_path):
    a = tmp_path / "a"
    args = ["benchmark", *SMALL, "--rounds", "15", "--variants", "SAMME,SAMME_C2,RUSBOOST",
            "--costs", "0.7,0.7,0.7", "--seed", "5", "--out-dir", str(a)]
    assert main(args) == 0
    comp = read_rows(a / "comparison.csv")
    assert comp[0] == ["class", "SAMME", "SAMME_C2", "RUSBOOST"]
    assert [r[0] for r in comp[1:]] == ["Claim 0", "Claim 1", "Claim 2+", "G-mean"]
    # constant costs reproduce plain SAMME
    assert all(r[1] == r[2] for r in comp[1:])
    b = tmp_path / "b"
    assert main(["benchmark", "--manifest", str(a / "manifest.json"), "--out-dir", str(b)]) == 0
    csvs = sorted(p.name for p in a.glob("*.csv"))
    assert csvs == sorted(p.name for p in b.glob("*.csv"))
    for name in csvs:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_benchmark_requires_costs_for_cost_sensitive(tmp_path, capsys):
    code = main(["benchmark", *SMALL, "--variants", "SAMME_C2", "--out-dir", str(tmp_path)])
    assert code != 0
    assert capsys.readouterr().err.startswith("error: ValueError:")


def test_missing_file_exit_code(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sammec2.cli", "train", "--data", str(tmp_path / "none.csv"),
         "--variant", "SAMME", "--model", str(tmp_path / "m.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert proc.stderr.strip().splitlines()[-1].startswith("error: FileNotFoundError:")


def test_corrupt_model_reported(tmp_path, capsys):
    (tmp_path / "m.json").write_text("{not json")
    (tmp_path / "in.csv").write_text("a\n1\n")
    code = main(["predict", "--model", str(tmp_path / "m.json"), "--input", str(tmp_path / "in.csv"),
                 "--output", str(tmp_path / "o.csv")])
    assert code == 1
    assert capsys.readouterr().err.startswith("error: ModelFormatError:")

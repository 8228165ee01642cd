import csv
import json
import math

import pytest

from collabnet.cli import EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, main


def run(*argv):
    return main([str(a) for a in argv])


def files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir()) if p.name != "metadata.json"}


@pytest.fixture
def k4(tmp_path):
    (tmp_path / "nodes.csv").write_text("id\na\nb\nc\nd\n")
    (tmp_path / "edges.csv").write_text("src,dst\na,b\na,c\na,d\nb,c\nb,d\nc,d\n")
    return tmp_path


def test_metrics_k4(k4, capsys):
    out = k4 / "out"
    assert run("metrics", "--nodes", k4 / "nodes.csv", "--edges", k4 / "edges.csv", "--out", out) == EXIT_OK
    rows = dict(csv.reader((out / "metrics.csv").open()))
    assert float(rows["density"]) == 1.0
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["seed"] == 0 and "threads" not in cfg and cfg["inputs"]["edges"]["sha256"]
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["threads"] == 1 and "timestamp" in meta


def test_json_format(k4):
    out = k4 / "j"
    assert run("metrics", "--nodes", k4 / "nodes.csv", "--edges", k4 / "edges.csv", "--out", out,
               "--format", "json") == EXIT_OK
    assert json.loads((out / "metrics.json").read_text())["density"] == 1.0


def test_regress_table_identities(tmp_path):
    synth = tmp_path / "synth"
    assert run("synth", "--kind", "dyadic", "--n", 40, "--seed", 3, "--layer", "information",
               "--beta", "intercept=-1", "--beta", "distance=-0.4", "--beta", "employer=-0.8",
               "--out", synth) == EXIT_OK
    out = tmp_path / "reg"
    assert run("regress", "--nodes", synth / "nodes.csv", "--edges", synth / "edges.csv", "--layer", "information",
               "--covariates", "distance,employer", "--out", out) == EXIT_OK
    rows = {r["term"]: r for r in csv.DictReader((out / "regression.csv").open())}
    assert list(rows) == ["intercept", "distance", "employer", "AIC", "BIC", "LogLikelihood", "Deviance", "n_obs"]
    aic, dev, bic = (float(rows[k]["estimate"]) for k in ("AIC", "Deviance", "BIC"))
    n_obs = int(rows["n_obs"]["estimate"])
    assert n_obs == 40 * 39
    assert aic - dev == pytest.approx(6, abs=1e-8)
    assert bic - dev == pytest.approx(3 * math.log(n_obs), abs=1e-8)
    curve = list(csv.DictReader((out / "curve.csv").open()))
    assert float(curve[0]["distance_km"]) == 0 and len(curve) > 2


def test_permtest_twice_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out, threads in ((a, 1), (b, 4)):
        assert run("permtest", "--demo", "--permutations", 1000, "--seed", 42, "--threads", threads,
                   "--out", out) == EXIT_OK
    assert files(a) == files(b)


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("COLLABNET_OUTPUT_DIR", str(tmp_path / "env"))
    assert run("communities", "--demo") == EXIT_OK
    assert (tmp_path / "env" / "partition.csv").exists()


def test_ingest_authorship(tmp_path):
    (tmp_path / "a.csv").write_text("paper_id,author_id\nP1,A\nP1,B\nP1,C\nP2,B\nP2,C\n")
    out = tmp_path / "o"
    assert run("ingest", "--authorship", tmp_path / "a.csv", "--out", out) == EXIT_OK
    assert (out / "edges.csv").read_text().splitlines()[1:] == ["A,B,1,coauthorship", "A,C,1,coauthorship",
                                                                 "B,C,2,coauthorship"]


def test_exit_codes(k4, tmp_path, capsys):
    nodes, edges = k4 / "nodes.csv", k4 / "edges.csv"
    assert run("metrics", "--edges", edges, "--out", tmp_path / "x") == EXIT_CONFIG
    assert run("regress", "--demo", "--covariates", "shoe_size", "--out", tmp_path / "x") == EXIT_CONFIG
    assert "shoe_size" in capsys.readouterr().err
    assert run("metrics", "--nodes", k4 / "missing.csv", "--edges", edges, "--out", tmp_path / "x") == EXIT_DATA
    assert "missing.csv" in capsys.readouterr().err
    (k4 / "dup.csv").write_text("id\na\na\n")
    assert run("metrics", "--nodes", k4 / "dup.csv", "--edges", edges, "--out", tmp_path / "x") == EXIT_DATA
    # Separated outcome: employer perfectly predicts ties.
    (k4 / "sep.csv").write_text("id,employer\na,X\nb,X\nc,Y\nd,Y\n")
    (k4 / "sepe.csv").write_text("src,dst\na,b\nc,d\n")
    assert run("regress", "--nodes", k4 / "sep.csv", "--edges", k4 / "sepe.csv", "--covariates", "employer",
               "--out", tmp_path / "x") == EXIT_NUMERICAL
    with pytest.raises(SystemExit) as exc:
        run("metrics", "--format", "xml")
    assert exc.value.code == 2


def test_synth_planted_and_partition_input(tmp_path):
    s = tmp_path / "s"
    assert run("synth", "--kind", "planted", "--communities", 3, "--community-size", 10, "--seed", 5,
               "--out", s) == EXIT_OK
    out = tmp_path / "p"
    assert run("permtest", "--nodes", s / "nodes.csv", "--edges", s / "edges.csv", "--partition",
               s / "truth_partition.csv", "--permutations", 200, "--out", out) == EXIT_OK
    rows = {r["statistic"]: r for r in csv.DictReader((out / "permtest.csv").open())}
    assert float(rows["mean_intra_distance"]["p_value"]) < 0.05
    assert rows["same_country_share"]["direction"] == "greater"


def test_demo_report_is_fast(tmp_path):
    import time

    start = time.perf_counter()
    assert run("report", "--demo", "--out", tmp_path / "r") == EXIT_OK
    assert time.perf_counter() - start < 60
    names = {p.name for p in (tmp_path / "r").iterdir()}
    assert {"plot_centralization.csv", "plot_homophily.csv", "curve.csv", "permtest_hist_mean_intra_distance.csv",
            "regression.csv", "partition.csv", "metrics.csv", "homophily.csv"} <= names

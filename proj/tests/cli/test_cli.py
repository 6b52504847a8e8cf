import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("PERSISTMINER_CLI", "persistminer")


def run(*args, check=True):
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
    return proc


def rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


@pytest.fixture()
def tiny(tmp_path):
    p = tmp_path / "tiny.csv"
    p.write_text("0.0,+,a,,b\n5.0,+,a,,b\n10.0,+,a,,b\n")
    return p


@pytest.fixture(scope="module")
def injected(tmp_path_factory):
    d = tmp_path_factory.mktemp("inj")
    run("generate", "--kind", "trips", "-n", 15000, "--nodes", 60, "--seed", 4, "-o", d / "host.csv")
    run("inject", "-i", d / "host.csv", "-o", d / "aug.csv", "--labels-out", d / "lab.csv",
        "--seed", 5, "--trips", 20)
    return d


def test_mine_tiny_fixture(tiny, tmp_path):
    out = tmp_path / "pvf.csv"
    run("mine", "-i", tiny, "-o", out)
    r = rows(out)
    assert r[0] == ["snippet_key", "frequency", "persistence"]
    assert r[1][0] == "(+,a,,b)"
    assert abs(float(r[1][2]) - 1.2041199826559248) < 1e-9
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert manifest["command"] == "mine"
    assert manifest["input"]["digest"].startswith("sha256:")
    assert manifest["config"]["k_max"] == 1


def test_streaming_matches_offline(tmp_path):
    src = tmp_path / "s.csv"
    run("generate", "-n", 4000, "--rate", 0.2, "--nodes", 15, "--seed", 2, "-o", src)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("mine", "-i", src, "-o", a, "--k-max", 3, "--delta-max", 20, "--view", "order")
    run("mine", "-i", src, "-o", b, "--k-max", 3, "--delta-max", 20, "--view", "order",
        "--variant", "streaming")
    ra, rb = rows(a)[1:], rows(b)[1:]
    assert len(ra) == len(rb) > 0
    pa = {k: float(p) for k, _, p in ra}
    pb = {k: float(p) for k, _, p in rb}
    assert pa.keys() == pb.keys()
    assert all(abs(pa[k] - pb[k]) < 1e-9 for k in pa)


def test_k_max_one_ignores_delta(tmp_path):
    src = tmp_path / "s.csv"
    run("generate", "-n", 2000, "--nodes", 10, "--seed", 7, "-o", src)
    outs = []
    for delta in (0, 1, 1000):
        out = tmp_path / f"d{delta}.csv"
        run("mine", "-i", src, "-o", out, "--delta-max", delta)
        outs.append(out.read_text())
    assert outs[0] == outs[1] == outs[2]


def test_detect_deterministic_and_metrics(injected, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    p1 = run("detect", "-i", injected / "aug.csv", "--labels", injected / "lab.csv", "-o", a,
             "--seed", 3, "--top-k", "50,200")
    run("detect", "-i", injected / "aug.csv", "-o", b, "--seed", 3)
    assert a.read_text() == b.read_text()
    assert rows(a)[0] == ["t", "snippet_key", "score", "level"]
    summary = dict(line.split(",") for line in p1.stdout.strip().splitlines()[1:])
    assert set(summary) == {"auc", "f1@50", "f1@200"}
    manifest = json.loads(Path(str(a) + ".manifest.json").read_text())
    assert manifest["metrics"]["auc"] == pytest.approx(float(summary["auc"]))


def test_detect_baselines(injected, tmp_path):
    aucs = {}
    for det in ("persistence", "freq", "ds"):
        p = run("detect", "-i", injected / "aug.csv", "--labels", injected / "lab.csv",
                "-o", tmp_path / f"{det}.csv", "--detector", det)
        aucs[det] = float(p.stdout.splitlines()[1].split(",")[1])
        assert len(rows(tmp_path / f"{det}.csv")) > 1
    assert aucs["persistence"] > aucs["freq"]


def test_label_mismatch_is_an_error(injected, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,0\n1,1\n")
    p = run("detect", "-i", injected / "aug.csv", "--labels", bad, "-o", tmp_path / "x.csv",
            check=False)
    assert p.returncode != 0
    assert not (tmp_path / "x.csv").exists()


def test_usage_errors(tiny, tmp_path):
    assert run(check=False).returncode != 0
    assert run("mine", check=False).returncode != 0
    assert run("mine", "-i", tiny, "--view", "shape", check=False).returncode != 0
    assert run("mine", "-i", tiny, "--k-max", 2, "--delta-max", 0, check=False).returncode != 0
    assert run("mine", "-i", tmp_path / "missing.csv", check=False).returncode != 0


def test_out_of_order_input(tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("3,+,a,,b\n2,+,a,,b\n")
    p = run("mine", "-i", src, "-o", tmp_path / "o.csv", check=False)
    assert p.returncode != 0
    assert "out-of-order" in p.stderr


def test_bench_schema(tmp_path):
    cols = None
    for _ in range(2):
        out = tmp_path / "bench.csv"
        run("bench", "-n", 3000, "--reps", 1, "--delta-max", "60,600", "--k-max", "1,2", "-o", out)
        r = rows(out)
        assert len(r) == 5
        assert cols is None or r[0] == cols
        cols = r[0]
    assert cols[:3] == ["delta_max", "k_max", "updates"]

import json
import subprocess
import sys

import numpy as np
import pytest

from entscale import cli, exactcover as ec


def run(*argv):
    return cli.main([str(a) for a in argv])


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])


def test_gen_contract_and_determinism(tmp_path):
    assert run("gen", "--n", 10, "--k", 3, "--count", 3, "--seed", 1, "--out", tmp_path / "a") == 0
    assert run("gen", "--n", 10, "--k", 3, "--count", 3, "--seed", 1, "--out", tmp_path / "b") == 0
    files = sorted((tmp_path / "a").iterdir())
    assert [f.name for f in files] == [f"ec_n10_k3_{i:04d}.json" for i in range(3)]
    for f in files:
        inst = ec.load_instance(f)
        assert ec.count_satisfying(inst.clauses, 10) == 1
        assert inst.seed is not None
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
    assert len({ec.load_instance(f) for f in files}) == 3


def test_gen_three_qubits_hits_cap(tmp_path, capsys):
    assert run("gen", "--n", 3, "--seed", 0, "--restart-cap", 100, "--out", tmp_path) == 3
    assert "restarts" in capsys.readouterr().err


def test_exit_codes(tmp_path):
    assert run("gen", "--n", 6, "--out", tmp_path) == 2  # seed is mandatory
    assert run("gen", "--n", 21, "--seed", 0, "--out", tmp_path) == 3
    assert run("gen", "--n", 6, "--k", 5, "--seed", 0, "--out", tmp_path) == 2
    assert run("bogus") == 2
    assert run("grover", "--n", "9", "--out", tmp_path) == 2
    assert run("shor", "--N", "16", "--out", tmp_path) == 2


def test_sweep_contract(tmp_path):
    assert run("gen", "--n", 8, "--count", 10, "--seed", 3, "--out", tmp_path / "inst") == 0
    assert run("sweep", "--instances", tmp_path / "inst", "--out", tmp_path / "sw", "--workers", 1) == 0
    tables = sorted(p for p in (tmp_path / "sw").glob("ec_*.csv"))
    assert len(tables) == 10
    for t in tables:
        header, data = read_csv(t)
        assert header == ["s", "e0", "e1", "gap", "entropy", "h10"] and len(data) == 101
        assert abs(data[0, 4]) < 1e-9 and abs(data[-1, 4]) < 1e-12
    header, agg = read_csv(tmp_path / "sw" / "aggregate.csv")
    assert agg.shape == (1, 10) and agg[0, 0] == 8 and agg[0, 1] == 10
    assert (tmp_path / "sw" / "mean_curve_n8.csv").exists()

    # re-aggregation from the tables reproduces the sweep summary
    assert run("stats", "--in", tmp_path / "sw", "--out", tmp_path / "st") == 0
    assert (tmp_path / "st" / "aggregate.csv").read_text() == (tmp_path / "sw" / "aggregate.csv").read_text()

    assert run("fit", "--in", tmp_path / "sw" / "mean_curve_n8.csv", "--out", tmp_path / "crit.json") == 0
    crit = json.loads((tmp_path / "crit.json").read_text())
    assert 0.5 < crit["s_c"] < 0.9 and crit["alpha"] > 0


def test_sweep_partition_option(tmp_path):
    run("gen", "--n", 6, "--seed", 2, "--out", tmp_path / "inst")
    assert run("sweep", "--instances", tmp_path / "inst", "--partition", "0b101010",
               "--step", 0.1, "--out", tmp_path / "a") == 0
    assert run("sweep", "--instances", tmp_path / "inst", "--partition", "21",
               "--step", 0.1, "--out", tmp_path / "b") == 0
    # 0b101010 and 21 = 0b010101 are complements, so entropies agree
    _, a = read_csv(tmp_path / "a" / "ec_n6_k3_0000.csv")
    _, b = read_csv(tmp_path / "b" / "ec_n6_k3_0000.csv")
    assert np.allclose(a[:, 4], b[:, 4], atol=1e-10)
    assert run("sweep", "--instances", tmp_path / "inst", "--partition", "63", "--out", tmp_path / "c") == 2
    assert run("sweep", "--instances", tmp_path / "inst", "--step", 0.03, "--out", tmp_path / "c") == 2


def test_fit_on_aggregate(tmp_path):
    text = "n,count,mean_max_entropy,ci_entropy,worst_max_entropy,mean_min_gap,ci_gap,worst_min_gap,mean_s_gap,mean_s_entropy\n"
    for n in (6, 8, 10, 12):
        text += f"{n},5,{0.1 * n},0,0,{1 / n},0,0,0.7,0.69\n"
    (tmp_path / "agg.csv").write_text(text)
    assert run("fit", "--in", tmp_path / "agg.csv", "--out", tmp_path / "f.json") == 0
    assert json.loads((tmp_path / "f.json").read_text())["slope"] == pytest.approx(0.1)
    assert run("fit", "--in", tmp_path / "agg.csv", "--model", "inverse-n", "--y", "mean_min_gap",
               "--out", tmp_path / "g.json") == 0
    assert json.loads((tmp_path / "g.json").read_text())["slope"] == pytest.approx(1.0)


def test_grover_command(tmp_path):
    assert run("grover", "--n", "10,12,14", "--out", tmp_path) == 0
    for n in (10, 12, 14):
        header, data = read_csv(tmp_path / f"grover_n{n}.csv")
        assert header == ["s", "e_minus", "lambda_plus", "lambda_minus", "entropy"]
        assert data[int(np.argmax(data[:, 4])), 0] == pytest.approx(0.5, abs=0.01)
    check = json.loads((tmp_path / "grover_check.json").read_text())["max_abs_deviation"]
    assert set(check) == {"10", "12", "14"} and max(check.values()) <= 1e-9
    _, sat = read_csv(tmp_path / "grover_saturation.csv")
    assert np.allclose(sat[:, 2], 1 - 4 / np.log(2) * 2.0 ** (-sat[:, 0] / 2), atol=1e-12)


def test_shor_command(tmp_path):
    assert run("shor", "--N", "15", "--out", tmp_path) == 0
    cases = [json.loads(ln) for ln in (tmp_path / "shor_cases.jsonl").read_text().splitlines()]
    assert [c["a"] for c in cases] == [2, 4, 7, 8, 11, 13, 14]
    assert {c["r"] for c in cases} == {2, 4} and all(c["rank"] == c["r"] for c in cases)
    assert next(c for c in cases if c["a"] == 7)["factors"] == [3, 5]
    assert (tmp_path / "shor_orders.csv").read_text() == "N,r,count\n15,2,3\n15,4,4\n"
    assert run("shor", "--N", "33", "--a", "2", "--out", tmp_path / "b") == 0
    (case,) = [json.loads(ln) for ln in (tmp_path / "b" / "shor_cases.jsonl").read_text().splitlines()]
    assert case["rank"] == 10 and case["entropy"] == pytest.approx(np.log2(10), abs=10 / 2048)


def test_shor_respects_qubit_cap(tmp_path):
    assert run("shor", "--N", "33", "--a", "2", "--max-qubits", "16", "--out", tmp_path) == 3


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# ensemble\nn = 6\nseed=5\ncount=2\n")
    assert run("gen", "--config", cfg, "--out", tmp_path / "a") == 0
    assert sorted(p.name for p in (tmp_path / "a").iterdir()) == ["ec_n6_k3_0000.json", "ec_n6_k3_0001.json"]
    assert run("gen", "--config", cfg, "--n", 7, "--out", tmp_path / "b") == 0
    assert (tmp_path / "b" / "ec_n7_k3_0000.json").exists()
    assert run("gen", "--n", 6, "--seed", 5, "--count", 2, "--out", tmp_path / "c") == 0
    assert (tmp_path / "a" / "ec_n6_k3_0001.json").read_bytes() == (tmp_path / "c" / "ec_n6_k3_0001.json").read_bytes()
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    assert run("gen", "--config", bad, "--out", tmp_path / "d") == 2
    assert run("gen", "--config", tmp_path / "missing.cfg", "--out", tmp_path / "d") == 2


def test_end_to_end_byte_determinism(tmp_path):
    outputs = []
    for tag, workers in (("a", 1), ("b", 2)):
        root = tmp_path / tag
        assert run("gen", "--n", 6, "--count", 4, "--seed", 11, "--out", root / "inst") == 0
        assert run("sweep", "--instances", root / "inst", "--step", 0.05, "--workers", workers,
                   "--out", root / "sw") == 0
        outputs.append({p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()})
    assert outputs[0] == outputs[1]


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "entscale.cli", "shor", "--N", "9", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert len((tmp_path / "shor_cases.jsonl").read_text().splitlines()) == 5
    proc = subprocess.run([sys.executable, "-m", "entscale.cli", "sweep"], capture_output=True, text=True)
    assert proc.returncode == 2

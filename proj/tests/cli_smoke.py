"""End-to-end runs of the command-line tool on tiny inputs."""

import csv
import json
import math
import pathlib
import random
import subprocess
import sys
import tempfile

CLI = sys.argv[1]


def run(*args, ok=True):
    p = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if ok and p.returncode != 0:
        raise AssertionError(f"{args} failed ({p.returncode}):\n{p.stdout}\n{p.stderr}")
    return p


def rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def main():
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="mixtrans_cli_"))

    rng = random.Random(1)
    series = tmp / "series.csv"
    series.write_text("value\n" + "".join(f"{rng.gauss(0, 1)}\n" for _ in range(120)))
    disc = tmp / "disc"
    disc.mkdir()
    run("discretize", "--input", series, "-K", 3, "--out", disc)
    states = [r[0] for r in rows(disc / "states.csv")[1:]]
    assert len(states) == 120 and set(states) == {"1", "2", "3"}, states[:10]
    assert json.loads((disc / "manifest.json").read_text())["command"] == "discretize"

    bad = tmp / "bad.csv"
    bad.write_text("value\n1\nnope\n2\n")
    p = run("discretize", "--input", bad, "--out", disc, ok=False)
    assert p.returncode == 1 and "line" in p.stderr, p.stderr

    sim = tmp / "sim"
    sim.mkdir()
    cfg = tmp / "sim.json"
    cfg.write_text(json.dumps({
        "schema_version": 1,
        "scenario": {"K": 2, "active_lags": [1, 3], "train": 150, "validation": 60, "seed": 3},
        "roster": [{"label": "MTD(3)", "profile": "mtd-sbm", "L": 3, "R": 1},
                   {"label": "MMTD(3,2)", "profile": "mmtd-sdm", "L": 3, "R": 2}],
        "mcmc": {"burn_in": 200, "keep": 200, "thin": 4, "chains": 2},
    }))
    run("simulate", "--config", cfg, "--out", sim)
    losses = rows(sim / "losses.csv")
    labels = [r[0] for r in losses[1:]]
    assert "MTD(3)" in labels and "MMTD(3,2)" in labels, labels
    for r in losses[1:]:
        assert 0 <= float(r[1]) <= 100, r

    fit_cfg = tmp / "fit.json"
    fit_cfg.write_text(json.dumps({
        "schema_version": 1,
        "model": {"profile": "mmtd-sdm", "L": 3, "R": 2},
        "mcmc": {"burn_in": 100, "keep": 100, "thin": 2, "chains": 2, "seed": 11},
    }))
    fit = tmp / "fit"
    fit.mkdir()
    run("fit", "--data", sim / "train.csv", "--config", fit_cfg, "--out", fit)
    chain0 = (fit / "chain_0.csv").read_bytes()
    assert len(rows(fit / "chain_0.csv")) == 51

    again = tmp / "again"
    again.mkdir()
    run("fit", "--replay", fit / "manifest.json", "--out", again)
    for name in ("chain_0.csv", "chain_1.csv", "q_chain_0.csv", "q_chain_1.csv"):
        assert (fit / name).read_bytes() == (again / name).read_bytes(), name

    ev = tmp / "eval"
    ev.mkdir()
    run("evaluate", "--samples", fit, "--validation", sim / "validation.csv", "--out", ev)
    table = {r[0]: r[1] for r in rows(ev / "evaluate.csv")[1:]}
    assert math.isfinite(float(table["mean_log_predictive_score"])), table
    run("evaluate", "--samples", fit, "--validation", sim / "validation.csv",
        "--truth", sim / "truth.json", "--out", ev)
    table = {r[0]: r[1] for r in rows(ev / "evaluate.csv")[1:]}
    assert 0 <= float(table["l1_loss_x100"]) <= 100, table

    summ = tmp / "summ"
    summ.mkdir()
    p = run("summarize", "--samples", fit, "--out", summ)
    assert "lag 0" in p.stdout
    inc = rows(summ / "inclusion.csv")
    assert len(inc) == 5, inc

    broken = tmp / "broken"
    broken.mkdir()
    (broken / "manifest.json").write_text((fit / "manifest.json").read_text())
    (broken / "chain_0.csv").write_text(chain0.decode().splitlines()[0] + "\n")
    p = run("summarize", "--samples", broken, "--out", summ, ok=False)
    assert p.returncode == 1 and "no draws" in p.stderr, p.stderr

    p = run("fit", "--data", bad, "--profile", "mtd-dir", "--out", fit, ok=False)
    assert p.returncode == 1, p.stderr
    print("cli smoke ok")


if __name__ == "__main__":
    main()

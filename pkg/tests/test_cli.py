import json

import yaml

from conftest import CLEAR_BOX
from featsel.cli import main


def write(tmp_path, cfg):
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return str(path)


def test_gen(tmp_path, corridor, capsys):
    assert main(["gen", "--config", write(tmp_path, corridor)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["digest"]) == 64
    assert doc["candidates"] and doc["rejected"]


def test_select(tmp_path, corridor, capsys):
    assert main(["select", "--config", write(tmp_path, corridor), "--algos", "stochastic", "--seed", "11"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["seed"] == 11 and len(doc["selected"]) == corridor["q"]


def test_bench_csv_and_json(tmp_path, corridor):
    cfg = write(tmp_path, corridor)
    out = tmp_path / "r.csv"
    assert main(["bench", "--config", cfg, "--out", str(out), "--algos", "greedy,surrogate", "--threads", "2"]) == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 3
    out = tmp_path / "r.json"
    assert main(["bench", "--config", cfg, "--out", str(out), "--format", "json", "--seed", "5"]) == 0
    assert {r["seed"] for r in json.loads(out.read_text())["rows"]} == {5}


def test_exit_codes(tmp_path, corridor):
    assert main(["gen", "--config", str(tmp_path / "nope.yaml")]) == 2
    bad = dict(corridor, extra_key=1)
    assert main(["gen", "--config", write(tmp_path, bad)]) == 2
    behind = json.loads(json.dumps(corridor))
    behind["features"].update(box_min=[-30.0, -5.0, -3.0], box_max=[-2.0, 5.0, 3.0])
    assert main(["bench", "--config", write(tmp_path, behind), "--out", str(tmp_path / "x.csv")]) == 3
    big = json.loads(json.dumps(corridor))
    big["features"].update(count=200, **CLEAR_BOX)
    big["q"] = 20
    assert main(["bench", "--config", write(tmp_path, big), "--algos", "brute", "--out", str(tmp_path / "x.csv")]) == 4


def test_verify_quick(capsys):
    assert main(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 6

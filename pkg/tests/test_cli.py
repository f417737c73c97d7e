import csv
import io
import json

import pytest

from sturmlab.cli import ExperimentConfig, load_config, main, parse_q_range
from sturmlab.errors import InsufficientDepth, SchemaError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_q_range_parsing():
    lo, hi, n = parse_q_range("20:150:60")
    assert (lo, hi, n) == (20, 150, 60)
    with pytest.raises(SchemaError):
        parse_q_range("20:10:5")
    with pytest.raises(SchemaError):
        parse_q_range("a:b")


def test_bundled_configs_load():
    for name in ("bl-fibonacci-12", "bl-sigma-2", "det-growth"):
        cfg = load_config(name)
        assert cfg.sequence().admissible


def test_config_schema():
    with pytest.raises(SchemaError):
        ExperimentConfig.from_json({"seed": {"w0": [[2, 1], [1, 0]]}, "s": {"period": [1]}})
    with pytest.raises(SchemaError):
        ExperimentConfig.from_json({"seed": {"letters": [1, 2]}, "s": {"period": [1]}, "colour": 1})
    with pytest.raises(InsufficientDepth):
        ExperimentConfig.from_json({"seed": {"letters": [1, 2]}, "s": {"period": [1]}, "i_max": 4})


def test_gen_and_verify_round_trip(capsys, tmp_path):
    dump = tmp_path / "bl.json"
    code, _, _ = run(capsys, "gen", "--config", "bl-fibonacci-12", "--depth", "12", "--out", str(dump))
    assert code == 0
    code, out, _ = run(capsys, "verify", str(dump), "--json")
    assert code == 0
    report = json.loads(out)
    assert report["ok"] and report["seed_round_trip"]


def test_corrupted_dump_names_the_identity(capsys, tmp_path):
    dump = tmp_path / "bl.json"
    run(capsys, "gen", "--config", "bl-fibonacci-12", "--depth", "12", "--out", str(dump))
    data = json.loads(dump.read_text())
    entry = next(e for e in data["points"] if e["i"] == 7)
    entry["y"][0] = str(int(entry["y"][0]) + 1)
    dump.write_text(json.dumps(data))
    code, _, err = run(capsys, "verify", str(dump))
    assert code == 1
    assert "identity (3) fails at i = 6" in err


def test_verify_from_config(capsys):
    code, out, _ = run(capsys, "verify", "--config", "bl-sigma-2", "--depth", "14")
    assert code == 0
    assert "identity (3)" in out


def test_growth_json(capsys):
    code, out, _ = run(capsys, "growth", "--config", "det-growth", "--json")
    assert code == 0
    data = json.loads(out)
    assert 0.25 < data["delta"][0] < 0.31


def test_exponents_agree_for_bl(capsys):
    code, out, _ = run(capsys, "exponents", "--config", "bl-fibonacci-12", "--json")
    assert code == 0
    data = json.loads(out)
    assert len(data["agreement"]) == 7 and all(data["agreement"].values())
    assert abs(data["xi"][0] - 0.72048466763) < 1e-10


def test_threesystem_text(capsys):
    code, out, _ = run(capsys, "threesystem", "--config", "bl-fibonacci-12", "--q-range", "30:80:10")
    assert code == 0
    assert "minkowski" in out.lower()


def test_minima_csv_and_minkowski(capsys):
    code, out, _ = run(capsys, "minima", "--config", "bl-fibonacci-12", "--q-range", "20:100:9")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    gaps = [abs(float(r["L1"]) + float(r["L2"]) + float(r["L3"]) - float(r["q"])) for r in rows]
    assert max(gaps) < 2


def test_output_is_deterministic(capsys):
    first = run(capsys, "minima", "--config", "bl-fibonacci-12", "--q-range", "20:40:3", "--json")
    second = run(capsys, "minima", "--config", "bl-fibonacci-12", "--q-range", "20:40:3", "--json")
    assert first == second


def test_exit_codes(capsys, tmp_path, monkeypatch):
    assert run(capsys, "growth")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"seed": {"w0": [[1, 0], [0, 1]], "w1": [[1, 0], [0, 1]]}, "s": {"period": [1]}}))
    assert run(capsys, "gen", "--config", str(bad))[0] == 2
    assert run(capsys, "growth", "--config", "bl-fibonacci-12", "--depth", "4")[0] == 4
    assert run(capsys, "growth", "--config", "bl-fibonacci-12", "--csv")[0] == 2
    monkeypatch.setenv("STURMLAB_MAX_BITS", "64")
    assert run(capsys, "exponents", "--config", "bl-fibonacci-12")[0] == 3

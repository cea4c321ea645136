import json

import pandas as pd
import pytest

from rcsplan.errors import EXIT_INDEX, EXIT_NO_PATH, EXIT_OK, EXIT_PARSE
from rcsplan.main import main

EMPTY = {"units": "m", "l": 50, "alpha_degrees": 30, "source": [0, 0], "target": [100, 0], "obstacles": []}
ROD = {"l": 50, "alpha_degrees": 40, "source": [50, 200], "target": [350, 200],
       "obstacles": [[[200, 120], [200, 280]]]}


def _write(tmp_path, name, document):
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def _lines(text, prefix):
    return [line for line in text.splitlines() if line.startswith(prefix)]


def test_plan_empty_scene(tmp_path, capsys):
    assert main(["plan", _write(tmp_path, "empty.json", EMPTY)]) == EXIT_OK
    out = capsys.readouterr().out
    assert _lines(out, "d=") == ["d=100"]
    assert json.loads(_lines(out, "path=")[0][5:]) == [[0.0, 0.0], [100.0, 0.0]]


def test_plan_full_arrival_range_matches(tmp_path, capsys):
    scene = _write(tmp_path, "rod.json", ROD)
    assert main(["plan", scene]) == EXIT_OK
    plain = _lines(capsys.readouterr().out, "d=")
    assert len(plain) == 1
    assert main(["plan", scene, "--arrive-from", "0", "--arrive-to", "0"]) == EXIT_OK
    assert _lines(capsys.readouterr().out, "d=") == plain


def test_plan_without_matching_arrival(tmp_path, capsys):
    scene = _write(tmp_path, "empty.json", EMPTY)
    assert main(["plan", scene, "--arrive-from", "90", "--arrive-to", "180"]) == EXIT_NO_PATH
    assert "error:" in capsys.readouterr().err


def test_plan_needs_both_arrival_flags(tmp_path):
    assert main(["plan", _write(tmp_path, "empty.json", EMPTY), "--arrive-from", "10"]) == EXIT_PARSE


def test_plan_outputs(tmp_path, capsys):
    scene = _write(tmp_path, "rod.json", ROD)
    svg, out = tmp_path / "rod.svg", tmp_path / "rod-path.json"
    assert main(["plan", scene, "--check", "--svg", str(svg), "--out", str(out)]) == EXIT_OK
    assert svg.read_text(encoding="utf-8").count("<path") == 1
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["polyline"][0] == [50.0, 200.0]
    assert document["polyline"][-1] == [350.0, 200.0]


def test_plan_with_target_override(tmp_path, capsys):
    scene = _write(tmp_path, "empty.json", EMPTY)
    assert main(["plan", scene, "--target", "0,250"]) == EXIT_OK
    assert _lines(capsys.readouterr().out, "d=") == ["d=250"]


def test_plan_parse_errors(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert main(["plan", str(broken)]) == EXIT_PARSE
    assert main(["plan", _write(tmp_path, "bad.json", {**EMPTY, "alpha_degrees": 190})]) == EXIT_PARSE
    assert main(["plan", _write(tmp_path, "empty.json", EMPTY), "--target", "nonsense"]) == EXIT_PARSE
    assert main([]) == EXIT_PARSE


def test_plan_no_path(tmp_path):
    assert main(["plan", _write(tmp_path, "near.json", {**EMPTY, "target": [10, 0]})]) == EXIT_NO_PATH


def test_preprocess_then_query(tmp_path, capsys):
    scene = _write(tmp_path, "rod.json", ROD)
    index = str(tmp_path / "rod.idx")
    assert main(["plan", scene]) == EXIT_OK
    batch = _lines(capsys.readouterr().out, "d=")

    assert main(["preprocess", scene, index]) == EXIT_OK
    assert _lines(capsys.readouterr().out, "preprocessing_ms=")

    assert main(["query", index, "--target", "350,200", "--target", "300,100", "--scene", scene]) == EXIT_OK
    out = capsys.readouterr().out
    assert len(_lines(out, "query_ms=")) == 2
    assert _lines(out, "d=")[0] == batch[0]


def test_query_against_other_scene(tmp_path, capsys):
    index = str(tmp_path / "rod.idx")
    assert main(["preprocess", _write(tmp_path, "rod.json", ROD), index]) == EXIT_OK
    other = _write(tmp_path, "empty.json", EMPTY)
    assert main(["query", index, "--target", "350,200", "--scene", other]) == EXIT_INDEX


def test_query_corrupt_index(tmp_path, capsys):
    index = tmp_path / "rod.idx"
    index.write_text("garbage", encoding="utf-8")
    assert main(["query", str(index), "--target", "1,1"]) == EXIT_INDEX
    assert "error:" in capsys.readouterr().err


def test_bench_csv(tmp_path):
    out = tmp_path / "bench.csv"
    args = ["bench", "path-length", "--seed", "3", "--no-astar", "--no-timings", "--out", str(out)]
    assert main(args) == EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "# suite=path-length seed=3"
    table = pd.read_csv(out, comment="#")
    assert table["rcs_length"].tolist() == [100.0, 200.0, 400.0, 800.0]
    assert main(args) == EXIT_OK
    assert out.read_text(encoding="utf-8") == text


def test_bench_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("RCS_SEED", "11")
    assert main(["bench", "path-length", "--no-astar", "--no-timings"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("# suite=path-length seed=11")


def test_unknown_suite():
    assert main(["bench", "nope"]) == EXIT_PARSE


def test_query_svg_marks_every_target(tmp_path, capsys):
    index = str(tmp_path / "rod.idx")
    svg = tmp_path / "query.svg"
    assert main(["preprocess", _write(tmp_path, "rod.json", ROD), index]) == EXIT_OK
    args = ["query", index, "--target", "350,200", "--target", "300,100", "--svg", str(svg)]
    assert main(args) == EXIT_OK
    text = svg.read_text(encoding="utf-8")
    assert text.count("<path") == 2
    assert text.count("<circle") == 3

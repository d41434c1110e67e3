import json

import pytest

from nnm.cli import main
from nnm.fixtures import fixture_path
from nnm.gml import import_gml


CENTRAL_AMERICA = str(fixture_path("central_america.tsv"))
ROE_MAP = str(fixture_path("roe_map.json"))
ROE_SCRIPT = str(fixture_path("roe_script.json"))


def _build_args(tmp_path, out="map"):
    return [
        "build",
        "--template", "A short list of countries that are nearest to \"{}\", separated by commas:",
        "--seeds", "Mexico",
        "--max-queries", "8",
        "--backend", f"fixture:{CENTRAL_AMERICA}",
        "--validator", "accept-all",
        "--out", str(tmp_path / out),
    ]


def test_build_writes_gml_and_json(tmp_path, capsys):
    assert main(_build_args(tmp_path)) == 0
    gml_text = (tmp_path / "map.gml").read_text(encoding="utf-8")
    graph = import_gml(gml_text)
    assert len(graph.nodes) == 8
    assert all(node.position is not None for node in graph.nodes.values())
    doc = json.loads((tmp_path / "map.json").read_text(encoding="utf-8"))
    assert len(doc["nodes"]) == 8
    out = capsys.readouterr().out
    assert "8 nodes" in out


def test_build_is_deterministic(tmp_path):
    assert main(_build_args(tmp_path, out="a")) == 0
    assert main(_build_args(tmp_path, out="b")) == 0
    assert (tmp_path / "a.gml").read_bytes() == (tmp_path / "b.gml").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_build_missing_template_is_usage_error(tmp_path):
    args = _build_args(tmp_path)
    del args[1:3]  # drop --template and its value
    with pytest.raises(SystemExit) as err:
        main(args)
    assert err.value.code == 2


def test_build_zero_max_queries_is_usage_error(tmp_path):
    args = _build_args(tmp_path)
    args[args.index("--max-queries") + 1] = "0"
    with pytest.raises(SystemExit) as err:
        main(args)
    assert err.value.code == 2


def test_build_bad_backend_spec_is_usage_error(tmp_path):
    args = _build_args(tmp_path)
    args[args.index("--backend") + 1] = "nonsense"
    with pytest.raises(SystemExit) as err:
        main(args)
    assert err.value.code == 2


def test_eval_writes_csv_and_chart(tmp_path, capsys):
    csv_path = tmp_path / "trajectory.csv"
    code = main([
        "eval", "--map", ROE_MAP, "--script", ROE_SCRIPT,
        "--out-csv", str(csv_path),
        "--out-map-png", str(tmp_path / "map.png"),
    ])
    assert code == 0
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 9  # header + 8 rows
    chart = tmp_path / "trajectory.png"
    assert chart.exists()
    assert chart.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert (tmp_path / "map.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    out = capsys.readouterr().out
    assert "pearson (records):" in out
    assert "pearson (filled):" in out


def test_eval_is_deterministic(tmp_path):
    for name in ("one.csv", "two.csv"):
        main(["eval", "--map", ROE_MAP, "--script", ROE_SCRIPT,
              "--out-csv", str(tmp_path / name)])
    assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()


def test_eval_unreadable_map_exits_1(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    code = main(["eval", "--map", str(missing), "--script", ROE_SCRIPT,
                 "--out-csv", str(tmp_path / "out.csv")])
    assert code == 1
    assert "missing.json" in capsys.readouterr().err


def test_eval_corrupt_gml_exits_1(tmp_path, capsys):
    bad = tmp_path / "broken.gml"
    bad.write_text("graph [\n  node [ id 0\n", encoding="utf-8")
    code = main(["eval", "--map", str(bad), "--script", ROE_SCRIPT,
                 "--out-csv", str(tmp_path / "out.csv")])
    assert code == 1
    err = capsys.readouterr().err
    assert "broken.gml" in err


def test_layout_rewrites_positions(tmp_path):
    target = tmp_path / "map.json"
    target.write_text(fixture_path("roe_map.json").read_text(encoding="utf-8"),
                      encoding="utf-8")
    code = main(["layout", "--map", str(target), "--seed", "7", "--iterations", "50"])
    assert code == 0
    doc = json.loads(target.read_text(encoding="utf-8"))
    assert doc["layout_seed"] == 7


def test_layout_gml_roundtrip(tmp_path):
    assert main(_build_args(tmp_path)) == 0
    gml_path = tmp_path / "map.gml"
    code = main(["layout", "--map", str(gml_path), "--seed", "3",
                 "--out", str(tmp_path / "relaid.gml")])
    assert code == 0
    graph = import_gml((tmp_path / "relaid.gml").read_text(encoding="utf-8"))
    assert len(graph.nodes) == 8

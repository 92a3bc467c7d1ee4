import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from sketchforge import cli
from sketchforge.evalkit import FeatureMap, write_feature_maps

SMALL = ["--frames", "12", "--width", "256", "--height", "160", "--hold-tail", "1"]


@pytest.fixture(autouse=True)
def _serial(monkeypatch):
    monkeypatch.setenv("SKETCHFORGE_WORKERS", "1")


def run(*argv):
    return cli.main([str(a) for a in argv])


def _tree(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_parse_int_list_and_seed_scheme():
    assert cli.parse_int_list("0..4") == [0, 1, 2, 3, 4]
    assert cli.parse_int_list("2,0,1") == [2, 0, 1]
    assert cli.derive_seed(0, 3) == cli.derive_seed(0, 3) != cli.derive_seed(1, 3)
    with pytest.raises(ValueError):
        cli.parse_int_list("a..b")


def test_usage_errors_exit_64(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        run("gen-shapes", "--relation", "stacking", "--out", tmp_path)
    assert e.value.code == 64
    with pytest.raises(SystemExit) as e:
        run("nonsense")
    assert e.value.code == 64


def test_gen_shapes_counts_and_layout(tmp_path, capsys):
    assert run("gen-shapes", "--relation", "containment", "--seeds", "0..4", "--out", tmp_path, *SMALL) == 0
    assert "5 compositions x 3 orders = 15 samples" in capsys.readouterr().out
    lines = (tmp_path / "manifest.jsonl").read_text().splitlines()
    assert len(lines) == 16
    sample = tmp_path / "containment-n3-c0-o1"
    assert len(list(sample.glob("frame_*.ppm"))) == 12
    for name in ("prompt.txt", "timeline.json", "document.json", "steps.json", "regions.json"):
        assert (sample / name).is_file()
    comp = json.loads((tmp_path / "compositions" / "containment-n3-c0.json").read_text())
    assert comp["orders"][0] == [0, 1, 2] and len(comp["orders"]) == 3
    meta = json.loads((tmp_path / "run.json").read_text())
    assert meta["config"]["frames"] == 12 and "version" in meta


def test_gen_shapes_two_shapes_clamps_to_available_orders(tmp_path, capsys):
    assert run("gen-shapes", "--relation", "adjacency", "--n", 2, "--seeds", "0..4", "--out", tmp_path, *SMALL) == 0
    assert "= 10 samples" in capsys.readouterr().out
    assert run("gen-shapes", "--relation", "adjacency", "--n", 2, "--count", 3, "--out", tmp_path / "x", *SMALL) == 2


def test_render_default_and_small(tmp_path):
    svg = tmp_path / "two.svg"
    svg.write_text('<svg xmlns="http://www.w3.org/2000/svg" width="64" height="64">'
                   '<path d="M5 5 L60 5" stroke="black"/><path d="M5 30 C 20 60 40 0 60 30" stroke="black"/></svg>')
    assert run("render", svg, "--out", tmp_path / "d") == 0
    frames = sorted((tmp_path / "d").glob("frame_*.ppm"))
    assert len(frames) == 81
    assert frames[0].read_bytes().startswith(b"P6\n832 480\n255\n")
    assert run("render", svg, "--frames", 9, "--width", 64, "--height", 64, "--order", "1,0",
               "--out", tmp_path / "s") == 0
    assert len(list((tmp_path / "s").glob("frame_*.ppm"))) == 9
    tl = json.loads((tmp_path / "s" / "timeline.json").read_text())
    assert [e["stroke_id"] for e in tl["entries"]] == [1, 0]


def test_render_budget_and_brush_errors(tmp_path):
    paths = "".join(f'<path d="M1 {i} L50 {i}" stroke="black"/>' for i in range(100))
    svg = tmp_path / "many.svg"
    svg.write_text(f'<svg xmlns="http://www.w3.org/2000/svg" width="64" height="128">{paths}</svg>')
    assert run("render", svg, "--frames", 81, "--out", tmp_path / "o") == 2
    two = tmp_path / "two.svg"
    two.write_text('<svg xmlns="http://www.w3.org/2000/svg" width="64" height="64">'
                   '<path d="M5 5 L60 5" stroke="black"/></svg>')
    assert run("render", two, "--brush", "dots", "--brushes-dir", tmp_path / "none", "--out", tmp_path / "b") == 2
    assert run("render", two, "--brush", "nope", "--out", tmp_path / "b") == 64
    assert run("render", two, "--color", "ultraviolet", "--out", tmp_path / "b") == 64
    assert run("render", two, "--brush", "dots", "--color", "teal", "--frames", 9, "--out", tmp_path / "b") == 0


@pytest.mark.parametrize("seeds, count, expected", [("0..4", 3, 720), ("0..6", 1, 336)])
def test_augment_dry_run_count_law(tmp_path, capsys, seeds, count, expected):
    run("gen-shapes", "--relation", "grouping", "--seeds", seeds, "--count", count, "--out", tmp_path, *SMALL)
    capsys.readouterr()
    assert run("augment", "--manifest", tmp_path / "manifest.jsonl", "--dry-run") == 0
    assert f"x 6 brushes x 8 colors = {expected} samples" in capsys.readouterr().out


def test_augment_writes_and_rejects_empty_selection(tmp_path, capsys):
    run("gen-shapes", "--relation", "adjacency", "--n", 2, "--count", 1, "--out", tmp_path / "g", *SMALL)
    assert run("augment", "--manifest", tmp_path / "g" / "manifest.jsonl", "--brushes", "dots,splatter",
               "--colors", "black,teal", "--out", tmp_path / "a") == 0
    lines = (tmp_path / "a" / "manifest.jsonl").read_text().splitlines()
    assert len(lines) == 5
    assert (tmp_path / "a" / "adjacency-n2-c0-o0-dots-teal_conditioning.ppm").is_file()
    assert run("augment", "--manifest", tmp_path / "g" / "manifest.jsonl", "--brushes", "", "--dry-run") == 64
    assert run("augment", "--manifest", tmp_path / "missing.jsonl", "--dry-run") == 2


def test_eval_sample_manifest_and_blank(tmp_path, capsys):
    run("gen-shapes", "--relation", "overlap", "--seeds", "0..1", "--out", tmp_path / "g", *SMALL)
    sample = tmp_path / "g" / "overlap-n3-c0-o2"
    order = json.loads((tmp_path / "g" / "compositions" / "overlap-n3-c0.json").read_text())["orders"][2]
    assert run("eval", sample, "--regions", sample / "regions.json", "--target-order", ",".join(map(str, order)),
               "--out", tmp_path / "e") == 0
    rep = json.loads((tmp_path / "e" / "report.json").read_text())
    assert rep["multi_stroke_ratio"] == 0.0 and rep["accumulation"][-1] == 1.0 and rep["tau"] == 1.0
    assert (tmp_path / "e" / "curve.csv").read_text().startswith("frame_index,value\n")
    assert (tmp_path / "e" / "curve.svg").read_text().startswith("<svg")
    assert run("eval", tmp_path / "g" / "manifest.jsonl", "--out", tmp_path / "m") == 0
    summary = json.loads((tmp_path / "m" / "summary.json").read_text())
    assert summary["samples"] == 6 and summary["multi_stroke_ratio"] == 0.0 and summary["mean_tau"] == 1.0
    blank = tmp_path / "blank"
    blank.mkdir()
    for i in range(3):
        (blank / f"frame_{i:05d}.ppm").write_bytes(b"P6\n4 4\n255\n" + b"\xff" * 48)
    assert run("eval", blank, "--out", tmp_path / "x") == 2


def test_flow_demo(capsys):
    assert run("flow-demo", "--steps", "1,7,50") == 0
    out = capsys.readouterr().out
    assert out.strip().endswith("PASS (tolerance 1e-12)")
    assert len([ln for ln in out.splitlines() if ln.strip()[:2].strip().isdigit()]) == 3
    assert run("flow-demo", "--shape", "scalar", "--steps", "3") == 0
    again = capsys.readouterr().out
    run("flow-demo", "--shape", "scalar", "--steps", "3")
    assert capsys.readouterr().out == again


def test_export_brushes_and_style_distance(tmp_path, capsys):
    assert run("export-brushes", "--out", tmp_path / "br") == 0
    assert len(list((tmp_path / "br").glob("*.png"))) == 6
    assert run("render", tmp_path / "br" / "palette.json", "--out", tmp_path / "x") == 2
    rng = np.random.default_rng(0)
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    write_feature_maps(a, [FeatureMap(rng.normal(size=(2, 3, 3)))])
    write_feature_maps(b, [FeatureMap(rng.normal(size=(2, 3, 3)))])
    capsys.readouterr()
    assert run("style-distance", a, a) == 0
    assert float(capsys.readouterr().out) == 0.0


def test_pipeline_is_byte_identical(tmp_path):
    trees = []
    root = tmp_path / "run"
    for _ in range(2):
        shutil.rmtree(root, ignore_errors=True)
        run("gen-shapes", "--relation", "adjacency", "--seeds", "0..1", "--out", root / "g", *SMALL)
        comp = root / "g" / "compositions" / "adjacency-n3-c1.json"
        run("render", comp, "--order", "2,1,0", "--frames", 12, "--width", 256, "--height", 160,
            "--hold-tail", 1, "--out", root / "r")
        run("eval", root / "r", "--regions", root / "r" / "regions.json", "--target-order", "2,1,0",
            "--out", root / "e")
        trees.append(_tree(root))
    assert trees[0].keys() == trees[1].keys()
    assert trees[0] == trees[1]

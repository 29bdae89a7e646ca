import csv
import json

import numpy as np
import pytest

from gauge_integral import cli
from gauge_integral.convex import ConvexBody, box, hausdorff

LINEAR_BOX = {"name": "linear_body", "body": {"kind": "box", "lo": [-1, -1], "hi": [1, 1]}}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_integrate_linear_body(tmp_path):
    cfg = write(tmp_path, "c.json", {"integrand": LINEAR_BOX, "tolerance": 1e-6})
    out = tmp_path / "report.json"
    assert cli.main(["integrate", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    rep = json.loads(out.read_text())
    assert rep["status"] == "CONVERGED"
    body = ConvexBody(rep["result"]["vertices"])
    assert hausdorff(body, box([-0.5, -0.5], [0.5, 0.5])) <= 2e-6
    first = out.read_bytes()
    assert cli.main(["integrate", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    assert out.read_bytes() == first


def test_integrate_not_integrable_still_exits_zero(tmp_path):
    cfg = write(tmp_path, "c.json", {"integrand": {"name": "single_poly", "powers": [1.0]},
                                     "tolerance": 1e-9, "max_doublings": 6})
    out = tmp_path / "r.json"
    assert cli.main(["integrate", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    assert json.loads(out.read_text())["status"] == "NOT-INTEGRABLE-AT-TOLERANCE"


@pytest.mark.parametrize("raw", [
    {"integrand": LINEAR_BOX, "tolerance": 0.0},
    {"integrand": LINEAR_BOX, "tolerance": -1e-3},
    {"integrand": {"name": "no_such_thing"}, "tolerance": 1e-3},
    {"tolerance": 1e-3},
    {"integrand": LINEAR_BOX},
    [1, 2, 3],
])
def test_integrate_config_errors(tmp_path, raw, capsys):
    cfg = write(tmp_path, "c.json", raw)
    assert cli.main(["integrate", "--config", cfg]) == 2
    assert "error" in capsys.readouterr().err


def test_unreadable_config(tmp_path):
    assert cli.main(["integrate", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["convergence", "--config", str(bad)]) == 2


def test_embedded_3d_path(tmp_path):
    cfg = write(tmp_path, "c.json", {"integrand": {
        "name": "linear_body", "body": {"kind": "box", "lo": [-1, -1, -1], "hi": [1, 1, 1]}},
        "tolerance": 1e-4})
    out = tmp_path / "r.json"
    assert cli.main(["integrate", "--config", cfg, "--path", "embedded", "--dim", "3",
                     "--out", str(out), "--quiet"]) == 0
    rep = json.loads(out.read_text())
    assert rep["path"] == "EMBEDDED" and rep["result"]["type"] == "support_vector"
    assert rep["result"]["grid_size"] == 242


def test_verify_small_manifest(tmp_path):
    manifest = write(tmp_path, "m.json", [
        {"theorem_id": "thm_deco2", "fixture": "linear_triangle2", "params": {}},
        {"theorem_id": "thm_deco2", "fixture": "translate_box_1", "params": {}}])
    out = tmp_path / "v.json"
    assert cli.main(["verify", "--config", manifest, "--out", str(out), "--quiet"]) == 0
    rows = read_csv(tmp_path / "v.csv")
    assert rows[0] == ["theorem_id", "fixture", "verdict", "max_residual"]
    assert [r[2] for r in rows[1:]] == ["SKIPPED", "PASS"]
    assert [r["verdict"] for r in json.loads(out.read_text())] == ["SKIPPED", "PASS"]


def test_verify_unknown_theorem(tmp_path):
    manifest = write(tmp_path, "m.json", [{"theorem_id": "thm_unknown", "fixture": "linear_box2"}])
    assert cli.main(["verify", "--config", manifest, "--out", str(tmp_path / "v.json")]) == 2
    assert not (tmp_path / "v.json").exists()


def test_verify_fail_exits_one(tmp_path, monkeypatch):
    from gauge_integral import theorems

    def failing(F, p):
        return theorems.TheoremReport("thm_fake", {}, {"r": 1.0}, {"r": 0.0}).finish()

    monkeypatch.setitem(theorems.CHECKS, "thm_fake", failing)
    manifest = write(tmp_path, "m.json", [{"theorem_id": "thm_fake", "fixture": "linear_box2"}])
    assert cli.main(["verify", "--config", manifest, "--out", str(tmp_path / "v.json"),
                     "--quiet"]) == 1


def test_verify_seed_reaches_randomized_checks(tmp_path):
    manifest = write(tmp_path, "m.json", [
        {"theorem_id": "thm_embedding_isometry", "fixture": None, "params": {"pairs": 20}}])
    out = tmp_path / "v.json"
    assert cli.main(["verify", "--config", manifest, "--out", str(out), "--seed", "11",
                     "--quiet"]) == 0
    assert json.loads(out.read_text())[0]["fixture"]["seed"] == 11


def test_convergence_linear_body(tmp_path):
    cfg = write(tmp_path, "c.json", {"integrand": LINEAR_BOX, "levels": {"from": 1, "to": 12},
                                     "oracle": {"kind": "box", "lo": [-0.5, -0.5], "hi": [0.5, 0.5]},
                                     "record_timing": False})
    out = tmp_path / "conv.csv"
    assert cli.main(["convergence", "--config", cfg, "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["level", "cells", "hausdorff_gap", "tag_perturbation_gap",
                       "oracle_distance", "elapsed_ms"]
    body = rows[1:]
    assert [int(r[0]) for r in body] == list(range(1, 13))
    assert [int(r[1]) for r in body] == [2 ** k for k in range(1, 13)]
    gaps = np.array([float(r[2]) for r in body])
    tags = np.array([float(r[3]) for r in body])
    assert np.all(gaps <= 1e-12)  # midpoint sums of a linear integrand are exact
    assert np.allclose(tags[1:] / tags[:-1], 0.5, rtol=0.1)
    assert all(r[-1] == "0.000" for r in body)
    first = out.read_bytes()
    cli.main(["convergence", "--config", cfg, "--out", str(out)])
    assert out.read_bytes() == first


def test_convergence_constant_gaps_zero(tmp_path):
    cfg = write(tmp_path, "c.json", {"integrand": {"name": "constant", "body":
                                                   {"kind": "box", "lo": [0, 0], "hi": [1, 1]}},
                                     "levels": [0, 3, 6]})
    out = tmp_path / "conv.csv"
    assert cli.main(["convergence", "--config", cfg, "--out", str(out)]) == 0
    rows = read_csv(out)[1:]
    assert rows[0][2] == "nan"
    assert all(float(r[3]) <= 1e-15 for r in rows)
    assert all(float(r[2]) <= 1e-15 for r in rows[1:])


def test_convergence_bracket_bound(tmp_path):
    cfg = write(tmp_path, "c.json", {"integrand": {"name": "sym_interval", "dim": 1},
                                     "mode": "bracket", "levels": [1, 4, 7]})
    out = tmp_path / "conv.csv"
    assert cli.main(["convergence", "--config", cfg, "--out", str(out)]) == 0
    rows = read_csv(out)
    assert "bound" in rows[0]
    col = rows[0].index("bound")
    for r in rows[1:]:
        n = 2 ** int(r[0])
        assert int(r[1]) == n
        assert float(r[col]) == 2 * 1.0 / n


def test_convergence_gauge_mode(tmp_path):
    cfg = write(tmp_path, "c.json", {"integrand": LINEAR_BOX, "mode": "gauge",
                                     "gauge": {"kind": "affine", "offset": 0.05, "slope": 0.5},
                                     "levels": [0, 1, 2]})
    assert cli.main(["convergence", "--config", cfg, "--out", str(tmp_path / "g.csv")]) == 0
    cells = [int(r[1]) for r in read_csv(tmp_path / "g.csv")[1:]]
    assert cells == sorted(cells) and cells[0] > 1


def test_convergence_bad_mode(tmp_path):
    cfg = write(tmp_path, "c.json", {"integrand": LINEAR_BOX, "mode": "spiral"})
    assert cli.main(["convergence", "--config", cfg]) == 2


def test_embed_examples(tmp_path):
    cfg = write(tmp_path, "e.json", {"dimension": 1, "bodies": [
        {"kind": "interval", "lo": 0, "hi": 1}, {"kind": "interval", "lo": 0, "hi": 2}]})
    out = tmp_path / "e.csv"
    assert cli.main(["embed", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    rows = read_csv(out)
    vals = np.array(rows[1:], dtype=float)
    assert vals.tolist() == [[1.0, 0.0], [2.0, 0.0]]
    assert np.max(np.abs(vals[0] - vals[1])) == 1.0


def test_embed_empty_and_translate(tmp_path):
    cfg = write(tmp_path, "e.json", {"dimension": 2, "bodies": []})
    out = tmp_path / "e.csv"
    assert cli.main(["embed", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    rows = read_csv(out)
    assert len(rows) == 1 and len(rows[0]) == 64
    cfg = write(tmp_path, "e.json", {"dimension": 2, "bodies": [
        {"kind": "box", "lo": [0, 0], "hi": [1, 1]}, {"kind": "box", "lo": [1, 0], "hi": [2, 1]}]})
    assert cli.main(["embed", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    vals = np.array(read_csv(out)[1:], dtype=float)
    assert abs(np.max(np.abs(vals[0] - vals[1])) - 1.0) <= 1e-12


def test_embed_bad_body(tmp_path):
    cfg = write(tmp_path, "e.json", {"dimension": 2, "bodies": [{"vertices": [[0, 0, 0]]}]})
    assert cli.main(["embed", "--config", cfg, "--quiet"]) == 2
    cfg = write(tmp_path, "e.json", {"dimension": 2, "bodies": ["square"]})
    assert cli.main(["embed", "--config", cfg, "--quiet"]) == 2


def test_usage_errors():
    assert cli.main([]) == 2
    assert cli.main(["integrate"]) == 2
    assert cli.main(["frobnicate"]) == 2

import json

import pytest

from tracebound.cli import main
from tracebound.io import read_graph

PATH = "2 3 2\n0 1\n1 2\n"
K22 = "2 4 4\n0 2\n0 3\n1 2\n1 3\nclasses\n0 1\n2 3\n"
TREE = "2 6 5\n0 3\n0 4\n1 4\n1 5\n2 5\nclasses\n0 1 2\n3 4 5\n"


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, text in {"path": PATH, "k22": K22, "tree": TREE}.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        out[name] = str(p)
    out["dir"] = tmp_path
    return out


def test_subdivide_and_certify(files, capsys):
    out = str(files["dir"] / "sub.json")
    assert main(["subdivide", files["path"], out, "--certify"]) == 0
    assert json.loads(capsys.readouterr().out)["certified"]
    assert read_graph(out).e == 4


def test_family_tsv(files):
    out = files["dir"] / "fam.tsv"
    assert main(["family", "2", "2", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 5


def test_contains_exit_codes(files, capsys):
    assert main(["contains", "--target", files["k22"], "--host", files["k22"], "--witness"]) == 0
    assert json.loads(capsys.readouterr().out)["contains"]
    assert main(["contains", "--target", files["k22"], "--host", files["tree"]]) == 1


def test_count(files, capsys):
    assert main(["count", "--pattern", files["k22"], "--host", files["k22"]]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_embed_json_report(files):
    out = files["dir"] / "rep.json"
    code = main(["embed", "--graph", files["k22"], "--target", files["k22"], "-d", "2", "--out", str(out)])
    rep = json.loads(out.read_text())
    assert code in (0, 1) and rep["success"] == (code == 0)
    assert rep["success"] or rep["failure"]["stage"]


def test_embed_domain_error(files):
    assert main(["embed", "--graph", files["k22"], "--target", files["k22"], "-d", "1"]) == 2


def test_missing_file_is_domain_error(files):
    assert main(["contains", "--target", "no/such/file", "--host", files["k22"]]) == 2


def test_resource_error(files):
    assert main(["family", "5", "5"]) == 3


def test_exponents(files):
    out = files["dir"] / "exp.tsv"
    assert main(["exponents", "--r-max", "3", "--d-max", "2", "--k-max", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("kind\tr\td") and len(lines) == 1 + 4 + 2


def test_scan_with_config(files):
    cfg = files["dir"] / "cfg.json"
    out = files["dir"] / "scan.csv"
    cfg.write_text(json.dumps({"target": "edge", "d": 1, "n": [8], "alphas": [1.0], "trials": 3, "out": str(out)}))
    assert main(["scan", "--config", str(cfg)]) == 0
    text = out.read_text().splitlines()
    assert text[0].startswith("# schema") and text[2].startswith("8,1.0,8,3,3,1.0")


def test_plant(files):
    out = files["dir"] / "plant.csv"
    assert main(["plant", "--target", "path2", "-d", "2", "--n", "10", "--noise-density", "0.5",
                 "--trials", "2", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4


def test_bad_arguments():
    assert main(["family"]) == 2

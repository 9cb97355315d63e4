import json
import subprocess
import sys

import networkx as nx
import numpy as np
import pytest

from srgforge import formats
from srgforge.cli import main
from srgforge.gf import cyclotomic_class
from srgforge.pds import PdsCandidate, derive_S


@pytest.fixture
def paley9(gf9):
    return PdsCandidate(gf9.group, cyclotomic_class(gf9, 2, 0))


def test_system_roundtrip(tmp_path, sys_m2q3):
    path = tmp_path / "s.json"
    formats.save_system(sys_m2q3, path)
    back = formats.load_system(path)
    assert back.m == 2 and back.u == 9 and back.group == sys_m2q3.group
    for kind, x, y, B in sys_m2q3.items():
        assert back.block(kind, x, y) == B
    assert back.provenance == sys_m2q3.provenance
    formats.save_system(back, tmp_path / "t.json")
    assert path.read_bytes() == (tmp_path / "t.json").read_bytes()


def test_system_bad_files(tmp_path, sys_m2q3):
    p = tmp_path / "x.json"
    p.write_text("{nope")
    with pytest.raises(formats.FormatError):
        formats.load_system(p)
    data = formats.system_to_dict(sys_m2q3)
    data["blocks"]["top"]["0,0"] = [5, 3]
    p.write_text(json.dumps(data))
    with pytest.raises(formats.FormatError):
        formats.load_system(p)
    data = formats.system_to_dict(sys_m2q3)
    data["kind"] = "pds"
    p.write_text(json.dumps(data))
    with pytest.raises(formats.FormatError):
        formats.load_system(p)


def test_candidate_roundtrip(tmp_path, sys_m2q3):
    c = derive_S(sys_m2q3, 1)
    formats.save_candidate(c, tmp_path / "c.json")
    back = formats.load_candidate(tmp_path / "c.json")
    assert back.D == c.D and back.predicted == c.predicted and back.provenance == c.provenance


def test_graph6_against_networkx(paley9):
    data = formats.to_graph6(paley9.D)
    g = nx.from_graph6_bytes(data)
    assert g.number_of_nodes() == 9 and g.number_of_edges() == 18
    assert {d for _, d in g.degree()} == {4}
    A = formats.from_graph6(data)
    assert np.array_equal(A, nx.to_numpy_array(g, nodelist=range(9), dtype=np.uint8))
    # and back through networkx's encoder
    assert nx.to_graph6_bytes(g, header=False).strip() == data


def test_graph6_large(sys_m2q3):
    c = derive_S(sys_m2q3, 0)
    data = formats.to_graph6(c.D, header=True)
    assert data.startswith(b">>graph6<<~")   # 81 vertices uses the long size prefix
    g = nx.from_graph6_bytes(data)
    assert {d for _, d in g.degree()} == {40}
    for i in (0, 17, 80):
        nbrs = {j for j in g[i]}
        assert nbrs == set(c.group.add(i, c.D.indices()).tolist())


def test_edge_lines(paley9):
    lines = list(formats.edge_lines(paley9.D))
    assert len(lines) == 18
    pairs = [tuple(map(int, l.split())) for l in lines]
    assert all(i < j for i, j in pairs) and len(set(pairs)) == 18


def run(*argv):
    return main([str(a) for a in argv])


def test_cli_pipeline(tmp_path, capsys):
    s = tmp_path / "sys.json"
    assert run("construct", "--m", 2, "--q", 3, "--out", s) == 0
    assert run("verify", s, "--report", tmp_path / "r.json") == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["passed"] and [c["condition"] for c in rep["conditions"]] == [1, 2, 3, 4, 5]
    assert run("verify", s, "--method", "fast", "--conditions", "3") == 0
    assert run("derive", s, "--family", "S", "--x", 0, "--out", tmp_path / "s0.json") == 0
    assert run("derive", s, "--family", "S", "--x", 1, "--out", tmp_path / "s1.json") == 0
    assert run("derive", s, "--family", "T", "--y1", 1, "--y2", 1, "--out", tmp_path / "t.json") == 0
    capsys.readouterr()
    assert run("check", tmp_path / "s0.json") == 0
    out = capsys.readouterr().out
    assert "81 40 19 20" in out and "conference" in out
    assert run("check", tmp_path / "t.json", "--method", "char", "--backend", "fast") == 0
    assert run("fuse", tmp_path / "s0.json", tmp_path / "s0.json") == 1
    assert run("fuse", tmp_path / "s0.json", tmp_path / "s1.json", "--out", tmp_path / "f.json") == 0
    assert run("export", tmp_path / "s0.json", "--out", tmp_path / "g.g6") == 0
    assert nx.from_graph6_bytes((tmp_path / "g.g6").read_bytes().strip()).number_of_edges() == 81 * 20
    assert run("export", tmp_path / "s0.json", "--format", "edges", "--out", tmp_path / "e.txt") == 0
    assert len((tmp_path / "e.txt").read_text().splitlines()) == 81 * 20


def test_cli_mutated_system_fails(tmp_path, sys_m2q3, capsys):
    data = formats.system_to_dict(sys_m2q3)
    blk = data["blocks"]["top"]["1,1"]
    missing = next(g for g in range(1, 81) if g not in blk)
    data["blocks"]["top"]["1,1"] = sorted(blk[1:] + [missing])
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    assert run("verify", p, "--report", tmp_path / "r.json") == 1
    rep = json.loads((tmp_path / "r.json").read_text())
    assert not rep["passed"]
    assert any(c["witness"] for c in rep["conditions"])
    assert "FAIL" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    assert run("verify", tmp_path / "missing.json") == 2
    assert run("construct", "--m", 2, "--q", 5) == 2
    assert run("construct", "--m", 2, "--q", 4) == 2
    assert run("bogus") == 2
    assert run("params", "--theorem", "main2", "--u", 9, "--m", 2, "--i", 0) == 2
    capsys.readouterr()
    assert run("params", "--theorem", "main1", "--u", 9, "--m", 2, "--i", 1) == 0
    assert capsys.readouterr().out.strip() == "81 40 19 20"
    assert run("params", "--theorem", "main2", "--u", 9, "--m", 2, "--i", 0, "--j", 1, "--form", 2) == 0
    assert capsys.readouterr().out.strip() == "81 48 27 30"


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "srgforge", "params", "--theorem", "main1",
                          "--u", "25", "--m", "3", "--i", "1"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "625 208 63 72"

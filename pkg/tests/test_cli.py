import json
import os

import pytest

from quotsing.cli import atlas_inputs, atlas_rows, main, run_atlas
from quotsing.hjcf import catalan_bound, hj_expand, multiplicity


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", "11/4")
    assert code == 0 and "[3, 4]" in out and "multiplicity 5" in out
    code, out, _ = run(capsys, "expand", "[3,4]", "--json")
    js = json.loads(out)
    assert js["fraction"] == "11/4" and js["chain"] == [3, 4]
    assert js["cartier_index"] == {"K": 11, "K+B": 11, "K+D": 1}


def test_expand_t_singularity(capsys):
    _, out, _ = run(capsys, "expand", "18/5", "--json")
    js = json.loads(out)
    assert js["t_params"] == [2, 3, 1]
    assert js["cartier_index"]["K"] == 3


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "* - 4 - 3")
    assert code == 0 and "CyclicB" in out and "11/3" in out


def test_components(capsys):
    _, out, _ = run(capsys, "components", "4", "--json")
    js = json.loads(out)
    assert js["graph"] == "4"
    assert sorted(c["dimension"] for c in js["components"]) == [1, 3]
    _, out, _ = run(capsys, "components", "* - 4 - *", "--json")
    assert sorted(c["dimension"] for c in json.loads(out)["components"]) == [1, 2]
    _, out, _ = run(capsys, "components", "4", "--ksb-pair", "--json")
    assert sorted(c["dimension"] for c in json.loads(out)["components"]) == [1, 2]


def test_ksba(capsys):
    code, out, _ = run(capsys, "ksba", "* - 4 - 3")
    assert code == 0 and "d=3/5" in out
    _, out, _ = run(capsys, "ksba", "* - 4 - 3", "--d", "0..1/2", "--json")
    assert json.loads(out)["components"] == []


def test_pmods(capsys):
    _, out, _ = run(capsys, "pmods", "3 - 3", "--mode", "M")
    assert "[4/1] - 1 - [4/1]" in out
    _, out, _ = run(capsys, "pmods", "3 - 3", "--mode", "Q", "--json")
    assert len(json.loads(out)["modifications"]) >= 2


def test_cover(capsys):
    _, out, _ = run(capsys, "cover", "11/4", "--json")
    assert json.loads(out)["N"] == 56
    _, out, _ = run(capsys, "cover", "56/15", "--inverse", "--json")
    assert (json.loads(out)["n"], json.loads(out)["q"]) == (11, 4)


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--excess", "1", "--json")
    assert code == 0 and json.loads(out)["failures"] == []


@pytest.mark.parametrize("argv,code", [
    (["expand", "x"], 2),
    (["ksba", "4 - 3"], 2),
    (["expand", "4/2"], 1),
    (["cover", "8/3", "--inverse"], 1),
    (["classify", "2 - 2 - ("], 2),
    (["frobnicate"], 2),
    (["atlas", "--mode", "def", "--nmax", "5", "--out", "/nonexistent/dir/atlas.jsonl"], 3),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_deterministic(capsys):
    first = run(capsys, "components", "3 - 3 - 3", "--json")[1]
    assert run(capsys, "components", "3 - 3 - 3", "--json")[1] == first


# ---------------------------------------------------------------- atlas

def test_atlas_rows_shape():
    rows = atlas_rows("def", 11, 4)
    keys = {"graph", "mode", "n", "q", "component_index", "dimension", "d", "singularities", "generic_fiber"}
    assert rows and all(keys <= set(r) for r in rows)
    assert [r["component_index"] for r in rows] == list(range(len(rows)))


def test_atlas_def_respects_catalan(tmp_path):
    out = tmp_path / "def.jsonl"
    assert main(["atlas", "--mode", "def", "--nmax", "20", "--out", str(out)]) == 0
    counts = {}
    for line in out.read_text().splitlines():
        row = json.loads(line)
        counts[(row["n"], row["q"])] = counts.get((row["n"], row["q"]), 0) + 1
    assert set(counts) == set(atlas_inputs(20))
    for (n, q), k in counts.items():
        assert k <= catalan_bound(multiplicity(hj_expand(n, q)))


def test_atlas_ksba_finds_series(tmp_path):
    out = tmp_path / "b.jsonl"
    run_atlas("ksba-b", 25, str(out))
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    # [4, 3] = 11/3 and [4, 5] = 19/5
    hits = {(r["n"], r["q"], r["d"]) for r in rows if r["target"].startswith("* - [4/1] - ")}
    assert (11, 3, "3/5") in hits and (19, 5, "7/9") in hits


def test_atlas_resume_matches(tmp_path):
    full = tmp_path / "full.jsonl"
    part = tmp_path / "part.jsonl"
    run_atlas("ksb-pair-cyclic", 18, str(full))
    run_atlas("ksb-pair-cyclic", 18, str(part), checkpoint_every=5, max_graphs=40)
    assert os.path.exists(str(part) + ".ckpt")
    with open(part, "ab") as fh:
        fh.write(b'{"partial": ')  # a torn line past the checkpoint
    run_atlas("ksb-pair-cyclic", 18, str(part), resume=True, checkpoint_every=5)
    assert part.read_bytes() == full.read_bytes()
    assert json.loads(open(str(part) + ".ckpt").read())["done"]


def test_atlas_resume_rejects_other_run(tmp_path, capsys):
    out = tmp_path / "a.jsonl"
    run_atlas("def", 10, str(out), checkpoint_every=1, max_graphs=3)
    code = main(["atlas", "--mode", "def", "--nmax", "12", "--out", str(out), "--resume"])
    assert code == 2


def test_atlas_parallel_matches(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_atlas("ksb-pair-dihedral", 14, str(a))
    run_atlas("ksb-pair-dihedral", 14, str(b), jobs=2)
    assert a.read_bytes() == b.read_bytes()


def test_atlas_empty(tmp_path):
    out = tmp_path / "e.jsonl"
    assert run_atlas("def", 1, str(out)) == 0
    assert out.read_text() == ""

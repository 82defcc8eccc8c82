import json
import subprocess
import sys

import pytest

from hopfcert.cli import main
from hopfcert.report import RunConfig, dumps, run
from hopfcert.selftest import DEFAULT_MATRIX, run_checks


def cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "hopfcert", *args], capture_output=True, text=True,
                          env=env)


def test_verify_report(capsys):
    assert main(["verify", "--family", "psl2", "--q", "7", "--m", "klein:x=2,y=3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["schema"] == 1
    assert out["tool"]["name"] == "hopfcert"
    assert out["config"] == {"command": "verify", "family": "PSL2", "q": 7, "m": "klein:x=2,y=3"}
    assert out["payload"]["value"] == "1/4"
    assert out["payload"]["conclusion"] == "obstructed"


@pytest.mark.parametrize("args,value", [
    (["--family", "sz", "--q", "8", "--m", "Z2x2"], "22295/4"),
    (["--family", "sl3", "--q", "3", "--m", "L3"], "64/9"),
    (["--family", "sl2", "--q", "8", "--m", "sl2:E=1,g"], "3087/4"),
])
def test_verify_examples(capsys, args, value):
    assert main(["verify", *args]) == 0
    assert json.loads(capsys.readouterr().out)["payload"]["value"] == value


@pytest.mark.parametrize("q,classes,containing", [(5, 1, None), (17, 2, None), (11, 1, 3)])
def test_classify(capsys, q, classes, containing):
    assert main(["classify", "--family", "psl2", "--q", str(q)]) == 0
    k = json.loads(capsys.readouterr().out)["payload"]["klein"]
    assert k["class_count"] == classes
    if containing is not None:
        assert k["containing_hbar"] == containing


def test_character_and_enumerate(capsys):
    assert main(["character", "--family", "sl3", "--q", "3"]) == 0
    d = json.loads(capsys.readouterr().out)["payload"]
    assert [f["value"] for f in d["fibers"]] == ["208", "4", "28"]
    assert d["closed_form_agrees"] and d["support_is_P"]
    assert main(["enumerate", "--family", "psl2", "--q", "5"]) == 0
    d = json.loads(capsys.readouterr().out)["payload"]
    assert d["group"]["order"] == d["expected_order"] == 60
    assert d["element_orders"] == {"1": 1, "2": 15, "3": 20, "5": 24}


def test_tau_override(capsys):
    # tau = (1 0; 2 1) in SL2(4) meets U trivially; no closed form applies
    assert main(["verify", "--family", "sl2", "--q", "4", "--m", "U", "--tau", "1,0,2,1"]) == 0
    d = json.loads(capsys.readouterr().out)["payload"]
    assert d["closed_form"] is None and d["methods_agree"]


@pytest.mark.parametrize("args", [
    ["verify", "--family", "psl2", "--q", "6", "--m", "U"],
    ["verify", "--family", "sl2", "--q", "5", "--m", "U"],
    ["verify", "--family", "gl2", "--q", "5", "--m", "U"],
    ["verify", "--family", "sl2", "--q", "5"],
    ["verify", "--family", "sl2", "--q", "4", "--m", "U", "--tau", "1,1,1,1"],
    ["verify", "--family", "sl2", "--q", "4", "--m", "U", "--tau", "1,0,0,1"],
    ["verify", "--family", "psl2", "--q", "3", "--m", "klein"],
    ["classify", "--family", "sl2", "--q", "5"],
    ["enumerate", "--family", "sl2", "--q", "5", "--bound", "10"],
    ["character", "--family", "psl2", "--q", "7", "--kind", "phi_5"],
    ["selftest", "--workers", "0"],
])
def test_exit_config(args):
    assert main(args) == 2


def test_exit_bound():
    assert main(["verify", "--family", "sl2", "--q", "9", "--m", "U", "--bound", "100"]) == 4


def test_exit_invariant_on_corrupted_cache(tmp_path):
    env = {"HOPFCERT_CACHE_DIR": str(tmp_path), "PATH": "/usr/bin:/bin"}
    import os
    env = {**os.environ, **env}
    assert cli("enumerate", "--family", "sl2", "--q", "4", env=env).returncode == 0
    path = next(tmp_path.glob("SL2_4_*.grp"))
    raw = bytearray(path.read_bytes())
    raw[-1] ^= 0xFF
    path.write_bytes(bytes(raw))
    r = cli("selftest", env=env)
    assert r.returncode == 3
    assert "checksum" in r.stderr
    r = cli("verify", "--family", "sl2", "--q", "4", "--m", "U", env=env)
    assert r.returncode == 3


def test_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--family", "sl3", "--q", "3", "--m", "M2"]
    assert main([*args, "--output", str(a)]) == 0
    assert main([*args, "--output", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    r = cli(*args)
    assert r.returncode == 0 and r.stdout == a.read_text()
    assert "finished in" in r.stderr and "finished" not in r.stdout


def test_selftest_subset_is_worker_independent():
    items = [it for it in DEFAULT_MATRIX if it[0] in (2, 4)]
    one = run_checks(items, workers=1)
    two = run_checks(items, workers=2)
    assert json.dumps(one, sort_keys=True) == json.dumps(two, sort_keys=True)
    assert all(r["pass"] for r in one)


def test_report_echo_excludes_runtime_knobs():
    cfg = RunConfig("classify", family="psl2", q=5, workers=3, cache_dir="/tmp/hc", output="x")
    rep = run(cfg)
    assert set(rep["config"]) == {"command", "family", "q"}
    assert dumps(rep).endswith("\n")

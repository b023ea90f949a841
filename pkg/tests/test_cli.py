import json
import shutil
import subprocess
import sys

import pytest

from divcorr.cli import main, run
from divcorr.report import parse_scalar, validate


def _json(argv):
    code, text, _ = run(argv)
    assert code == 0, text
    doc = json.loads(text)
    validate(doc)
    return doc


def test_correlate_example():
    doc = _json(["correlate", "--x", "10", "--a", "1", "--h", "1", "--z", "1"])
    assert doc["command"] == "correlate"
    assert parse_scalar(doc["result"]["d_value"]) == 23
    assert parse_scalar(doc["result"]["m_value"]) == 27
    assert doc["params"]["x"] == 10 and doc["params"]["z"] == "1"


def test_identity_hb_example():
    doc = _json(["identity-hb", "--r", "0", "--u", "1", "--v", "2", "--K", "3", "--x", "2000", "--mode", "exact"])
    assert doc["result"]["max_abs_deviation"] == {"num": "0", "den": "1"}
    assert [parse_scalar(c) for c in doc["result"]["coefficients"]] == [
        parse_scalar({"num": "15", "den": "8"}),
        parse_scalar({"num": "-5", "den": "4"}),
        parse_scalar({"num": "3", "den": "8"}),
    ]


def test_identity_hb_negative_sign():
    doc = _json(["identity-hb", "--r", "1", "--u", "0", "--v", "1", "--K", "2", "--x", "500", "--sign", "-1"])
    assert doc["result"]["max_abs_deviation"] == {"num": "0", "den": "1"}


def test_constants_example():
    doc = _json(["constants", "--name", "titchmarsh", "--h", "1", "--P", "100000"])
    assert abs(parse_scalar(doc["result"]["value"]) - 1.943596) < 1e-6


@pytest.mark.parametrize(
    "name, extra",
    [
        ("titchmarsh-prime", []),
        ("lambda", ["--z", "1/2"]),
        ("lambda", ["--z", "0.5+0.3i", "--h", "6"]),
        ("two-squares", ["--h", "3"]),
        ("two-squares-b", []),
        ("landau-ramanujan", []),
        ("omega-leading", ["--k", "3"]),
    ],
)
def test_constants_all_names(name, extra):
    doc = _json(["constants", "--name", name, "--P", "1000", *extra])
    assert doc["result"]["prime_cutoff"] >= 1
    assert doc["result"]["error_bound"] >= 0


def test_lambda_negative_z():
    doc = _json(["constants", "--name", "lambda", "--z", "-1", "--P", "1000"])
    assert parse_scalar(doc["result"]["value"]) == 0


def test_identity_linnik():
    doc = _json(["identity-linnik", "--f", "tau-z-chi", "--q", "3", "--chi", "1", "--z", "-1", "--K", "4", "--x", "2000"])
    assert doc["result"]["mode"] == "exact"
    assert doc["result"]["max_abs_deviation"] == {"num": "0", "den": "1"}
    doc = _json(["identity-linnik", "--z", "0.5+0.3i", "--K", "2", "--x", "2000"])
    assert doc["result"]["mode"] == "float"
    assert abs(parse_scalar(doc["result"]["max_abs_deviation"])) < 1e-9


def test_sieve_json_and_csv(tmp_path):
    doc = _json(["sieve", "--f", "mobius", "--x", "12"])
    vals = [parse_scalar(v) for v in doc["result"]["values"]]
    assert vals[1:] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
    code, text, _ = run(["sieve", "--f", "mobius", "--x", "5", "--output", "csv"])
    assert code == 0 and text.splitlines() == ["n,num,den", "1,1,1", "2,-1,1", "3,-1,1", "4,0,1", "5,-1,1"]
    path = tmp_path / "mu.bin"
    code, _, _ = run(["sieve", "--f", "mobius", "--x", "50", "--table-out", str(path)])
    assert code == 0 and path.exists()


def test_sieve_class_omega():
    doc = _json(["sieve", "--f", "class-omega", "--D", "4", "--zvec", "1:1/2,3:-1", "--x", "21"])
    vals = [parse_scalar(v) for v in doc["result"]["values"]]
    assert vals[5] == parse_scalar({"num": "1", "den": "2"}) and vals[3] == -1 and vals[21] == 1 and vals[2] == 0


def test_friable_command():
    doc = _json(["friable", "--x", "1000", "--y", "10", "--w", "50", "--n", "360"])
    r = doc["result"]
    assert r["classification"] == "Split" and r["split"] == [72, 5]
    assert r["residual"] == r["split_mass"]
    doc = _json(["friable", "--x", "100", "--y", "3", "--w", "2", "--n", "12"])
    assert doc["result"]["classification"] == "Sigma_triv" and doc["result"]["split"] is None


def test_main_term_command():
    doc = _json(["main-term", "--f", "two-squares", "--x", "2000", "--D", "4"])
    assert set(doc["result"]["partials"]) == {"1.0", "4.1"}


def test_sigma_scan_and_omega():
    doc = _json(["sigma-scan", "--f", "mobius", "--x", "2000", "--R", "1,3"])
    assert [r["R"] for r in doc["result"]["rows"]] == [1, 3]
    doc = _json(["omega-correlate", "--x", "10", "--h", "1", "--z", "-1,1/2,2"])
    rows = doc["result"]["rows"]
    omega = {r["k"]: parse_scalar(r["value"]) for r in rows if r["kind"] == "omega"}
    assert omega[1] == 18 and sum(omega.values()) == 23
    xi = {r["z"]: parse_scalar(r["value"]) for r in rows if r["kind"] == "xi"}
    assert xi["-1"] == -13 and xi["2"] == 56
    doc = _json(["omega-correlate", "--x", "10", "--k", "1"])
    assert len(doc["result"]["rows"]) == 1


def test_correlate_with_sigma():
    doc = _json(["correlate", "--f", "mobius", "--x", "3000", "--h", "-2", "--R", "4"])
    assert doc["result"]["sigma_value"] is not None
    assert doc["params"]["h"] == -2


@pytest.mark.parametrize(
    "argv",
    [
        ["correlate", "--x", "10", "--z", "1/0"],
        ["correlate", "--x", "10", "--z", "abc"],
        ["correlate", "--x", "10", "--bogus", "1"],
        ["correlate", "--x", "10", "--thr", "2"],
        ["correlate", "--x", "0"],
        ["correlate", "--x", "10", "--h", "0"],
        ["sieve", "--x", "10", "--z", "0.5+0.3i", "--mode", "exact"],
        ["identity-hb", "--r", "0", "--u", "2", "--v", "2", "--K", "2", "--x", "100"],
        ["constants", "--name", "lambda", "--P", "10"],
        ["sigma-scan", "--x", "100", "--R", "a,b"],
        ["sieve", "--f", "class-omega", "--D", "4", "--x", "10"],
        ["frobnicate"],
        [],
    ],
)
def test_parameter_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    err = capsys.readouterr().err.strip()
    assert err and len(err.splitlines()) <= 2


def test_malformed_z_one_line_diagnostic(capsys):
    assert main(["correlate", "--x", "10", "--z", "1/2/3"]) == 2
    err = capsys.readouterr().err
    assert len(err.strip().splitlines()) == 1 and err.startswith("divcorr: error:")


def test_resource_error_exit_3(capsys):
    assert main(["sieve", "--x", str(10**14)]) == 3
    assert "resource" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["correlate", "--f", "mobius", "--x", "20000", "--h", "3", "--R", "4", "--mode", "float"],
        ["sigma-scan", "--f", "mobius", "--x", "20000", "--R", "2,8"],
        ["main-term", "--f", "tau-z", "--z", "0.5+0.3i", "--x", "20000", "--D", "5"],
    ],
)
def test_thread_count_does_not_change_bytes(argv):
    outs = {run([*argv, "--threads", str(t)])[1] for t in (1, 3, 8)}
    assert len(outs) == 1


def test_threads_env_default(monkeypatch):
    argv = ["sigma-scan", "--f", "mobius", "--x", "5000", "--R", "2"]
    monkeypatch.setenv("DIVCORR_THREADS", "4")
    a = run(argv)[1]
    monkeypatch.setenv("DIVCORR_THREADS", "1")
    assert run(argv)[1] == a


def test_out_path(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert main(["correlate", "--x", "10", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(path.read_text())
    assert parse_scalar(doc["result"]["d_value"]) == 23
    assert "out" not in doc["params"]


def test_console_script_and_module():
    exe = shutil.which("divcorr")
    cmds = [[sys.executable, "-m", "divcorr"]]
    if exe:
        cmds.append([exe])
    for cmd in cmds:
        p = subprocess.run([*cmd, "correlate", "--x", "10"], capture_output=True, text=True, timeout=120)
        assert p.returncode == 0
        assert parse_scalar(json.loads(p.stdout)["result"]["d_value"]) == 23
        p = subprocess.run([*cmd, "correlate", "--x", "10", "--z", "1/0"], capture_output=True, text=True, timeout=120)
        assert p.returncode == 2

"""Command-line front end: output formats, exit codes and determinism."""
import json
import subprocess
import sys

import numpy as np
import pytest

from kstar import cli, dispatch, verify
from kstar.verify import Check

EXAMPLES = {
    "exp": ["--t", "0.3", "--check", "true"],
    "interval": ["--c", "0"],
    "classify": ["--c", "2"],
    "polar": [],
    "vacuum": ["--kind", "vac"],
    "matelem": ["--kind", "E", "--p", "1", "--q", "0"],
    "delta": ["--z", "0.1"],
    "gamma": ["--z", "1", "--mode", "diag", "--n", "0"],
    "zeta": ["--z", "2", "--mode", "diag", "--n", "0"],
    "partition": ["--nmax", "10"],
    "reflect": ["--s", "0.3+1j"],
}


def run(argv, capsys):
    # argparse reports usage errors through SystemExit
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def test_every_op_has_an_example():
    assert set(EXAMPLES) == set(dispatch.OPS)


@pytest.mark.parametrize("op", sorted(EXAMPLES))
def test_eval_json(op, capsys):
    code, out, err = run(["eval", op] + EXAMPLES[op], capsys)
    assert code == 0, err
    data = json.loads(out)
    assert data["op"] == op
    # the echoed parameters parse again to the same body
    again = dispatch.run_eval(op, {k: (complex(*v) if isinstance(v, list) else v) for k, v in data["params"].items()},
                              dispatch.RunConfig())
    assert json.loads(dispatch.to_json_text(again)) == data


def test_known_values(capsys):
    _, out, _ = run(["eval", "interval", "--c", "0"], capsys)
    d = json.loads(out)
    assert d["a"] == pytest.approx(-0.5493061443340549, abs=1e-12) and d["class"] == "Kzero"
    _, out, _ = run(["eval", "gamma", "--z", "1", "--mode", "diag", "--n", "0"], capsys)
    assert json.loads(out)["value"][0] == pytest.approx(0.8862269254527583, abs=1e-14)
    _, out, _ = run(["eval", "classify", "--c=-2-0.5j"], capsys)
    assert json.loads(out)["class"] == "Kminus"


def test_exp_check_residual(capsys):
    _, out, _ = run(["eval", "exp", "--t", "0.2+0.1j", "--check", "true"], capsys)
    assert json.loads(out)["residuals"]["riccati_flow"] < 1e-8


def test_csv_output(capsys):
    code, out, _ = run(["eval", "delta", "--z", "0.1", "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "u_re,u_im,v_re,v_im,val_re,val_im" and len(lines) == 26
    _, out, _ = run(["eval", "gamma", "--z", "1", "--mode", "diag", "--format", "csv", "--trunc-N", "2"], capsys)
    assert out.splitlines()[0] == "n,re,im" and len(out.strip().splitlines()) == 4
    _, out, _ = run(["verify", "core", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "name,status,residual,tol"


def test_exit_code_validation(capsys):
    assert run(["eval", "gamma", "--z", "abc"], capsys)[0] == dispatch.EXIT_VALIDATION
    assert run(["eval", "nosuch"], capsys)[0] == dispatch.EXIT_VALIDATION
    assert run(["eval", "exp", "--t", "0.1", "--hbar", "-1"], capsys)[0] == dispatch.EXIT_VALIDATION
    assert run(["eval", "gamma", "--z", "1", "--trunc-N", "100000"], capsys)[0] == dispatch.EXIT_VALIDATION
    assert run(["eval", "gamma"], capsys)[0] == dispatch.EXIT_VALIDATION


def test_exit_code_numerical(capsys):
    code, _, err = run(["eval", "gamma", "--z", "-0.5"], capsys)
    assert code == dispatch.EXIT_NUMERICAL
    assert err.startswith("kstar: PoleError:")
    code, _, err = run(["eval", "delta", "--z", "0.7"], capsys)
    assert code == dispatch.EXIT_NUMERICAL and "OutOfStrip" in err


def test_exit_code_verify_failure(monkeypatch, capsys):
    monkeypatch.setitem(verify.SUITES, "core", lambda: [Check("broken", 1.0, 1e-3)])
    code, out, _ = run(["verify", "core"], capsys)
    assert code == dispatch.EXIT_VERIFY_FAILED and "FAIL" in out


def test_verify_core_table(capsys):
    code, out, _ = run(["verify", "core"], capsys)
    assert code == 0
    assert out.splitlines()[0].split() == ["status", "residual", "tol", "name"]
    assert "0 failed" in out


def test_verify_xfail_does_not_fail(monkeypatch, capsys):
    monkeypatch.setitem(verify.SUITES, "core", lambda: [Check("known gap", 1.0, 1e-3, expected_fail=True)])
    code, out, _ = run(["verify", "core", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["rows"][0]["status"] == "xfail"


def test_hbar_flag_changes_result(capsys):
    _, a, _ = run(["eval", "exp", "--t", "0.3"], capsys)
    _, b, _ = run(["eval", "exp", "--t", "0.3", "--hbar", "0.5"], capsys)
    ga, gb = json.loads(a)["grid"]["values"], json.loads(b)["grid"]["values"]
    assert ga[0] == gb[0] and ga[1] != gb[1]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# truncation\ntrunc_N = 3\nformat = csv\n")
    _, out, _ = run(["eval", "gamma", "--z", "1", "--mode", "diag", "--config", str(cfg)], capsys)
    assert len(out.strip().splitlines()) == 5
    _, out, _ = run(["eval", "gamma", "--z", "1", "--mode", "diag", "--config", str(cfg), "--trunc-N", "5"], capsys)
    assert len(out.strip().splitlines()) == 7
    cfg.write_text("bogus = 1\n")
    assert run(["eval", "polar", "--config", str(cfg)], capsys)[0] == dispatch.EXIT_VALIDATION


@pytest.mark.parametrize("kind", ["json", "csv"])
def test_grid_file(kind, tmp_path, capsys):
    pts = np.array([[0.1, 0.0, 0.2, 0.0], [0.0, 0.3, -0.1, 0.1]])
    path = tmp_path / f"grid.{kind}"
    if kind == "json":
        path.write_text(json.dumps({"points": pts.tolist()}))
    else:
        path.write_text("u_re,u_im,v_re,v_im\n" + "\n".join(",".join(map(str, r)) for r in pts))
    _, out, _ = run(["eval", "vacuum", "--grid-file", str(path)], capsys)
    d = json.loads(out)
    np.testing.assert_allclose(np.array(d["grid"]["points"]), pts)
    assert len(d["grid"]["values"]) == 2


def test_out_file(tmp_path, capsys):
    target = tmp_path / "o.json"
    code, out, _ = run(["eval", "polar", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["op"] == "polar"


def _subprocess(args):
    return subprocess.run([sys.executable, "-m", "kstar.cli"] + args, capture_output=True)


def test_determinism_across_processes():
    args = ["eval", "gamma", "--z", "0.7+0.2j", "--mode", "integral"]
    a, b = _subprocess(args), _subprocess(args)
    assert a.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 100
    a, b = _subprocess(["verify", "core", "--format", "json"]), _subprocess(["verify", "core", "--format", "json"])
    assert a.returncode == 0 and a.stdout == b.stdout


def test_subprocess_exit_codes():
    assert _subprocess(["eval", "gamma", "--z", "-0.5"]).returncode == 3
    assert _subprocess(["eval", "gamma", "--bad", "1"]).returncode == 2
    assert _subprocess(["verify", "nosuch"]).returncode == 2

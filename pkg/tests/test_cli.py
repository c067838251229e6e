from __future__ import annotations

import json
import subprocess
import sys

import pytest

from fggtrans.cli import main
from fggtrans.corpus import default_corpus_dir

CORPUS = default_corpus_dir()


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_ok(capsys):
    code, out, _ = run(capsys, "check", str(CORPUS / "box_eq.fgg"))
    assert code == 0 and "ok" in out


def test_check_dup_struct(capsys):
    code, _, err = run(capsys, "check", str(CORPUS / "dup_struct.fgg"))
    assert code == 2 and "DuplicateStruct" in err


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", "--format", "json", str(CORPUS / "bound_violation.fgg"))
    doc = json.loads(out)
    assert code == 2 and doc[0]["ok"] is False and doc[0]["diagnostics"][0].startswith("BoundViolation")


def test_run_and_trace(capsys):
    code, out, _ = run(capsys, "run", "--trace", str(CORPUS / "box_eq.fgg"))
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("0: ")
    assert lines[-1].startswith("false")


def test_run_step_limit_from_env(capsys, monkeypatch):
    monkeypatch.setenv("FGG_MAX_STEPS", "50")
    code, out, _ = run(capsys, "run", "--format", "json", str(CORPUS / "diverge.fgg"))
    assert code == 0 and json.loads(out) == {"kind": "step_limit", "steps": 50}


def test_bad_env_budget_is_usage_error(capsys, monkeypatch):
    monkeypatch.setenv("FGG_MAX_STEPS", "lots")
    code, _, err = run(capsys, "run", str(CORPUS / "box_eq.fgg"))
    assert code == 3 and "FGG_MAX_STEPS" in err


def test_compile_and_run_tl(capsys, tmp_path):
    out_file = tmp_path / "box_eq.tl"
    code, _, _ = run(capsys, "compile", str(CORPUS / "box_eq.fgg"), "-o", str(out_file))
    assert code == 0 and out_file.read_text().startswith("(let M.eq.Num")
    code, out, _ = run(capsys, "run-tl", str(out_file))
    assert code == 0 and out.startswith("#f")


def test_compile_random_is_reproducible(capsys):
    args = ("compile", str(CORPUS / "format_main.fgg"), "--strategy", "random", "--seed", "4", "--main-type", "Format")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b and a


def test_compile_random_without_seed_echoes_it(capsys):
    code, _, err = run(capsys, "compile", str(CORPUS / "box_eq.fgg"), "--strategy", "random")
    assert code == 0 and err.startswith("seed: ")


def test_seed_with_direct_is_usage_error(capsys):
    code, _, _ = run(capsys, "compile", str(CORPUS / "box_eq.fgg"), "--seed", "1")
    assert code == 3


def test_diff_pass(capsys):
    code, out, _ = run(capsys, "diff", str(CORPUS / "box_eq.fgg"), "--strategy", "direct", "--also", "random:3")
    assert code == 0 and out.startswith("box_eq: PASS")


def test_diff_type_error(capsys):
    code, _, err = run(capsys, "diff", str(CORPUS / "no_subtype.fgg"))
    assert code == 2 and "NoSubtype" in err


def test_cohere(capsys):
    code, out, _ = run(capsys, "cohere", str(CORPUS / "format_main.fgg"), "--main-type", "Format", "--seed", "0")
    assert code == 0 and "PASS" in out


def test_corpus(capsys):
    code, out, _ = run(capsys, "corpus", "--jobs", "2")
    assert code == 0 and out.strip().endswith("cases passed")


def test_corpus_failure_exit(capsys, tmp_path):
    (tmp_path / "wrong.fgg").write_text("// expect: 2\nfunc main() { _ = 1 }\n")
    code, out, _ = run(capsys, "corpus", str(tmp_path))
    assert code == 1 and "FAIL wrong" in out


def test_parse_error_exit(capsys, tmp_path):
    f = tmp_path / "bad.fgg"
    f.write_text("type S struct {")
    code, _, err = run(capsys, "check", str(f))
    assert code == 2 and "parse error" in err


def test_tl_parse_error_exit(capsys, tmp_path):
    f = tmp_path / "bad.tl"
    f.write_text("(main (lam))")
    code, _, _ = run(capsys, "run-tl", str(f))
    assert code == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["nope"])
    assert info.value.code == 3
    assert run(capsys, "run", "/does/not/exist.fgg")[0] == 3
    assert run(capsys, "run", "--max-steps", "0", str(CORPUS / "box_eq.fgg"))[0] == 3


def test_stuck_run_is_semantic_failure(capsys, tmp_path):
    f = tmp_path / "stuck.fgg"
    f.write_text("type D struct {}\nfunc main() { _ = D{}.nope() }\n")
    code, _, err = run(capsys, "run", str(f))
    assert code == 1 and "stuck" in err


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "fggtrans.cli", "check", str(CORPUS / "arith.fgg")],
                       capture_output=True, text=True)
    assert r.returncode == 0

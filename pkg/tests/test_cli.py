from __future__ import annotations

import json

import pytest

from dcc.cli import run
from dcc.corpus import FW


def out_of(capsys, argv):
    code = run(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_check_rejects_f_with_side_condition(capsys):
    code, out, _ = out_of(capsys, ["check", "--system", "dccd", "-e", FW])
    assert code == 1
    assert "T^D-bind side condition failed" in out


def test_check_accepts_and_prints_type(capsys):
    code, out, _ = out_of(capsys, ["check", "-e", "fun x:unit. inj1 x"])
    assert code == 0 and out.strip() == "unit -> unit + unit"


def test_check_reads_a_file(capsys, tmp_path):
    p = tmp_path / "g.dcc"
    p.write_text("fun x:W[H](unit+unit). bind y = x in case y of z. inj1 () | z. inj2 ()\n")
    code, out, _ = out_of(capsys, ["check", "--system", "dccd", str(p)])
    assert code == 0 and out.strip() == "W[H](unit + unit) -> unit + unit"


def test_check_trace(capsys):
    code, out, _ = out_of(capsys, ["check", "--trace", "-e", "inj1 ()"])
    assert code == 0
    assert out.splitlines()[0].startswith("T-inj")


def test_equiv(capsys):
    argv = ["equiv", "--level", "L", "--type", "T[H](unit+unit)", "eta[H] inj1 ()", "eta[H] inj2 ()"]
    assert out_of(capsys, argv)[:2] == (0, "true\n")
    argv[2] = "H"
    assert out_of(capsys, argv)[:2] == (1, "false\n")


def test_safe(capsys):
    code, out, _ = out_of(capsys, ["safe", "--level", "L", "--type", "unit+unit", f"({FW}) (weta[H] inj1 ())"])
    assert (code, out) == (1, "false\n")


def test_blame(capsys):
    assert out_of(capsys, ["blame", "-t", "T[!H](unit+unit)"])[:2] == (0, "!H (level H)\n")


def test_eval_with_taints(capsys):
    code, out, _ = out_of(capsys, ["eval", "--taint", "-e", f"({FW}) (weta[H] inj1 ())"])
    assert (code, out) == (0, "inj1 () @ H\n")


def test_eval_stuck(capsys):
    assert out_of(capsys, ["eval", "-e", "proj1 ()"])[0] == 1


def test_translate(capsys):
    assert out_of(capsys, ["translate", "--dir", "dcc-to-dccd", "-t", "T[H](unit)"])[:2] == (0, "W[H](unit)\n")
    code, out, _ = out_of(capsys, ["translate", "--dir", "dccd-to-dcc", "-e", "weta[H] ()"])
    assert (code, out) == (0, "eta[H] ()\n")


def test_leak(capsys):
    code, out, _ = out_of(capsys, ["leak", "--level", "H", "--type", "unit"])
    assert (code, out) == (0, "fun x0:W[H](unit). ()\n")


def test_corpus_list_and_run(capsys):
    code, out, _ = out_of(capsys, ["corpus", "list"])
    assert code == 0 and out.startswith("f ")
    code, out, _ = out_of(capsys, ["corpus", "run", "g", "k"])
    assert code == 0 and out.count("PASS") == 3
    code, out, _ = out_of(capsys, ["corpus", "run", "blame"])
    assert code == 1 and "FAIL blame" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "-e", "fun x:unit. ("],
        ["check", "--lattice", "nope", "-e", "()"],
        ["check"],
        ["check", "--system", "xyz", "-e", "()"],
        ["corpus", "run", "nope"],
        ["blame", "-t", "T[Q](unit)"],
    ],
)
def test_usage_and_parse_errors_exit_2(capsys, argv):
    assert out_of(capsys, argv)[0] == 2


def test_json_output(capsys):
    code, out, _ = out_of(capsys, ["check", "--json", "--system", "dccd", "--trace", "-e", FW])
    data = json.loads(out)
    assert code == 1 and data["exit"] == 1
    assert data["schema"] == "dcc-artifact/1"
    assert data["verdict"] == "ill-typed"
    assert data["error"]["rule"] == "T^D-bind"
    assert data["error"]["span"] == [23, 38]
    assert data["trace"][-1]["rule"] == "T^D-bind"


def test_json_parse_error(capsys):
    code, out, err = out_of(capsys, ["check", "--json", "-e", "fun"])
    data = json.loads(out)
    assert code == 2 and data["error"]["kind"] == "parse" and err == ""


def test_diamond_lattice_and_flip(capsys):
    code, out, _ = out_of(capsys, ["check", "--lattice", "diamond", "-e", "eta[L] inj1 ()"])
    assert (code, out) == (0, "T[L](unit + unit)\n")
    code, out, _ = out_of(capsys, ["blame", "--blame-order", "flip", "-t", "T[!H](unit) * T[!L](unit)"])
    assert (code, out) == (0, "!L (level L)\n")

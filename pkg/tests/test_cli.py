import io
import json
import subprocess
import sys

import pytest

from cmdefect.cli import (
    CheckCmd,
    ComputeDecl,
    IdealDecl,
    InvariantsCmd,
    RingDecl,
    SessionError,
    encode,
    execute_session,
    main,
    parse_session,
)

MATSUMURA = """\
ring Q[X,Y,Z] grevlex
ideal J = X*Z, Y*Z, Z^2
compute A = quotient J
invariants A
"""

EXCM12 = """\
ring Q[X0,X1,X2,T1] grevlex
ideal P = X0
ideal Q3 = X0, X1, X2
compute M3 = power Q3 3
compute I = intersect P M3
compute A = quotient I
"""


def run(text, json_mode=True, expect=None, threads=1):
    out, err = io.StringIO(), io.StringIO()
    code = execute_session(parse_session(text), json_mode, threads, expect, out, err)
    docs = [json.loads(line) for line in out.getvalue().splitlines()] if json_mode else out.getvalue()
    return code, docs, err.getvalue()


# --- parsing ---------------------------------------------------------------------------

def test_parse_four_node_session():
    s = parse_session(MATSUMURA)
    assert [type(n) for n in s.nodes] == [RingDecl, IdealDecl, ComputeDecl, InvariantsCmd]
    assert s.nodes[0].ring.variables == ("X", "Y", "Z")
    assert s.nodes[2].op == "quotient" and s.nodes[2].args == ("J",)


def test_parse_unsupported_order():
    with pytest.raises(SessionError) as e:
        parse_session("ring Q[x] foo")
    assert 'unsupported order "foo"' in e.value.message
    assert (e.value.line, e.value.col) == (1, 11)


def test_parse_check_node():
    s = parse_session(MATSUMURA + "check Cnl n=2 l=1 on A\n")
    node = s.nodes[-1]
    assert isinstance(node, CheckCmd)
    assert (node.query.kind, node.query.n, node.query.l, node.name) == ("Cnl", 2, 1, "A")


@pytest.mark.parametrize("text,line,col,fragment", [
    ("ring Q[x,y]\nideal J = x + w\n", 2, 15, "w"),
    ("ring Q[x,y]\nideal J = x\nideal J = y\n", 3, 7, "duplicate"),
    ("ring Q[x,y]\ninvariants A\n", 2, 12, "undeclared"),
    ("ideal J = x\n", 1, 1, "ring"),
    ("ring F4[x]\n", 1, 6, "prime"),
    ("ring Q[x,y]\nideal J = x\ncheck Tn n=1 on J\n", 3, 7, "unknown property"),
    ("ring Q[x,y]\nideal J = x\ncompute A = quotient J\ncheck Cnl n=1 on A\n", 4, 1, "needs l"),
    ("ring Q[x,y]\nideal J = x\ninvariants J\n", 3, 12, "expected module"),
    ("ring Q[x,y]\nfrobnicate\n", 2, 1, "unknown command"),
    ("ring Q[x,y]\nmodule M = coker [[x, y], [x]]\n", 2, 18, "different lengths"),
    ("corpus seed=1 vars=9 count=2 verify\n", 1, 1, "variable_count"),
])
def test_parse_errors_carry_position(text, line, col, fragment):
    with pytest.raises(SessionError) as e:
        parse_session(text)
    assert (e.value.line, e.value.col) == (line, col)
    assert fragment in e.value.message


def test_objects_from_earlier_ring_rejected():
    with pytest.raises(SessionError) as e:
        parse_session("ring Q[x]\nideal J = x\nring Q[y]\ncompute A = quotient J\n")
    assert "earlier ring" in e.value.message


def test_coker_with_twists_and_comments():
    s = parse_session("ring F7[x,y] lex   # comment\nmodule M = coker [[x, 0], [0, y^2]] twists [0, 1]\n")
    M = s.nodes[1].module
    assert M.target.twists == (0, 1)
    assert M.ring.field.characteristic == 7


# --- execution ----------------------------------------------------------------------------

def test_matsumura_invariants_json():
    code, docs, _ = run(MATSUMURA)
    assert code == 0
    assert docs == [{"dim": 2, "depth": 0, "cmd": 2}]


def test_excm_check_json():
    code, docs, _ = run(EXCM12 + "check Cnl n=3 l=1 on A\n")
    assert code == 0
    assert docs == [{"answer": "no", "witness": "(X0,X1,X2,T1)"}]


def test_profile_rows_round_trip():
    code, docs, _ = run(MATSUMURA + "profile A\n")
    rows = docs[1]["rows"]
    assert len(rows) == 8
    top = rows[-1]
    assert top == {"prime": "(X,Y,Z)", "height": 3, "dim": 2, "depth": 0, "cmd": 2, "in_support": True}
    empty = rows[0]
    assert empty["prime"] == "()" and empty["in_support"] is False
    # out-of-support rows carry encoded infinities
    outside = [r for r in rows if not r["in_support"]]
    assert outside and all(r["depth"] == "+inf" and r["dim"] == "-inf" for r in outside)
    assert json.loads(json.dumps(docs)) == docs


def test_zero_module_invariants():
    code, docs, _ = run("ring Q[x]\nideal U = 1\ncompute Z = quotient U\ninvariants Z\n")
    assert docs == [{"dim": "-inf", "depth": "+inf", "cmd": 0}]


def test_encode():
    assert encode({"a": [float("inf"), -float("inf"), 3]}) == {"a": ["+inf", "-inf", 3]}


def test_text_mode():
    code, text, _ = run(EXCM12 + "invariants A\ncheck Cnl n=3 l=1 on A\n", json_mode=False)
    assert code == 0
    assert "A: dim 3, depth 1, cmd 2" in text
    assert "Cnl n=3 l=1 on A: no (witness (X0,X1,X2,T1), dim 3, depth 1)" in text


def test_corpus_command():
    code, docs, _ = run("corpus seed=42 vars=4 count=100 verify\n", threads=2)
    assert code == 0
    assert docs == [{"statements": 9, "counterexamples": 0}]


# --- exit codes -----------------------------------------------------------------------------

@pytest.mark.parametrize("line,flag,code", [
    ("check Cnl n=3 l=2 on A --expect yes", None, 0),
    ("check Cnl n=3 l=1 on A --expect yes", None, 1),
    ("check Cnl n=3 l=1 on A --expect no", None, 0),
    ("check acm on A", "yes", 1),
    ("check cmd l=2 on A", "yes", 0),
    ("check Cn n=1 on A", "no", 1),
    ("check Snl n=1 l=3 on A", "yes", 0),
    ("check Sn n=0 on A", None, 0),
])
def test_exit_code_matrix(line, flag, code):
    got, _, err = run(EXCM12 + line + "\n", expect=flag)
    assert got == code
    assert bool(err) == (code == 1)


def test_engine_error_exit_code():
    text = "ring Q[x,y,z]\nideal J = x^2 - y*z\ncompute A = quotient J\nprofile A\ninvariants A\n"
    code, docs, err = run(text)
    assert code == 2
    assert docs == []
    assert "line 4" in err and "NotMonomialError" in err


# --- command line ------------------------------------------------------------------------------

def test_main_with_file(tmp_path, capsys):
    p = tmp_path / "s.cmd"
    p.write_text(MATSUMURA)
    assert main([str(p), "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == {"dim": 2, "depth": 0, "cmd": 2}


def test_main_reports_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.cmd"
    p.write_text("ring Q[x] foo\n")
    assert main([str(p)]) == 2
    assert capsys.readouterr().err.strip() == f'{p}:1:11: unsupported order "foo"'


def test_main_missing_file(capsys):
    assert main(["/nonexistent/session"]) == 2
    assert "cannot read session" in capsys.readouterr().err


def test_module_entry_point_reads_stdin():
    proc = subprocess.run([sys.executable, "-m", "cmdefect", "-", "--json", "--expect", "no"],
                          input=MATSUMURA + "check Sn n=1 on A\n", capture_output=True, text=True)
    assert proc.returncode == 0
    lines = [json.loads(x) for x in proc.stdout.splitlines()]
    assert lines == [{"dim": 2, "depth": 0, "cmd": 2}, {"answer": "no", "witness": "(X,Y,Z)"}]

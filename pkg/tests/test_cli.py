import io
import json
import subprocess
import sys


from operadcalc.cli import run
from operadcalc.freeder import Context
from operadcalc.linear import FormalSum
from operadcalc.trees import GeneratorSet, make_tree


def call(*argv, env=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_div_command():
    code, out, _ = call("div", "--set", "x,y", "--gens", "*:2", "--tree", "x<-*(x,*(y,y))")
    assert code == 0
    assert "result: 1*(+<-*(+,*(y,y)))" in out


def test_cocycle_suite_json():
    code, out, _ = call("suite", "cocycle", "--set", "x,y", "--max-degree", "2", "--format", "json")
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["schema"] == 1
    assert {"suite", "params", "per_degree", "elapsed_ms"} <= set(report)


def test_derpl_single_label_reports_expected_failure():
    code, out, _ = call("suite", "derpl", "--set", "x", "--max-degree", "2")
    assert code == 1
    assert "der=2 derpl=1 pass=false" in out


def test_json_is_deterministic_without_timing():
    args = ("suite", "main6torsion", "--set", "x,y", "--max-degree", "2", "--format", "json", "--no-timing")
    assert call(*args)[1] == call(*args)[1]
    args = ("cocycle", "--operad", "lie", "--rank", "2", "--seed", "5", "--samples", "30", "--format", "json")
    first, second = call(*args), call(*args)
    assert first == second and first[0] == 0


def test_usage_errors_exit_two():
    assert call("bogus")[0] == 2
    assert call("div", "--tree", "q<-*(x,y)")[0] == 2
    assert call("div", "--set", "x,+", "--tree", "x<-x")[0] == 2
    assert call("prelie", "--tree", "x<-*(x,y)")[0] == 2
    assert call("suite", "derpl", "--max-degree", "0")[0] == 2
    code, _, err = call("classical", "satoh", "--image", "x")
    assert code == 2 and "usage" in err


def test_budget_overrun_exits_three(monkeypatch):
    monkeypatch.setenv("OPERADCALC_BUDGET_MS", "1")
    code, out, err = call("suite", "main6torsion", "--set", "x,y,z", "--max-degree", "3", "--format", "json")
    assert code == 3
    assert json.loads(out)["partial"] is True
    assert "budget" in err


def test_budget_flag_beats_environment(monkeypatch):
    monkeypatch.setenv("OPERADCALC_BUDGET_MS", "1")
    code, _, _ = call("suite", "derpl", "--max-degree", "2", "--budget-ms", "60000")
    assert code == 0


def test_prelie_and_bracket_round_trip():
    ctx = Context.user("xy", GeneratorSet.binary())
    code, out, _ = call("bracket", "--tree", "x<-*(x,y)", "--tree", "1*y<-*(x,y) + -2*y<-*(y,y)")
    assert code == 0
    text = out.splitlines()[1].split(": ", 1)[1]
    value = FormalSum.from_text(text, ctx.parse)
    assert str(value.to_text()) == text


def test_tree_command_round_trip():
    code, out, _ = call("tree", "--set", "x,y,z", "--tree", "z<-*( *(z,x) , y)", "--format", "json")
    info = json.loads(out)
    assert code == 0
    assert info["class"] == "PointedNotSpecial" and info["necklace"] == "(z<-*(z,x)|z<-*(z,y))"
    assert str(make_tree(GeneratorSet.binary(), info["tree"])) == info["tree"]


def test_tree_graft_and_prune():
    code, out, _ = call("tree", "--set", "x,y", "--tree", "x<-*(x,*(y,y))", "--prune", "1", "--graft", "1:x<-*(x,x)")
    assert code == 0
    assert "prune_lower: x<-*(x,+)" in out and "prune_upper: +<-*(y,y)" in out
    assert "graft: x<-*(*(x,x),*(y,y))" in out


def test_contract_command():
    code, out, _ = call("contract", "--set", "z", "--tree", "z<-*(z,z)")
    assert code == 0 and "1*+<-*(+,z) + 1*+<-*(z,+)" in out


def test_classical_commands():
    assert "trace: -1*~y" in call("classical", "satoh", "--set", "x,y", "--image", "x=[x,y]")[1]
    assert "trace: 1*1|y" in call("classical", "double", "--set", "x,y", "--image", "x=xy")[1]
    assert "trace: 1*x + 1*y" in call("classical", "com", "--set", "x,y", "--image", "x=xy", "--image", "y=xy")[1]


def test_dims_csv():
    code, out, _ = call("dims", "--set", "x,y", "--max-degree", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["degree,der,derpl,derlie,trace,imderlie", "1,8,8,8,4,4", "2,32,32,22,18,8"]


def test_free_cocycle_command():
    code, out, _ = call("cocycle", "--tree", "x<-*(x,y)", "--tree", "y<-*(x,*(x,y))")
    assert code == 0 and "defect: 0" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "operadcalc", "suite", "com_rational", "--rank", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "pass: true" in proc.stdout

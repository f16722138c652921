import io
import json
import subprocess
import sys

import pytest

from spineless.acm import parse_acm
from spineless.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    doc = json.loads(out.getvalue()) if out.getvalue().strip() else None
    return code, doc, err.getvalue()


def verdicts(doc):
    return {v["name"]: v for v in doc["verdicts"]}


def test_analyze_iii():
    code, doc, err = call("analyze", "x1 <= x1^2 v x1^4")
    assert code == 0
    v = verdicts(doc)
    assert v["simple"]["value"] is True
    assert v["trivial"]["value"] is False
    assert v["mingly"]["value"] is False
    assert v["expansive"]["witness"] == {"sigma": [1], "n": 1, "c": [1, 3]}
    assert v["prespinal"]["value"] is False and v["prespinal"]["witness"]["spineless"]
    assert v["heuristicK"]["value"] == 4 and v["heuristicK"]["witness"]["heuristic"] is False
    assert "prespinal = False" in err


def test_analyze_prespinal_witness():
    code, doc, _ = call("analyze", "xyz <= yz v xz^2")
    v = verdicts(doc)
    assert v["mingly"]["witness"] == {"sigma": [1, 1, 0]}
    assert v["prespinal"]["value"] is True


def test_analyze_integrality():
    code, doc, _ = call("analyze", "x1*x2 <= x1")
    assert code == 0 and verdicts(doc)["reduction"]["value"] == "implies-integrality"


def test_linearize_square():
    code, doc, _ = call("linearize", "x1^2 <= x1", "--json")
    assert verdicts(doc)["simple"]["witness"]["D"] == [[0, 1], [1, 0]]


def test_simulate_builtin():
    code, doc, _ = call("simulate", "builtin:m_even", "--init", "q0 r1^2", "--depth", "10", "--reg", "10",
                        "--width", "8")
    v = verdicts(doc)["accepted"]
    assert code == 0 and v["value"] is True and v["witness"]["length"] == 3
    assert v["caps"] == {"maxDepth": 10, "maxReg": 10, "maxWidth": 8}


def test_simulate_rejected_exhausted():
    code, doc, _ = call("simulate", "builtin:m_even", "--init", "q0 r1")
    w = verdicts(doc)["accepted"]["witness"]
    assert w["accepted"] is False and w["exhausted"] is True


def test_ambient_simulate():
    code, doc, _ = call("ambient-simulate", "builtin:m_even", "--init", "q0 r1^3", "--eq", "x <= x^2 v x^4",
                        "--reg", "12")
    v = verdicts(doc)
    assert "q0 r1^4 | q0 r1^6" in v["ambientSuccessors"]["value"]
    assert v["acceptedWithAmbient"]["value"] is True


def test_admissibility():
    code, doc, _ = call("admissibility", "builtin:m_even", "--eq", "x <= 1 v x^2", "--reg", "12",
                        "--states", "q0", "--domain-caps", "3")
    diff = verdicts(doc)["difference"]
    assert {"config": "q0 r1^3", "step": "ambient x1:=r1", "to": "q0 r1^2 | q0 r1^4"} in diff["value"]


def test_build_mk_round_trip(tmp_path):
    out = tmp_path / "m3.acm"
    code, doc, _ = call("build-mk", "builtin:m_even2", "--K", "3", "-o", str(out))
    assert code == 0
    assert verdicts(doc)["machine"]["value"]["states"] == 20
    MK = parse_acm(out.read_text())
    assert len(MK.instructions) == 30
    code, doc, _ = call("simulate", str(out), "--init", "q0 r1^9 r2^1", "--reg", "30")
    assert verdicts(doc)["accepted"]["value"] is True


def test_falsify_star_spinal():
    code, doc, _ = call("falsify-star", "x <= 1 v x^2", "--K", "3")
    v = verdicts(doc)
    assert v["falsifier"]["value"] == {"tau": [1], "C": 1} and v["falsifier"]["witness"]["checked"]


def test_falsify_star_prespinal():
    code, doc, _ = call("falsify-star", "xyz <= yz v xz^2", "--K", "2")
    assert verdicts(doc)["falsifier"]["witness"]["checked"] is True


def test_falsify_star_spineless():
    code, doc, _ = call("falsify-star", "x <= x^2 v x^4", "--K", "4")
    assert verdicts(doc)["prespinal"]["value"] is False


def test_star_search():
    code, doc, _ = call("star-search", "x <= 1 v x^2", "--K", "2")
    assert verdicts(doc)["counterexample"]["witness"] == {"sigma": [1], "C": 2}


def test_frame_check():
    code, doc, _ = call("frame-check", "--seed", "1", "--count", "5")
    v = verdicts(doc)["agreement"]
    assert v["value"] is True and v["witness"]["cases"] == 25


def test_acc_quasieq():
    code, doc, _ = call("acc-quasieq", "builtin:m_even", "--init", "q0 r1^2")
    assert verdicts(doc)["quasiequation"]["value"].endswith("⇒ q0·r1^2 ≤ qf")


def test_epsilon_sn():
    code, doc, _ = call("epsilon-sn", "--premise", "x <= y", "--conclusion", "u <= v", "--n", "2")
    assert verdicts(doc)["equation"]["value"] == "(1 ∧ (x → y))^2 ≤ (u → v)"


def test_usage_errors():
    assert call("analyze")[0] == 2
    assert call("bogus")[0] == 2
    assert call("star-search", "x <= x^2", "--K", "2", "--mode", "triple")[0] == 2
    assert call("epsilon-sn", "--n", "2")[0] == 2


def test_analysis_errors():
    code, doc, err = call("analyze", "x1 <= ")
    assert code == 1 and verdicts(doc)["error"]["value"]
    assert call("simulate", "/nonexistent.acm", "--init", "q0")[0] == 1
    assert call("simulate", "builtin:m_even", "--init", "q7")[0] == 1
    assert call("falsify-star", "x <= 1 v x^2", "--K", "1")[0] == 1


def test_deterministic_output():
    a = call("analyze", "x1 <= x1^2 v x1^4", "--json")
    b = call("analyze", "x1 <= x1^2 v x1^4", "--json")
    assert a == b


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "spineless", "analyze", "x <= x^2", "--json"],
                       capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["command"] == "analyze"

import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from jetcalc import docs
from jetcalc.cli import Check, VerificationReport, main
from jetcalc.exactla import Infeasible
from jetcalc.ncdiff import inner_derivation, n21_certificate_holds

from conftest import algebra, regular


@pytest.fixture
def emit(tmp_path):
    def _emit(name, field="Fp:7"):
        a, p = tmp_path / f"{name}.json", tmp_path / f"{name}_reg.json"
        assert main(["builtin", "--name", name, "--field", field, "--emit", str(a),
                     "--emit-regular", str(p)]) == 0
        return a, p
    return _emit


def _report(path):
    return json.loads(path.read_text())


def _checks(rep):
    return {c["id"]: c for c in rep["checks"]}


def test_verify_dual_numbers_over_q(emit, tmp_path, capsys):
    a, p = emit("dual", "Q")
    out = tmp_path / "r.json"
    assert main(["verify-commutative", "-a", str(a), "-p", str(p), "--out", str(out)]) == 0
    rep = _report(out)
    checks = _checks(rep)
    assert all(c["status"] == "Pass" for c in rep["checks"])
    assert checks["diff0-is-hom"]["dims"]["Diff0"] == 2
    assert checks["derivations"]["dims"]["Der"] == 1
    assert checks["iso-diff1-ring"]["dims"] == {"lhs": 3, "rhs": 3}
    assert checks["jet1"]["dims"] == {"mu2": 1, "J1": 3}
    assert "ALL PASS" in capsys.readouterr().out
    assert "wall_time" not in rep


def test_verify_field_and_trunc3(emit, tmp_path):
    a, _ = emit("field")
    assert main(["verify-commutative", "-a", str(a), "--out", str(tmp_path / "f.json")]) == 0
    a, _ = emit("trunc3")
    out = tmp_path / "t.json"
    assert main(["verify-commutative", "-a", str(a), "--order", "2", "--out", str(out)]) == 0
    checks = _checks(_report(out))
    assert checks["iso-jet"]["dims"]["lhs"] == checks["iso-jet"]["dims"]["rhs"] == 5
    assert checks["jet2"]["dims"]["J2"] == 7


def test_verify_refuses_noncommutative(emit, capsys):
    a, _ = emit("matrix2")
    assert main(["verify-commutative", "-a", str(a)]) == 2
    assert "demo-noncommutative" in capsys.readouterr().err


def test_demo_matrix(emit, tmp_path):
    a, _ = emit("matrix2")
    out = tmp_path / "d.json"
    assert main(["demo-noncommutative", "-a", str(a), "--out", str(out)]) == 0
    checks = _checks(_report(out))
    for cid in ("zero-order-failure", "jet-defect"):
        w = checks[cid]["witness"]
        assert (w["a"], w["b"], w["p"]) == ("E12", "E21", "1")
    assert checks["zero-order-failure"]["witness"]["value"] == "E11 + 6*E22"
    assert checks["center-obstruction"]["dims"]["obtainable"] <= 4
    assert checks["center-obstruction"]["dims"]["Hom_K"] == 16
    assert checks["derivations"]["dims"] == {"center": 1, "Der": 3, "inner": 3, "outer": 0}


def test_demo_commutative_reports_none(emit, tmp_path, capsys):
    a, _ = emit("dual")
    out = tmp_path / "d.json"
    assert main(["demo-noncommutative", "-a", str(a), "--out", str(out)]) == 0
    checks = _checks(_report(out))
    assert checks["zero-order-failure"]["witness"]["result"] == "none"
    assert checks["jet-defect"]["witness"]["result"] == "none"
    assert "commutative" in capsys.readouterr().err


def test_demo_direct_sum_localizes(emit, tmp_path):
    a, _ = emit("field+matrix2")
    out = tmp_path / "d.json"
    assert main(["demo-noncommutative", "-a", str(a), "--out", str(out)]) == 0
    w = _checks(_report(out))["zero-order-failure"]["witness"]
    assert (w["a"], w["b"]) == ("(0,E12)", "(0,E21)")
    assert "(1,0)" not in w["value"]


def _write_op(path, F, matrix):
    path.write_text(docs.dump_json({"matrix": docs.encode(F, matrix)}))
    return path


def test_solve_inner_derivation(emit, tmp_path):
    a, p = emit("matrix2")
    A = algebra("matrix2")
    op = _write_op(tmp_path / "op.json", A.field,
                   inner_derivation(A, A.field.array([1, 2, 3, 4])).matrix)
    out, wit = tmp_path / "r.json", tmp_path / "w.json"
    assert main(["solve-n21", "-a", str(a), "-p", str(p), "-q", str(p), "-d", str(op),
                 "--out", str(out), "--witness", str(wit)]) == 0
    P = regular("matrix2")
    w = docs.witness_from_doc(json.loads(wit.read_text()), P, P)
    from jetcalc.ncdiff import n21_check
    assert n21_check(P, P, docs.operator_from_doc(json.loads(op.read_text()), P, P), w).verified


def test_solve_transpose_infeasible(emit, tmp_path):
    a, p = emit("matrix2")
    F = algebra("matrix2").field
    T = F.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    op = _write_op(tmp_path / "t.json", F, T)
    out, wit = tmp_path / "r.json", tmp_path / "w.json"
    assert main(["solve-n21", "-a", str(a), "-p", str(p), "-d", str(op),
                 "--out", str(out), "--witness", str(wit)]) == 1
    rep = _report(out)
    fail = _checks(rep)["n21-feasible"]
    assert fail["status"] == "Fail" and fail["witness"]["infeasible"]
    # replay the certificate from the file
    cert = Infeasible({int(r): F(v) for r, v in json.loads(wit.read_text())["certificate"]})
    P = regular("matrix2")
    assert n21_certificate_holds(P, P, docs.operator_from_doc({"matrix": T.tolist()}, P, P), cert)


def test_solve_zero_operator(emit, tmp_path):
    a, p = emit("dual")
    F = algebra("dual").field
    op = _write_op(tmp_path / "z.json", F, F.zeros((2, 2)))
    wit = tmp_path / "w.json"
    assert main(["solve-n21", "-a", str(a), "-p", str(p), "-d", str(op),
                 "--witness", str(wit)]) == 0
    w = json.loads(wit.read_text())
    assert all(x == "0" for x in np.ravel(w["d_right"] + w["d_left"]))


def test_input_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  oops\n}")
    assert main(["demo-noncommutative", "-a", str(bad)]) == 2
    assert "bad.json:2:" in capsys.readouterr().err
    assert main(["demo-noncommutative", "-a", str(tmp_path / "none.json")]) == 2
    with pytest.raises(SystemExit):
        main(["builtin", "--name", "dual", "--field", "R", "--emit", str(tmp_path / "x.json")])


def test_operator_shape_error(emit, tmp_path, capsys):
    a, p = emit("dual")
    op = tmp_path / "op.json"
    op.write_text('{"matrix": [["1"]]}')
    assert main(["solve-n21", "-a", str(a), "-p", str(p), "-d", str(op)]) == 2
    assert "shape" in capsys.readouterr().err


def test_reports_are_byte_identical(emit, tmp_path):
    a, p = emit("matrix2")
    r1, r2 = tmp_path / "1.json", tmp_path / "2.json"
    main(["demo-noncommutative", "-a", str(a), "--out", str(r1)])
    main(["demo-noncommutative", "-a", str(a), "--out", str(r2)])
    assert r1.read_bytes() == r2.read_bytes()


def test_timing_flag(emit, tmp_path):
    a, _ = emit("dual")
    out = tmp_path / "r.json"
    main(["verify-commutative", "-a", str(a), "--out", str(out), "--timing"])
    assert "wall_time" in _report(out)


def test_report_invariants():
    rep = VerificationReport("x", "d")
    rep.add(Check("a", "ok", True))
    with pytest.raises(ValueError, match="duplicate"):
        rep.add(Check("a", "again", True))
    with pytest.raises(ValueError, match="witness"):
        rep.add(Check("b", "bad", False))
    rep.add(Check("c", "bad", False, {"why": 1}))
    assert not rep.passed
    assert rep.to_doc()["checks"][1] == {"id": "c", "identity": "bad", "status": "Fail",
                                         "witness": {"why": 1}}


@pytest.mark.skipif(shutil.which("jetcalc") is None, reason="console script not installed")
def test_console_script(tmp_path):
    a = tmp_path / "a.json"
    res = subprocess.run(["jetcalc", "builtin", "--name", "dual", "--emit", str(a)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and a.exists()
    res = subprocess.run([sys.executable, "-m", "jetcalc.cli", "verify-commutative", "-a", str(a)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "ALL PASS" in res.stdout

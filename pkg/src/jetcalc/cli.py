"""
Batch front end.

    jetcalc verify-commutative -a alg.json [-p mod.json] [-q mod2.json] [--order 1|2] --out report.json
    jetcalc demo-noncommutative -a alg.json --out report.json
    jetcalc solve-n21 -a alg.json -p P.json -q Q.json -d op.json --out report.json --witness w.json
    jetcalc builtin --name matrix2 --field Fp:7 --emit alg.json [--emit-regular mod.json]

Exit status: 0 when every check passes, 1 when some check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import docs
from .algcore import Algebra, builtin_algebra, center, is_commutative
from .bimod import Bimodule, LinMap, hom_space, regular_bimodule
from .commdiff import (IsoReport, check_iso_n1, decompose_first_order, derivation_space,
                       diff_space, h_morphism)
from .errors import JetcalcError, NoncommutativeBase
from .exactla import QQ, Infeasible, PrimeField, rank
from .jetmod import check_iso_550, generated_by_jets, j1_is_first_order, jet_module, nc_jet_defect
from .ncdiff import (center_obstruction, first_order_on_ring, inner_derivation, n21_certificate_holds, n21_check,
                     n21_solve, nc_derivation_space, nc_zero_order_failure, zq_module_closure)


@dataclass
class Check:
    id: str
    identity: str
    passed: bool
    witness: dict | None = None
    dims: dict | None = None

    def to_doc(self) -> dict:
        doc = {"id": self.id, "identity": self.identity,
               "status": "Pass" if self.passed else "Fail"}
        if self.witness is not None:
            doc["witness"] = self.witness
        if self.dims is not None:
            doc["dims"] = self.dims
        return doc


@dataclass
class VerificationReport:
    suite: str
    inputs_digest: str
    checks: list[Check] = field(default_factory=list)
    wall_time: float | None = None

    def add(self, check: Check) -> Check:
        if any(c.id == check.id for c in self.checks):
            raise ValueError(f"duplicate check id {check.id}")
        if not check.passed and not check.witness:
            raise ValueError(f"failing check {check.id} has no witness")
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_doc(self, with_time: bool = False) -> dict:
        doc = {"suite": self.suite, "inputs_digest": self.inputs_digest,
               "checks": [c.to_doc() for c in self.checks]}
        if with_time and self.wall_time is not None:
            doc["wall_time"] = round(self.wall_time, 3)
        return doc

    def to_json(self, with_time: bool = False) -> str:
        return docs.dump_json(self.to_doc(with_time))

    def text(self) -> str:
        lines = [f"suite {self.suite}  (inputs {self.inputs_digest[:12]})"]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            extra = ""
            if c.dims:
                extra = "  " + ", ".join(f"{k}={v}" for k, v in c.dims.items())
            lines.append(f"[{mark}] {c.id}: {c.identity}{extra}")
            if c.witness:
                for k, v in c.witness.items():
                    lines.append(f"         {k}: {v}")
        if self.wall_time is not None:
            lines.append(f"wall time {self.wall_time:.3f}s")
        lines.append("ALL PASS" if self.passed else "SOME CHECKS FAILED")
        return "\n".join(lines)


def digest(*input_docs) -> str:
    h = hashlib.sha256()
    for d in input_docs:
        h.update(docs.dump_json(d).encode())
    return h.hexdigest()


def _vec(mod: Bimodule, v) -> str:
    if mod.generator is not None and np.array_equal(np.asarray(v), mod.generator):
        return "1"
    return mod.describe(v)


# ---------------------------------------------------------------------------
# suites


def _dims_witness(**dims) -> dict:
    return {"dims": dims}


def cmd_verify_commutative(alg: Algebra, P: Bimodule, Q: Bimodule, order: int = 1,
                           digest_: str = "") -> VerificationReport:
    ok, pair = is_commutative(alg)
    if not ok:
        raise NoncommutativeBase(
            f"{alg.name(pair[0])} and {alg.name(pair[1])} do not commute; "
            "run `jetcalc demo-noncommutative` for noncommutative algebras")
    rep = VerificationReport("verify-commutative", digest_)
    f = alg.field
    A = regular_bimodule(alg)

    diffs = [diff_space(P, Q, s) for s in range(order + 1)]
    homA = hom_space(P, Q, "left_hom")
    same = diffs[0].space == homA.space
    rep.add(Check("diff0-is-hom", "Diff_0(P,Q) = Hom_A(P,Q)", same,
                  None if same else _dims_witness(Diff0=diffs[0].dim, Hom_A=homA.dim),
                  {"Diff0": diffs[0].dim, "Hom_A": homA.dim}))
    gaps = [s for s in range(order) if not diffs[s + 1].space.contains_space(diffs[s].space)]
    rep.add(Check("filtration", "Diff_(s-1) within Diff_s", not gaps,
                  {"first_gap_order": gaps[0]} if gaps else None,
                  {f"Diff{s}": d.dim for s, d in enumerate(diffs)}))

    # derivations are the first-order operators on A that vanish at 1
    der = derivation_space(alg, Q)
    d1A = diff_space(A, Q, 1)
    bad = [k for k, D in enumerate(der.maps()) if D not in d1A or np.asarray(D(alg.unit) != 0).any()]
    h_rank = rank(f, np.stack([h_morphism(D) for D in d1A.maps()])) if d1A.dim else 0
    ok = not bad and der.dim == d1A.dim - h_rank
    rep.add(Check("derivations", "Der(A,Q) = {D in Diff_1(A,Q) : D(1) = 0}", ok,
                  None if ok else {"bad_derivation": bad[:1], "Der": der.dim,
                                   "kernel_of_h": d1A.dim - h_rank},
                  {"Der": der.dim, "Diff1_A": d1A.dim}))

    zero_ord = diff_space(A, Q, 0)

    def resums(op: LinMap) -> bool:
        z, d = decompose_first_order(alg, Q, op)
        return z + d == op and d in der and z in zero_ord

    bad = [k for k, op in enumerate(d1A.maps()) if not resums(op)]
    rep.add(Check("decomposition", "D(a) = a D(1) + (D(a) - a D(1))", not bad,
                  {"basis_operator": bad[0]} if bad else None, {"checked": d1A.dim}))

    iso1 = check_iso_n1(P, Q)
    rep.add(_iso_check("iso-diff1-ring", "Diff_1(P,Q) = Hom_A(P, Diff_1(A,Q))", iso1))

    for k in range(1, order + 1):
        jet = jet_module(P, k)
        ok = jet.dim + jet.mu.dim == alg.dim * P.dim
        dims = {f"mu{k + 1}": jet.mu.dim, f"J{k}": jet.dim}
        rep.add(Check(f"jet{k}", f"J^{k}(P) = (A (x) P) / mu^{k + 1}", ok,
                      None if ok else _dims_witness(**dims), dims))
        proj = jet.pi_map is not None and np.array_equal(
            f.matmul(jet.pi_map.matrix, jet.jk_map.matrix), f.eye(P.dim))
        gen = generated_by_jets(jet)
        rep.add(Check(f"jet{k}-projection", "pi o J = id and J^k(P) is generated by the J p",
                      proj and gen,
                      None if proj and gen else {"projection": proj, "generated": gen}))

    cert = j1_is_first_order(P)
    rep.add(Check("j1-first-order", "J^1 : P -> J^1(P) is first order", cert.verified,
                  None if cert.verified else {"tuple": list(cert.witness)}))
    iso2 = check_iso_550(P, Q)
    rep.add(_iso_check("iso-jet", "Diff_1(P,Q) = Hom_A(J^1(P), Q)", iso2))
    return rep


def _iso_check(cid: str, identity: str, rep: IsoReport) -> Check:
    dims = {"lhs": rep.dim_lhs, "rhs": rep.dim_rhs}
    witness = None
    if not rep.bijective:
        witness = {"injective": rep.injective, "lands_in_rhs": rep.lands_in_rhs} | dims
    return Check(cid, identity, rep.bijective, witness, dims)


def cmd_demo_noncommutative(alg: Algebra, digest_: str = "") -> VerificationReport:
    rep = VerificationReport("demo-noncommutative", digest_)
    comm, _ = is_commutative(alg)
    R = regular_bimodule(alg)
    ident = "id fails D(abp) - aD(bp) - bD(ap) + abD(p) = 0"

    w = nc_zero_order_failure(alg)
    if w is None:
        rep.add(Check("zero-order-failure", ident, comm,
                      {"result": "none", "commutative": comm}))
    else:
        expected = R.act(alg.commutator(alg.basis(w.a), alg.basis(w.b)), w.p)
        ok = not comm and np.array_equal(expected, w.value)
        rep.add(Check("zero-order-failure", ident, ok,
                      {"a": alg.name(w.a), "b": alg.name(w.b), "p": _vec(R, w.p),
                       "value": R.describe(w.value), "commutator_times_p": R.describe(expected)}))

    ident = "a (x) p -> ap is nonzero on mu^2 over a noncommutative A"
    dfx = nc_jet_defect(alg, R)
    if dfx is None:
        rep.add(Check("jet-defect", ident, comm, {"result": "none", "commutative": comm}))
    else:
        a, b, p = dfx.witness
        expected = R.act(alg.commutator(alg.basis(a), alg.basis(b)), p)
        ok = not comm and np.array_equal(expected, dfx.image)
        rep.add(Check("jet-defect", ident, ok,
                      {"a": alg.name(a), "b": alg.name(b), "p": _vec(R, p),
                       "image": R.describe(dfx.image), "commutator_times_p": R.describe(expected)},
                      {"mu2": dfx.mu.dim}))

    z = center(alg)
    der = nc_derivation_space(alg, R)
    stray = [t for t in range(alg.dim) if inner_derivation(alg, alg.basis(t)) not in der]
    # inner derivations form a space of dim n - dim Z_A; any excess is outer
    rep.add(Check("derivations", "a -> ma - am is a derivation; Der = inner + outer", not stray,
                  {"not_a_derivation": alg.name(stray[0])} if stray else None,
                  {"center": z.dim, "Der": der.dim, "inner": alg.dim - z.dim,
                   "outer": der.dim - (alg.dim - z.dim)}))

    ident = "D(ab) = aD(b) + D(a)b - abD(1) forces D(1) central"
    try:
        fo = first_order_on_ring(alg, R)
    except AssertionError as exc:
        rep.add(Check("first-order-ring", ident, False, {"error": str(exc)}))
    else:
        noncentral = [k for k, op in enumerate(fo.maps()) if op(alg.unit) not in z]
        ok = not noncentral and fo.dim == der.dim + z.dim
        rep.add(Check("first-order-ring", ident, ok,
                      None if ok else {"noncentral_operator": noncentral[:1]},
                      {"Diff1_A": fo.dim, "Der": der.dim, "center": z.dim}))
    closed = zq_module_closure(alg, R)
    rep.add(Check("center-closure", "first-order operators on A form a Z_A-module", closed,
                  None if closed else {"closed": False}))

    ob = center_obstruction(alg, R, R)
    dims = {"morphisms": ob.dim_morphisms, "obtainable": ob.dim_obtainable,
            "Hom_K": ob.dim_hom_k, "center_Q": ob.dim_center_q}
    ok = ob.images_central and (comm or ob.strict)
    rep.add(Check("center-obstruction", "p -> f(p)(1) only reaches Z_Q", ok,
                  None if ok else {"images_central": ob.images_central} | dims, dims))
    return rep


def cmd_solve_n21(alg: Algebra, P: Bimodule, Q: Bimodule, op: LinMap,
                  digest_: str = "") -> tuple[VerificationReport, dict]:
    rep = VerificationReport("solve-n21", digest_)
    f = alg.field
    res = n21_solve(P, Q, op)
    ident = "D(apb) = (dr a)(p) b + a D(p) b + a (dl b)(p)"
    if isinstance(res, Infeasible):
        cert = [[int(r), f.fmt(c)] for r, c in sorted(res.certificate.items())]
        holds = n21_certificate_holds(P, Q, op, res)
        rep.add(Check("n21-feasible", ident, False,
                      witness={"infeasible": True, "certificate": cert}))
        rep.add(Check("n21-certificate", "weighted rows reduce to 0 = nonzero", holds,
                      None if holds else {"certificate": cert}))
        return rep, {"infeasible": True, "certificate": cert}
    wdoc = docs.witness_to_doc(f, res)
    # check the pair as it will be read back from the witness file
    verdict = n21_check(P, Q, op, docs.witness_from_doc(wdoc, P, Q))
    rep.add(Check("n21-feasible", ident, verdict.verified,
                  None if verdict.verified else {"triple": list(verdict.witness)}))
    return rep, wdoc


# ---------------------------------------------------------------------------
# argument handling


def parse_field(text: str):
    text = text.strip()
    if text in ("Q", "QQ"):
        return QQ
    if text.startswith("Fp:") or text.startswith("GF:"):
        return PrimeField(int(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(f"field must be Q or Fp:<prime>, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jetcalc", description=__doc__.split("\n\n")[0].strip())
    sub = ap.add_subparsers(dest="command", required=True)

    vc = sub.add_parser("verify-commutative", help="check the commutative constructions")
    vc.add_argument("-a", "--algebra", required=True)
    vc.add_argument("-p", "--module")
    vc.add_argument("-q", "--target")
    vc.add_argument("--order", type=int, choices=(1, 2), default=1)
    vc.add_argument("--out")
    vc.add_argument("--timing", action="store_true", help="include wall time in the JSON report")

    dn = sub.add_parser("demo-noncommutative", help="exhibit the noncommutative failures")
    dn.add_argument("-a", "--algebra", required=True)
    dn.add_argument("--out")
    dn.add_argument("--timing", action="store_true")

    sn = sub.add_parser("solve-n21", help="decide the derivation-pair condition for an operator")
    sn.add_argument("-a", "--algebra", required=True)
    sn.add_argument("-p", "--module", required=True)
    sn.add_argument("-q", "--target")
    sn.add_argument("-d", "--operator", required=True)
    sn.add_argument("--out")
    sn.add_argument("--witness")
    sn.add_argument("--timing", action="store_true")

    bi = sub.add_parser("builtin", help="write a builtin algebra document")
    bi.add_argument("--name", required=True)
    bi.add_argument("--field", type=parse_field, default=QQ)
    bi.add_argument("--emit", required=True)
    bi.add_argument("--emit-regular")
    return ap


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _run(args) -> int:
    if args.command == "builtin":
        alg = builtin_algebra(args.name, args.field)
        _write(args.emit, docs.dump_json(docs.algebra_to_doc(alg)))
        if args.emit_regular:
            _write(args.emit_regular, docs.dump_json(
                docs.bimodule_to_doc(regular_bimodule(alg), inline_algebra=False)))
        print(f"wrote {args.name} over {args.field} (dim {alg.dim}) to {args.emit}")
        return 0

    t0 = time.perf_counter()
    alg, alg_doc = docs.load_algebra(args.algebra)
    witness_doc = None
    if args.command == "verify-commutative":
        P, p_doc = (docs.load_bimodule(args.module, alg) if args.module
                    else (regular_bimodule(alg), {"free": 1}))
        Q, q_doc = (docs.load_bimodule(args.target, alg) if args.target else (P, p_doc))
        rep = cmd_verify_commutative(alg, P, Q, args.order,
                                     digest(alg_doc, p_doc, q_doc, {"order": args.order}))
    elif args.command == "demo-noncommutative":
        if is_commutative(alg)[0]:
            print("warning: algebra is commutative; the failure probes should find nothing",
                  file=sys.stderr)
        rep = cmd_demo_noncommutative(alg, digest(alg_doc))
    else:
        P, p_doc = docs.load_bimodule(args.module, alg)
        Q, q_doc = (docs.load_bimodule(args.target, alg) if args.target else (P, p_doc))
        op_doc = docs.load_json(args.operator)
        op = docs.operator_from_doc(op_doc, P, Q, args.operator)
        rep, witness_doc = cmd_solve_n21(alg, P, Q, op, digest(alg_doc, p_doc, q_doc, op_doc))
    rep.wall_time = time.perf_counter() - t0
    print(rep.text())
    _write(args.out, rep.to_json(with_time=args.timing))
    if witness_doc is not None:
        _write(args.witness, docs.dump_json(witness_doc))
    return 0 if rep.passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except NoncommutativeBase as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except JetcalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

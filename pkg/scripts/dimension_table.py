"""Dimensions of operator spaces and jet modules over commutative algebras.

    python3 scripts/dimension_table.py --fields Q,Fp:7 --algebras dual,trunc3
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from common import field_of, parse_config, print_table, save_json
from jetcalc.algcore import builtin_algebra
from jetcalc.bimod import regular_bimodule
from jetcalc.commdiff import check_iso_n1, derivation_space, diff_space
from jetcalc.jetmod import check_iso_550, jet_module


@dataclass
class Config:
    algebras: tuple = ("field", "dual", "trunc3", "trunc4", "field+field", "field+dual")
    fields: tuple = ("Q", "Fp:7", "Fp:3")
    max_order: int = 2
    out: str = ""


def row(name: str, field_tag: str, max_order: int) -> dict:
    F = field_of(field_tag)
    A = builtin_algebra(name, F)
    P = regular_bimodule(A)
    t0 = time.perf_counter()
    rec = {"algebra": name, "field": field_tag, "dim": A.dim,
           "Der": derivation_space(A, P).dim}
    for s in range(max_order + 1):
        rec[f"Diff{s}"] = diff_space(P, P, s).dim
    for k in range(1, max_order + 1):
        jet = jet_module(P, k)
        rec[f"mu{k + 1}"] = jet.mu.dim
        rec[f"J{k}"] = jet.dim
        rec[f"J{k}=Diff{k}"] = jet.dim == rec[f"Diff{k}"]
    rec["iso_ring"] = check_iso_n1(P, P).bijective
    rec["iso_jet"] = check_iso_550(P, P).bijective
    rec["seconds"] = round(time.perf_counter() - t0, 3)
    return rec


def main() -> None:
    cfg = parse_config(Config, __doc__)
    records = [row(a, f, cfg.max_order) for f in cfg.fields for a in cfg.algebras]
    header = list(records[0])
    print_table(header, [[r[h] for h in header] for r in records])
    save_json(cfg.out, {"config": vars(cfg), "rows": records})


if __name__ == "__main__":
    main()

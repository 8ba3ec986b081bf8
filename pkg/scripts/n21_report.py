"""Operators admitting a derivation pair, compared with first-order operators.

On commutative algebras the space of such operators on the regular bimodule
is compared with Diff_1; on noncommutative ones it is compared with the
inner derivations plus left multiplications.
"""

from __future__ import annotations

from dataclasses import dataclass

from common import field_of, parse_config, print_table, save_json
from jetcalc.algcore import builtin_algebra, is_commutative
from jetcalc.bimod import hom_space, regular_bimodule
from jetcalc.commdiff import diff_space
from jetcalc.ncdiff import first_order_on_ring, n21_operator_space, nc_derivation_space


@dataclass
class Config:
    algebras: tuple = ("field", "dual", "trunc3", "trunc4", "field+field", "matrix2",
                       "field+matrix2")
    field: str = "Fp:7"
    out: str = ""


def study(name: str, field_tag: str) -> dict:
    F = field_of(field_tag)
    A = builtin_algebra(name, F)
    P = regular_bimodule(A)
    space = n21_operator_space(P, P)
    rec = {"algebra": name, "dim": A.dim, "n21": space.dim,
           "left_hom": hom_space(P, P, "left_hom").dim,
           "Der": nc_derivation_space(A, P).dim,
           "first_order_on_ring": first_order_on_ring(A, P).dim}
    if is_commutative(A)[0]:
        d1 = diff_space(P, P, 1)
        rec["Diff1"] = d1.dim
        rec["equal_to_Diff1"] = space.space == d1.space
    return rec


def main() -> None:
    cfg = parse_config(Config, __doc__)
    records = [study(a, cfg.field) for a in cfg.algebras]
    header = ["algebra", "dim", "n21", "Diff1", "equal_to_Diff1", "left_hom", "Der",
              "first_order_on_ring"]
    print_table(header, [[r.get(h, "-") for h in header] for r in records])
    save_json(cfg.out, {"config": vars(cfg), "rows": records})


if __name__ == "__main__":
    main()

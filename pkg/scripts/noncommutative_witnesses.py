"""Where the commutative theory breaks over noncommutative algebras.

For each algebra: the first triple (a, b, p) on which the identity map fails
the commutative first-order identity, the matching jet defect, derivation and
center dimensions, and the center obstruction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from common import field_of, parse_config, print_table, save_json
from jetcalc.algcore import builtin_algebra, center
from jetcalc.bimod import regular_bimodule
from jetcalc.docs import encode
from jetcalc.jetmod import nc_jet_defect
from jetcalc.ncdiff import (center_obstruction, inner_generator, nc_derivation_space,
                            nc_zero_order_failure)


@dataclass
class Config:
    algebras: tuple = ("matrix2", "field+matrix2", "matrix3", "dual+matrix2")
    field: str = "Fp:7"
    out: str = ""


def study(name: str, field_tag: str) -> dict:
    F = field_of(field_tag)
    A = builtin_algebra(name, F)
    P = regular_bimodule(A)
    w = nc_zero_order_failure(A)
    d = nc_jet_defect(A, P)
    der = nc_derivation_space(A, P)
    outer = sum(inner_generator(A, D) is None for D in der.maps())
    ob = center_obstruction(A, P, P)
    rec = {"algebra": name, "dim": A.dim, "center": center(A).dim, "Der": der.dim,
           "outer_basis_elems": outer, "mu2": d.mu.dim if d else None,
           "obtainable": ob.dim_obtainable, "Hom_K": ob.dim_hom_k,
           "images_central": ob.images_central}
    if w is not None:
        rec["witness"] = f"{A.name(w.a)},{A.name(w.b)}"
        rec["value"] = encode(F, w.value)
        rec["defect_agrees"] = (d is not None and d.witness[:2] == (w.a, w.b)
                                and np.array_equal(d.image, w.value))
    return rec


def main() -> None:
    cfg = parse_config(Config, __doc__)
    records = [study(a, cfg.field) for a in cfg.algebras]
    header = ["algebra", "dim", "center", "Der", "outer_basis_elems", "mu2", "witness",
              "defect_agrees", "obtainable", "Hom_K", "images_central"]
    print_table(header, [[r.get(h) for h in header] for r in records])
    save_json(cfg.out, {"config": vars(cfg), "rows": records})


if __name__ == "__main__":
    main()

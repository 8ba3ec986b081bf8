"""Wall time of the derivation-pair solver as the bimodule grows."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from common import field_of, parse_config, print_table, save_json
from jetcalc.algcore import builtin_algebra
from jetcalc.bimod import LinMap, free_bimodule
from jetcalc.exactla import Infeasible
from jetcalc.ncdiff import inner_derivation, n21_solve, universal_calculus_truncated


@dataclass
class Config:
    algebra: str = "matrix2"
    field: str = "Fp:7"
    ranks: tuple = (1, 2, 3)
    calculus: bool = True
    seed: int = 0
    out: str = ""


def timed(P, op) -> tuple[float, bool]:
    t0 = time.perf_counter()
    res = n21_solve(P, P, op)
    return time.perf_counter() - t0, not isinstance(res, Infeasible)


def main() -> None:
    cfg = parse_config(Config, __doc__)
    F = field_of(cfg.field)
    A = builtin_algebra(cfg.algebra, F)
    rng = np.random.default_rng(cfg.seed)
    records = []
    for k in cfg.ranks:
        P = free_bimodule(A, k)
        m = F.random(rng, A.dim)
        # ad_m acting diagonally on the free module
        ad = inner_derivation(A, m).matrix
        op = LinMap(P, P, F.normalize(np.kron(F.eye(k), ad)))
        secs, ok = timed(P, op)
        records.append({"case": f"free rank {k}, diagonal ad_m", "dim": P.dim,
                        "unknowns": 2 * A.dim * P.dim ** 2, "feasible": ok,
                        "seconds": round(secs, 3)})
    if cfg.calculus:
        calc = universal_calculus_truncated(A)
        secs, ok = timed(calc.total, calc.d)
        records.append({"case": "truncated universal calculus, d", "dim": calc.total.dim,
                        "unknowns": 2 * A.dim * calc.total.dim ** 2, "feasible": ok,
                        "seconds": round(secs, 3)})
    header = list(records[0])
    print_table(header, [[r[h] for h in header] for r in records])
    save_json(cfg.out, {"config": vars(cfg), "rows": records})


if __name__ == "__main__":
    main()

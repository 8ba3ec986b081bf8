"""
Differential operators between modules over a commutative algebra.

For c in A and phi in Hom_K(P, Q) put ``delta_c phi = c phi - c * phi`` where
``(c phi)(p) = c phi(p)`` and ``(c * phi)(p) = phi(c p)``.  An operator of
order s is killed by every (s+1)-fold composite of these.  Since delta_c is
linear in c it is enough to test basis tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algcore import Algebra, is_commutative
from .bimod import Bimodule, HomSpace, LinMap, left_apply, regular_bimodule, star_apply
from .errors import NoncommutativeBase, NotFirstOrder
from .exactla import Subspace, kernel_blocks, kron_op, rank

MAX_ORDER = 2


@dataclass(frozen=True, eq=False)
class DiffOpCertificate:
    order: int
    operator: LinMap
    verified: bool
    witness: tuple | None = None   # (c_0, ..., c_s, p) basis indices

    @property
    def status(self) -> str:
        return "Verified" if self.verified else "Violated"


@dataclass(frozen=True)
class IsoReport:
    dim_lhs: int
    dim_rhs: int
    injective: bool
    lands_in_rhs: bool

    @property
    def bijective(self) -> bool:
        return self.injective and self.lands_in_rhs and self.dim_lhs == self.dim_rhs


def _require_commutative(alg: Algebra) -> None:
    ok, pair = is_commutative(alg)
    if not ok:
        raise NoncommutativeBase(
            f"algebra is not commutative ({alg.name(pair[0])}, {alg.name(pair[1])} do not commute); "
            "use the noncommutative tools instead")


def delta(c, phi: LinMap) -> LinMap:
    return left_apply(c, phi) - star_apply(c, phi)


def delta_operator(P: Bimodule, Q: Bimodule, c) -> np.ndarray:
    """Matrix of ``delta_c`` acting on row-major flattened Hom_K(P, Q)."""
    f = P.field
    return f.normalize(kron_op(f, Q.lmat(c), f.eye(P.dim)) - kron_op(f, f.eye(Q.dim), P.lmat(c)))


def _diff_conditions(P: Bimodule, Q: Bimodule, s: int):
    f, n = P.field, P.algebra.dim
    ops = [delta_operator(P, Q, P.algebra.basis(i)) for i in range(n)]
    for tup in itertools.product(range(n), repeat=s + 1):
        m = ops[tup[0]]
        for c in tup[1:]:
            m = f.matmul(m, ops[c])
        yield m


def diff_space(P: Bimodule, Q: Bimodule, s: int) -> HomSpace:
    """All Q-valued differential operators of order <= s on P."""
    if not 0 <= s <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}")
    _require_commutative(P.algebra)
    f, N = P.field, P.dim * Q.dim
    if N == 0:
        return HomSpace(P, Q, Subspace.zero(f, 0), f"diff({s})")
    return HomSpace(P, Q, kernel_blocks(f, N, _diff_conditions(P, Q, s)), f"diff({s})")


def is_diff_op(op: LinMap, s: int) -> DiffOpCertificate:
    """Check the order-s condition; a violation reports the first failing tuple."""
    _require_commutative(op.dom.algebra)
    alg = op.dom.algebra
    for tup in itertools.product(range(alg.dim), repeat=s + 1):
        cur = op
        for c in reversed(tup):
            cur = delta(alg.basis(c), cur)
        if not cur.is_zero():
            p = int(np.flatnonzero(np.asarray(cur.matrix != 0).any(axis=0))[0])
            return DiffOpCertificate(s, op, False, tuple(tup) + (p,))
    return DiffOpCertificate(s, op, True)


def derivation_space(alg: Algebra, Q: Bimodule) -> HomSpace:
    """Maps D: A -> Q with D(ab) = a D(b) + b D(a)."""
    f, n, q = alg.field, alg.dim, Q.dim
    A = regular_bimodule(alg)
    Iq = f.eye(q)

    def rows():
        for i, j in itertools.product(range(n), repeat=2):
            eij = alg.structure[i, j][:, None]
            ej, ei = alg.basis(j)[:, None], alg.basis(i)[:, None]
            yield f.normalize(kron_op(f, Iq, eij) - kron_op(f, Q.lact[i], ej)
                              - kron_op(f, Q.lact[j], ei))

    return HomSpace(A, Q, kernel_blocks(f, q * n, rows()), "derivation")


def decompose_first_order(alg: Algebra, Q: Bimodule, op: LinMap) -> tuple[LinMap, LinMap]:
    """Split a first-order operator on A into ``a -> a op(1)`` plus a derivation."""
    if not is_diff_op(op, 1).verified:
        raise NotFirstOrder("operator is not of first order")
    f = alg.field
    v1 = op(alg.unit)
    cols = [f.matmul(Q.lact[i], v1) for i in range(alg.dim)]
    zero_order = LinMap(op.dom, op.cod, f.normalize(np.stack(cols, axis=1)) if cols
                        else f.zeros((Q.dim, 0)))
    return zero_order, op - zero_order


def h_morphism(op: LinMap) -> np.ndarray:
    """Value at the unit."""
    return op(op.dom.algebra.unit)


def zero_order_from_value(alg: Algebra, Q: Bimodule, q) -> LinMap:
    """The operator ``a -> a q``, the unique zero-order operator with value q at 1."""
    f = alg.field
    q = f.array(q)
    mat = np.stack([f.matmul(Q.lact[i], q) for i in range(alg.dim)], axis=1)
    return LinMap(regular_bimodule(alg), Q, f.normalize(mat))


def factor_through_diff1(P: Bimodule, Q: Bimodule, op: LinMap) -> list[LinMap]:
    """``f(p)`` for each basis p of P, where ``f(p)(a) = op(a p)``."""
    if not is_diff_op(op, 1).verified:
        raise NotFirstOrder("operator is not of first order")
    f, alg = P.field, P.algebra
    A = regular_bimodule(alg)
    out = []
    for j in range(P.dim):
        cols = [f.matmul(op.matrix, P.lact[i][:, j]) for i in range(alg.dim)]
        out.append(LinMap(A, Q, f.normalize(np.stack(cols, axis=1))))
    return out


def check_iso_n1(P: Bimodule, Q: Bimodule) -> IsoReport:
    """Compare Diff_1(P, Q) with A-module maps P -> Diff_1(A, Q) (star structure).

    A map F: P -> Diff_1(A, Q) is stored as a coefficient matrix C
    (r x P.dim) against the basis D_1..D_r of Diff_1(A, Q); the module law
    ``F(e_i p) = e_i * F(p)`` reads ``C @ P.lact[i] = S_i @ C``, where S_i is
    the star action in that basis.
    """
    _require_commutative(P.algebra)
    f, alg = P.field, P.algebra
    lhs = diff_space(P, Q, 1)
    A = regular_bimodule(alg)
    d1 = diff_space(A, Q, 1)
    r, m = d1.dim, P.dim
    star = []
    for i in range(alg.dim):
        cols = []
        for D in d1.maps():
            c = d1.space.coords(star_apply(alg.basis(i), D).vec)
            assert c is not None, "Diff_1(A, Q) is not closed under the star action"
            cols.append(c)
        star.append(f.normalize(np.stack(cols, axis=1)) if cols else f.zeros((0, 0)))
    if r * m == 0:
        rhs = Subspace.zero(f, r * m)
    else:
        rhs = kernel_blocks(f, r * m, (
            f.normalize(kron_op(f, f.eye(r), P.lact[i]) - kron_op(f, star[i], f.eye(m)))
            for i in range(alg.dim)))
    images = []
    for op in lhs.maps():
        parts = factor_through_diff1(P, Q, op)
        coeff = [d1.space.coords(g.vec) for g in parts]
        assert all(c is not None for c in coeff), "factor map left Diff_1(A, Q)"
        images.append(f.normalize(np.stack(coeff, axis=1)).reshape(-1) if coeff
                      else f.zeros(0))
    if images:
        img = np.stack(images)
        injective = rank(f, img) == lhs.dim
        lands = all(v in rhs for v in img)
    else:
        injective, lands = True, True
    return IsoReport(lhs.dim, rhs.dim, injective, lands)

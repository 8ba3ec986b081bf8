"""
Jet modules J^k(P) = (A (x)_K P) / mu^{k+1} for k in {1, 2}.

``delta^b(a (x) p) = (b a) (x) p - a (x) (b p)``; mu^{k+1} is spanned by all
(k+1)-fold composites applied to basis tensors, which suffices because the
composite is multilinear in every argument.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algcore import Algebra, noncommuting_pairs
from .bimod import (Bimodule, LinMap, TensorSpace, bimodule_from_actions, hom_space,
                    pure_tensor, tensor_over_K)
from .commdiff import DiffOpCertificate, IsoReport, _require_commutative, diff_space, is_diff_op
from .errors import ActionDescentFailure, NonUnique, NoSolution, NotFirstOrder
from .exactla import AffineSolution, Quotient, Subspace, kron_op, quotient_by, rank, solve_affine

MAX_JET_ORDER = 2


def delta_upper_matrix(P: Bimodule, b) -> np.ndarray:
    """Matrix of ``delta^b`` on ``A (x) P``."""
    f, alg = P.field, P.algebra
    return f.normalize(np.kron(alg.lmul(b), f.eye(P.dim)) - np.kron(f.eye(alg.dim), P.lmat(b)))


def delta_upper(P: Bimodule, b, t) -> np.ndarray:
    return P.field.matmul(delta_upper_matrix(P, b), np.asarray(t))


def left_action_ambient(P: Bimodule, b) -> np.ndarray:
    """``b (a (x) p) = (b a) (x) p``."""
    f = P.field
    return f.normalize(np.kron(P.algebra.lmul(b), f.eye(P.dim)))


def star_action_ambient(P: Bimodule, b) -> np.ndarray:
    """``b * (a (x) p) = a (x) (b p)``."""
    f = P.field
    return f.normalize(np.kron(f.eye(P.algebra.dim), P.lmat(b)))


def contraction(P: Bimodule) -> np.ndarray:
    """``a (x) p -> a p`` as a (m x n*m) matrix."""
    f = P.field
    if P.algebra.dim == 0:
        return f.zeros((P.dim, 0))
    return f.normalize(np.concatenate(list(P.lact), axis=1))


def mu_submodule(P: Bimodule, k: int) -> Subspace:
    if k not in (1, 2):
        raise ValueError("jet order must be 1 or 2")
    f, n = P.field, P.algebra.dim
    N = n * P.dim
    ops = [delta_upper_matrix(P, P.algebra.basis(i)) for i in range(n)]
    gens = []
    for tup in itertools.product(range(n), repeat=k + 1):
        m = ops[tup[0]]
        for b in tup[1:]:
            m = f.matmul(m, ops[b])
        gens.append(m.T)            # columns are images of basis tensors
    if not gens or N == 0:
        return Subspace.zero(f, N)
    return Subspace.span(f, N, np.concatenate(gens, axis=0))


def relation_element(P: Bimodule, a, b, p) -> np.ndarray:
    """``delta^a delta^b (1 (x) p) = 1(x)abp - a(x)bp - b(x)ap + ab(x)p``."""
    f, alg = P.field, P.algebra
    t = pure_tensor(f, alg.unit, p)
    return delta_upper(P, a, delta_upper(P, b, t))


@dataclass(frozen=True, eq=False)
class JetModule:
    base: Bimodule
    order: int
    ambient: TensorSpace
    mu: Subspace
    quot: Quotient
    left_action: np.ndarray     # (n, d, d)
    star_action: np.ndarray     # (n, d, d)
    module: Bimodule            # J^k(P) with the left action on both sides
    jk_map: LinMap              # P -> J^k(P), p -> class of 1 (x) p
    pi_map: LinMap | None       # J^k(P) -> P, class of a (x) p -> a p

    @property
    def dim(self) -> int:
        return self.quot.dim

    def class_of(self, a, p) -> np.ndarray:
        return self.quot.project(pure_tensor(self.base.field, a, p))


def _descends(f, act: np.ndarray, mu: Subspace) -> bool:
    return all(f.matmul(act, v) in mu for v in mu.basis)


def jet_module(P: Bimodule, k: int = 1) -> JetModule:
    _require_commutative(P.algebra)
    f, alg = P.field, P.algebra
    n, m = alg.dim, P.dim
    space = tensor_over_K(alg, P)
    mu = mu_submodule(P, k)
    quot = quotient_by(mu)
    lacts, sacts = [], []
    for i in range(n):
        la = left_action_ambient(P, alg.basis(i))
        sa = star_action_ambient(P, alg.basis(i))
        if not _descends(f, la, mu) or not _descends(f, sa, mu):
            raise ActionDescentFailure(f"action of {alg.name(i)} does not preserve mu")
        lacts.append(f.matmul(quot.projection, f.matmul(la, quot.section)))
        sacts.append(f.matmul(quot.projection, f.matmul(sa, quot.section)))
    d = quot.dim
    left_action = np.stack(lacts) if lacts else f.zeros((0, d, d))
    star_action = np.stack(sacts) if sacts else f.zeros((0, d, d))
    module = bimodule_from_actions(alg, left_action, left_action, require_central=True)
    one_tensor = f.normalize(np.kron(alg.unit[:, None], f.eye(m)))     # columns 1 (x) f_j
    jk = LinMap(P, module, f.matmul(quot.projection, one_tensor))
    contr = contraction(P)
    pi = None
    if not np.asarray(f.matmul(contr, mu.basis.T) != 0).any():
        pi = LinMap(module, P, f.matmul(contr, quot.section))
    return JetModule(P, k, space, mu, quot, left_action, star_action, module, jk, pi)


def generated_by_jets(jet: JetModule) -> bool:
    """Do the classes of ``1 (x) p`` span J^k(P) under the left action?"""
    f = jet.base.field
    vecs = [f.matmul(jet.left_action[i], jet.jk_map.matrix).T for i in range(jet.left_action.shape[0])]
    if jet.dim == 0:
        return True
    return rank(f, np.concatenate(vecs, axis=0)) == jet.dim


def j1_is_first_order(P: Bimodule) -> DiffOpCertificate:
    jet = jet_module(P, 1)
    return is_diff_op(jet.jk_map, 1)


def factor_through_jet(P: Bimodule, Q: Bimodule, op: LinMap, jet: JetModule | None = None) -> LinMap:
    """The unique left A-module map g: J^1(P) -> Q with ``g(J^1 p) = op(p)``."""
    if not is_diff_op(op, 1).verified:
        raise NotFirstOrder("operator is not of first order")
    jet = jet or jet_module(P, 1)
    f = P.field
    d, q = jet.dim, Q.dim
    # unknown G (q x d):  G @ jk = op ;  G @ left_action[i] - Q.lact[i] @ G = 0
    blocks = [kron_op(f, f.eye(q), jet.jk_map.matrix)]
    rhs = [op.matrix.reshape(-1)]
    for i in range(P.algebra.dim):
        blocks.append(f.normalize(kron_op(f, f.eye(q), jet.left_action[i])
                                  - kron_op(f, Q.lact[i], f.eye(d))))
        rhs.append(f.zeros(q * d))
    sol = solve_affine(f, np.concatenate(blocks, axis=0), np.concatenate(rhs))
    if not isinstance(sol, AffineSolution):
        raise NoSolution("no module map J^1(P) -> Q factors the operator")
    if sol.homogeneous.dim:
        raise NonUnique(f"factorization through J^1 has {sol.homogeneous.dim} free parameters")
    return LinMap.from_vec(jet.module, Q, sol.particular)


def check_iso_550(P: Bimodule, Q: Bimodule) -> IsoReport:
    """Compare Diff_1(P, Q) with left A-module maps J^1(P) -> Q."""
    _require_commutative(P.algebra)
    f = P.field
    lhs = diff_space(P, Q, 1)
    jet = jet_module(P, 1)
    rhs = hom_space(jet.module, Q, "left_hom")
    images = [factor_through_jet(P, Q, op, jet).vec for op in lhs.maps()]
    if images:
        img = np.stack(images)
        injective = rank(f, img) == lhs.dim
        lands = all(v in rhs.space for v in img)
    else:
        injective, lands = True, True
    return IsoReport(lhs.dim, rhs.dim, injective, lands)


# ---------------------------------------------------------------------------
# noncommutative defect


@dataclass(frozen=True, eq=False)
class JetDefect:
    defect_map: np.ndarray               # contraction restricted to mu^2, (m x dim mu)
    mu: Subspace
    witness: tuple[int, int, np.ndarray]  # (a, b, p)
    relation: np.ndarray                  # relation element in A (x) P
    image: np.ndarray                     # its contraction, equal to (ab - ba) p


def _probe_vectors(P: Bimodule):
    if P.generator is not None:
        yield P.generator
    for j in range(P.dim):
        yield P.basis(j)


def nc_jet_defect(alg: Algebra, P: Bimodule) -> JetDefect | None:
    """Where the contraction ``a (x) p -> a p`` fails to kill mu^2.

    Returns None when it does kill mu^2, which always happens over a
    commutative algebra.
    """
    f = P.field
    mu = mu_submodule(P, 1)
    contr = contraction(P)
    dmap = f.matmul(contr, mu.basis.T) if mu.dim else f.zeros((P.dim, 0))
    if not np.asarray(dmap != 0).any():
        return None
    pairs = noncommuting_pairs(alg)
    for a, b in pairs:
        for p in _probe_vectors(P):
            rel = relation_element(P, alg.basis(a), alg.basis(b), p)
            img = f.matmul(contr, rel)
            if np.asarray(img != 0).any():
                assert rel in mu
                return JetDefect(dmap, mu, (a, b, p), rel, img)
    raise AssertionError("nonzero defect without a witnessing basis triple")

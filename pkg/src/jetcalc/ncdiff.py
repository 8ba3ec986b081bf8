"""
First-order operators over noncommutative algebras.

Covers the probes showing where the commutative notions break, operators on
the algebra itself, and the derivation-pair condition

    D(a p b) = (dr(a))(p) b + a D(p) b + a (dl(b))(p)

where ``dr`` is a derivation valued in right-module maps P -> Q and ``dl``
one valued in left-module maps.  Deciding whether such a pair exists is a
linear feasibility problem in the entries of ``dr`` and ``dl``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algcore import Algebra, center, make_algebra, noncommuting_pairs
from .bimod import (Bimodule, HomSpace, LinMap, bimodule_from_actions, left_apply, module_center,
                    regular_bimodule)
from .errors import InvalidDerivation, InvalidWitness, MalformedInput
from .exactla import (AffineSolution, Infeasible, Subspace, kernel, kernel_blocks, kron_op,
                      meet_join, solve_affine, solve_affine_blocks)


@dataclass(frozen=True, eq=False)
class Verdict:
    verified: bool
    witness: tuple | None = None
    detail: object = None

    @property
    def status(self) -> str:
        return "Verified" if self.verified else "Violated"


@dataclass(frozen=True, eq=False)
class TripleWitness:
    a: int
    b: int
    p: np.ndarray
    value: np.ndarray


def _nz(arr) -> bool:
    return bool(np.asarray(arr != 0).any())


def _probe_vectors(P: Bimodule):
    if P.generator is not None:
        yield P.generator
    for j in range(P.dim):
        yield P.basis(j)


def nc_zero_order_failure(alg: Algebra) -> TripleWitness | None:
    """Where the identity of A violates the commutative first-order identity.

    Evaluates ``D(abp) - a D(bp) - b D(ap) + ab D(p)`` for D = id on the
    regular bimodule; that is ``(ab - ba) p``.
    """
    P = regular_bimodule(alg)
    f = alg.field
    for a, b in noncommuting_pairs(alg):
        ea, eb = alg.basis(a), alg.basis(b)
        for p in _probe_vectors(P):
            ab = alg.mul(ea, eb)
            val = f.normalize(P.act(ab, p) - P.act(ea, P.act(eb, p))
                              - P.act(eb, P.act(ea, p)) + P.act(ab, p))
            if _nz(val):
                return TripleWitness(a, b, p, val)
    return None


# ---------------------------------------------------------------------------
# operators on the algebra


def _ring_rows(alg: Algebra, Q: Bimodule, with_unit_term: bool):
    f, n, q = alg.field, alg.dim, Q.dim
    Iq = f.eye(q)
    u = alg.unit[:, None]
    for i, j in itertools.product(range(n), repeat=2):
        eij = alg.structure[i, j]
        ei, ej = alg.basis(i)[:, None], alg.basis(j)[:, None]
        # D(e_i e_j) - e_i D(e_j) - D(e_i) e_j [+ e_i e_j D(1)]
        row = (kron_op(f, Iq, eij[:, None]) - kron_op(f, Q.lact[i], ej)
               - kron_op(f, Q.ract[j], ei))
        if with_unit_term:
            row = row + kron_op(f, Q.lmat(eij), u)
        yield f.normalize(row)


def nc_derivation_space(alg: Algebra, Q: Bimodule) -> HomSpace:
    """Q-valued derivations ``D(ab) = D(a) b + a D(b)``."""
    A = regular_bimodule(alg)
    space = kernel_blocks(alg.field, Q.dim * alg.dim, _ring_rows(alg, Q, False))
    return HomSpace(A, Q, space, "derivation")


def inner_derivation(alg: Algebra, m) -> LinMap:
    """``a -> m a - a m``."""
    A = regular_bimodule(alg)
    m = alg.field.array(m)
    return LinMap(A, A, alg.field.normalize(alg.lmul(m) - alg.rmul(m)))


def inner_generator(alg: Algebra, D: LinMap) -> np.ndarray | None:
    """Some m with ``D = ad_m``, or None when D is not inner."""
    f = alg.field
    cols = [f.normalize(alg.left_mats[t] - alg.right_mats[t]).reshape(-1) for t in range(alg.dim)]
    sol = solve_affine(f, np.stack(cols, axis=1), D.vec)
    return sol.particular if isinstance(sol, AffineSolution) else None


def zero_order_space(alg: Algebra, Q: Bimodule) -> Subspace:
    """Maps ``a -> a q`` with q in the center of Q."""
    f, n = alg.field, alg.dim
    zq = module_center(Q)
    vecs = [np.stack([f.matmul(Q.lact[i], z) for i in range(n)], axis=1).reshape(-1)
            for z in zq.basis]
    return Subspace.span(f, Q.dim * n, np.array(vecs)) if vecs else Subspace.zero(f, Q.dim * n)


def first_order_on_ring(alg: Algebra, Q: Bimodule) -> HomSpace:
    """Maps with ``D(ab) = a D(b) + D(a) b - ab D(1)``.

    Every member has D(1) in the center of Q, and the space splits as
    derivations plus central-valued zero-order maps; both facts are asserted.
    """
    f = alg.field
    A = regular_bimodule(alg)
    space = kernel_blocks(f, Q.dim * alg.dim, _ring_rows(alg, Q, True))
    hs = HomSpace(A, Q, space, "first_order")
    zq = module_center(Q)
    for op in hs.maps():
        assert op(alg.unit) in zq, "value at 1 is not central"
    der = nc_derivation_space(alg, Q).space
    _, total = meet_join(der, zero_order_space(alg, Q))
    assert total == space, "first-order space is not derivations + central zero-order"
    return hs


def zq_module_closure(alg: Algebra, Q: Bimodule) -> bool:
    """Is the first-order space stable under left multiplication by central elements?"""
    hs = first_order_on_ring(alg, Q)
    for z in center(alg).basis:
        for op in hs.maps():
            if left_apply(z, op) not in hs:
                return False
    return True


@dataclass(frozen=True)
class ObstructionReport:
    dim_morphisms: int      # module maps P -> first-order operators on A
    dim_obtainable: int     # span of the operators h o f they produce
    dim_hom_k: int
    dim_center_q: int
    images_central: bool

    @property
    def strict(self) -> bool:
        return self.dim_obtainable < self.dim_hom_k


def center_obstruction(alg: Algebra, P: Bimodule, Q: Bimodule) -> ObstructionReport:
    """Operators P -> Q of the form ``p -> f(p)(1)`` only reach the center of Q.

    f ranges over linear maps P -> D_1 (first-order operators A -> Q) with
    ``f(a p) = a * f(p)``, where ``(a * g)(x) = g(a x)``.
    """
    f = alg.field
    n, m, q = alg.dim, P.dim, Q.dim
    D = first_order_on_ring(alg, Q)
    r = D.dim
    basis = list(D.maps())
    zq = module_center(Q)
    if r * m == 0:
        return ObstructionReport(0, 0, q * m, zq.dim, True)
    # unknown C (r x m); vec(D_k) stacked as columns of Dmat (q*n x r)
    Dmat = np.stack([g.vec for g in basis], axis=1)
    starred = [np.stack([f.matmul(g.matrix, alg.left_mats[i]).reshape(-1) for g in basis], axis=1)
               for i in range(n)]

    def rows():
        # Dmat C P.lact[i] - starred[i] C = 0, as maps into Hom_K(A, Q) (x) P
        for i in range(n):
            yield f.normalize(kron_op(f, Dmat, P.lact[i]) - kron_op(f, starred[i], f.eye(m)))

    morphs = kernel_blocks(f, r * m, rows())
    h_vals = np.stack([g(alg.unit) for g in basis], axis=1)          # (q x r)
    obtained = []
    for c in morphs.basis:
        C = c.reshape(r, m)
        obtained.append(f.matmul(h_vals, C))
    central = all(col in zq for mat in obtained for col in mat.T)
    span = Subspace.span(f, q * m, np.array([o.reshape(-1) for o in obtained])) \
        if obtained else Subspace.zero(f, q * m)
    return ObstructionReport(morphs.dim, span.dim, q * m, zq.dim, central)


# ---------------------------------------------------------------------------
# derivation-pair condition


@dataclass(frozen=True, eq=False)
class DerivationWitness:
    """``d_right[i]`` is the right-module map attached to e_i, ``d_left[i]`` the left one."""

    d_right: np.ndarray     # (n, q, m)
    d_left: np.ndarray      # (n, q, m)


def _witness_violation(P: Bimodule, Q: Bimodule, w: DerivationWitness) -> str | None:
    f, alg = P.field, P.algebra
    n = alg.dim
    R, L = w.d_right, w.d_left
    if R.shape != (n, Q.dim, P.dim) or L.shape != (n, Q.dim, P.dim):
        return f"witness arrays must have shape {(n, Q.dim, P.dim)}"
    for i, j in itertools.product(range(n), repeat=2):
        if _nz(f.matmul(R[i], P.ract[j]) - f.matmul(Q.ract[j], R[i])):
            return f"d_right[{i}] is not a right-module map (fails against e{j})"
        if _nz(f.matmul(L[i], P.lact[j]) - f.matmul(Q.lact[j], L[i])):
            return f"d_left[{i}] is not a left-module map (fails against e{j})"
    for i, j in itertools.product(range(n), repeat=2):
        c = alg.structure[i, j]
        Rij = np.tensordot(c, R, axes=(0, 0))
        Lij = np.tensordot(c, L, axes=(0, 0))
        if _nz(f.normalize(Rij - f.matmul(Q.lact[i], R[j]) - f.matmul(R[i], P.lact[j]))):
            return f"d_right fails the Leibniz rule at (e{i}, e{j})"
        if _nz(f.normalize(Lij - f.matmul(L[j], P.ract[i]) - f.matmul(Q.ract[j], L[i]))):
            return f"d_left fails the Leibniz rule at (e{i}, e{j})"
    return None


def validate_witness(P: Bimodule, Q: Bimodule, w: DerivationWitness) -> None:
    msg = _witness_violation(P, Q, w)
    if msg:
        raise InvalidWitness(msg)


def n21_check(P: Bimodule, Q: Bimodule, op: LinMap, w: DerivationWitness) -> Verdict:
    """Check the derivation-pair identity on all basis triples (a, p, b)."""
    validate_witness(P, Q, w)
    f, n = P.field, P.algebra.dim
    D = op.matrix
    first = None
    for i, k in itertools.product(range(n), repeat=2):
        lhs = f.matmul(D, f.matmul(P.lact[i], P.ract[k]))
        rhs = (f.matmul(Q.ract[k], w.d_right[i])
               + f.matmul(Q.lact[i], f.matmul(Q.ract[k], D))
               + f.matmul(Q.lact[i], w.d_left[k]))
        bad = np.flatnonzero(np.asarray(f.normalize(lhs - rhs) != 0).any(axis=0))
        if bad.size:
            cand = (i, int(bad[0]), k)
            if first is None or cand < first:
                first = cand
    return Verdict(first is None, first)


def n21_system(P: Bimodule, Q: Bimodule, op: LinMap):
    """Row blocks ``[M | b]`` of the feasibility system for the derivation pair.

    Unknown layout: vec(d_right[0]), ..., vec(d_right[n-1]), vec(d_left[0]), ...,
    each a row-major (q x m) block.
    """
    f, alg = P.field, P.algebra
    n, q, m = alg.dim, Q.dim, P.dim
    B = q * m
    ncols = 2 * n * B
    Iq, Im = f.eye(q), f.eye(m)

    def R(i):
        return slice(i * B, (i + 1) * B)

    def L(i):
        return slice((n + i) * B, (n + i + 1) * B)

    def blank():
        return f.zeros((B, ncols + 1))

    def blocks():
        for i, j in itertools.product(range(n), repeat=2):
            row = blank()
            row[:, R(i)] = f.normalize(kron_op(f, Iq, P.ract[j]) - kron_op(f, Q.ract[j], Im))
            yield row
            row = blank()
            row[:, L(i)] = f.normalize(kron_op(f, Iq, P.lact[j]) - kron_op(f, Q.lact[j], Im))
            yield row
        eye_b = f.eye(B)
        for i, j in itertools.product(range(n), repeat=2):
            c = alg.structure[i, j]
            for side, first_term, second_term in (
                    (R, kron_op(f, Q.lact[i], Im), kron_op(f, Iq, P.lact[j])),
                    (L, kron_op(f, Iq, P.ract[i]), kron_op(f, Q.ract[j], Im))):
                row = blank()
                for k in range(n):
                    if c[k] != 0:
                        row[:, side(k)] = f.normalize(row[:, side(k)] + c[k] * eye_b)
                # a.d(b) acts on slot j, d(a).b on slot i
                row[:, side(j)] = f.normalize(row[:, side(j)] - first_term)
                row[:, side(i)] = f.normalize(row[:, side(i)] - second_term)
                yield row
        D = op.matrix
        for i, j in itertools.product(range(n), repeat=2):
            row = blank()
            row[:, R(i)] = kron_op(f, Q.ract[j], Im)
            row[:, L(j)] = f.normalize(row[:, L(j)] + kron_op(f, Q.lact[i], Im))
            target = (f.matmul(D, f.matmul(P.lact[i], P.ract[j]))
                      - f.matmul(Q.lact[i], f.matmul(Q.ract[j], D)))
            row[:, ncols] = f.normalize(target).reshape(-1)
            yield row

    return ncols, blocks


def n21_solve(P: Bimodule, Q: Bimodule, op: LinMap) -> DerivationWitness | Infeasible:
    """Find a derivation pair for ``op``, or certify that none exists.

    The returned pair is the canonical solution with all free variables zero.
    An ``Infeasible`` certificate refers to rows of :func:`n21_system`.
    """
    if P.algebra is not Q.algebra and P.algebra.field != Q.algebra.field:
        raise MalformedInput("P and Q must be bimodules over one algebra")
    if op.matrix.shape != (Q.dim, P.dim):
        raise MalformedInput(f"operator must be {Q.dim} x {P.dim}")
    n, q, m = P.algebra.dim, Q.dim, P.dim
    ncols, blocks = n21_system(P, Q, op)
    sol = solve_affine_blocks(P.field, ncols, blocks)
    if isinstance(sol, Infeasible):
        return sol
    x = sol.particular
    half = n * q * m
    w = DerivationWitness(x[:half].reshape(n, q, m).copy(), x[half:].reshape(n, q, m).copy())
    verdict = n21_check(P, Q, op, w)
    assert verdict.verified, f"solver returned a non-witness: {verdict.witness}"
    return w


def n21_operator_space(P: Bimodule, Q: Bimodule) -> HomSpace:
    """All operators P -> Q admitting some derivation pair.

    The system is linear in the operator and the pair jointly, so this is the
    projection of one kernel onto the operator coordinates.
    """
    f, n = P.field, P.algebra.dim
    q, m = Q.dim, P.dim
    N = q * m
    ncols, blocks = n21_system(P, Q, LinMap.zero(P, Q))
    triple_start = 4 * n * n          # hom and Leibniz blocks come first

    def joint():
        for idx, block in enumerate(blocks()):
            d_part = f.zeros((block.shape[0], N))
            if idx >= triple_start:
                i, j = divmod(idx - triple_start, n)
                # moving the operator's part of the right-hand side across
                d_part = f.normalize(kron_op(f, f.matmul(Q.lact[i], Q.ract[j]), f.eye(m))
                                     - kron_op(f, f.eye(q), f.matmul(P.lact[i], P.ract[j])))
            yield np.concatenate([block[:, :ncols], d_part], axis=1)

    ker = kernel_blocks(f, ncols + N, joint())
    if not ker.dim or N == 0:
        return HomSpace(P, Q, Subspace.zero(f, N), "n21")
    return HomSpace(P, Q, Subspace.span(f, N, ker.basis[:, ncols:]), "n21")


def n21_certificate_holds(P: Bimodule, Q: Bimodule, op: LinMap, cert: Infeasible) -> bool:
    """Replay a certificate: the weighted rows must give 0 = nonzero."""
    f = P.field
    ncols, blocks = n21_system(P, Q, op)
    acc = f.zeros(ncols + 1)
    offset = 0
    for block in blocks():
        for r, y in cert.certificate.items():
            if offset <= r < offset + block.shape[0]:
                acc = f.normalize(acc + y * block[r - offset])
        offset += block.shape[0]
    return not _nz(acc[:ncols]) and acc[ncols] != 0


# ---------------------------------------------------------------------------
# truncated universal calculus and connections


@dataclass(frozen=True, eq=False)
class DiffCalculus:
    algebra: Algebra
    omega: Subspace         # kernel of multiplication A (x) A -> A
    total: Bimodule         # A + Omega^1
    product: Algebra        # (A + Omega^1, o) with Omega^1 o Omega^1 = 0
    d: LinMap

    @property
    def degree0(self) -> int:
        return self.algebra.dim

    def embed(self, a) -> np.ndarray:
        """Degree-0 element of the total space."""
        f = self.algebra.field
        out = f.zeros(self.total.dim)
        out[:self.degree0] = a
        return out


def _restrict(f, act: np.ndarray, omega: Subspace) -> np.ndarray:
    img = f.matmul(act, omega.basis.T)
    return img[list(omega.pivots), :]


def universal_calculus_truncated(alg: Algebra) -> DiffCalculus:
    f, n = alg.field, alg.dim
    mult = f.normalize(alg.structure.reshape(n * n, n).T)        # x (x) y -> x y
    omega = kernel(f, mult)
    r = omega.dim
    N = n + r
    lact, ract = [], []
    for i in range(n):
        la = f.zeros((N, N))
        ra = f.zeros((N, N))
        la[:n, :n] = alg.left_mats[i]
        ra[:n, :n] = alg.right_mats[i]
        if r:
            la[n:, n:] = _restrict(f, np.kron(alg.left_mats[i], f.eye(n)), omega)
            ra[n:, n:] = _restrict(f, np.kron(f.eye(n), alg.right_mats[i]), omega)
        lact.append(la)
        ract.append(ra)
    total = bimodule_from_actions(alg, np.stack(lact), np.stack(ract))
    # product: degree-0 times anything uses the bimodule actions
    prod = f.zeros((N, N, N))
    prod[:n, :n, :n] = alg.structure
    for i in range(n):
        prod[i, n:, :] = lact[i][:, n:].T          # e_i o w_k
        prod[n:, i, :] = ract[i][:, n:].T          # w_k o e_i
    unit = np.concatenate([alg.unit, f.zeros(r)])
    product = make_algebra(f, prod, unit)
    dmat = f.zeros((N, N))
    for i in range(n):
        ei = alg.basis(i)
        t = f.normalize(np.outer(alg.unit, ei).reshape(-1) - np.outer(ei, alg.unit).reshape(-1))
        c = omega.coords(t)
        assert c is not None, "d(a) must lie in the kernel of multiplication"
        dmat[n:, i] = c
    d = LinMap(total, total, dmat)
    calc = DiffCalculus(alg, omega, total, product, d)
    assert not _nz(f.matmul(dmat, dmat)), "d o d != 0"
    for i, j in itertools.product(range(n), repeat=2):
        a, b = calc.embed(alg.basis(i)), calc.embed(alg.basis(j))
        lhs = d(product.mul(a, b))
        rhs = f.normalize(product.mul(d(a), b) + product.mul(a, d(b)))
        assert np.array_equal(lhs, rhs), f"Leibniz rule fails at ({i}, {j})"
    return calc


def calculus_identity(calc: DiffCalculus) -> Verdict:
    """``d(apb) = (da) o pb + a (dp) b + ap o db`` on basis triples."""
    f, alg = calc.algebra.field, calc.algebra
    prod, d, P = calc.product, calc.d, calc.total
    for i in range(alg.dim):
        a = calc.embed(alg.basis(i))
        for j in range(P.dim):
            p = P.basis(j)
            for k in range(alg.dim):
                b = calc.embed(alg.basis(k))
                apb = prod.mul(prod.mul(a, p), b)
                rhs = (prod.mul(d(a), prod.mul(p, b)) + prod.mul(prod.mul(a, d(p)), b)
                       + prod.mul(prod.mul(a, p), d(b)))
                if _nz(f.normalize(d(apb) - rhs)):
                    return Verdict(False, (i, j, k))
    return Verdict(True)


@dataclass(frozen=True, eq=False)
class DVConnection:
    u: LinMap           # derivation A -> A
    nabla: LinMap       # P -> P


def dv_check(P: Bimodule, conn: DVConnection, solve: bool = True) -> Verdict:
    """Check ``nabla(apb) = u(a) p b + a nabla(p) b + a p u(b)`` on basis triples.

    When the rule holds and ``solve`` is set, ``nabla`` is also run through
    :func:`n21_solve` and the derivation pair is returned as ``detail``.
    """
    alg, f = P.algebra, P.field
    reg = regular_bimodule(alg)
    if conn.u.vec not in nc_derivation_space(alg, reg).space:
        raise InvalidDerivation("u is not a derivation of the algebra")
    N = conn.nabla.matrix
    U = conn.u.matrix
    for i in range(alg.dim):
        ua = U[:, i]
        for k in range(alg.dim):
            ub = U[:, k]
            lhs = f.matmul(N, f.matmul(P.lact[i], P.ract[k]))
            rhs = (f.matmul(P.ract[k], P.lmat(ua)) + f.matmul(P.lact[i], f.matmul(P.ract[k], N))
                   + f.matmul(P.lact[i], P.rmat(ub)))
            bad = np.flatnonzero(np.asarray(f.normalize(lhs - rhs) != 0).any(axis=0))
            if bad.size:
                return Verdict(False, (i, int(bad[0]), k))
    if not solve:
        return Verdict(True)
    w = n21_solve(P, P, conn.nabla)
    assert not isinstance(w, Infeasible), "connection satisfies the rule but has no derivation pair"
    return Verdict(True, None, w)

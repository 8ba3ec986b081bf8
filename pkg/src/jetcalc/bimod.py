"""
Bimodules over an :class:`~jetcalc.algcore.Algebra`, linear maps between
them and solved spaces of homomorphisms.

A bimodule of dimension m is stored by two action tensors:
``left[i, j, k]`` is the coefficient of ``f_k`` in ``e_i f_j`` and
``right[j, i, k]`` the coefficient of ``f_k`` in ``f_j e_i``.

Linear maps P -> Q are (Q.dim x P.dim) matrices.  Hom spaces are subspaces
of the row-major flattening of that matrix, so equal spaces have equal
canonical bases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from .algcore import Algebra, _combine
from .errors import AxiomViolation, CentralityViolation, DimensionMismatch, MalformedInput
from .exactla import Subspace, kernel, kernel_blocks, kron_op, meet_join

HOM_KINDS = ("k_linear", "left_hom", "right_hom", "bimodule_hom")


@dataclass(frozen=True, eq=False)
class Bimodule:
    algebra: Algebra
    left: np.ndarray
    right: np.ndarray
    generator: np.ndarray | None = None   # distinguished element, e.g. 1 in the regular bimodule
    names: tuple[str, ...] = ()
    central: bool = False

    @property
    def field(self):
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.left.shape[1]

    def name(self, j: int) -> str:
        return self.names[j] if self.names else f"f{j}"

    def basis(self, j: int) -> np.ndarray:
        v = self.field.zeros(self.dim)
        v[j] = self.field.one
        return v

    @cached_property
    def lact(self) -> np.ndarray:
        """``lact[i]`` is the matrix of ``p -> e_i p``."""
        return self.field.normalize(self.left.transpose(0, 2, 1))

    @cached_property
    def ract(self) -> np.ndarray:
        """``ract[i]`` is the matrix of ``p -> p e_i``."""
        return self.field.normalize(self.right.transpose(1, 2, 0))

    def lmat(self, a) -> np.ndarray:
        return _combine(self.field, a, self.lact)

    def rmat(self, a) -> np.ndarray:
        return _combine(self.field, a, self.ract)

    def act(self, a, p, b=None) -> np.ndarray:
        """``a p`` or ``a p b``."""
        f = self.field
        out = f.matmul(self.lmat(a), np.asarray(p))
        if b is not None:
            out = f.matmul(self.rmat(b), out)
        return out

    def describe(self, v) -> str:
        terms = []
        for j, c in enumerate(v):
            if c == 0:
                continue
            s = self.field.fmt(c)
            terms.append(self.name(j) if s == "1" else f"{s}*{self.name(j)}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"Bimodule(dim={self.dim}, algebra_dim={self.algebra.dim}, central={self.central})"


def _first_mismatch(f, a: np.ndarray, b: np.ndarray) -> int | None:
    bad = np.flatnonzero(np.asarray(f.normalize(a - b) != 0, dtype=bool).any(axis=0))
    return int(bad[0]) if bad.size else None


def _validate(mod: Bimodule, require_central: bool) -> None:
    alg, f = mod.algebra, mod.field
    n, m = alg.dim, mod.dim
    L, R = mod.lact, mod.ract
    eye = f.eye(m)
    if not np.array_equal(mod.lmat(alg.unit), eye):
        j = _first_mismatch(f, mod.lmat(alg.unit), eye)
        raise AxiomViolation("1 p = p", ("1", j))
    if not np.array_equal(mod.rmat(alg.unit), eye):
        j = _first_mismatch(f, mod.rmat(alg.unit), eye)
        raise AxiomViolation("p 1 = p", ("1", j))
    for i, j in itertools.product(range(n), repeat=2):
        eij = alg.structure[i, j]
        k = _first_mismatch(f, mod.lmat(eij), f.matmul(L[i], L[j]))
        if k is not None:
            raise AxiomViolation("(a b) p = a (b p)", (i, j, k))
        # p (e_i e_j) = (p e_i) e_j
        k = _first_mismatch(f, mod.rmat(eij), f.matmul(R[j], R[i]))
        if k is not None:
            raise AxiomViolation("p (a b) = (p a) b", (i, j, k))
        # (e_i p) e_j = e_i (p e_j)
        k = _first_mismatch(f, f.matmul(R[j], L[i]), f.matmul(L[i], R[j]))
        if k is not None:
            raise AxiomViolation("(a p) b = a (p b)", (i, j, k))
    if require_central:
        for i in range(n):
            k = _first_mismatch(f, L[i], R[i])
            if k is not None:
                raise CentralityViolation((i, k))


def make_bimodule(algebra: Algebra, left, right, require_central: bool = False,
                  generator=None, names=()) -> Bimodule:
    f = algebra.field
    L = f.array(left)
    R = f.array(right)
    n = algebra.dim
    if L.ndim != 3 or L.shape[0] != n or L.shape[1] != L.shape[2]:
        raise MalformedInput(f"left action must be {n} x m x m, got {L.shape}")
    m = L.shape[1]
    if R.shape != (m, n, m):
        raise MalformedInput(f"right action must be {m} x {n} x {m}, got {R.shape}")
    gen = None if generator is None else f.array(generator)
    mod = Bimodule(algebra, L, R, gen, tuple(names), require_central)
    _validate(mod, require_central)
    return mod


def bimodule_from_actions(algebra: Algebra, lact: np.ndarray, ract: np.ndarray,
                          require_central: bool = False, names=()) -> Bimodule:
    """Build from action matrices (``lact[i]`` acting on column vectors)."""
    f = algebra.field
    L = f.normalize(np.asarray(lact)).transpose(0, 2, 1)
    R = f.normalize(np.asarray(ract)).transpose(2, 0, 1)
    return make_bimodule(algebra, L, R, require_central, names=names)


def regular_bimodule(algebra: Algebra) -> Bimodule:
    """The algebra as a bimodule over itself, generated by its unit."""
    c = algebra.structure
    commutative = not np.asarray(algebra.field.normalize(c - c.transpose(1, 0, 2)) != 0).any()
    return make_bimodule(algebra, c, c, require_central=commutative,
                         generator=algebra.unit, names=algebra.names)


def direct_sum_bimodule(p: Bimodule, q: Bimodule) -> Bimodule:
    if p.algebra is not q.algebra:
        raise MalformedInput("direct sum needs bimodules over one algebra")
    f, n = p.field, p.algebra.dim
    m1, m2 = p.dim, q.dim
    L = f.zeros((n, m1 + m2, m1 + m2))
    L[:, :m1, :m1] = p.left
    L[:, m1:, m1:] = q.left
    R = f.zeros((m1 + m2, n, m1 + m2))
    R[:m1, :, :m1] = p.right
    R[m1:, :, m1:] = q.right
    names = ()
    if p.names or q.names:
        names = tuple(f"({p.name(j)},0)" for j in range(m1)) + \
            tuple(f"(0,{q.name(j)})" for j in range(m2))
    return make_bimodule(p.algebra, L, R, p.central and q.central, names=names)


def free_bimodule(algebra: Algebra, rank: int) -> Bimodule:
    """``A^rank`` with componentwise actions."""
    reg = regular_bimodule(algebra)
    if rank == 0:
        f, n = algebra.field, algebra.dim
        return make_bimodule(algebra, f.zeros((n, 0, 0)), f.zeros((0, n, 0)), reg.central)
    out = reg
    for _ in range(rank - 1):
        out = direct_sum_bimodule(out, reg)
    return out


def module_center(mod: Bimodule) -> Subspace:
    """``{p : a p = p a for all a}``."""
    f, n, m = mod.field, mod.algebra.dim, mod.dim
    if m == 0:
        return Subspace.zero(f, 0)
    return kernel(f, f.normalize(mod.lact - mod.ract).reshape(n * m, m))


# ---------------------------------------------------------------------------
# linear maps


@dataclass(frozen=True, eq=False)
class LinMap:
    dom: Bimodule
    cod: Bimodule
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.cod.dim, self.dom.dim):
            raise DimensionMismatch(
                f"map matrix {self.matrix.shape} does not fit {self.dom.dim} -> {self.cod.dim}")

    @classmethod
    def from_vec(cls, dom: Bimodule, cod: Bimodule, vec) -> "LinMap":
        return cls(dom, cod, np.asarray(vec).reshape(cod.dim, dom.dim).copy())

    @classmethod
    def zero(cls, dom: Bimodule, cod: Bimodule) -> "LinMap":
        return cls(dom, cod, dom.field.zeros((cod.dim, dom.dim)))

    @classmethod
    def identity(cls, mod: Bimodule) -> "LinMap":
        return cls(mod, mod, mod.field.eye(mod.dim))

    @property
    def field(self):
        return self.dom.field

    @property
    def vec(self) -> np.ndarray:
        return self.matrix.reshape(-1)

    def __call__(self, v) -> np.ndarray:
        return self.field.matmul(self.matrix, np.asarray(v))

    def _like(self, matrix) -> "LinMap":
        return LinMap(self.dom, self.cod, self.field.normalize(matrix))

    def __add__(self, other: "LinMap") -> "LinMap":
        return self._like(self.matrix + other.matrix)

    def __sub__(self, other: "LinMap") -> "LinMap":
        return self._like(self.matrix - other.matrix)

    def __neg__(self) -> "LinMap":
        return self._like(-self.matrix)

    def scale(self, c) -> "LinMap":
        return self._like(self.matrix * self.field(c))

    def is_zero(self) -> bool:
        return not np.asarray(self.matrix != 0).any()

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


def left_apply(a, phi: LinMap) -> LinMap:
    """``p -> a phi(p)``."""
    return phi._like(phi.field.matmul(phi.cod.lmat(a), phi.matrix))


def star_apply(a, phi: LinMap) -> LinMap:
    """``p -> phi(a p)``."""
    return phi._like(phi.field.matmul(phi.matrix, phi.dom.lmat(a)))


def right_apply(phi: LinMap, a) -> LinMap:
    """``p -> phi(p) a``."""
    return phi._like(phi.field.matmul(phi.cod.rmat(a), phi.matrix))


# ---------------------------------------------------------------------------
# hom spaces


@dataclass(frozen=True, eq=False)
class HomSpace:
    dom: Bimodule
    cod: Bimodule
    space: Subspace
    kind: str

    @property
    def dim(self) -> int:
        return self.space.dim

    def maps(self) -> Iterator[LinMap]:
        for v in self.space.basis:
            yield LinMap.from_vec(self.dom, self.cod, v)

    def __contains__(self, phi: LinMap) -> bool:
        return phi.vec in self.space

    def __repr__(self):
        return f"HomSpace({self.kind}, dim={self.dim}, {self.dom.dim}->{self.cod.dim})"


def hom_conditions(P: Bimodule, Q: Bimodule, kind: str) -> Iterator[np.ndarray]:
    """Row blocks whose kernel is the hom space of the given kind."""
    f = P.field
    Im, Iq = f.eye(P.dim), f.eye(Q.dim)
    for i in range(P.algebra.dim):
        if kind in ("left_hom", "bimodule_hom"):
            # Q.lact[i] X - X P.lact[i]
            yield f.normalize(kron_op(f, Q.lact[i], Im) - kron_op(f, Iq, P.lact[i]))
        if kind in ("right_hom", "bimodule_hom"):
            yield f.normalize(kron_op(f, Q.ract[i], Im) - kron_op(f, Iq, P.ract[i]))


def hom_space(P: Bimodule, Q: Bimodule, kind: str) -> HomSpace:
    if kind not in HOM_KINDS:
        raise MalformedInput(f"unknown hom kind {kind!r}")
    if P.algebra is not Q.algebra and P.algebra.field != Q.algebra.field:
        raise MalformedInput("hom space between modules over different fields")
    f, N = P.field, P.dim * Q.dim
    if kind == "k_linear" or P.algebra.dim == 0:
        space = Subspace.full(f, N)
    else:
        space = kernel_blocks(f, N, hom_conditions(P, Q, kind))
    return HomSpace(P, Q, space, kind)


def bimodule_hom_via_meet(P: Bimodule, Q: Bimodule) -> Subspace:
    return meet_join(hom_space(P, Q, "left_hom").space, hom_space(P, Q, "right_hom").space)[0]


# ---------------------------------------------------------------------------
# tensor product over K


@dataclass(frozen=True)
class TensorSpace:
    """``A (x)_K P`` with basis ``e_i (x) f_j`` at flat index ``i*m + j``."""

    n: int
    m: int

    @property
    def dim(self) -> int:
        return self.n * self.m

    def index(self, i: int, j: int) -> int:
        return i * self.m + j

    def unindex(self, k: int) -> tuple[int, int]:
        return divmod(k, self.m)


def tensor_over_K(algebra: Algebra, P: Bimodule) -> TensorSpace:
    if P.algebra.field != algebra.field:
        raise MalformedInput("tensor product over different fields")
    return TensorSpace(algebra.dim, P.dim)


def pure_tensor(field, a, p) -> np.ndarray:
    """Coordinates of ``a (x) p``."""
    return field.normalize(np.outer(np.asarray(a), np.asarray(p)).reshape(-1))

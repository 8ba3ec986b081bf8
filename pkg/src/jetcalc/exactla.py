"""
Exact dense linear algebra over the rationals and prime fields.

Vectors and matrices are plain numpy arrays.  Over GF(p) they have dtype
int64 with entries in [0, p); over Q they have dtype object holding
:class:`fractions.Fraction`.  Every function takes the field explicitly,
since an ndarray does not know which field its integers live in.

Row spaces are kept in reduced row-echelon form (RREF), which is canonical:
two equal subspaces have identical basis arrays.  Large systems are fed to
:class:`Echelon` block by block so the full coefficient matrix never has to
exist in memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import DimensionMismatch, MalformedInput

__all__ = [
    "Field", "Rationals", "PrimeField", "QQ", "GF", "field_from_tag",
    "Echelon", "Subspace", "Quotient", "AffineSolution", "Infeasible",
    "rref", "rank", "kernel", "image", "row_space", "solve_affine",
    "solve_affine_blocks", "quotient_by", "meet_join", "kron_op",
]

# float64 represents integers exactly up to 2**53
_FLOAT_EXACT = 2**53


class Field:
    """Common interface of the two supported coefficient fields."""

    dtype: type | np.dtype

    def __call__(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def array(self, data) -> np.ndarray:
        arr = np.asarray(data, dtype=object)
        out = np.empty(arr.shape, dtype=self.dtype)
        flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
        for idx, x in enumerate(flat_in):
            flat_out[idx] = self(x)
        return out

    def zeros(self, shape) -> np.ndarray:
        return self.array(np.zeros(shape, dtype=int))

    def eye(self, n: int) -> np.ndarray:
        return self.array(np.eye(n, dtype=int))

    def normalize(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def fmt(self, x) -> str:
        raise NotImplementedError

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        raise NotImplementedError

    def tag(self) -> dict:
        raise NotImplementedError

    @property
    def characteristic(self) -> int:
        raise NotImplementedError


def _parse_scalar(x) -> Fraction:
    if isinstance(x, (bool, np.bool_)):
        raise MalformedInput(f"boolean is not a field element: {x!r}")
    if isinstance(x, (Integral, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"cannot parse scalar {x!r}") from exc
    raise MalformedInput(f"not an exact scalar: {x!r} ({type(x).__name__})")


@dataclass(frozen=True)
class Rationals(Field):
    dtype = object

    def __call__(self, x) -> Fraction:
        return _parse_scalar(x)

    def normalize(self, arr):
        arr = np.asarray(arr)
        if arr.dtype != object:
            return self.array(arr)
        return arr

    def matmul(self, a, b):
        a = self.normalize(a)
        b = self.normalize(b)
        shape = a.shape[:-1] + b.shape[1:]
        if a.shape[-1] == 0 or 0 in shape:
            return self.zeros(shape)
        # scale to integers, multiply, rescale: far cheaper than Fraction arithmetic
        na, da, ma = _integer_form(a)
        nb, db, mb = _integer_form(b)
        bound = ma * mb * a.shape[-1]
        if bound < _FLOAT_EXACT:
            prod = (na.astype(np.float64) @ nb.astype(np.float64)).astype(np.int64)
        elif bound < 2**62:
            prod = na.astype(np.int64) @ nb.astype(np.int64)
        else:
            prod = na @ nb
        den = da * db
        out = np.empty(prod.shape, dtype=object)
        flat_out, flat_in = out.reshape(-1), prod.reshape(-1)
        for idx, x in enumerate(flat_in.tolist()):
            flat_out[idx] = Fraction(x, den)
        return out

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def fmt(self, x) -> str:
        return str(Fraction(x))

    def random(self, rng, shape, bound: int = 5):
        nums = rng.integers(-bound, bound + 1, size=shape)
        dens = rng.integers(1, bound + 1, size=shape)
        out = np.empty(np.shape(nums), dtype=object)
        for idx in np.ndindex(out.shape):
            out[idx] = Fraction(int(nums[idx]), int(dens[idx]))
        return out

    def tag(self):
        return {"kind": "Q"}

    @property
    def characteristic(self):
        return 0

    def __str__(self):
        return "QQ"


def _integer_form(arr: np.ndarray) -> tuple[np.ndarray, int, int]:
    """``arr = nums / den`` with an object array of ints, plus max |nums|."""
    flat = arr.reshape(-1).tolist()
    den = math.lcm(*{x.denominator for x in flat}) if flat else 1
    nums = [x.numerator * (den // x.denominator) for x in flat]
    big = max((abs(x) for x in nums), default=0)
    out = np.empty(len(nums), dtype=object)
    out[:] = nums
    return out.reshape(arr.shape), den, big


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class PrimeField(Field):
    p: int
    dtype = np.int64

    def __post_init__(self):
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise MalformedInput(f"GF(p) needs a prime p, got {self.p!r}")
        if self.p >= 2**31:
            raise MalformedInput("prime fields are limited to p < 2**31")

    def __call__(self, x) -> int:
        if isinstance(x, (Integral, np.integer)) and not isinstance(x, (bool, np.bool_)):
            return int(x) % self.p
        q = _parse_scalar(x)
        if q.denominator % self.p == 0:
            raise MalformedInput(f"{x!r} has no image in GF({self.p})")
        return q.numerator * pow(q.denominator, -1, self.p) % self.p

    def array(self, data):
        arr = np.asarray(data)
        if arr.dtype.kind in "iu":
            return np.mod(arr.astype(np.int64), self.p)
        return super().array(data)

    def normalize(self, arr):
        return np.mod(np.asarray(arr, dtype=np.int64), self.p)

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        inner = a.shape[-1]
        bound = max(inner, 1) * (self.p - 1) ** 2
        if bound < _FLOAT_EXACT:
            # exact in float64, and uses BLAS
            out = a.astype(np.float64) @ b.astype(np.float64)
            return np.mod(out.astype(np.int64), self.p)
        if bound < 2**62:
            return np.mod(a @ b, self.p)
        out = a.astype(object) @ b.astype(object)
        return np.mod(out, self.p).astype(np.int64)

    def inv(self, x):
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def fmt(self, x) -> str:
        return str(int(x) % self.p)

    def random(self, rng, shape):
        return rng.integers(0, self.p, size=shape).astype(np.int64)

    def tag(self):
        return {"kind": "Fp", "p": self.p}

    @property
    def characteristic(self):
        return self.p

    def __str__(self):
        return f"GF({self.p})"


QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_tag(tag: dict) -> Field:
    kind = tag.get("kind") if isinstance(tag, dict) else None
    if kind == "Q":
        return QQ
    if kind == "Fp":
        return PrimeField(int(tag["p"]))
    raise MalformedInput(f"unknown field tag {tag!r}")


def kron_op(field: Field, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> left @ X @ right`` on row-major flattened ``X``."""
    return field.normalize(np.kron(left, np.asarray(right).T))


# ---------------------------------------------------------------------------
# elimination


def _nonzero(arr: np.ndarray) -> np.ndarray:
    return np.asarray(arr != 0, dtype=bool)


def _rref_dense(field: Field, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    m = field.normalize(np.array(m, copy=True))
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(_nonzero(m[r:, c]))
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        inv = field.inv(m[r, c])
        if m[r, c] != 1:
            m[r] = field.normalize(m[r] * inv)
        col = m[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(_nonzero(col))
        if others.size:
            m[others] = field.normalize(m[others] - np.outer(col[others], m[r]))
        pivots.append(c)
        r += 1
    return m[:r], pivots


class Echelon:
    """Incrementally maintained RREF basis of a growing row space."""

    def __init__(self, field: Field, ncols: int):
        self.field = field
        self.ncols = ncols
        self.basis = field.zeros((0, ncols))
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, rows: np.ndarray) -> np.ndarray:
        """Residual of ``rows`` after clearing the current pivot columns."""
        rows = self.field.normalize(np.asarray(rows))
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.shape[1] != self.ncols:
            raise DimensionMismatch(f"expected {self.ncols} columns, got {rows.shape[1]}")
        if self.pivots and rows.shape[0]:
            coeff = rows[:, self.pivots]
            rows = self.field.normalize(rows - self.field.matmul(coeff, self.basis))
        return rows

    def add(self, rows: np.ndarray) -> int:
        """Absorb ``rows``; returns the rank increase."""
        rows = self.reduce(rows)
        keep = np.flatnonzero(_nonzero(rows).any(axis=1))
        if keep.size == 0:
            return 0
        new, new_piv = _rref_dense(self.field, rows[keep])
        if not new_piv:
            return 0
        basis = self.basis
        if basis.shape[0]:
            basis = self.field.normalize(
                basis - self.field.matmul(basis[:, new_piv], new))
        merged = np.concatenate([basis, new], axis=0)
        pivots = self.pivots + new_piv
        order = np.argsort(pivots, kind="stable")
        self.basis = merged[order]
        self.pivots = [pivots[i] for i in order]
        return len(new_piv)

    def extend(self, blocks: Iterable[np.ndarray], chunk: int = 512) -> None:
        buf: list[np.ndarray] = []
        size = 0
        for block in blocks:
            block = np.asarray(block)
            if block.ndim == 1:
                block = block[None, :]
            buf.append(block)
            size += block.shape[0]
            if size >= chunk:
                self.add(np.concatenate(buf, axis=0))
                buf, size = [], 0
        if buf:
            self.add(np.concatenate(buf, axis=0))


def rref(field: Field, m) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``m`` with zero rows dropped, and its pivots."""
    m = field.normalize(np.asarray(m))
    if m.ndim != 2:
        raise MalformedInput("rref expects a 2-d array")
    ech = Echelon(field, m.shape[1])
    ech.extend([m])
    return ech.basis, ech.pivots


def rank(field: Field, m) -> int:
    return len(rref(field, m)[1])


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of ``field**ambient_dim`` stored by its RREF basis (rows)."""

    field: Field
    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, field: Field, ambient_dim: int, vectors) -> "Subspace":
        vectors = np.asarray(vectors)
        if vectors.size == 0:
            return cls.zero(field, ambient_dim)
        vectors = vectors.reshape(-1, ambient_dim)
        basis, piv = rref(field, vectors)
        return cls(field, ambient_dim, basis, tuple(piv))

    @classmethod
    def from_echelon(cls, ech: Echelon) -> "Subspace":
        return cls(ech.field, ech.ncols, ech.basis.copy(), tuple(ech.pivots))

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, field.zeros((0, ambient_dim)), ())

    @classmethod
    def full(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, field.eye(ambient_dim), tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __len__(self):
        return self.dim

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field == other.field and self.ambient_dim == other.ambient_dim
                and self.pivots == other.pivots
                and np.array_equal(self.basis, other.basis))

    __hash__ = None

    def coords(self, v) -> np.ndarray | None:
        """Coordinates of ``v`` in the RREF basis, or None if ``v`` is outside."""
        v = self.field.normalize(np.asarray(v))
        c = v[list(self.pivots)]
        if self.dim:
            back = self.field.matmul(c[None, :], self.basis)[0]
        else:
            back = self.field.zeros(self.ambient_dim)
        if _nonzero(self.field.normalize(back - v)).any():
            return None
        return c

    def __contains__(self, v) -> bool:
        return self.coords(v) is not None

    def contains_space(self, other: "Subspace") -> bool:
        return all(v in self for v in other.basis)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, field={self.field})"


def row_space(field: Field, m) -> Subspace:
    m = np.asarray(m)
    basis, piv = rref(field, m)
    return Subspace(field, m.shape[1], basis, tuple(piv))


def _kernel_from_rref(field: Field, basis: np.ndarray, pivots, ncols: int) -> Subspace:
    free = [c for c in range(ncols) if c not in set(pivots)]
    vecs = field.zeros((len(free), ncols))
    for idx, f in enumerate(free):
        vecs[idx, f] = field.one
        if pivots:
            vecs[idx, list(pivots)] = field.normalize(-basis[:, f])
    return Subspace.span(field, ncols, vecs) if free else Subspace.zero(field, ncols)


def kernel(field: Field, m) -> Subspace:
    """Null space ``{v : m @ v = 0}`` in canonical form."""
    m = np.asarray(m)
    if m.ndim != 2:
        raise MalformedInput("kernel expects a 2-d array")
    basis, piv = rref(field, m)
    return _kernel_from_rref(field, basis, piv, m.shape[1])


def kernel_blocks(field: Field, ncols: int, blocks: Iterable[np.ndarray]) -> Subspace:
    """Null space of the matrix whose rows are the stacked ``blocks``."""
    ech = Echelon(field, ncols)
    ech.extend(blocks)
    return _kernel_from_rref(field, ech.basis, ech.pivots, ncols)


def image(field: Field, m) -> Subspace:
    """Column space of ``m``."""
    m = np.asarray(m)
    return row_space(field, m.T) if m.size else Subspace.zero(field, m.shape[0])


# ---------------------------------------------------------------------------
# affine systems


@dataclass(frozen=True, eq=False)
class AffineSolution:
    particular: np.ndarray
    homogeneous: Subspace


@dataclass(frozen=True, eq=False)
class Infeasible:
    """No solution exists.

    ``certificate`` maps row indices of the system to coefficients ``y`` with
    ``sum_r y_r * M[r] = 0`` and ``sum_r y_r * b[r] != 0``.
    """

    certificate: dict[int, object]

    def dense(self, field: Field, nrows: int) -> np.ndarray:
        y = field.zeros(nrows)
        for r, c in self.certificate.items():
            y[r] = c
        return y


def _particular(field: Field, ech: Echelon, ncols: int) -> np.ndarray:
    x = field.zeros(ncols)
    for r, pc in enumerate(ech.pivots):
        x[pc] = ech.basis[r, ncols]
    return x


def solve_affine(field: Field, m, b) -> AffineSolution | Infeasible:
    """All solutions of ``m @ x = b``.

    The particular solution sets every free variable to zero, which makes it
    canonical for a given system.
    """
    m = field.normalize(np.asarray(m))
    b = field.normalize(np.asarray(b))
    if m.ndim != 2 or b.shape != (m.shape[0],):
        raise DimensionMismatch(f"matrix {m.shape} incompatible with rhs {b.shape}")
    rows = np.concatenate([m, b[:, None]], axis=1)
    return solve_affine_blocks(field, m.shape[1], lambda: iter([rows]))


def solve_affine_blocks(field: Field, ncols: int,
                        blocks: Callable[[], Iterable[np.ndarray]]) -> AffineSolution | Infeasible:
    """Solve a system given as augmented row blocks ``[M_block | b_block]``.

    ``blocks`` is called again (and must yield the same rows) only when the
    system is infeasible, to assemble a certificate.
    """
    ech = Echelon(field, ncols + 1)
    ech.extend(blocks())
    if ech.pivots and ech.pivots[-1] == ncols:
        return Infeasible(_certificate(field, ncols, blocks))
    x = _particular(field, ech, ncols)
    hom = _kernel_from_rref(field, ech.basis[:, :ncols], ech.pivots, ncols)
    return AffineSolution(x, hom)


def _certificate(field: Field, ncols: int, blocks) -> dict[int, object]:
    # collect a row basis of [M | b]; it still spans (0, ..., 0, 1)
    ech = Echelon(field, ncols + 1)
    chosen_rows: list[np.ndarray] = []
    chosen_idx: list[int] = []
    offset = 0
    for block in blocks():
        block = field.normalize(np.asarray(block))
        if block.ndim == 1:
            block = block[None, :]
        resid = ech.reduce(block)
        nz = np.flatnonzero(_nonzero(resid).any(axis=1))
        if nz.size:
            _, indep = _rref_dense(field, resid[nz].T)
            picked = [int(nz[i]) for i in indep]
            ech.add(block[picked])
            chosen_rows.extend(block[picked])
            chosen_idx.extend(offset + i for i in picked)
        offset += block.shape[0]
    s = np.asarray(chosen_rows).reshape(len(chosen_rows), ncols + 1)
    target = field.zeros(ncols + 1)
    target[ncols] = field.one
    sol = solve_affine(field, s.T, target)
    assert isinstance(sol, AffineSolution), "row basis must certify infeasibility"
    return {i: c for i, c in zip(chosen_idx, sol.particular) if c != 0}


# ---------------------------------------------------------------------------
# quotients, intersections


@dataclass(frozen=True, eq=False)
class Quotient:
    """``K**ambient_dim / relations`` with a chosen complement.

    ``section`` (ambient x dim) embeds quotient coordinates back using the
    standard basis vectors at the non-pivot columns of ``relations``;
    ``projection`` (dim x ambient) sends a vector to its class.
    """

    relations: Subspace
    section: np.ndarray
    projection: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.relations.ambient_dim

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.relations.dim

    def project(self, v) -> np.ndarray:
        f = self.relations.field
        return f.matmul(self.projection, np.asarray(v))


def quotient_by(relations: Subspace) -> Quotient:
    f, n = relations.field, relations.ambient_dim
    piv = list(relations.pivots)
    free = [c for c in range(n) if c not in set(piv)]
    section = f.zeros((n, len(free)))
    projection = f.zeros((len(free), n))
    for q, c in enumerate(free):
        section[c, q] = f.one
        projection[q, c] = f.one
    if piv and free:
        projection[:, piv] = f.normalize(-relations.basis[:, free].T)
    return Quotient(relations, section, projection)


def meet_join(a: Subspace, b: Subspace) -> tuple[Subspace, Subspace]:
    """Intersection and sum of two subspaces of the same ambient space."""
    if a.ambient_dim != b.ambient_dim or a.field != b.field:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    f, n = a.field, a.ambient_dim
    total = Subspace.span(f, n, np.concatenate([a.basis, b.basis], axis=0))
    if a.dim == 0 or b.dim == 0:
        meet = Subspace.zero(f, n)
    else:
        # x @ A = y @ B  <=>  (x, y) in ker [A^T | -B^T]
        stacked = np.concatenate([a.basis.T, f.normalize(-b.basis.T)], axis=1)
        ker = kernel(f, stacked)
        meet = Subspace.span(f, n, f.matmul(ker.basis[:, :a.dim], a.basis)) \
            if ker.dim else Subspace.zero(f, n)
    assert meet.dim + total.dim == a.dim + b.dim, "modular law violated"
    return meet, total

"""
Finite-dimensional associative unital algebras given by structure constants.

``structure[i, j, k]`` is the coefficient of ``e_k`` in ``e_i e_j``.
Algebra elements are coordinate vectors over the algebra's field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .errors import AssociativityViolation, MalformedInput, UnitViolation
from .exactla import AffineSolution, Field, Subspace, kernel, solve_affine


@dataclass(frozen=True, eq=False)
class Algebra:
    field: Field
    structure: np.ndarray
    unit: np.ndarray
    names: tuple[str, ...] = dc_field(default=())

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    def basis(self, i: int) -> np.ndarray:
        v = self.field.zeros(self.dim)
        v[i] = self.field.one
        return v

    @property
    def one(self) -> np.ndarray:
        return self.unit.copy()

    def name(self, i: int) -> str:
        return self.names[i] if self.names else f"e{i}"

    def element(self, coords) -> np.ndarray:
        v = self.field.array(coords)
        if v.shape != (self.dim,):
            raise MalformedInput(f"element needs {self.dim} coordinates, got {v.shape}")
        return v

    @cached_property
    def left_mats(self) -> np.ndarray:
        """``left_mats[i]`` is the matrix of ``x -> e_i x``."""
        return self.field.normalize(self.structure.transpose(0, 2, 1))

    @cached_property
    def right_mats(self) -> np.ndarray:
        """``right_mats[j]`` is the matrix of ``x -> x e_j``."""
        return self.field.normalize(self.structure.transpose(1, 2, 0))

    def lmul(self, a) -> np.ndarray:
        return _combine(self.field, a, self.left_mats)

    def rmul(self, a) -> np.ndarray:
        return _combine(self.field, a, self.right_mats)

    def mul(self, a, b) -> np.ndarray:
        return self.field.matmul(self.lmul(a), np.asarray(b))

    def commutator(self, a, b) -> np.ndarray:
        return self.field.normalize(self.mul(a, b) - self.mul(b, a))

    def describe(self, v) -> str:
        """Human-readable linear combination of basis names."""
        terms = []
        for i, c in enumerate(v):
            if c == 0:
                continue
            s = self.field.fmt(c)
            terms.append(self.name(i) if s == "1" else f"{s}*{self.name(i)}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"Algebra(dim={self.dim}, field={self.field})"


def _combine(field: Field, coeffs, mats: np.ndarray) -> np.ndarray:
    """``sum_i coeffs[i] * mats[i]``."""
    coeffs = np.asarray(coeffs)
    n, r, c = mats.shape
    if n == 0:
        return field.zeros((r, c))
    flat = field.matmul(coeffs[None, :], mats.reshape(n, r * c))
    return flat.reshape(r, c)


def _check_unit(field: Field, structure: np.ndarray, unit: np.ndarray) -> None:
    n = structure.shape[0]
    left = field.matmul(unit[None, :], structure.reshape(n, n * n)).reshape(n, n)
    right = field.matmul(unit[None, :], structure.transpose(1, 0, 2).reshape(n, n * n)).reshape(n, n)
    eye = field.eye(n)
    for i in range(n):
        if not np.array_equal(left[i], eye[i]) or not np.array_equal(right[i], eye[i]):
            raise UnitViolation(i)


def _find_unit(field: Field, structure: np.ndarray) -> np.ndarray:
    n = structure.shape[0]
    # unknown u: sum_a u_a c[a, i, k] = delta_ik and sum_a u_a c[i, a, k] = delta_ik
    rows = np.concatenate([structure.reshape(n, n * n).T,
                           structure.transpose(1, 0, 2).reshape(n, n * n).T], axis=0)
    rhs = np.concatenate([field.eye(n).reshape(-1), field.eye(n).reshape(-1)])
    sol = solve_affine(field, rows, rhs)
    if not isinstance(sol, AffineSolution):
        raise UnitViolation(None, "unit equations are inconsistent")
    return sol.particular


def _check_associative(field: Field, structure: np.ndarray) -> None:
    n = structure.shape[0]
    if n == 0:
        return
    flat = structure.reshape(n * n, n)
    # (e_i e_j) e_k: sum_l c[i,j,l] c[l,k,m]
    lhs = field.matmul(flat, structure.reshape(n, n * n)).reshape(n, n, n, n)
    # e_i (e_j e_k): sum_l c[j,k,l] c[i,l,m]
    inner = structure.transpose(1, 0, 2).reshape(n, n * n)       # [l, (i, m)]
    rhs = field.matmul(flat, inner).reshape(n, n, n, n)           # [j, k, i, m]
    rhs = rhs.transpose(2, 0, 1, 3)
    bad = np.argwhere(np.asarray(field.normalize(lhs - rhs) != 0, dtype=bool).any(axis=3))
    if bad.size:
        i, j, k = (int(x) for x in bad[0])
        raise AssociativityViolation(i, j, k)


def make_algebra(field: Field, structure, unit=None, names=()) -> Algebra:
    """Validate structure constants and build an :class:`Algebra`.

    If ``unit`` is None the unit is solved for.  Unit laws are checked
    before associativity, so data without a unit reports ``UnitViolation``.
    """
    c = field.array(structure)
    if c.ndim != 3 or len(set(c.shape)) != 1:
        raise MalformedInput(f"structure constants must be n x n x n, got {c.shape}")
    n = c.shape[0]
    if names and len(names) != n:
        raise MalformedInput("basis_names length does not match dim")
    if unit is None:
        u = _find_unit(field, c)
    else:
        u = field.array(unit)
        if u.shape != (n,):
            raise MalformedInput(f"unit must have length {n}")
    _check_unit(field, c, u)
    _check_associative(field, c)
    return Algebra(field, c, u, tuple(names))


# ---------------------------------------------------------------------------
# builders


def field_algebra(field: Field) -> Algebra:
    return make_algebra(field, [[[1]]], [1], names=("1",))


def matrix_algebra(field: Field, n: int) -> Algebra:
    """Full matrix algebra with basis ``E_ij`` at index ``i*n + j``."""
    if n < 1:
        raise MalformedInput("matrix algebra needs n >= 1")
    d = n * n
    c = np.zeros((d, d, d), dtype=int)
    for i, j, l in itertools.product(range(n), repeat=3):
        c[i * n + j, j * n + l, i * n + l] = 1
    unit = np.zeros(d, dtype=int)
    for i in range(n):
        unit[i * n + i] = 1
    names = tuple(f"E{i + 1}{j + 1}" for i in range(n) for j in range(n))
    return make_algebra(field, c, unit, names)


def poly_quotient(field: Field, coeffs) -> Algebra:
    """``K[x]/(f)`` for monic ``f``; ``coeffs`` lists f from x^0 upward."""
    f = field.array(coeffs)
    deg = len(f) - 1
    if deg < 1:
        raise MalformedInput("polynomial must have degree >= 1")
    if f[-1] != 1:
        raise MalformedInput("polynomial must be monic")
    # reductions of x^0 .. x^(2 deg - 2) in the power basis
    powers = [field.zeros(deg) for _ in range(2 * deg - 1)]
    for k in range(2 * deg - 1):
        if k < deg:
            powers[k][k] = field.one
        else:
            prev = powers[k - 1]
            shifted = field.zeros(deg)
            shifted[1:] = prev[:-1]
            top = prev[-1]
            powers[k] = field.normalize(shifted - top * f[:-1])
    c = field.zeros((deg, deg, deg))
    for a in range(deg):
        for b in range(deg):
            c[a, b] = powers[a + b]
    unit = field.zeros(deg)
    unit[0] = field.one
    names = tuple("1" if k == 0 else ("x" if k == 1 else f"x^{k}") for k in range(deg))
    return make_algebra(field, c, unit, names)


def truncated_poly(field: Field, d: int) -> Algebra:
    """``K[x]/(x^d)``."""
    return poly_quotient(field, [0] * d + [1])


def dual_numbers(field: Field) -> Algebra:
    return truncated_poly(field, 2)


def direct_sum(a: Algebra, b: Algebra) -> Algebra:
    if a.field != b.field:
        raise MalformedInput("direct sum of algebras over different fields")
    f = a.field
    n, m = a.dim, b.dim
    c = f.zeros((n + m, n + m, n + m))
    c[:n, :n, :n] = a.structure
    c[n:, n:, n:] = b.structure
    unit = np.concatenate([a.unit, b.unit])
    an = a.names or tuple(f"e{i}" for i in range(n))
    bn = b.names or tuple(f"e{i}" for i in range(m))
    names = tuple(f"({x},0)" for x in an) + tuple(f"(0,{y})" for y in bn)
    return make_algebra(f, c, unit, names)


def builtin_algebra(name: str, field: Field) -> Algebra:
    """Builders addressed by name.

    ``field``, ``dual``, ``matrix<n>``, ``trunc<d>`` (K[x]/(x^d)),
    ``poly:c0,c1,...,1`` and direct sums joined by ``+``
    (e.g. ``field+matrix2``).
    """
    name = name.strip()
    if "+" in name:
        parts = [builtin_algebra(p, field) for p in name.split("+")]
        out = parts[0]
        for p in parts[1:]:
            out = direct_sum(out, p)
        return out
    if name == "field":
        return field_algebra(field)
    if name in ("dual", "dual_numbers"):
        return dual_numbers(field)
    if name.startswith("matrix"):
        return matrix_algebra(field, int(name[len("matrix"):]))
    if name.startswith("trunc"):
        return truncated_poly(field, int(name[len("trunc"):]))
    if name.startswith("poly:"):
        return poly_quotient(field, name[len("poly:"):].split(","))
    raise MalformedInput(f"unknown builtin algebra {name!r}")


# ---------------------------------------------------------------------------
# structure


def center(alg: Algebra) -> Subspace:
    """``{z : z e_i = e_i z for all i}``."""
    n, f = alg.dim, alg.field
    if n == 0:
        return Subspace.zero(f, 0)
    # z e_i = right_mats[i] z ; e_i z = left_mats[i] z
    rows = f.normalize(alg.right_mats - alg.left_mats).reshape(n * n, n)
    return kernel(f, rows)


def noncommuting_pairs(alg: Algebra) -> list[tuple[int, int]]:
    """Basis pairs ``i < j`` with ``e_i e_j != e_j e_i``.

    Sorted by decreasing support size of the commutator, then
    lexicographically, so the most informative pair comes first.
    """
    f = alg.field
    diff = np.asarray(f.normalize(alg.structure - alg.structure.transpose(1, 0, 2)) != 0, dtype=bool)
    support = diff.sum(axis=2)
    pairs = [(i, j) for i in range(alg.dim) for j in range(i + 1, alg.dim) if support[i, j]]
    return sorted(pairs, key=lambda ij: (-int(support[ij]), ij))


def is_commutative(alg: Algebra) -> tuple[bool, tuple[int, int] | None]:
    pairs = noncommuting_pairs(alg)
    return (not pairs, pairs[0] if pairs else None)

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jetcalc.errors import DimensionMismatch, MalformedInput
from jetcalc.exactla import (GF, QQ, AffineSolution, Echelon, Infeasible, PrimeField, Subspace,
                             field_from_tag, image, kernel, kron_op, meet_join, quotient_by,
                             rank, rref, solve_affine)

from strategies import matrices


# scalars

def test_rationals_lowest_terms():
    x = QQ(Fraction(6, -4))
    assert QQ("-6/4") == x
    assert (x.numerator, x.denominator) == (-3, 2)
    assert QQ.fmt(QQ("4/2")) == "2"


def test_prime_field_canonical_representative():
    F = GF(7)
    assert F(-1) == 6
    assert F("3/2") == 5          # 2 * 5 = 10 = 3
    assert F(Fraction(1, 3)) * 3 % 7 == 1
    with pytest.raises(MalformedInput):
        F("1/7")


def test_prime_field_rejects_composite():
    with pytest.raises(MalformedInput):
        PrimeField(9)


def test_malformed_scalars():
    for bad in ("x", 1.5, True, None):
        with pytest.raises(MalformedInput):
            QQ(bad)


def test_field_tags_round_trip():
    for F in (QQ, GF(7)):
        assert field_from_tag(F.tag()) == F
    with pytest.raises(MalformedInput):
        field_from_tag({"kind": "R"})


def test_random_rationals_invert_exactly():
    rng = np.random.default_rng(0)
    a = rng.integers(-10**6, 10**6, size=1000)
    b = rng.integers(-10**6, 10**6, size=1000)
    checked = 0
    for x, y in zip(a.tolist(), b.tolist()):
        if x and y:
            assert Fraction(x, y) * Fraction(y, x) == 1
            checked += 1
    assert checked > 990


@given(st.integers(1, 10**6), st.sampled_from([3, 7, 101, 2**31 - 1]))
def test_prime_field_inverse(a, p):
    F = GF(p)
    a = F(a)
    if a:
        assert a * F.inv(a) % p == 1
    assert (a + F(-a)) % p == 0


# matmul paths

def test_rational_matmul_matches_fraction_loop():
    rng = np.random.default_rng(1)
    a, b = QQ.random(rng, (4, 5)), QQ.random(rng, (5, 3))
    expected = [[sum((a[i, k] * b[k, j] for k in range(5)), Fraction(0)) for j in range(3)]
                for i in range(4)]
    assert QQ.matmul(a, b).tolist() == expected


def test_rational_matmul_big_entries_stays_exact():
    a = QQ.array([[Fraction(10**30, 7), 1]])
    b = QQ.array([[Fraction(7, 10**30)], [Fraction(-1, 3)]])
    assert QQ.matmul(a, b)[0, 0] == Fraction(2, 3)


@pytest.mark.parametrize("p", [7, 65521, 2**31 - 1])
def test_prime_matmul_paths(p):
    F = GF(p)
    rng = np.random.default_rng(p % 1000)
    a, b = F.random(rng, (6, 40)), F.random(rng, (40, 5))
    expected = [[sum(int(a[i, k]) * int(b[k, j]) for k in range(40)) % p for j in range(5)]
                for i in range(6)]
    assert F.matmul(a, b).tolist() == expected


# kernel, rank, rref

def test_kernel_examples():
    assert kernel(QQ, QQ.zeros((2, 2))) == Subspace.full(QQ, 2)
    assert kernel(GF(7), GF(7).eye(3)).dim == 0
    k = kernel(QQ, QQ.array([[1, 1], [2, 2]]))
    assert k.dim == 1 and k.basis.tolist() == [[1, -1]]


def test_kernel_rejects_vectors():
    with pytest.raises(MalformedInput):
        kernel(QQ, QQ.array([1, 2]))


@given(matrices())
def test_rref_idempotent(fm):
    F, m = fm
    basis, piv = rref(F, m)
    again, piv2 = rref(F, basis)
    assert np.array_equal(basis, again) and piv == piv2
    # canonical shape: pivots increase, pivot columns are unit vectors
    assert list(piv) == sorted(piv)
    for r, c in enumerate(piv):
        col = basis[:, c]
        assert col[r] == 1 and sum(1 for x in col if x != 0) == 1


@given(matrices())
def test_rank_nullity(fm):
    F, m = fm
    k = kernel(F, m)
    assert k.dim + rank(F, m) == m.shape[1]
    if k.dim:
        assert not np.asarray(F.matmul(m, k.basis.T) != 0).any()
    assert image(F, m).dim == rank(F, m)


@given(matrices())
def test_equal_spans_have_equal_bases(fm):
    F, m = fm
    rng = np.random.default_rng(0)
    mix = F.random(rng, (m.shape[0], m.shape[0]))
    s1 = Subspace.span(F, m.shape[1], m)
    s2 = Subspace.span(F, m.shape[1], np.concatenate([F.matmul(mix, m), m]))
    assert s1 == s2


@given(matrices(max_rows=4, max_cols=6), st.integers(1, 8))
def test_echelon_chunked_matches_dense(fm, chunk):
    F, m = fm
    ech = Echelon(F, m.shape[1])
    ech.extend((m[i:i + 2] for i in range(0, m.shape[0], 2)), chunk=chunk)
    assert Subspace.from_echelon(ech) == Subspace.span(F, m.shape[1], m)


def test_coords_and_membership():
    F = GF(7)
    s = Subspace.span(F, 3, F.array([[1, 2, 0], [0, 0, 1]]))
    assert s.coords(F.array([2, 4, 5])).tolist() == [2, 5]
    assert s.coords(F.array([0, 1, 0])) is None
    assert F.array([3, 6, 1]) in s


# affine systems

def test_solve_affine_examples():
    F = QQ
    b = F.array([3, "1/2", -1])
    sol = solve_affine(F, F.eye(3), b)
    assert isinstance(sol, AffineSolution)
    assert np.array_equal(sol.particular, b) and sol.homogeneous.dim == 0
    assert isinstance(solve_affine(F, F.zeros((2, 2)), F.array([1, 0])), Infeasible)
    sol = solve_affine(F, F.array([[1, 1], [2, 2]]), F.array([1, 2]))
    assert sol.particular.tolist() == [1, 0]
    assert sol.homogeneous.basis.tolist() == [[1, -1]]


def test_solve_affine_shape_error():
    with pytest.raises(DimensionMismatch):
        solve_affine(QQ, QQ.eye(2), QQ.array([1, 2, 3]))


@given(matrices(), st.data())
def test_infeasible_certificates_are_valid(fm, data):
    F, m = fm
    elem = st.integers(-3, 3)
    b = F.array(data.draw(st.lists(elem, min_size=m.shape[0], max_size=m.shape[0])))
    sol = solve_affine(F, m, b)
    if isinstance(sol, Infeasible):
        y = sol.dense(F, m.shape[0])
        assert not np.asarray(F.matmul(y[None, :], m) != 0).any()
        assert F.matmul(y[None, :], b[:, None])[0, 0] != 0
    else:
        assert np.array_equal(F.matmul(m, sol.particular), b)
        for v in sol.homogeneous.basis:
            assert not np.asarray(F.matmul(m, v) != 0).any()


# quotients

def test_quotient_examples():
    F = QQ
    q = quotient_by(Subspace.zero(F, 3))
    assert q.dim == 3 and np.array_equal(q.projection, F.eye(3))
    assert quotient_by(Subspace.full(F, 3)).dim == 0
    rel = Subspace.span(F, 4, F.array([[0, 1, -1, 0]]))
    q = quotient_by(rel)
    assert q.dim == 3
    assert not np.asarray(q.project(rel.basis[0]) != 0).any()
    e = F.eye(4)
    assert np.array_equal(q.project(e[1]), q.project(e[2]))


@given(matrices(max_cols=6))
def test_quotient_invariants(fm):
    F, m = fm
    rel = Subspace.span(F, m.shape[1], m)
    q = quotient_by(rel)
    assert q.dim == m.shape[1] - rel.dim
    assert np.array_equal(F.matmul(q.projection, q.section), F.eye(q.dim))
    if rel.dim:
        assert not np.asarray(F.matmul(q.projection, rel.basis.T) != 0).any()


# meet and join

def test_meet_join_examples():
    F = GF(7)
    a = Subspace.span(F, 3, F.array([[1, 0, 2]]))
    assert meet_join(a, a) == (a, a)
    x = Subspace.span(F, 2, F.array([[1, 0]]))
    y = Subspace.span(F, 2, F.array([[1, 1]]))
    meet, join = meet_join(x, y)
    assert meet.dim == 0 and join == Subspace.full(F, 2)


@given(st.integers(0, 10**6))
def test_meet_join_modular_law_random_planes(seed):
    F = GF(7)
    rng = np.random.default_rng(seed)
    a = Subspace.span(F, 4, F.random(rng, (2, 4)))
    b = Subspace.span(F, 4, F.random(rng, (2, 4)))
    meet, join = meet_join(a, b)
    assert meet.dim + join.dim == a.dim + b.dim
    assert a.contains_space(meet) and b.contains_space(meet)
    assert join.contains_space(a) and join.contains_space(b)


def test_meet_join_ambient_mismatch():
    with pytest.raises(DimensionMismatch):
        meet_join(Subspace.zero(QQ, 2), Subspace.zero(QQ, 3))


def test_kron_op_is_two_sided_multiplication():
    F = QQ
    rng = np.random.default_rng(3)
    A, X, B = F.random(rng, (2, 3)), F.random(rng, (3, 4)), F.random(rng, (4, 2))
    lhs = F.matmul(kron_op(F, A, B), X.reshape(-1)).reshape(2, 2)
    assert np.array_equal(lhs, F.matmul(F.matmul(A, X), B))

import itertools
import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jetcalc.algcore import (_check_associative, builtin_algebra, center, direct_sum, dual_numbers,
                             field_algebra, is_commutative, make_algebra, matrix_algebra,
                             noncommuting_pairs, poly_quotient, truncated_poly)
from jetcalc.errors import AssociativityViolation, MalformedInput, UnitViolation
from jetcalc.exactla import GF, QQ, Subspace

import oracles
from conftest import algebra

log = logging.getLogger(__name__)

BUILTINS = ["field", "dual", "trunc3", "trunc4", "matrix1", "matrix2", "field+field",
            "dual+field", "matrix2+field", "field+matrix2", "poly:1,0,1", "poly:6,0,1"]


def test_field_algebra():
    A = make_algebra(QQ, [[[1]]], [1])
    assert A.dim == 1 and is_commutative(A) == (True, None)


def test_dual_numbers_table():
    A = make_algebra(QQ, [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], [1, 0])
    x = A.basis(1)
    assert not A.mul(x, x).any()
    assert is_commutative(A)[0]


def test_missing_unit_is_rejected():
    # e1 e1 = e2, e2 e2 = e1, mixed products zero
    c = [[[0, 1], [0, 0]], [[0, 0], [1, 0]]]
    with pytest.raises(UnitViolation):
        make_algebra(QQ, c)
    with pytest.raises(UnitViolation):
        make_algebra(QQ, c, [1, 1])


def test_unit_is_found_when_omitted():
    A = make_algebra(GF(7), matrix_algebra(GF(7), 2).structure)
    assert A.unit.tolist() == [1, 0, 0, 1]


def test_shape_errors():
    with pytest.raises(MalformedInput):
        make_algebra(QQ, np.zeros((2, 2, 3), dtype=int))
    with pytest.raises(MalformedInput):
        make_algebra(QQ, [[[1]]], [1, 0])


def test_associativity_witness():
    A = matrix_algebra(QQ, 2)
    c = A.structure.copy()
    c[1, 2, 0] = QQ(2)            # E12 E21 = 2 E11
    with pytest.raises(AssociativityViolation) as info:
        make_algebra(QQ, c, A.unit)
    i, j, k = info.value.witness
    lhs = np.tensordot(c[i, j], c[:, k], axes=(0, 0))
    rhs = np.tensordot(c[j, k], c[i], axes=(0, 0))
    assert not np.array_equal(lhs, rhs)


def test_builders():
    F = GF(7)
    m1 = matrix_algebra(F, 1)
    assert m1.dim == 1 and is_commutative(m1)[0]
    m2 = matrix_algebra(F, 2)
    assert m2.dim == 4 and is_commutative(m2) == (False, (1, 2))
    assert m2.names[1:3] == ("E12", "E21")
    d = poly_quotient(F, [0, 0, 1])
    assert np.array_equal(d.structure, dual_numbers(F).structure)
    x = d.basis(1)
    assert not d.mul(x, x).any()
    with pytest.raises(MalformedInput):
        poly_quotient(F, [1, 0, 2])
    with pytest.raises(MalformedInput):
        poly_quotient(F, [1])
    with pytest.raises(MalformedInput):
        matrix_algebra(F, 0)
    with pytest.raises(MalformedInput):
        builtin_algebra("octonions", F)


def test_matrix_units_multiply():
    F = QQ
    for n in (1, 2, 3):
        A = matrix_algebra(F, n)
        for i, j, k, l in itertools.product(range(n), repeat=4):
            prod = A.mul(A.basis(i * n + j), A.basis(k * n + l))
            expected = A.basis(i * n + l) if j == k else F.zeros(n * n)
            assert np.array_equal(prod, expected)


def test_poly_quotient_reduces_by_relation():
    # x^2 = -1 over GF(7)
    A = poly_quotient(GF(7), [1, 0, 1])
    x = A.basis(1)
    assert A.mul(x, x).tolist() == [6, 0]


def test_unit_multiplication(field_key):
    for name in BUILTINS:
        A = algebra(name, field_key)
        for i in range(A.dim):
            assert np.array_equal(A.mul(A.one, A.basis(i)), A.basis(i))
            assert np.array_equal(A.mul(A.basis(i), A.one), A.basis(i))


def test_mul_examples():
    A = algebra("matrix2")
    assert A.describe(A.mul(A.basis(1), A.basis(2))) == "E11"


def test_center_examples():
    F = GF(7)
    assert center(dual_numbers(F)) == Subspace.full(F, 2)
    zc = center(matrix_algebra(F, 2))
    assert zc.dim == 1 and zc.basis.tolist() == [[1, 0, 0, 1]]
    assert center(direct_sum(matrix_algebra(F, 2), field_algebra(F))).dim == 2


def test_is_commutative_examples():
    F = QQ
    assert is_commutative(dual_numbers(F)) == (True, None)
    assert is_commutative(direct_sum(dual_numbers(F), field_algebra(F))) == (True, None)
    ok, (i, j) = is_commutative(matrix_algebra(F, 2))
    assert not ok and (i, j) == (1, 2)


@pytest.mark.parametrize("name", BUILTINS)
def test_center_full_iff_commutative(name):
    A = algebra(name)
    assert (center(A).dim == A.dim) == is_commutative(A)[0]


@pytest.mark.parametrize("name", ["trunc3", "matrix2", "field+matrix2", "dual+field"])
def test_center_matches_oracle(name):
    A = algebra(name)
    c = A.structure

    def mul(u, v):
        out = [0] * A.dim
        for i, x in enumerate(u):
            for j, y in enumerate(v):
                if x and y:
                    for k in range(A.dim):
                        out[k] += x * y * int(c[i, j, k])
        return out

    assert center(A).dim == oracles.center_dim(A.dim, mul, 7)


def test_noncommuting_pairs_are_exactly_the_noncommuting_ones():
    A = algebra("field+matrix2")
    pairs = set(noncommuting_pairs(A))
    for i, j in itertools.combinations(range(A.dim), 2):
        ei, ej = A.basis(i), A.basis(j)
        assert ((i, j) in pairs) == bool(A.commutator(ei, ej).any())
    # the matrix block sits at indices 1..4
    assert all(i >= 1 and j >= 1 for i, j in pairs)


def test_perturbed_matrix_algebra_rejected():
    F = GF(7)
    A = matrix_algebra(F, 2)
    total = rejected = assoc_rejected = 0
    for idx in itertools.product(range(4), repeat=3):
        for shift in range(1, 7):
            c = A.structure.copy()
            c[idx] = (c[idx] + shift) % 7
            total += 1
            try:
                make_algebra(F, c, A.unit)
            except (AssociativityViolation, UnitViolation):
                rejected += 1
            else:
                log.info("perturbation %s by %d accepted", idx, shift)
            try:
                _check_associative(F, c)
            except AssociativityViolation:
                assoc_rejected += 1
    assert rejected >= 0.99 * total
    assert assoc_rejected >= 0.99 * total


@given(st.sampled_from(["dual", "trunc3", "matrix2", "field+matrix2"]), st.integers(0, 10**6))
def test_multiplication_associative_on_random_elements(name, seed):
    A = algebra(name)
    rng = np.random.default_rng(seed)
    a, b, c = (A.field.random(rng, A.dim) for _ in range(3))
    assert np.array_equal(A.mul(A.mul(a, b), c), A.mul(a, A.mul(b, c)))


def test_builtin_names_and_sums():
    A = builtin_algebra("field+matrix2", QQ)
    assert A.dim == 5 and A.names[0] == "(1,0)" and A.names[2] == "(0,E12)"
    assert builtin_algebra("trunc3", QQ).names == ("1", "x", "x^2")
    assert np.array_equal(builtin_algebra("poly:0,0,1", QQ).structure,
                          truncated_poly(QQ, 2).structure)

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mukai_kit import intlinalg as ila


def rand_matrix(rng, rows, cols, lo=-6, hi=6):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def test_xgcd_basic():
    g, x, y = ila.xgcd(12, 18)
    assert g == 6 and 12 * x + 18 * y == 6
    g, x, y = ila.xgcd(-4, 6)
    assert g == 2 and -4 * x + 6 * y == 2
    assert ila.xgcd(0, 0)[0] == 0


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd_identity(a, b):
    g, x, y = ila.xgcd(a, b)
    assert a * x + b * y == g
    assert g >= 0


def test_det_bareiss():
    assert ila.det_bareiss([[0, 1], [1, 0]]) == -1
    assert ila.det_bareiss([[2]]) == 2
    assert ila.det_bareiss([[1, 2], [2, 4]]) == 0
    assert ila.det_bareiss([[0, 0, -1], [0, 2, 0], [-1, 0, 0]]) == -2


def test_signature_hyperbolic():
    assert ila.signature([[0, 1], [1, 0]]) == (1, 1)
    assert ila.signature([[2]]) == (1, 0)
    assert ila.signature([[-2]]) == (0, 1)
    assert ila.signature([[0, 0, -1], [0, 6, 0], [-1, 0, 0]]) == (2, 1)


def test_hnf_reproduces_input():
    rng = random.Random(11)
    for _ in range(50):
        m = rand_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
        h, u = ila.hnf_columns(m)
        assert ila.mat_mul(m, u) == h
        assert abs(ila.det_bareiss(u)) == 1


def test_integer_kernel():
    k = ila.integer_kernel([[1, 2, 3]])
    assert len(k) == 2
    for col in k:
        assert col[0] + 2 * col[1] + 3 * col[2] == 0
    assert ila.integer_kernel([[1, 0], [0, 1]]) == []


def test_snf_invariants():
    rng = random.Random(5)
    for _ in range(60):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        m = rand_matrix(rng, rows, cols)
        d, s, t = ila.snf(m)
        assert ila.mat_mul(ila.mat_mul(s, m), t) == d
        assert abs(ila.det_bareiss(s)) == 1
        assert abs(ila.det_bareiss(t)) == 1
        diag = [d[i][i] for i in range(min(rows, cols))]
        for a, b in zip(diag, diag[1:]):
            if a != 0 and b != 0:
                assert b % a == 0
            if a == 0:
                assert b == 0
        assert all(x >= 0 for x in diag)


def test_invariant_factors_e8():
    # E8 Cartan matrix is unimodular
    from mukai_kit.lattice import _E8_GRAM
    assert ila.invariant_factors(_E8_GRAM) == [1] * 8


def test_solve_one_equation():
    x = ila.solve_one_equation([2, 3], 1)
    assert 2 * x[0] + 3 * x[1] == 1
    assert ila.solve_one_equation([2, 4], 1) is None
    assert ila.solve_one_equation([0, 0], 0) == [0, 0]


def test_complete_primitive():
    u = ila.complete_primitive([2, 3, 5])
    assert [u[i][0] for i in range(3)] == [2, 3, 5]
    assert abs(ila.det_bareiss(u)) == 1
    with pytest.raises(ValueError):
        ila.complete_primitive([2, 4])


def test_mat_inverse_unimodular():
    m = [[1, 2], [1, 3]]
    inv = ila.mat_inverse_unimodular(m)
    assert ila.mat_mul(m, inv) == ila.identity(2)

from fractions import Fraction as F

import numpy as np
from hypothesis import given, strategies as st

from gkz_gevrey.linalg import matvec, nullspace, rank, solve

entry = st.sampled_from([0, 0, 0, 1, -1, 2, 3, F(1, 2), F(-5, 3)])


@st.composite
def matrices(draw):
    r = draw(st.integers(1, 6))
    c = draw(st.integers(1, 6))
    dense = [[F(draw(entry)) for _ in range(c)] for _ in range(r)]
    return dense, c


def sparse(dense):
    return [{j: v for j, v in enumerate(row) if v != 0} for row in dense]


@given(matrices())
def test_rank_matches_numpy(m):
    dense, c = m
    assert rank(sparse(dense), c) == np.linalg.matrix_rank(np.array(dense, dtype=float))


@given(matrices())
def test_nullspace_is_kernel_of_full_dimension(m):
    dense, c = m
    rows = sparse(dense)
    basis = nullspace(rows, c)
    for x in basis:
        assert all(v == 0 for v in matvec(rows, x))
    assert len(basis) + rank(rows, c) == c
    # independence
    assert rank(basis, c) == len(basis)


@given(matrices(), st.lists(entry, min_size=6, max_size=6))
def test_solve_consistent_systems(m, x0):
    dense, c = m
    rows = sparse(dense)
    x = {j: F(v) for j, v in enumerate(x0[:c]) if v != 0}
    rhs = matvec(rows, x)
    sol = solve(rows, rhs, c)
    assert sol is not None and matvec(rows, sol) == rhs


def test_inconsistent_system():
    assert solve([{0: F(1)}, {0: F(2)}], [F(1), F(3)], 1) is None

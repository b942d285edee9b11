import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fishtrack.assignment import FORBIDDEN, solve_min_cost
from oracles import augmenting_path_max_matching, brute_force_assignment, brute_force_min_cost_full

F = FORBIDDEN


def test_diagonal_zeros():
    m = solve_min_cost([[0, 9], [9, 0]])
    assert m.pairs == [(0, 0), (1, 1)]
    assert m.total_cost([[0, 9], [9, 0]]) == 0


def test_empty_side():
    m = solve_min_cost([[]], n_rows=1, n_cols=0)
    assert m.pairs == []
    assert m.unmatched_rows == [0]
    assert m.unmatched_cols == []


def test_zero_by_zero():
    m = solve_min_cost([])
    assert (m.pairs, m.unmatched_rows, m.unmatched_cols) == ([], [], [])


def test_three_by_three_against_enumeration():
    costs = [[4, 1, 3], [2, 0, 5], [3, 2, 2]]
    m = solve_min_cost(costs)
    assert m.total_cost(costs) == brute_force_min_cost_full(costs, 3, 3) == 5
    assert m.pairs == [(0, 1), (1, 0), (2, 2)]


def test_rectangular_reports_padding_as_unmatched():
    costs = [[5, 1, 7], [1, 5, 7]]
    m = solve_min_cost(costs)
    assert m.pairs == [(0, 1), (1, 0)]
    assert m.unmatched_cols == [2]
    m = solve_min_cost([[5, 1], [1, 5], [0, 0]])
    assert len(m.pairs) == 2 and len(m.unmatched_rows) == 1


def test_cardinality_beats_cost():
    # the cheap pair (0,0) would block both other pairs
    costs = [[0, 100], [100, F]]
    m = solve_min_cost(costs)
    assert m.pairs == [(0, 1), (1, 0)]


def test_forbidden_never_used():
    m = solve_min_cost([[F, F], [F, 3]])
    assert m.pairs == [(1, 1)]
    assert m.unmatched_rows == [0] and m.unmatched_cols == [0]


def test_ties_prefer_low_row_then_low_column():
    assert solve_min_cost([[1, 1, 1], [1, 1, 1]]).pairs == [(0, 0), (1, 1)]
    assert solve_min_cost([[0, 0], [0, 0], [0, 0]]).pairs == [(0, 0), (1, 1)]
    # row 0 could take col 0 or 1 at equal total cost
    assert solve_min_cost([[2, 2], [3, 3]]).pairs == [(0, 0), (1, 1)]


def test_rejects_non_finite_non_sentinel():
    with pytest.raises(ValueError):
        solve_min_cost([[-math.inf]])


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        solve_min_cost([[1, 2], [3]])


small = st.integers(0, 6)


@st.composite
def cost_matrices(draw, forbidden_p=0.0):
    r, c = draw(small), draw(small)
    rows = []
    for _ in range(r):
        row = []
        for _ in range(c):
            if forbidden_p and draw(st.floats(0, 1)) < forbidden_p:
                row.append(F)
            else:
                row.append(draw(st.integers(0, 9)))
        rows.append(row)
    return rows, r, c


@settings(max_examples=150, deadline=None)
@given(cost_matrices())
def test_optimal_cost_matches_enumeration(data):
    costs, r, c = data
    m = solve_min_cost(costs, r, c)
    assert len(m.pairs) == min(r, c)
    assert m.total_cost(costs) == brute_force_min_cost_full(costs, r, c)


@settings(max_examples=150, deadline=None)
@given(cost_matrices(forbidden_p=0.5))
def test_forbidden_patterns(data):
    costs, r, c = data
    m = solve_min_cost(costs, r, c)
    assert len(m.pairs) == augmenting_path_max_matching(r, c, lambda i, j: costs[i][j] != F)
    card, best, _ = brute_force_assignment(costs, r, c)
    assert len(m.pairs) == card
    assert m.total_cost(costs) == best
    rows = [p[0] for p in m.pairs]
    cols = [p[1] for p in m.pairs]
    assert len(set(rows)) == len(rows) and len(set(cols)) == len(cols)
    assert all(costs[i][j] != F for i, j in m.pairs)


@settings(max_examples=100, deadline=None)
@given(cost_matrices())
def test_lexicographic_tie_breaking(data):
    costs, r, c = data
    m = solve_min_cost(costs, r, c)
    key = [math.inf] * r
    for i, j in m.pairs:
        key[i] = j
    assert tuple(key) == brute_force_assignment(costs, r, c)[2]


def test_row_permutation_equivariance():
    rng = random.Random(7)
    for _ in range(50):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        costs = [[rng.random() for _ in range(c)] for _ in range(r)]
        perm = list(range(r))
        rng.shuffle(perm)
        permuted = [costs[perm[i]] for i in range(r)]
        a = solve_min_cost(costs)
        b = solve_min_cost(permuted)
        assert a.total_cost(costs) == pytest.approx(b.total_cost(permuted), abs=1e-12)
        # continuous random costs: the optimum is unique
        assert sorted((perm[i], j) for i, j in b.pairs) == a.pairs


def test_deterministic_output():
    rng = random.Random(3)
    costs = [[rng.choice([0, 1, F]) for _ in range(6)] for _ in range(6)]
    first = solve_min_cost(costs)
    for _ in range(5):
        assert solve_min_cost(costs) == first


def test_larger_sparse_problem_runs():
    rng = random.Random(11)
    n = 60
    costs = [[rng.random() if rng.random() < 0.1 else F for _ in range(n)] for _ in range(n)]
    m = solve_min_cost(costs)
    assert len(m.pairs) == augmenting_path_max_matching(n, n, lambda i, j: costs[i][j] != F)

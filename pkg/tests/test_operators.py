import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from banach2d import (DimensionError, Operator, ZeroOperatorError, bj_complement, euclidean,
                      is_bj_orthogonal, lp, norm, norm_attainment_set, op_norm, parse_operator,
                      rank, restricted_norm)

from conftest import Q4, angles, finite

entries = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
matrices = st.lists(entries, min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))


def test_op_norm_examples():
    for p in (1.5, 2.0, 3.0, 4.0, 8.0):
        assert op_norm(Operator(np.diag([1.0, 0.5]), lp(p), lp(p))) == pytest.approx(1.0, abs=1e-12)
    assert op_norm(Operator(np.eye(2), lp(4), lp(4))) == pytest.approx(1.0, abs=1e-12)
    m = np.array([[1.0, 1.0], [0.0, 0.0]])
    assert op_norm(Operator(m, lp(2), lp(2))) == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_operator_shape_checked():
    with pytest.raises(DimensionError):
        Operator(np.eye(3), lp(4), lp(4))
    T = Operator(np.ones((3, 2)), lp(4), euclidean(3))
    assert T.apply([1.0, 0.0]).shape == (3,)


def test_op_norm_matches_singular_value():
    rng = np.random.default_rng(8)
    for _ in range(200):
        m = rng.normal(size=(2, 2))
        assert abs(op_norm(Operator(m, lp(2), lp(2))) - np.linalg.norm(m, 2)) < 1e-8


@given(matrices, st.sampled_from([0.5, 2.0, 7.0]), st.sampled_from([1.5, 3.0, 4.0]))
def test_op_norm_homogeneous(m, alpha, p):
    T = Operator(m, lp(p), lp(p))
    n = op_norm(T)
    assert abs(op_norm(T.scaled(alpha)) - alpha * n) <= 1e-10 * max(1.0, alpha * n)


@given(matrices, st.sampled_from([1.5, 3.0, 4.0]))
def test_op_norm_dominates_samples(m, p):
    T = Operator(m, lp(p), lp(p))
    n = op_norm(T)
    for t in np.linspace(0, math.pi, 37):
        c = np.array([math.cos(t), math.sin(t)])
        assert norm(lp(p), m @ c) <= (n + 1e-12) * norm(lp(p), c)


def test_op_norm_close_to_dense_reference():
    # independent reference: brute sweep at 2^20 points
    rng = np.random.default_rng(3)
    t = np.linspace(0.0, math.pi, 2 ** 20, endpoint=False)
    c = np.stack([np.cos(t), np.sin(t)])
    for p in (3.0, 4.0):
        for _ in range(5):
            m = rng.normal(size=(2, 2))
            img = m @ c
            ref = np.max(np.sum(np.abs(img) ** p, 0) ** (1 / p) / np.sum(np.abs(c) ** p, 0) ** (1 / p))
            n = op_norm(Operator(m, lp(p), lp(p)))
            assert ref <= n + 1e-12 and n - ref < 1e-10


def test_attainment_examples():
    for p in (1.5, 3.0, 4.0, 6.0, 8.0, 16.0):
        att = norm_attainment_set(Operator(np.diag([1.0, 0.5]), lp(p), lp(p)))
        assert len(att.points) == 1 and np.array_equal(att.points[0], [1.0, 0.0])
    assert norm_attainment_set(Operator(np.eye(2), lp(2), lp(2))).whole_sphere
    att = norm_attainment_set(Operator(np.outer([1.0, 2.0], [0.6, 0.8]), lp(2), lp(2)))
    assert len(att.points) == 1 and np.allclose(att.points[0], [0.6, 0.8])
    with pytest.raises(ZeroOperatorError):
        norm_attainment_set(Operator(np.zeros((2, 2)), lp(4), lp(4)))


def test_attainment_two_pairs():
    # l_4 swap-and-scale with two independent norming pairs
    att = norm_attainment_set(Operator(np.array([[0.0, 1.0], [1.0, 0.0]]), lp(4), lp(4)))
    assert att.whole_sphere or len(att.points) >= 2


@given(matrices, st.sampled_from([2.0, 3.0, 4.0]))
def test_attainment_points_attain_and_separate(m, p):
    T = Operator(m, lp(p), lp(p))
    if not np.any(np.abs(m) > 1e-3):
        return
    att = norm_attainment_set(T)
    if att.whole_sphere:
        return
    for x in att.points:
        assert norm(lp(p), x) == pytest.approx(1.0, abs=1e-12)
        assert abs(norm(lp(p), T.apply(x)) - att.value) < att.cluster_tol * max(att.value, 1.0)
    for i, a in enumerate(att.points):
        for b in att.points[i + 1:]:
            gap = min(np.max(np.abs(a - b)), np.max(np.abs(a + b)))
            assert gap > 10 * att.cluster_tol


@given(matrices, st.sampled_from([2.0, 3.0, 4.0]))
def test_norming_transfer(m, p):
    # x in M_T and x orthogonal to z imply Tx orthogonal to Tz
    S = lp(p)
    T = Operator(m, S, S)
    if rank(T) < 2 or np.max(np.abs(m)) < 1e-3:
        return
    att = norm_attainment_set(T)
    if att.whole_sphere:
        return
    x = att.points[0]
    z = bj_complement(S, x).direction
    tz = T.apply(z)
    if norm(S, tz) > 1e-9:
        assert is_bj_orthogonal(S, T.apply(x), tz, tol=1e-7)


def test_rank_examples():
    assert rank(Operator(np.array([[0.3, 0.0], [0.7, 0.0]]), lp(4), lp(4))) == 1
    assert rank(Operator(np.zeros((2, 2)), lp(4), lp(4))) == 0
    assert rank(Operator(np.diag([1.0, 0.5]), lp(4), lp(4))) == 2
    assert rank(Operator(np.outer([1, 2, 3], [1, 1]), lp(4), euclidean(3))) == 1


def test_restricted_norm_examples():
    assert restricted_norm(Operator(np.diag([1.0, 0.5]), lp(4), lp(4)), [0.0, 1.0]) == 0.5
    T = Operator(np.outer([1.0, 1.0], [1.0, 0.0]), lp(4), lp(4))
    assert restricted_norm(T, [0.0, 1.0]) == 0.0
    assert restricted_norm(Operator(np.eye(2), lp(4), lp(4)), [Q4, -Q4]) == pytest.approx(1.0)


def test_operator_json_round_trip():
    T = Operator(np.array([[1.0, 2.0], [3.0, 4.0]]), lp(4), lp(2))
    U = parse_operator(T.to_dict())
    assert np.array_equal(U.matrix, T.matrix) and U.domain == T.domain and U.codomain == T.codomain
    with pytest.raises(ValueError):
        parse_operator({"matrix": [[1, 0], [0, 1]]})

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from banach2d import (DecompositionNotFound, ExtCase, ExtVerdict, HypothesisError,
                      InvalidFamilyParams, NormNotOneError, Operator, Vec2, bj_complement,
                      brute_force_oracle, check_cpp, check_weak_cpp, classify_extreme,
                      construct_nontrivial_weak_cpp, custom_norm, decompose_rank_one,
                      decompose_rank_two, euclidean, generate_extreme_family, lp, norm, op_norm,
                      restricted_norm, verify_witness)

from conftest import Q4, angles

L2, L3, L4 = lp(2), lp(3), lp(4)


def independent_norm(M, X, Y, n=200001):
    """Dense-sweep operator norm written directly in numpy."""
    th = np.linspace(0.0, math.pi, n, endpoint=False)
    c = np.stack([np.cos(th), np.sin(th)], 1)
    img = c @ M.T
    num = np.sum(np.abs(img) ** Y.p, 1) ** (1 / Y.p) if Y.p != 2 or Y.dim > 2 \
        else np.hypot(img[:, 0], img[:, 1])
    return float(np.max(num / np.sum(np.abs(c) ** X.p, 1) ** (1 / X.p)))


def assert_valid_witness(T, t1, t2):
    assert np.max(np.abs(0.5 * (t1.matrix + t2.matrix) - T.matrix)) <= 1e-12
    assert np.max(np.abs(t1.matrix - T.matrix)) > 1e-6
    for S in (t1, t2):
        assert independent_norm(S.matrix, S.domain, S.codomain) <= 1 + 1e-9


# ---- classification --------------------------------------------------------

def test_ellrank1_member_is_extreme():
    T = Operator([[Q4, 0.0], [Q4, 0.0]], L4, L4)
    v = classify_extreme(T)
    assert v.verdict is ExtVerdict.EXTREME and v.case is ExtCase.RANK_ONE_NOT_CPP


@pytest.mark.parametrize("p", [4, 6, 8])
def test_diag_example_not_extreme(p):
    T = Operator(np.diag([1.0, 0.5]), lp(p), lp(p))
    v = classify_extreme(T)
    assert v.verdict is ExtVerdict.NOT_EXTREME
    assert_valid_witness(T, *v.witness)


def test_identity_is_extreme():
    v = classify_extreme(Operator(np.eye(2), L2, L2))
    assert v.verdict is ExtVerdict.EXTREME and v.case is ExtCase.TWO_INDEPENDENT_NORMERS


@pytest.mark.parametrize("k", range(10))
def test_rotations_extreme_and_oracle_agrees(k):
    a = k * math.pi / 10 + 0.1
    R = Operator([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]], L2, L2)
    assert classify_extreme(R).extreme
    assert brute_force_oracle(R).case is ExtCase.ORACLE_EXHAUSTED


def test_hypothesis_and_norm_errors():
    with pytest.raises(HypothesisError):
        classify_extreme(Operator(np.eye(2), lp(math.inf), L2))
    with pytest.raises(HypothesisError):
        classify_extreme(Operator(np.eye(2), L2, lp(1)))
    with pytest.raises(NormNotOneError):
        classify_extreme(Operator(2 * np.eye(2), L2, L2))


def test_euclidean_codomain_bound():
    with pytest.raises(HypothesisError):
        classify_extreme(Operator(np.eye(9, 2), L4, euclidean(9)))


# ---- decompositions --------------------------------------------------------

def test_rank_two_diag_decomposition():
    T = Operator(np.diag([1.0, 0.5]), L4, L4)
    t1, t2, diag = decompose_rank_two(T, np.array([1.0, 0.0]), 0.75)
    c = diag["c"]
    assert 0 < c <= 0.5 * min(diag["k"], diag["delta"] / 2, diag["epsilon"])
    assert np.allclose(t1.matrix, np.diag([1.0, 0.5 + c]), atol=1e-15)
    assert np.allclose(t2.matrix, np.diag([1.0, 0.5 - c]), atol=1e-15)
    assert diag["k"] == restricted_norm(T, bj_complement(L4, np.array([1.0, 0.0])).direction)
    assert_valid_witness(T, t1, t2)


def test_rank_one_hilbert_decomposition_at_n_2():
    T = Operator([[1.0, 0.0], [0.0, 0.0]], L2, L2)
    x = np.array([1.0, 0.0])
    cert = check_cpp(Vec2(x, L2), Vec2(T.apply(x), L2))
    assert cert.holds and cert.constants.mu == 1.0
    t1, t2 = decompose_rank_one(T, x, cert)
    assert np.max(np.abs(t1.matrix - T.matrix)) == pytest.approx(0.5)
    assert_valid_witness(T, t1, t2)


def test_rank_one_l2_to_l4_decomposes():
    T = Operator([[Q4, 0.0], [Q4, 0.0]], L2, L4)
    v = classify_extreme(T)
    assert v.verdict is ExtVerdict.NOT_EXTREME and v.case is ExtCase.RANK_ONE_CPP
    assert_valid_witness(T, *v.witness)


def test_rank_one_family_member_refuses_decomposition():
    T = Operator([[Q4, 0.0], [Q4, 0.0]], L4, L4)
    x = np.array([1.0, 0.0])
    cert = check_cpp(Vec2(x, L4), Vec2(T.apply(x), L4))
    assert cert.fails
    with pytest.raises(DecompositionNotFound):
        decompose_rank_one(T, x, cert)


def test_verify_witness_rejects_bad_pairs():
    T = Operator(np.diag([1.0, 0.5]), L4, L4)
    good = classify_extreme(T).witness
    assert verify_witness(T, *good)
    t1, t2 = good
    assert not verify_witness(T, t1, t1)
    big = Operator(np.diag([1.0, 1.2]), L4, L4)
    low = Operator(np.diag([1.0, -0.2]), L4, L4)
    assert not verify_witness(T, big, low)


# ---- families --------------------------------------------------------------

def test_family_l4_rank_one():
    T = generate_extreme_family("L4RankOne", {"x1": Q4, "y1": Q4, "column": 1})
    assert np.array_equal(T.matrix, [[Q4, 0.0], [Q4, 0.0]])
    assert abs(op_norm(T) - 1) <= 1e-10


def test_family_l4_to_euclidean():
    T = generate_extreme_family("L4ToEuclideanRankOne", {"x": [1.0, 0.0, 0.0], "column": 2})
    assert np.array_equal(T.matrix, [[0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    assert T.codomain.dim == 3 and abs(op_norm(T) - 1) <= 1e-10


@pytest.mark.parametrize("family, params", [
    ("L4RankOne", {"x1": 1.0, "y1": 0.0}),
    ("L4RankOne", {"x1": 0.5, "y1": 0.5}),
    ("L4RankOne", {"x1": Q4, "y1": Q4, "column": 3}),
    ("L4ToEuclideanRankOne", {"x": [1.0, 1.0]}),
    ("Nope", {}),
])
def test_family_rejects_bad_params(family, params):
    with pytest.raises(InvalidFamilyParams):
        generate_extreme_family(family, params)


@settings(max_examples=15)
@given(st.floats(0.05, math.pi / 2 - 0.05), st.sampled_from([1, 2]))
def test_family_members_classified_extreme(theta, column):
    c, s = math.cos(theta), math.sin(theta)
    n = (c ** 4 + s ** 4) ** 0.25
    T = generate_extreme_family("L4RankOne", {"x1": c / n, "y1": s / n, "column": column})
    assert classify_extreme(T).extreme


# ---- nontrivial weak pairs -------------------------------------------------

@pytest.mark.parametrize("space", [L2, L3, L4])
def test_nontrivial_weak_cpp(space):
    x, tx = construct_nontrivial_weak_cpp(space)
    assert min(norm(space, tx.coords - x.coords), norm(space, tx.coords + x.coords)) > 1e-6
    assert check_weak_cpp(x, tx).holds


def test_nontrivial_weak_cpp_is_orthogonal_in_l2():
    x, tx = construct_nontrivial_weak_cpp(L2)
    assert abs(x.coords @ tx.coords) < 1e-12


def test_nontrivial_weak_cpp_needs_a_plane():
    with pytest.raises(HypothesisError):
        construct_nontrivial_weak_cpp(euclidean(3))


# ---- invariants ------------------------------------------------------------

@settings(max_examples=20)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4))
def test_not_extreme_witnesses_are_valid(entries):
    M = np.array(entries).reshape(2, 2)
    if np.max(np.abs(M)) < 1e-2:
        return
    T0 = Operator(M, L4, L4)
    T = T0.scaled(1.0 / op_norm(T0))
    try:
        v = classify_extreme(T)
    except NormNotOneError:
        return
    if v.verdict is ExtVerdict.NOT_EXTREME:
        assert_valid_witness(T, *v.witness)

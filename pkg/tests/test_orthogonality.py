import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from banach2d import (NumericalFailure, ZeroVectorError, bj_complement, complement_basis,
                      complement_rays, euclidean, find_isosceles_pair, is_bj_orthogonal,
                      is_isosceles_orthogonal, lp, min_along, norm, subdifferential)

from conftest import Q4, angles, exponents, unit_lp


def test_bj_examples():
    L4 = lp(4)
    assert is_bj_orthogonal(L4, [1.0, 0.0], [0.0, 1.0])
    assert is_bj_orthogonal(L4, [Q4, Q4], [1.0, -1.0])
    assert not is_bj_orthogonal(lp(2), [1.0, 0.0], [1.0, 1.0])
    with pytest.raises(ZeroVectorError):
        is_bj_orthogonal(L4, [0.0, 0.0], [1.0, 0.0])


def test_bj_in_linf_uses_minimization():
    Linf = lp(math.inf)
    assert is_bj_orthogonal(Linf, [1.0, 0.0], [0.0, 1.0])
    assert is_bj_orthogonal(Linf, [1.0, 1.0], [1.0, 0.0])  # ||(1+t, 1)|| >= 1
    assert not is_bj_orthogonal(Linf, [1.0, 0.0], [0.5, 1.0])  # t = -1/2 gives 3/4
    assert not is_bj_orthogonal(Linf, [1.0, 0.5], [1.0, 0.0])


@given(angles)
def test_l4_complement_closed_form(t):
    L4 = lp(4)
    x = unit_lp(4.0, t)
    z = bj_complement(L4, x).direction
    ref = np.array([x[1] ** 3, -x[0] ** 3])
    ref /= norm(L4, ref)
    assert min(np.max(np.abs(z - ref)), np.max(np.abs(z + ref))) < 1e-12


def test_complement_examples():
    w = bj_complement(lp(4), [1.0, 0.0])
    assert np.allclose(np.abs(w.direction), [0.0, 1.0])
    assert not w.non_unique
    e = bj_complement(euclidean(4), [1.0, 0.0, 0.0, 0.0])
    assert e.direction[0] == 0.0 and norm(euclidean(4), e.direction) == pytest.approx(1.0)
    assert np.allclose(np.abs(bj_complement(lp(2), [1.0, 0.0]).direction), [0.0, 1.0])


def test_corner_complement_is_flagged():
    w = bj_complement(lp(math.inf), [1.0, 1.0])
    assert w.non_unique and len(w.cone) == 2
    rays = complement_rays(lp(math.inf), [1.0, 1.0])
    assert len(rays) == 19
    for z in rays:
        assert is_bj_orthogonal(lp(math.inf), [1.0, 1.0], z)


def test_subdifferential_counts():
    assert len(subdifferential(lp(4), [Q4, Q4])) == 1
    assert len(subdifferential(lp(math.inf), [1.0, 1.0])) == 2
    assert len(subdifferential(lp(1), [1.0, 0.0])) == 2


@given(exponents, angles, angles, st.sampled_from([-2.0, 0.5, 10.0]))
def test_bj_homogeneous(p, t1, t2, alpha):
    S = lp(p)
    x, y = unit_lp(p, t1), unit_lp(p, t2)
    assert is_bj_orthogonal(S, x, y) == is_bj_orthogonal(S, x, alpha * y)
    z = bj_complement(S, x).direction
    assert is_bj_orthogonal(S, x, z) == is_bj_orthogonal(S, x, alpha * z) is True


def test_exact_and_numeric_tests_agree():
    rng = np.random.default_rng(5)
    for p in (1.5, 2.0, 3.0, 4.0, 8.0):
        S = lp(p)
        for i in range(100):
            x = unit_lp(p, rng.uniform(0, 2 * math.pi))
            y = rng.normal(size=2) if i % 3 else bj_complement(S, x).direction * rng.uniform(.5, 2)
            exact = is_bj_orthogonal(S, x, y)
            numeric = min_along(S, x, y) >= norm(S, x) * (1 - 1e-9)
            assert exact == numeric


@given(exponents, angles)
def test_complement_pm_orthogonal(p, t):
    S = lp(p)
    x = unit_lp(p, t)
    w = bj_complement(S, x)
    assert is_bj_orthogonal(S, x, w.direction) and is_bj_orthogonal(S, x, -w.direction)
    assert norm(S, w.direction) == pytest.approx(1.0, abs=1e-12)
    assert w.residual < 1e-9


def test_complement_basis_is_orthonormal():
    b = complement_basis(euclidean(4), [1.0, 2.0, 0.0, -1.0])
    assert b.shape == (3, 4)
    assert np.allclose(b @ b.T, np.eye(3))
    assert np.allclose(b @ np.array([1.0, 2.0, 0.0, -1.0]), 0.0)


def test_isosceles_examples():
    assert is_isosceles_orthogonal(lp(2), [1.0, 0.0], [0.0, 1.0])
    assert is_isosceles_orthogonal(lp(math.inf), [1.0, 1.0], [1.0, -1.0])
    assert not is_isosceles_orthogonal(lp(4), [1.0, 0.0], [1.0, 0.0])


@given(st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0, 8.0, math.inf]), angles)
def test_isosceles_pair(p, t):
    S = lp(p)
    x = unit_lp(p, t)
    y = find_isosceles_pair(S, x)
    assert is_isosceles_orthogonal(S, x, y)
    assert abs(x[0] * y[1] - x[1] * y[0]) > 1e-6
    assert norm(S, y) == pytest.approx(1.0, abs=1e-12)


def test_isosceles_pair_examples():
    assert np.allclose(np.abs(find_isosceles_pair(lp(2), [1.0, 0.0])), [0.0, 1.0], atol=1e-12)
    y = find_isosceles_pair(lp(math.inf), [1.0, 0.0])
    assert is_isosceles_orthogonal(lp(math.inf), [1.0, 0.0], y)

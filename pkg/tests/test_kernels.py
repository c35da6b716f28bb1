"""The numba kernels and their numpy fallbacks must agree to rounding."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from banach2d import _kernels as K

needs_numba = pytest.mark.skipif(not K.USE_NUMBA, reason="numba path disabled")

ps = st.sampled_from([1.5, 2.0, 3.0, 4.0, 7.5])
coef = st.floats(-3, 3, allow_nan=False)


def _nb_lp_excess(y, w, s, p):
    phi, noise = np.empty_like(s), np.empty_like(s)
    K._lp_excess_nb(y, w, s, p, phi, noise)
    return phi, noise


@needs_numba
@given(st.lists(coef, min_size=4, max_size=4), ps)
def test_lp_excess_parity(v, p):
    y, w = np.array(v[:2]), np.array(v[2:])
    if not y.any():
        return
    scale = np.max(np.abs(y))
    y, w = y / scale, w / scale
    s = np.concatenate([-np.geomspace(1e-12, 1e6, 200), np.geomspace(1e-12, 1e6, 200)])
    a, na = _nb_lp_excess(y, w, s, p)
    b, nb = K._lp_excess_np(y, w, s, p)
    assert np.all(np.abs(a - b) <= na + nb + 1e-15 * np.abs(a))


@needs_numba
@given(st.lists(coef, min_size=4, max_size=4), ps, ps)
def test_ratio_grid_parity(m, p, q):
    M = np.array(m).reshape(2, 2)
    th = np.linspace(0, math.pi, 257)
    out = np.empty(th.size)
    K._ratio_grid_nb(M, p, q, th, out)
    ref = K._ratio_grid_np(M, p, q, th)
    assert np.allclose(out, ref, rtol=1e-13, atol=1e-14 * ref.max())


@needs_numba
def test_ratio_max_batch_parity():
    rng = np.random.default_rng(0)
    ms = rng.normal(size=(32, 2, 2))
    th = np.linspace(0, math.pi, 512, endpoint=False)
    out = np.empty(32)
    K._ratio_max_batch_nb(ms, 4.0, 3.0, th, out)
    assert np.allclose(out, K._ratio_max_batch_np(ms, 4.0, 3.0, th), rtol=1e-13)


@needs_numba
def test_profile_combine_parity():
    rng = np.random.default_rng(1)
    n = 64
    phi_x = rng.normal(size=n) * 1e-3
    phi_y = phi_x[None] + rng.normal(size=(5, n)) * 1e-3
    noise_x, noise_y = np.full(n, 1e-12), np.full((5, n), 1e-12)
    d = np.abs(np.linspace(-1, 1, n))
    rc, br, bi = np.empty(5), np.empty(5), np.empty(5, dtype=np.int64)
    K._profile_combine_nb(phi_x, noise_x, d, phi_y, noise_y, 1e-9, 0.5, rc, br, bi)
    rc2, br2, bi2 = K._profile_combine_np(phi_x, noise_x, d, phi_y, noise_y, 1e-9, 0.5)
    assert np.array_equal(rc, rc2) and np.allclose(br, br2) and np.array_equal(bi, bi2)


def test_profile_charges_inward_neighbour():
    t = np.array([-2.0, -1.0, 1.0, 2.0])
    d = np.abs(t) / 2
    phi_x = np.zeros(4)
    phi_y = np.array([[0.0, 0.0, 0.0, 1.0]])
    rc, _, _ = K.profile_combine(phi_x, np.zeros(4), d, phi_y, np.zeros((1, 4)), 1e-9, 0.0)
    assert rc[0] == 0.5


def test_lp_excess_survives_tiny_coordinates():
    phi, _ = K.lp_excess(np.array([1.0, 3.5e-297]), np.array([0.0, 1.0]),
                         np.array([1e-3, 1.0]), 4.0)
    assert np.all(np.isfinite(phi))
    assert phi[1] == pytest.approx(2 ** 0.25 - 1, rel=1e-14)


@given(st.floats(-300, 300), ps)
def test_lp_excess_scale_invariant(e, p):
    y, w = np.array([0.6, -0.3]), np.array([0.2, 0.7])
    s = np.geomspace(1e-9, 1e3, 50)
    a, _ = K.lp_excess(y, w, s, p)
    b, _ = K.lp_excess(y * 10.0 ** e, w * 10.0 ** e, s, p)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-300)


def test_env_switch_selects_numpy_path():
    code = ("import json, banach2d; from banach2d import *;"
            "c = check_cpp(Vec2([2**-0.25]*2, lp(4)), Vec2([1.0, 0.0], lp(4)));"
            "print(json.dumps([banach2d.USE_NUMBA, c.to_dict()], sort_keys=True))")
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, BANACH2D_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        outs[flag] = json.loads(res.stdout)
    assert outs["1"][0] is False
    assert outs["0"][1]["verdict"] == outs["1"][1]["verdict"]
    assert outs["0"][1]["r"] == outs["1"][1]["r"] and outs["0"][1]["mu"] == outs["1"][1]["mu"]

"""Hot numeric loops: sphere-grid operator ratios and cancellation-free norm excess.

Every kernel has a numba ``@njit`` implementation and a pure-numpy fallback.
Set ``BANACH2D_DISABLE_NUMBA=1`` to force the numpy path (the two paths agree
to rounding; ``benchmarks/bench_kernels.py`` compares their speed).
"""

import math
import os

import numpy as np

EPS = float(np.finfo(float).eps)


def _numba_requested() -> bool:
    return os.environ.get("BANACH2D_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

def _vec_lpnorm(v, p):
    n = v.shape[0]
    m = 0.0
    for i in range(n):
        a = abs(v[i])
        if a > m:
            m = a
    if m == 0.0 or p == np.inf:
        return m
    s = 0.0
    if p == 1.0:
        for i in range(n):
            s += abs(v[i])
        return s
    if p == 2.0:
        for i in range(n):
            q = v[i] / m
            s += q * q
        return m * math.sqrt(s)
    for i in range(n):
        s += (abs(v[i]) / m) ** p
    return m * s ** (1.0 / p)


def _expm1mx(z):
    # expm1(z) - z without cancellation for small |z|
    if abs(z) < 0.5:
        term = z * z / 2.0
        total = term
        for k in range(3, 24):
            term *= z / k
            total += term
            if abs(term) < 1e-17 * abs(total):
                break
        return total
    return math.expm1(z) - z


def _log1pmx(u):
    # log1p(u) - u without cancellation for small |u|
    if abs(u) < 0.25:
        total = 0.0
        power = u
        for k in range(2, 34):
            power *= u
            if k % 2 == 0:
                total -= power / k
            else:
                total += power / k
            if abs(power) < 1e-17 * abs(total):
                break
        return total
    return math.log1p(u) - u


def _second_order(u, p):
    """(1+u)^p - 1 - p*u, accurate when |u| is tiny."""
    if p == 2.0:
        return u * u
    if abs(u) < 0.25 and p == math.floor(p) and p <= 64.0:
        # exact binomial tail sum_{k>=2} C(p,k) u^k by Horner
        n = int(p)
        coef = 1.0
        acc = 1.0
        for k in range(n, 2, -1):
            coef = coef * k / (n - k + 1)
            acc = acc * u + coef
        return acc * u * u
    if abs(u) < 0.25:
        lg = math.log1p(u)
        return _expm1mx(p * lg) + p * _log1pmx(u)
    return abs(1.0 + u) ** p - 1.0 - p * u


def _lp_excess_impl(y, w, s, p, phi, noise):
    n = y.shape[0]
    s0 = 0.0
    grad_abs = 0.0
    for i in range(n):
        a = abs(y[i])
        s0 += a ** p
        if a > 0.0:
            grad_abs += a ** (p - 1.0) * abs(w[i])
    for j in range(s.shape[0]):
        sj = s[j]
        second = 0.0
        lin = 0.0
        for i in range(n):
            if y[i] != 0.0:
                a = abs(y[i])
                ap = a ** p
                dv = sj * w[i]
                li = p * math.copysign(a ** (p - 1.0), y[i]) * dv
                if abs(dv) < 0.25 * a:
                    second += ap * _second_order(dv / y[i], p)
                else:
                    # large relative step: no cancellation to protect against
                    second += abs(y[i] + dv) ** p - ap - li
                lin += li
            else:
                second += abs(sj * w[i]) ** p
        total = (second + lin) / s0
        phi[j] = math.expm1(math.log1p(total) / p)
        noise[j] = (abs(lin) + 8.0 * EPS * p * grad_abs * abs(sj)) / (p * s0) + 4.0 * EPS * abs(phi[j])


def _ratio_grid_impl(m, p_dom, p_cod, thetas, out):
    rows = m.shape[0]
    img = np.empty(rows)
    c = np.empty(2)
    for k in range(thetas.shape[0]):
        c[0] = math.cos(thetas[k])
        c[1] = math.sin(thetas[k])
        for r in range(rows):
            img[r] = m[r, 0] * c[0] + m[r, 1] * c[1]
        out[k] = _vec_lpnorm(img, p_cod) / _vec_lpnorm(c, p_dom)


def _ratio_max_batch_impl(ms, p_dom, p_cod, thetas, out):
    rows = ms.shape[1]
    nt = thetas.shape[0]
    cs = np.empty((nt, 2))
    dn = np.empty(nt)
    for k in range(nt):
        cs[k, 0] = math.cos(thetas[k])
        cs[k, 1] = math.sin(thetas[k])
        dn[k] = _vec_lpnorm(cs[k], p_dom)
    img = np.empty(rows)
    for b in range(ms.shape[0]):
        best = 0.0
        for k in range(nt):
            for r in range(rows):
                img[r] = ms[b, r, 0] * cs[k, 0] + ms[b, r, 1] * cs[k, 1]
            v = _vec_lpnorm(img, p_cod) / dn[k]
            if v > best:
                best = v
        out[b] = best


def _profile_combine_impl(phi_x, noise_x, d, phi_y, noise_y, tol, r_probe,
                          rcrit, best_ratio, best_idx):
    nmu, nt = phi_y.shape
    half = nt // 2
    for j in range(nmu):
        rc = np.inf
        br = 0.0
        bi = -1
        for k in range(nt):
            px = phi_x[k]
            py = phi_y[j, k]
            thr = tol * max(abs(px), abs(py)) + noise_x[k] + noise_y[j, k]
            if thr < 1e-300:
                thr = 1e-300
            diff = py - px
            if diff > thr:
                # charge the violation to the inward neighbour: the sampled point
                # only shows that the implication breaks somewhere beyond it
                kin = k - 1 if k > half else (k + 1 if k < half - 1 else k)
                if d[kin] < rc:
                    rc = d[kin]
                if d[k] <= r_probe and diff / thr > br:
                    br = diff / thr
                    bi = k
        rcrit[j] = rc
        best_ratio[j] = br
        best_idx[j] = bi


if USE_NUMBA:
    _jit = numba.njit(cache=False, nogil=True, fastmath=False)
    _profile_combine_nb = _jit(_profile_combine_impl)
    _vec_lpnorm = _jit(_vec_lpnorm)
    _expm1mx = _jit(_expm1mx)
    _log1pmx = _jit(_log1pmx)
    _second_order = _jit(_second_order)
    _lp_excess_nb = _jit(_lp_excess_impl)
    _ratio_grid_nb = _jit(_ratio_grid_impl)
    _ratio_max_batch_nb = _jit(_ratio_max_batch_impl)


# --------------------------------------------------------------------------
# numpy fallbacks
# --------------------------------------------------------------------------

def _np_lpnorm_rows(v, p):
    """Row-wise l_p norm of a 2-D array, overflow-safe."""
    a = np.abs(v)
    m = a.max(axis=-1)
    if p == np.inf:
        return m
    if p == 1.0:
        return a.sum(axis=-1)
    safe = np.where(m > 0, m, 1.0)
    q = a / safe[..., None]
    if p == 2.0:
        return m * np.sqrt((q * q).sum(axis=-1))
    return m * (q ** p).sum(axis=-1) ** (1.0 / p)


def _np_expm1mx(z):
    out = np.expm1(z) - z
    small = np.abs(z) < 0.5
    if small.any():
        zs = z[small]
        term = zs * zs / 2.0
        total = term.copy()
        for k in range(3, 24):
            term = term * zs / k
            total += term
        out[small] = total
    return out


def _np_log1pmx(u):
    out = np.log1p(np.where(u > -1, u, 0.0)) - u
    small = np.abs(u) < 0.25
    if small.any():
        us = u[small]
        total = np.zeros_like(us)
        power = us.copy()
        for k in range(2, 34):
            power = power * us
            total += (power / k) if k % 2 else (-power / k)
        out[small] = total
    return out


def _np_second_order(u, p):
    if p == 2.0:
        return u * u
    out = np.abs(1.0 + u) ** p - 1.0 - p * u
    small = np.abs(u) < 0.25
    if small.any():
        us = u[small]
        if p == math.floor(p) and p <= 64.0:
            n = int(p)
            coef = 1.0
            acc = np.ones_like(us)
            for k in range(n, 2, -1):
                coef = coef * k / (n - k + 1)
                acc = acc * us + coef
            out[small] = acc * us * us
        else:
            out[small] = _np_expm1mx(p * np.log1p(us)) + p * _np_log1pmx(us)
    return out


def _lp_excess_np(y, w, s, p):
    s0 = float(np.sum(np.abs(y) ** p))
    nz = y != 0.0
    grad_abs = float(np.sum(np.abs(y[nz]) ** (p - 1.0) * np.abs(w[nz])))
    second = np.zeros_like(s)
    lin = np.zeros_like(s)
    for i in range(y.shape[0]):
        if y[i] != 0.0:
            a = abs(y[i])
            ap = a ** p
            dv = s * w[i]
            li = p * math.copysign(a ** (p - 1.0), y[i]) * dv
            small = np.abs(dv) < 0.25 * a
            term = np.abs(y[i] + dv) ** p - ap - li
            term[small] = ap * _np_second_order(dv[small] / y[i], p)
            second += term
            lin += li
        else:
            second += np.abs(s * w[i]) ** p
    total = (second + lin) / s0
    phi = np.expm1(np.log1p(total) / p)
    noise = (np.abs(lin) + 8.0 * EPS * p * grad_abs * np.abs(s)) / (p * s0) + 4.0 * EPS * np.abs(phi)
    return phi, noise


def _profile_combine_np(phi_x, noise_x, d, phi_y, noise_y, tol, r_probe):
    diff = phi_y - phi_x[None, :]
    thr = tol * np.maximum(np.abs(phi_y), np.abs(phi_x)[None, :]) + noise_y + noise_x[None, :]
    thr = np.maximum(thr, 1e-300)
    viol = diff > thr
    half = d.size // 2
    kin = np.arange(d.size)
    kin[half + 1:] -= 1
    kin[:half - 1] += 1
    rcrit = np.where(viol, d[kin][None, :], np.inf).min(axis=1)
    ratio = np.where(viol & (d <= r_probe)[None, :], diff / thr, 0.0)
    idx = ratio.argmax(axis=1)
    best = ratio[np.arange(phi_y.shape[0]), idx]
    return rcrit, best, np.where(best > 0, idx, -1)


def _ratio_grid_np(m, p_dom, p_cod, thetas):
    c = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    img = c @ m.T
    return _np_lpnorm_rows(img, p_cod) / _np_lpnorm_rows(c, p_dom)


def _ratio_max_batch_np(ms, p_dom, p_cod, thetas):
    c = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    dn = _np_lpnorm_rows(c, p_dom)
    out = np.empty(ms.shape[0])
    for b in range(ms.shape[0]):
        out[b] = np.max(_np_lpnorm_rows(c @ ms[b].T, p_cod) / dn)
    return out


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def lp_excess(y, w, s, p):
    """Relative norm excess ``||y + s*w||_p / ||y||_p - 1`` for an array of ``s``.

    Valid for finite ``p >= 1`` with ``p`` not equal to 1 handled by the
    caller. Returns ``(phi, noise)``; ``noise`` bounds the rounding error of
    ``phi`` including the first-order term, which vanishes exactly when
    ``y`` is Birkhoff-James orthogonal to ``w``.
    """
    y = np.ascontiguousarray(y, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    s = np.ascontiguousarray(np.atleast_1d(s), dtype=float)
    p = float(p)
    # phi is invariant under joint scaling of (y, w); normalizing keeps |y_i|^p representable
    scale = float(np.max(np.abs(y)))
    if scale > 0.0 and scale != 1.0:
        y, w = y / scale, w / scale
    if USE_NUMBA:
        phi = np.empty_like(s)
        noise = np.empty_like(s)
        _lp_excess_nb(y, w, s, p, phi, noise)
        return phi, noise
    return _lp_excess_np(y, w, s, p)


def profile_combine(phi_x, noise_x, d, phi_y, noise_y, tol, r_probe):
    """Compare domain and codomain excess profiles.

    ``phi_x``, ``noise_x``, ``d`` are indexed by ``t``; ``phi_y``, ``noise_y``
    by ``(mu, t)``; the ``t`` grid is symmetric about 0 and ascending. A
    sample violates when ``phi_y - phi_x`` exceeds ``tol * max(|phi|) + noise``.
    Returns per ``mu`` the smallest distance ``d`` of the sample just inside a
    violation (``inf`` if none), the largest violation-to-threshold
    ratio among violations with ``d <= r_probe``, and its ``t`` index (-1 if
    none).
    """
    phi_x = np.ascontiguousarray(phi_x, dtype=float)
    noise_x = np.ascontiguousarray(noise_x, dtype=float)
    d = np.ascontiguousarray(d, dtype=float)
    phi_y = np.ascontiguousarray(phi_y, dtype=float)
    noise_y = np.ascontiguousarray(noise_y, dtype=float)
    if USE_NUMBA:
        nmu = phi_y.shape[0]
        rcrit = np.empty(nmu)
        best = np.empty(nmu)
        idx = np.empty(nmu, dtype=np.int64)
        _profile_combine_nb(phi_x, noise_x, d, phi_y, noise_y, float(tol), float(r_probe),
                            rcrit, best, idx)
        return rcrit, best, idx
    return _profile_combine_np(phi_x, noise_x, d, phi_y, noise_y, float(tol), float(r_probe))


def ratio_grid(m, p_dom, p_cod, thetas):
    """``||M c||_cod / ||c||_dom`` for ``c = (cos t, sin t)``, ``t`` in ``thetas``."""
    m = np.ascontiguousarray(m, dtype=float)
    thetas = np.ascontiguousarray(thetas, dtype=float)
    if USE_NUMBA:
        out = np.empty(thetas.shape[0])
        _ratio_grid_nb(m, float(p_dom), float(p_cod), thetas, out)
        return out
    return _ratio_grid_np(m, float(p_dom), float(p_cod), thetas)


def ratio_max_batch(ms, p_dom, p_cod, thetas):
    """Grid maximum of the operator ratio for a stack of matrices."""
    ms = np.ascontiguousarray(ms, dtype=float)
    thetas = np.ascontiguousarray(thetas, dtype=float)
    if USE_NUMBA:
        out = np.empty(ms.shape[0])
        _ratio_max_batch_nb(ms, float(p_dom), float(p_cod), thetas, out)
        return out
    return _ratio_max_batch_np(ms, float(p_dom), float(p_cod), thetas)


def lpnorm_rows(v, p):
    """Row-wise l_p norms (numpy; used outside the hot loops)."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        return float(_np_lpnorm_rows(v[None, :], float(p))[0])
    return _np_lpnorm_rows(v, float(p))

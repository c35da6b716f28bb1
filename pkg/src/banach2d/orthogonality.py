"""Birkhoff-James and isosceles orthogonality, complement directions and
isosceles pairs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ._config import DEFAULT_GRID, TOL_ORTH
from .errors import NumericalFailure, UnsupportedDimension, ZeroVectorError
from .spaces import Space, _coords, norm, norms, radial_point, support_functional

__all__ = [
    "OrthWitness",
    "is_bj_orthogonal",
    "min_along",
    "subdifferential",
    "complement_rays",
    "bj_complement",
    "complement_basis",
    "is_isosceles_orthogonal",
    "find_isosceles_pair",
]

_CORNER_TOL = 1e-12


@dataclass
class OrthWitness:
    direction: np.ndarray
    residual: float
    non_unique: bool = False
    cone: List[np.ndarray] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {"direction": self.direction.tolist(), "residual": self.residual,
             "non_unique": self.non_unique}
        if self.cone:
            d["cone"] = [c.tolist() for c in self.cone]
        return d


def _rot(v):
    return np.array([-v[1], v[0]])


def min_along(space: Space, x, y) -> float:
    """``min over real lambda of ||x + lambda*y||``.

    Piecewise-linear norms (l_1, l_inf) are minimized exactly over their
    breakpoints; other norms by bounded Brent search on
    ``|lambda| <= 2||x||/||y||``, outside of which the value exceeds ``||x||``.
    """
    xc = _coords(space, x)
    yc = _coords(space, y)
    nx = norm(space, xc)
    ny = norm(space, yc)
    if ny == 0.0:
        return nx
    cands = [0.0]
    if space.is_lp and space.p in (1.0, math.inf):
        nzy = np.nonzero(yc)[0]
        cands.extend(float(-xc[i] / yc[i]) for i in nzy)
        if space.p == math.inf:
            for i, j in itertools.combinations(range(space.dim), 2):
                for sgn in (1.0, -1.0):
                    den = yc[i] - sgn * yc[j]
                    if den != 0.0:
                        cands.append(float(-(xc[i] - sgn * xc[j]) / den))
        lam = np.array(cands)
        return float(np.min(norms(space, xc[None, :] + lam[:, None] * yc[None, :])))
    bound = 2.0 * nx / ny
    res = minimize_scalar(lambda t: norm(space, xc + t * yc), bounds=(-bound, bound),
                          method="bounded", options={"xatol": 1e-12 * max(bound, 1.0)})
    return float(min(res.fun, nx))


def is_bj_orthogonal(space: Space, x, y, tol: float = TOL_ORTH) -> bool:
    """Birkhoff-James orthogonality ``x ⊥_B y``.

    Smooth l_p spaces use the support-functional criterion
    ``|f_x(y)| < tol * ||y||``; all other norms minimize ``||x + lambda*y||``.
    """
    xc = _coords(space, x)
    yc = _coords(space, y)
    nx = norm(space, xc)
    if nx == 0.0:
        raise ZeroVectorError("x must be nonzero")
    ny = norm(space, yc)
    if ny == 0.0:
        return True
    if space.lp_smooth:
        f = support_functional(space, xc)
        return bool(abs(float(f @ yc)) < tol * ny)
    return bool(min_along(space, xc, yc) >= nx * (1.0 - tol))


def subdifferential(space: Space, x) -> List[np.ndarray]:
    """Extreme points of the set of norming functionals at ``x`` (2-D).

    A single functional means ``x`` is a smooth point.
    """
    xc = _coords(space, x)
    nx = norm(space, xc)
    if nx == 0.0:
        raise ZeroVectorError("x must be nonzero")
    u = xc / nx
    if space.lp_smooth:
        return [support_functional(space, u)]
    if space.is_lp and space.p == math.inf:
        act = [i for i in range(space.dim) if abs(u[i]) >= 1.0 - _CORNER_TOL]
        out = []
        for i in act:
            f = np.zeros(space.dim)
            f[i] = math.copysign(1.0, u[i])
            out.append(f)
        return out
    if space.is_lp and space.p == 1.0:
        base = np.sign(u)
        zeros = [i for i in range(space.dim) if abs(u[i]) <= _CORNER_TOL]
        out = []
        for signs in itertools.product((-1.0, 1.0), repeat=len(zeros)):
            f = base.copy()
            for i, s in zip(zeros, signs):
                f[i] = s
            out.append(f)
        return out
    # custom oracle: gradients just either side of u along the sphere
    if space.dim != 2:
        raise UnsupportedDimension("custom norms are two-dimensional")
    ang = math.atan2(u[1], u[0])
    grads = []
    for d in (-1e-6, 1e-6):
        q = radial_point(space, ang + d)
        grads.append(support_functional(space, q))
    if np.max(np.abs(grads[0] - grads[1])) < 1e-4:
        return [support_functional(space, u)]
    return grads


def _orient_ccw(x, z):
    # flip z so that det(x, z) > 0
    return z if x[0] * z[1] - x[1] * z[0] >= 0 else -z


def complement_rays(space: Space, x, interior: int = 17) -> List[np.ndarray]:
    """Unit directions spanning ``x^⊥`` up to sign (2-D).

    Smooth points give a single ray. At a corner the cone between the two
    extreme rays is returned as ``[extreme_a, extreme_b]`` followed by
    ``interior`` evenly spaced interior rays.
    """
    xc = _coords(space, x)
    if space.dim != 2:
        raise UnsupportedDimension("complement rays are computed in two dimensions")
    fs = subdifferential(space, xc)
    if len(fs) == 1:
        z = _rot(fs[0])
        return [_orient_ccw(xc, z / norm(space, z))]
    fa, fb = fs[0], fs[-1]
    rays = []
    for s in [0.0, 1.0] + list(np.linspace(0.0, 1.0, interior + 2)[1:-1]):
        f = (1.0 - s) * fa + s * fb
        z = _rot(f)
        rays.append(_orient_ccw(xc, z / norm(space, z)))
    ext = sorted(rays[:2], key=lambda z: math.atan2(xc[0] * z[1] - xc[1] * z[0], xc @ z))
    return ext + rays[2:]


def complement_basis(space: Space, x) -> np.ndarray:
    """Orthonormal basis (rows) of the Euclidean orthogonal complement of ``x``."""
    xc = _coords(space, x)
    if not space.is_hilbert:
        raise UnsupportedDimension("complement_basis needs a Euclidean space")
    basis = [xc / np.linalg.norm(xc)]
    for e in np.eye(space.dim):
        v = e - sum((e @ b) * b for b in basis)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == space.dim:
            break
    return np.array(basis[1:])


def bj_complement(space: Space, x) -> OrthWitness:
    """A unit ``z0`` with ``x ⊥_B z0``.

    In a smooth plane ``x^⊥ ∩ S = {±z0}``. At corners the counterclockwise-first
    extreme ray is returned with ``non_unique`` set and the cone attached.
    Euclidean spaces of dimension > 2 return the first Gram-Schmidt
    completion vector (also flagged ``non_unique``).
    """
    xc = _coords(space, x)
    if norm(space, xc) == 0.0:
        raise ZeroVectorError("x must be nonzero")
    if space.is_hilbert and space.dim > 2:
        z = complement_basis(space, xc)[0]
        return OrthWitness(direction=z, residual=abs(min_along(space, xc, z) - norm(space, xc)),
                           non_unique=True)
    rays = complement_rays(space, xc)
    z = rays[0] + 0.0  # no signed zeros in reported directions
    resid = abs(min_along(space, xc, z) - norm(space, xc))
    if len(rays) == 1:
        return OrthWitness(direction=z, residual=resid)
    return OrthWitness(direction=z, residual=resid, non_unique=True, cone=[rays[0], rays[1]])


def is_isosceles_orthogonal(space: Space, x, y, tol: float = TOL_ORTH) -> bool:
    xc = _coords(space, x)
    yc = _coords(space, y)
    return bool(abs(norm(space, xc + yc) - norm(space, xc - yc)) < tol)


def find_isosceles_pair(space: Space, seed_x, grid: int = DEFAULT_GRID) -> np.ndarray:
    """Unit ``y``, independent of ``seed_x``, with ``||x+y|| = ||x-y||``.

    ``h(t) = ||x + g(t)|| - ||x - g(t)||`` over the radial sphere
    parametrization ``g`` is odd under ``t -> t + pi``, so it changes sign on
    ``[0, pi]``. (The power-law l_p parametrization has infinite slope at the
    axes, which defeats the root finder there.)
    """
    if space.dim != 2:
        raise UnsupportedDimension("isosceles pairs are constructed in two dimensions")
    x = _coords(space, seed_x)
    x = x / norm(space, x)

    def h(t):
        g = radial_point(space, t)
        return norm(space, x + g) - norm(space, x - g)

    ts = np.linspace(0.0, np.pi, grid + 1)
    gs = radial_point(space, ts)
    hv = norms(space, x[None, :] + gs) - norms(space, x[None, :] - gs)
    for i in range(grid):
        cand = None
        if hv[i] == 0.0:
            cand = ts[i]
        elif hv[i] * hv[i + 1] < 0.0:
            cand = brentq(h, ts[i], ts[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if cand is None:
            continue
        y = radial_point(space, cand)
        if abs(x[0] * y[1] - x[1] * y[0]) > 1e-6 and is_isosceles_orthogonal(space, x, y):
            return y
    raise NumericalFailure("no isosceles partner found on the sweep")

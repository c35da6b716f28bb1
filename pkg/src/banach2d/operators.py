"""Linear operators from a two-dimensional space: operator norm, norm-attainment
set, rank and the norm on a one-dimensional subspace."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import _kernels
from ._config import CLUSTER_TOL, DEFAULT_GRID, MERGE_RADIUS, TOL_RANK
from .errors import DimensionError, UnsupportedDimension, ZeroOperatorError
from .spaces import Space, _coords, norm, norms, parse_space, support_functional

__all__ = [
    "Operator",
    "NormAttainment",
    "parse_operator",
    "op_norm",
    "norm_attainment_set",
    "rank",
    "restricted_norm",
    "ratio",
]

_AXIS_SNAP = 1e-4
_ARC_RUN = 16


@dataclass(frozen=True)
class Operator:
    """``T: domain -> codomain`` stored as a ``(codomain.dim, domain.dim)`` matrix."""

    matrix: np.ndarray
    domain: Space
    codomain: Space

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionError(
                f"matrix shape {m.shape} does not match "
                f"(codomain.dim, domain.dim) = ({self.codomain.dim}, {self.domain.dim})")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, v) -> np.ndarray:
        return self.matrix @ _coords(self.domain, v)

    def scaled(self, alpha: float) -> "Operator":
        return Operator(alpha * self.matrix, self.domain, self.codomain)

    def to_dict(self) -> dict:
        return {"matrix": self.matrix.tolist(), "domain": self.domain.to_dict(),
                "codomain": self.codomain.to_dict()}


def parse_operator(desc: dict) -> Operator:
    """Operator from ``{"matrix": [[..]], "domain": <space>, "codomain": <space>}``."""
    try:
        return Operator(np.array(desc["matrix"], dtype=float), parse_space(desc["domain"]),
                        parse_space(desc["codomain"]))
    except KeyError as exc:
        raise ValueError(f"operator descriptor is missing {exc}") from exc


@dataclass
class NormAttainment:
    value: float
    points: List[np.ndarray]
    cluster_tol: float = CLUSTER_TOL
    whole_sphere: bool = False
    arc: bool = False

    def to_dict(self) -> dict:
        return {"value": self.value, "points": [p.tolist() for p in self.points],
                "cluster_tol": self.cluster_tol, "whole_sphere": self.whole_sphere,
                "arc": self.arc}


def _require_planar_domain(T: Operator):
    if T.domain.dim != 2:
        raise UnsupportedDimension("operator norms are computed on two-dimensional domains")


def ratio(T: Operator, thetas) -> np.ndarray:
    """``||T c|| / ||c||`` for ``c = (cos t, sin t)``, vectorized over ``thetas``."""
    _require_planar_domain(T)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if T.domain.is_lp and T.codomain.is_lp:
        return _kernels.ratio_grid(T.matrix, T.domain.p, T.codomain.p, thetas)
    c = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    return norms(T.codomain, c @ T.matrix.T) / norms(T.domain, c)


def _ratio1(T: Operator, t: float) -> float:
    return float(ratio(T, [t])[0])


def _ratio_slope(T: Operator, t: float) -> float:
    # derivative of the ratio in t; both norms must be differentiable
    c = np.array([math.cos(t), math.sin(t)])
    dc = np.array([-c[1], c[0]])
    img = T.matrix @ c
    ny = norm(T.codomain, img)
    nx = norm(T.domain, c)
    if ny == 0.0:
        return 0.0
    gy = support_functional(T.codomain, img) @ (T.matrix @ dc)
    gx = support_functional(T.domain, c) @ dc
    return float((gy * nx - ny * gx) / (nx * nx))


def _grid(n: int) -> np.ndarray:
    return np.linspace(0.0, math.pi, n, endpoint=False)


def _refine(T: Operator, t0: float, h: float) -> float:
    """Locate the local maximizer of the ratio near ``t0`` (grid spacing ``h``)."""
    lo, hi = t0 - h, t0 + h
    if T.domain.lp_smooth and T.codomain.lp_smooth:
        s_lo, s_hi = _ratio_slope(T, lo), _ratio_slope(T, hi)
        if s_lo > 0.0 and s_hi < 0.0:
            return brentq(lambda t: _ratio_slope(T, t), lo, hi, xtol=1e-15, rtol=1e-15)
    res = minimize_scalar(lambda t: -_ratio1(T, t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x) if -res.fun >= _ratio1(T, t0) else t0


def _snap_to_axis(T: Operator, t: float, h: float = 0.0) -> float:
    # high-order flat maxima (l_p, p > 2) leave the located argmax a few samples off an axis;
    # snap when the axis value is indistinguishable from the located one
    radius = max(_AXIS_SNAP, 4.0 * h)
    for axis in (0.0, 0.5 * math.pi, math.pi):
        if abs(t - axis) < radius:
            if _ratio1(T, axis) >= _ratio1(T, t) - 4.0 * _kernels.EPS * abs(_ratio1(T, t)):
                return axis % math.pi
    return t % math.pi


def op_norm(T: Operator, grid: int = DEFAULT_GRID) -> float:
    """``||T||`` by a sweep of the sphere followed by local refinement.

    The sweep maximum is refined in the two neighbouring cells; the result is
    the larger of the sweep value and the refined value, so it is always a
    lower bound of the true norm.
    """
    _require_planar_domain(T)
    ts = _grid(grid)
    vals = ratio(T, ts)
    i = int(np.argmax(vals))
    best = float(vals[i])
    if best == 0.0:
        return 0.0
    t = _refine(T, float(ts[i]), math.pi / grid)
    return max(best, _ratio1(T, t), _ratio1(T, _snap_to_axis(T, t, math.pi / grid)))


def _unit(space: Space, t: float) -> np.ndarray:
    if t == 0.5 * math.pi:
        return np.array([0.0, 1.0])
    c = np.array([math.cos(t), math.sin(t)])
    return c / norm(space, c)


def _angle_gap(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def _rank_one_maximizer(T: Operator):
    # T = u g^T, so ||T x|| = ||u|| |g.x| and the maximizer is the dual direction of g
    m = T.matrix
    row = int(np.argmax(np.max(np.abs(m), axis=1)))
    g = m[row] / np.max(np.abs(m[row]))
    q = T.domain.p / (T.domain.p - 1.0)
    x = np.sign(g) * np.abs(g) ** (q - 1.0)
    return x / norm(T.domain, x)


def norm_attainment_set(T: Operator, grid: int = DEFAULT_GRID,
                        cluster_tol: float = CLUSTER_TOL) -> NormAttainment:
    """Unit vectors where ``T`` attains its norm, one per antipodal pair.

    Local maxima of the sweep are refined, those within ``cluster_tol`` of
    ``||T||`` are kept and merged modulo antipodes. If more than half of the
    sweep attains, ``whole_sphere`` is set; a long constant run sets ``arc``
    and the run is reported as a dense point list.
    """
    _require_planar_domain(T)
    if not np.any(T.matrix):
        raise ZeroOperatorError("the zero operator has no norm-attainment set")
    if rank(T) == 1 and T.domain.lp_smooth:
        x = _rank_one_maximizer(T)
        value = norm(T.codomain, T.matrix @ x)
        return NormAttainment(value=value, points=[_canonical(x)], cluster_tol=cluster_tol)

    ts = _grid(grid)
    vals = ratio(T, ts)
    h = math.pi / grid
    top = float(vals.max())
    attaining = np.abs(vals - top) < cluster_tol * max(top, 1.0)
    # closed half-sphere arcs include both sampled endpoints; discount them
    if attaining.sum() > grid // 2 + 2:
        return NormAttainment(value=top, points=[_unit(T.domain, 0.0)], cluster_tol=cluster_tol,
                              whole_sphere=True)

    # one representative per connected run of attaining samples (cyclic in t)
    found = []
    for run in _cyclic_runs(attaining):
        # centre of the samples tied (to rounding) with the run maximum
        top_run = vals[run].max()
        tied = run[vals[run] >= top_run - 64.0 * _kernels.EPS * max(top_run, 1.0)]
        i = tied[len(tied) // 2]
        t = _snap_to_axis(T, _refine(T, float(ts[i]), h), h)
        found.append((t, _ratio1(T, t)))
    value = max([top] + [v for _, v in found])

    kept: List[float] = []
    for t, v in sorted(found, key=lambda tv: (-tv[1], tv[0])):
        if abs(v - value) >= cluster_tol * max(value, 1.0):
            continue
        if all(_angle_gap(t, k) > MERGE_RADIUS for k in kept):
            kept.append(t)

    # between smooth l_p planes the ratio is analytic off the axes, so an attaining
    # arc forces the whole sphere; a flat run there is a high-order maximum
    smooth_pair = T.domain.lp_smooth and T.codomain.lp_smooth
    flat = np.abs(vals - value) <= 64.0 * _kernels.EPS * max(value, 1.0)
    if not smooth_pair and _longest_cyclic_run(flat) >= _ARC_RUN:
        arc_ts = ts[flat]
        kept = sorted(set(kept) | set(float(t) for t in arc_ts[:: max(1, len(arc_ts) // 64)]))
        pts = _dedupe([_unit(T.domain, t) for t in kept])
        return NormAttainment(value=value, points=pts, cluster_tol=cluster_tol, arc=True)
    pts = [_canonical(_unit(T.domain, t)) for t in sorted(kept)]
    return NormAttainment(value=value, points=pts, cluster_tol=cluster_tol)


def _canonical(x: np.ndarray) -> np.ndarray:
    # representative of {x, -x}: first nonzero coordinate positive
    nz = np.nonzero(np.abs(x) > 0.0)[0]
    return -x if nz.size and x[nz[0]] < 0 else x.copy()


def _dedupe(points):
    out = []
    for p in points:
        p = _canonical(p)
        if all(np.max(np.abs(p - q)) > MERGE_RADIUS for q in out):
            out.append(p)
    return out


def _cyclic_runs(mask: np.ndarray) -> List[np.ndarray]:
    """Index arrays of the maximal runs of True in a cyclic mask."""
    n = mask.size
    if mask.all():
        return [np.arange(n)]
    start = int(np.argmin(mask))  # a False entry, so no run wraps past it
    runs, cur = [], []
    for j in range(1, n + 1):
        i = (start + j) % n
        if mask[i]:
            cur.append(i)
        elif cur:
            runs.append(np.array(cur))
            cur = []
    if cur:
        runs.append(np.array(cur))
    return runs


def _longest_cyclic_run(mask: np.ndarray) -> int:
    if mask.all():
        return mask.size
    if not mask.any():
        return 0
    k = int(np.argmin(mask))  # start just after a False so runs never wrap
    m = np.roll(mask, -k)
    best = cur = 0
    for b in m:
        cur = cur + 1 if b else 0
        best = max(best, cur)
    return best


def rank(T: Operator, tol: float = TOL_RANK) -> int:
    """Numerical rank relative to the largest entry."""
    m = T.matrix
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return 0
    if m.shape == (2, 2):
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        return 1 if abs(det) < tol * scale * scale else 2
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > tol * scale))


def restricted_norm(T: Operator, direction) -> float:
    """Norm of ``T`` on ``span{direction}`` for a unit ``direction``."""
    return norm(T.codomain, T.apply(direction))

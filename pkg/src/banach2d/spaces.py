"""Finite-dimensional real normed spaces: norms, unit-sphere parametrizations,
support functionals and the sampled smoothness / strict-convexity predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from ._config import DEFAULT_GRID, TOL_FLAT, TOL_SMOOTH
from .errors import DimensionError, UnsupportedDimension, ZeroVectorError

__all__ = [
    "Space",
    "Vec2",
    "lp",
    "euclidean",
    "custom_norm",
    "parse_space",
    "norm",
    "sphere_param",
    "radial_point",
    "support_functional",
    "norm_excess",
    "is_strictly_convex",
    "is_smooth",
    "FlatWitness",
    "CornerWitness",
]


@dataclass(frozen=True)
class Space:
    """A real normed space.

    ``kind`` is ``"lp"``, ``"euclidean"`` or ``"custom"``. Euclidean spaces
    carry ``p = 2``. A custom space is two-dimensional and evaluates its norm
    through ``oracle(a, b)``.
    """

    kind: str
    p: float
    dim: int
    oracle: Optional[Callable[[float, float], float]] = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dim must be positive")
        if self.kind == "custom":
            if self.dim != 2:
                raise DimensionError("custom norms are two-dimensional")
            if self.oracle is None:
                raise ValueError("custom space needs a norm oracle")
        elif self.kind in ("lp", "euclidean"):
            if not (self.p >= 1.0):
                raise ValueError(f"p must be >= 1, got {self.p}")
        else:
            raise ValueError(f"unknown space kind {self.kind!r}")

    @property
    def is_lp(self) -> bool:
        return self.kind in ("lp", "euclidean")

    @property
    def is_hilbert(self) -> bool:
        return self.is_lp and self.p == 2.0

    @property
    def lp_smooth(self) -> bool:
        """Smooth member of the l_p family (1 < p < inf)."""
        return self.is_lp and 1.0 < self.p < math.inf

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.kind == "custom":
            return "custom:2"
        if self.kind == "euclidean":
            return f"l2:{self.dim}"
        if self.p == math.inf:
            return f"linf:{self.dim}"
        if self.p == 1.0:
            return f"l1:{self.dim}"
        return f"lp:{_fmt_p(self.p)}:{self.dim}"

    def to_dict(self) -> dict:
        if self.kind == "custom":
            raise ValueError("custom norms have no JSON form")
        if self.kind == "euclidean":
            return {"kind": "euclidean", "dim": self.dim}
        p = "inf" if self.p == math.inf else self.p
        return {"kind": "lp", "p": p, "dim": self.dim}


def _fmt_p(p: float) -> str:
    return str(int(p)) if float(p).is_integer() else repr(p)


def lp(p: float, dim: int = 2) -> Space:
    p = float(p)
    return Space("lp", p, int(dim))


def euclidean(dim: int) -> Space:
    return Space("euclidean", 2.0, int(dim))


def custom_norm(oracle: Callable[[float, float], float], label: str = "") -> Space:
    return Space("custom", math.nan, 2, oracle=oracle, label=label)


def parse_space(spec) -> Space:
    """Build a space from a JSON descriptor or the ``lp:<p>:<dim>`` mini-syntax.

    Accepted strings: ``lp:4:2``, ``l2:3``, ``l1:2``, ``linf:2``.
    """
    if isinstance(spec, Space):
        return spec
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "euclidean":
            return euclidean(int(spec["dim"]))
        if kind == "lp":
            p = spec["p"]
            p = math.inf if str(p).lower() in ("inf", "infinity") else float(p)
            return lp(p, int(spec.get("dim", 2)))
        raise ValueError(f"unknown space descriptor {spec!r}")
    parts = str(spec).strip().lower().split(":")
    head = parts[0]
    try:
        if head == "lp" and len(parts) == 3:
            p = math.inf if parts[1] in ("inf", "infinity") else float(parts[1])
            return lp(p, int(parts[2]))
        if head in ("l1", "l2", "linf") and len(parts) == 2:
            dim = int(parts[1])
            if head == "l2":
                return euclidean(dim) if dim != 2 else lp(2.0, 2)
            return lp(1.0 if head == "l1" else math.inf, dim)
    except ValueError as exc:
        raise ValueError(f"malformed space {spec!r}") from exc
    raise ValueError(f"malformed space {spec!r}")


@dataclass(frozen=True)
class Vec2:
    """Coordinate vector tied to the space it lives in."""

    coords: np.ndarray
    space: Space

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float).reshape(-1)
        if c.shape[0] != self.space.dim:
            raise DimensionError(f"expected {self.space.dim} coordinates, got {c.shape[0]}")
        object.__setattr__(self, "coords", c)

    def norm(self) -> float:
        return norm(self.space, self.coords)


def _coords(space: Space, v) -> np.ndarray:
    if isinstance(v, Vec2):
        if v.space != space:
            raise DimensionError("vector belongs to a different space")
        return v.coords
    c = np.asarray(v, dtype=float).reshape(-1)
    if c.shape[0] != space.dim:
        raise DimensionError(f"expected {space.dim} coordinates, got {c.shape[0]}")
    return c


def norm(space: Space, v) -> float:
    """Norm of ``v`` in ``space``."""
    c = _coords(space, v)
    if space.kind == "custom":
        return float(space.oracle(float(c[0]), float(c[1])))
    return _kernels.lpnorm_rows(c, space.p)


def norms(space: Space, vs: np.ndarray) -> np.ndarray:
    """Row-wise norms of an ``(n, dim)`` array."""
    vs = np.asarray(vs, dtype=float)
    if space.kind == "custom":
        return np.array([space.oracle(float(a), float(b)) for a, b in vs])
    return _kernels.lpnorm_rows(vs, space.p)


def _require_2d(space: Space):
    if space.dim != 2:
        raise UnsupportedDimension(f"operation needs a two-dimensional space, got dim={space.dim}")


def sphere_param(space: Space, t) -> np.ndarray:
    """Unit vector at parameter ``t``.

    For l_p: ``(sgn(cos t)|cos t|^(2/p), sgn(sin t)|sin t|^(2/p))``; for other
    norms the radial projection of ``(cos t, sin t)``. Vectorized over ``t``.
    """
    _require_2d(space)
    t = np.asarray(t, dtype=float)
    # t = q*pi + r with r in [0, pi) from the exact fmod; the sign flips with the
    # parity of q, so a representable shift by pi negates the point bit for bit
    r = np.fmod(t, math.pi)
    r = np.where(r < 0.0, r + math.pi, r)
    flip = np.where(np.rint((t - r) / math.pi) % 2 == 0, 1.0, -1.0)[..., None]
    c, s = np.cos(r), np.sin(r)
    if space.is_lp and space.p != math.inf:
        e = 2.0 / space.p
        out = np.stack([np.sign(c) * np.abs(c) ** e, np.sign(s) * np.abs(s) ** e], axis=-1)
        return flip * out
    out = np.stack([c, s], axis=-1)
    return flip * out / (norms(space, out.reshape(-1, 2)).reshape(out.shape[:-1] + (1,)))


def radial_point(space: Space, theta) -> np.ndarray:
    """Radial projection of ``(cos theta, sin theta)`` onto the unit sphere."""
    _require_2d(space)
    theta = np.asarray(theta, dtype=float)
    out = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    n = norms(space, out.reshape(-1, 2)).reshape(out.shape[:-1] + (1,))
    return out / n


def support_functional(space: Space, v) -> np.ndarray:
    """Gradient of the norm at ``v`` (the unique norming functional in a smooth space).

    Returns ``f`` with ``f(v) = ||v||`` and dual norm one. For l_1 / l_inf
    the one-sided choice that treats ties by averaging is returned; callers
    that care about corners use :func:`banach2d.orthogonality.subdifferential`.
    """
    c = _coords(space, v)
    n = norm(space, c)
    if n == 0.0:
        raise ZeroVectorError("support functional of the zero vector")
    if space.kind == "custom":
        h = 1e-6 * n
        g = np.empty(2)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            g[i] = (norm(space, c + e) - norm(space, c - e)) / (2 * h)
        return g
    p = space.p
    u = c / n
    if p == math.inf:
        a = np.abs(u)
        act = a >= 1.0 - 1e-12
        f = np.where(act, np.sign(u), 0.0)
        return f / act.sum()
    if p == 1.0:
        return np.sign(u)
    return np.sign(u) * np.abs(u) ** (p - 1.0)


def norm_excess(space: Space, y, w, s):
    """``||y + s w|| / ||y|| - 1`` for an array of ``s``, computed without cancellation.

    Returns ``(phi, noise)`` where ``noise`` bounds the rounding error of
    ``phi``. For the smooth l_p family the second-order part is evaluated
    separately from the (vanishing) first-order part, so excesses far below
    double precision relative to 1 remain resolvable.
    """
    yc = _coords(space, y)
    wc = _coords(space, w)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if space.lp_smooth:
        return _kernels.lp_excess(yc, wc, s, space.p)
    ny = norm(space, yc)
    vals = norms(space, yc[None, :] + s[:, None] * wc[None, :])
    phi = vals / ny - 1.0
    nw = norm(space, wc)
    noise = 4.0 * _kernels.EPS * (1.0 + np.abs(s) * nw / ny)
    return phi, noise


# --------------------------------------------------------------------------
# geometric predicates
# --------------------------------------------------------------------------

@dataclass
class FlatWitness:
    y: np.ndarray
    z: np.ndarray
    endpoints: tuple

    def to_dict(self) -> dict:
        return {"y": self.y.tolist(), "z": self.z.tolist(),
                "endpoints": [e.tolist() for e in self.endpoints]}


@dataclass
class CornerWitness:
    point: np.ndarray
    left_derivative: float
    right_derivative: float

    def to_dict(self) -> dict:
        return {"point": self.point.tolist(), "left_derivative": self.left_derivative,
                "right_derivative": self.right_derivative}


def is_strictly_convex(space: Space, samples: int = DEFAULT_GRID):
    """Sampled strict-convexity test.

    Midpoints of sampled unit vectors an eighth of a turn apart are checked
    (finer separations flag l_p balls with p around 16 as numerically flat); a midpoint of norm ``>= 1 - TOL_FLAT`` exposes a flat segment.
    Returns ``(True, None)`` or ``(False, FlatWitness)``.
    """
    _require_2d(space)
    theta = 2 * np.pi * np.arange(samples) / samples
    pts = radial_point(space, theta)
    for sep in (samples // 8,):
        if sep < 1:
            continue
        mids = 0.5 * (pts + np.roll(pts, -sep, axis=0))
        mn = norms(space, mids)
        bad = np.nonzero(mn >= 1.0 - TOL_FLAT)[0]
        if bad.size:
            i = int(bad[np.argmax(mn[bad])])
            return False, _flat_witness(space, pts, i, sep, samples)
    return True, None


def _flat_witness(space, pts, i, sep, samples):
    # grow the run of sample points collinear with pts[i] and pts[i+sep]
    def flat(a, b):
        return norm(space, 0.5 * (pts[a % samples] + pts[b % samples])) >= 1.0 - TOL_FLAT

    lo, hi = i, i + sep
    while hi - lo < samples // 2 and flat(lo - 1, hi):
        lo -= 1
    while hi - lo < samples // 2 and flat(lo, hi + 1):
        hi += 1
    a, b = pts[lo % samples], pts[hi % samples]
    y = 0.5 * (a + b)
    y = y / norm(space, y)
    z = 0.5 * (a - b)
    zn = norm(space, z)
    return FlatWitness(y=y, z=z / zn if zn > 0 else z, endpoints=(a.copy(), b.copy()))


def is_smooth(space: Space, samples: int = DEFAULT_GRID):
    """Sampled smoothness test.

    At each sampled unit vector the one-sided derivatives of the norm along
    the Euclidean tangent are compared at step ``h`` and ``h/10``; a corner
    shows a jump above ``TOL_SMOOTH`` that does not shrink with the step.
    Returns ``(True, None)`` or ``(False, CornerWitness)``.
    """
    _require_2d(space)
    theta = 2 * np.pi * np.arange(samples) / samples
    pts = radial_point(space, theta)
    tang = np.stack([-np.sin(theta), np.cos(theta)], axis=1)
    h1 = 1e-5
    n0 = norms(space, pts)

    def jump(h):
        fwd = (norms(space, pts + h * tang) - n0) / h
        bwd = (n0 - norms(space, pts - h * tang)) / h
        return fwd - bwd, fwd, bwd

    j1, fwd, bwd = jump(h1)
    j2, _, _ = jump(h1 / 10)
    scale = np.maximum(np.abs(fwd) + np.abs(bwd), 1.0)
    corner = (j1 / scale > TOL_SMOOTH) & (j2 > 0.5 * j1)
    if corner.any():
        i = int(np.argmax(np.where(corner, j1, -np.inf)))
        return False, CornerWitness(point=pts[i].copy(), left_derivative=float(bwd[i]),
                                    right_derivative=float(fwd[i]))
    return True, None

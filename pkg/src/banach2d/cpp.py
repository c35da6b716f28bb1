"""Certificates for compatible point pairs (weak CPP, CPP and mu-CPP).

A pair of unit vectors ``(x, y)`` with directions ``x ⊥_B z`` and ``y ⊥_B w``
passes at constants ``(r, mu)`` when every sphere point ``a x + b z`` within
distance ``r`` of ``x`` satisfies ``||a y + b mu w|| <= 1``.

For ``r <= 1`` only ``a > 0`` matters, so with ``t = b / a`` the implication
reads ``phi_Y(mu t) <= phi_X(t)`` where ``phi_V(s) = ||v + s u|| / ||v|| - 1``.
Both sides are evaluated without cancellation (see
:func:`banach2d.spaces.norm_excess`), which keeps excesses of order ``mu**4``
resolvable long after ``1 + excess`` has rounded to one. Each direction pair
and each ``mu`` then has a critical radius: the distance from ``x`` of the
nearest violating sphere point. Constants pass exactly when ``r`` is below it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from ._config import (DEFAULT_SWEEP, MU_MAX, R_MAX, T_CAP, T_FLOOR, TOL_CERT, TOL_ORTH,
                      grid_depth)
from . import _kernels
from .errors import ConeUnsupported, InvalidPError, NotOrthogonalError, WrongSpaceError
from .orthogonality import bj_complement, complement_basis, complement_rays, is_bj_orthogonal
from .spaces import Space, Vec2, _coords, norm, norm_excess, norms

__all__ = [
    "Verdict",
    "CppKind",
    "Method",
    "CppConstants",
    "CppCertificate",
    "SearchPolicy",
    "check_mu_cpp",
    "check_cpp",
    "check_weak_cpp",
    "critical_radii",
    "l4_cpp_oracle",
    "constructive_mu_even_p",
    "recheck_counterexample",
    "resweep_holds",
    "direction_pairs",
]

# a violation counts as certified only when it clears the noise threshold by this factor
ROBUST_FACTOR = 10.0


class Verdict(str, enum.Enum):
    HOLDS = "CertifiedHolds"
    FAILS = "CertifiedFails"
    UNDETERMINED = "Undetermined"


class CppKind(str, enum.Enum):
    WEAK = "WeakCPP"
    CPP = "CPP"
    MU = "MuCPP"


class Method(str, enum.Enum):
    SWEEP = "Sweep"
    CLOSED_FORM_L4 = "ClosedFormL4"
    CONSTRUCTIVE_EVEN_P = "ConstructiveEvenP"
    HILBERT_IDENTITY = "HilbertIdentity"


@dataclass(frozen=True)
class CppConstants:
    r: float
    mu: float

    def __post_init__(self):
        if not (self.r > 0 and self.mu > 0):
            raise ValueError("CPP constants must be positive")

    def to_dict(self) -> dict:
        return {"r": self.r, "mu": self.mu}


@dataclass
class SearchPolicy:
    """Grid for the ``(r, mu)`` search: ``r_max 2^-k``, ``mu_max 2^-j`` for ``k, j <= depth``.

    ``sweep`` is the number of ``t`` samples per sign; ``strict`` enumerates
    both signs of the domain direction even though they are redundant.
    """

    depth: int = field(default_factory=grid_depth)
    sweep: int = DEFAULT_SWEEP
    strict: bool = False
    r_max: float = R_MAX
    mu_max: float = MU_MAX

    def radii(self) -> np.ndarray:
        return self.r_max * 2.0 ** -np.arange(self.depth + 1)

    def mus(self) -> np.ndarray:
        return self.mu_max * 2.0 ** -np.arange(self.depth + 1)

    def to_dict(self) -> dict:
        return {"depth": self.depth, "sweep": self.sweep, "strict": self.strict,
                "r_max": self.r_max, "mu_max": self.mu_max}


@dataclass
class CppCertificate:
    verdict: Verdict
    kind: CppKind
    method: Method
    sweep: int
    constants: Optional[CppConstants] = None
    witness_pair: Optional[Tuple[np.ndarray, np.ndarray]] = None
    counterexample: Optional[dict] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict.value, "kind": self.kind.value,
             "r": self.constants.r if self.constants else None,
             "mu": self.constants.mu if self.constants else None,
             "method": self.method.value, "sweep": self.sweep}
        if self.witness_pair is not None:
            d["witness"] = {"z0": self.witness_pair[0].tolist(),
                            "w0": self.witness_pair[1].tolist()}
        if self.counterexample is not None:
            d["counterexample"] = _plain(self.counterexample)
        if self.diagnostics:
            d["diagnostics"] = self.diagnostics
        return d


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


# --------------------------------------------------------------------------
# profile engine
# --------------------------------------------------------------------------

def _t_grid(sweep: int) -> np.ndarray:
    pos = np.geomspace(T_FLOOR, T_CAP, sweep)
    return np.concatenate([-pos[::-1], pos])


def _distance(X: Space, x, z, t, phi_x) -> np.ndarray:
    # ||v(t) - x|| for the sphere point v(t) = (x + t z) / ||x + t z||, cancellation free
    pts = t[:, None] * z[None, :] - phi_x[:, None] * x[None, :]
    return norms(X, pts) / (1.0 + phi_x)


@dataclass
class _DomainSide:
    z: np.ndarray
    t: np.ndarray
    phi: np.ndarray
    noise: np.ndarray
    d: np.ndarray


def _domain_side(X: Space, x, z, t) -> _DomainSide:
    phi, noise = norm_excess(X, x, z, t)
    return _DomainSide(z=z, t=t, phi=phi, noise=noise, d=_distance(X, x, z, t, phi))


@dataclass
class _Profile:
    """Critical radius per ``mu`` for one direction pair, plus the strongest
    violation inside the probe radius."""

    z: np.ndarray
    w: np.ndarray
    mus: np.ndarray
    rcrit: np.ndarray          # inf where no violation was seen
    probe_ratio: np.ndarray    # max diff/threshold among violations with d <= r_probe
    probe_t: np.ndarray        # the t realising probe_ratio (nan if none)


@dataclass
class _CodomainSide:
    w: np.ndarray
    mus: np.ndarray
    phi: np.ndarray
    noise: np.ndarray


def _codomain_side(Y: Space, y, w, t, mus: np.ndarray) -> _CodomainSide:
    s = (mus[:, None] * t[None, :]).ravel()
    phi, noise = norm_excess(Y, y, w, s)
    return _CodomainSide(w=w, mus=mus, phi=phi.reshape(mus.size, t.size),
                         noise=noise.reshape(mus.size, t.size))


def _profile(dom: _DomainSide, cod: _CodomainSide, r_probe: float) -> _Profile:
    rcrit, best, idx = _kernels.profile_combine(dom.phi, dom.noise, dom.d, cod.phi, cod.noise,
                                                TOL_CERT, r_probe)
    probe_t = np.where(idx >= 0, dom.t[np.maximum(idx, 0)], np.nan)
    return _Profile(z=dom.z, w=cod.w, mus=cod.mus, rcrit=rcrit, probe_ratio=best,
                    probe_t=probe_t)


def critical_radii(x: Vec2, y: Vec2, z0, w0, mus: Sequence[float],
                   sweep: int = DEFAULT_SWEEP) -> np.ndarray:
    """For each ``mu``, the distance from ``x`` of the nearest sampled violation
    of the ``(z0, w0)`` implication (``inf`` if none was sampled)."""
    X, Y = x.space, y.space
    xc, yc = _unit_coords(x), _unit_coords(y)
    t = _t_grid(sweep)
    dom = _domain_side(X, xc, _coords(X, z0), t)
    cod = _codomain_side(Y, yc, _coords(Y, w0), t, np.asarray(mus, dtype=float))
    return _profile(dom, cod, 0.0).rcrit


def _unit_coords(v: Vec2) -> np.ndarray:
    c = v.coords
    n = norm(v.space, c)
    if abs(n - 1.0) > 1e-8:
        raise ValueError(f"expected a unit vector, got norm {n}")
    return c / n


# --------------------------------------------------------------------------
# direction enumeration
# --------------------------------------------------------------------------

def _domain_directions(X: Space, x, strict: bool) -> List[np.ndarray]:
    if X.dim != 2:
        raise ConeUnsupported("the domain must be two-dimensional")
    if X.kind == "custom":
        rays = complement_rays(X, x)
        if len(rays) > 1:
            raise ConeUnsupported("complement cone of a custom norm: enumerate rays explicitly")
    else:
        rays = complement_rays(X, x)
    if strict:
        return [s * z for z in rays for s in (1.0, -1.0)]
    return rays


def _codomain_directions(Y: Space, y) -> List[np.ndarray]:
    if Y.dim > 2:
        if not Y.is_hilbert:
            raise ConeUnsupported("codomains above dimension two must be Euclidean")
        basis = complement_basis(Y, y)
        if basis.shape[0] == 1:
            return [basis[0], -basis[0]]
        angles = np.arange(16) * (np.pi / 8)
        out = []
        for a in angles:
            v = math.cos(a) * basis[0] + math.sin(a) * basis[1]
            out.append(v / np.linalg.norm(v))
        return out
    if Y.kind == "custom" and len(complement_rays(Y, y)) > 1:
        raise ConeUnsupported("complement cone of a custom norm: enumerate rays explicitly")
    return [s * w for w in complement_rays(Y, y) for s in (1.0, -1.0)]


def direction_pairs(x: Vec2, y: Vec2, strict: bool = False):
    """The ``(z, w)`` direction pairs a CPP search enumerates for ``(x, y)``."""
    zs = _domain_directions(x.space, _unit_coords(x), strict)
    ws = _codomain_directions(y.space, _unit_coords(y))
    return [(z, w) for z in zs for w in ws]


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------

def _counterexample(X: Space, Y: Space, x, y, z, w, t: float, mu: float, r: float) -> dict:
    phi_x, n_x = norm_excess(X, x, z, np.array([t]))
    phi_y, n_y = norm_excess(Y, y, w, np.array([mu * t]))
    a = 1.0 / (1.0 + phi_x[0])
    b = t * a
    excess_m1 = float((phi_y[0] - phi_x[0]) / (1.0 + phi_x[0]))
    thr = TOL_CERT * max(abs(phi_x[0]), abs(phi_y[0])) + n_x[0] + n_y[0]
    return {"a": float(a), "b": float(b), "z": np.asarray(z, float), "w": np.asarray(w, float),
            "excess": 1.0 + excess_m1, "excess_minus_one": excess_m1, "mu": float(mu),
            "r": float(r), "noise_ratio": float((phi_y[0] - phi_x[0]) / max(thr, 1e-300))}


def _coarse_counterexample(X: Space, Y: Space, x, y, pairs, r: float, mu: float,
                           sweep: int = DEFAULT_SWEEP) -> Optional[dict]:
    """Largest absolute violation in the cell ``(r, mu)`` over the given direction pairs.

    Floor-cell witnesses carry excesses of order ``r * mu``; this companion
    witness sits in a coarse cell where the excess is directly visible.
    """
    t = _t_grid(sweep)
    best = None
    for z, w in pairs:
        phi_x, _ = norm_excess(X, x, z, t)
        phi_y, _ = norm_excess(Y, y, w, mu * t)
        ex = np.where(_distance(X, x, z, t, phi_x) <= r, (phi_y - phi_x) / (1.0 + phi_x), -np.inf)
        i = int(np.argmax(ex))
        if ex[i] > TOL_CERT and (best is None or ex[i] > best[0]):
            best = (float(ex[i]), z, w, float(t[i]))
    if best is None:
        return None
    _, z, w, ti = best
    return _counterexample(X, Y, x, y, z, w, ti, mu, r)


def recheck_counterexample(x: Vec2, y: Vec2, cex: dict) -> bool:
    """Re-derive a logged counterexample from ``(a, b, z, w, mu, r)`` alone.

    Confirms the point lies on the sphere within ``r`` of ``x`` and that
    ``||a y + b mu w|| - 1`` is positive beyond the rounding threshold, using
    the cancellation-free excess (a direct norm evaluation cannot resolve
    excesses below double precision).
    """
    X, Y = x.space, y.space
    xc, yc = _unit_coords(x), _unit_coords(y)
    z, w = np.asarray(cex["z"], float), np.asarray(cex["w"], float)
    a, b, mu, r = cex["a"], cex["b"], cex["mu"], cex["r"]
    if a <= 0:
        return False
    t = np.array([b / a])
    phi_x, n_x = norm_excess(X, xc, z, t)
    phi_y, n_y = norm_excess(Y, yc, w, mu * t)
    on_sphere = abs(a * (1.0 + phi_x[0]) - 1.0) < 1e-12
    dist = _distance(X, xc, z, t, phi_x)[0]
    thr = TOL_CERT * max(abs(phi_x[0]), abs(phi_y[0])) + n_x[0] + n_y[0]
    return bool(on_sphere and dist <= r * (1 + 1e-12) and phi_y[0] - phi_x[0] > thr)


def check_mu_cpp(x: Vec2, y: Vec2, z0, w0, constants: CppConstants,
                 sweep: int = DEFAULT_SWEEP) -> CppCertificate:
    """Certify the ``(z0, w0)`` implication at fixed ``(r, mu)``."""
    X, Y = x.space, y.space
    xc, yc = _unit_coords(x), _unit_coords(y)
    zc, wc = _coords(X, z0), _coords(Y, w0)
    if not is_bj_orthogonal(X, xc, zc, TOL_ORTH):
        raise NotOrthogonalError("x is not Birkhoff-James orthogonal to z0")
    if not is_bj_orthogonal(Y, yc, wc, TOL_ORTH):
        raise NotOrthogonalError("y is not Birkhoff-James orthogonal to w0")
    zc, wc = zc / norm(X, zc), wc / norm(Y, wc)
    r, mu = constants.r, constants.mu
    t = _t_grid(sweep)
    prof = _profile(_domain_side(X, xc, zc, t), _codomain_side(Y, yc, wc, t, np.array([mu])), r)
    diag = {"critical_radius": _finite(prof.rcrit[0])}
    if r < prof.rcrit[0]:
        return CppCertificate(Verdict.HOLDS, CppKind.MU, Method.SWEEP, sweep, constants=constants,
                              witness_pair=(zc, wc), diagnostics=diag)
    if prof.probe_ratio[0] >= ROBUST_FACTOR:
        cex = _counterexample(X, Y, xc, yc, zc, wc, float(prof.probe_t[0]), mu, r)
        cex["coarse"] = _coarse_counterexample(X, Y, xc, yc, [(zc, wc)], r, mu, sweep)
        return CppCertificate(Verdict.FAILS, CppKind.MU, Method.SWEEP, sweep, counterexample=cex,
                              diagnostics=diag)
    diag["reason"] = "violations inside the ball are within a factor of the rounding threshold"
    return CppCertificate(Verdict.UNDETERMINED, CppKind.MU, Method.SWEEP, sweep, diagnostics=diag)


def _finite(v: float):
    return None if not np.isfinite(v) else float(v)


def _best_cell(rcrit: np.ndarray, radii: np.ndarray, mus: np.ndarray):
    # largest r first, then largest mu
    for r in radii:
        ok = np.nonzero(r < rcrit)[0]
        if ok.size:
            return float(r), float(mus[ok[0]])
    return None


def _profiles(x: Vec2, y: Vec2, policy: SearchPolicy) -> List[_Profile]:
    X, Y = x.space, y.space
    xc, yc = _unit_coords(x), _unit_coords(y)
    t = _t_grid(policy.sweep)
    mus = policy.mus()
    r_floor = float(policy.radii()[-1])
    zs = _domain_directions(X, xc, policy.strict)
    ws = _codomain_directions(Y, yc)
    cods: List[_CodomainSide] = []
    for w in ws:
        # the t grid is symmetric, so the profile of -w is that of w read backwards
        mirror = next((c for c in cods if np.array_equal(c.w, -w)), None)
        if mirror is not None:
            cods.append(_CodomainSide(w=w, mus=mus, phi=mirror.phi[:, ::-1],
                                      noise=mirror.noise[:, ::-1]))
        else:
            cods.append(_codomain_side(Y, yc, w, t, mus))
    out = []
    for z in zs:
        dom = _domain_side(X, xc, z, t)
        out.extend(_profile(dom, cod, r_floor) for cod in cods)
    return out


def _fails_certificate(x, y, kind, policy, prof: _Profile, diag, pairs) -> CppCertificate:
    j = policy.depth
    xc, yc = _unit_coords(x), _unit_coords(y)
    cex = _counterexample(x.space, y.space, xc, yc, prof.z, prof.w,
                          float(prof.probe_t[j]), float(prof.mus[j]),
                          float(policy.radii()[-1]))
    cex["coarse"] = _coarse_counterexample(x.space, y.space, xc, yc, pairs, policy.r_max,
                                           policy.mu_max, policy.sweep)
    diag["floor"] = {"r": float(policy.radii()[-1]), "mu": float(prof.mus[j])}
    return CppCertificate(Verdict.FAILS, kind, Method.SWEEP, policy.sweep, counterexample=cex,
                          diagnostics=diag)


def check_cpp(x: Vec2, y: Vec2, search: Optional[SearchPolicy] = None) -> CppCertificate:
    """CPP: one ``(r, mu)`` for every admissible direction pair.

    Holds with the first passing grid cell (largest ``r``, then largest
    ``mu``). Fails only if every cell fails and the violation at the floor
    cell clears the rounding threshold by :data:`ROBUST_FACTOR`; anything
    else is Undetermined.
    """
    policy = search or SearchPolicy()
    profs = _profiles(x, y, policy)
    rcrit = np.min([p.rcrit for p in profs], axis=0)
    diag = {"policy": policy.to_dict(), "direction_pairs": len(profs)}
    cell = _best_cell(rcrit, policy.radii(), policy.mus())
    if cell is not None:
        return CppCertificate(Verdict.HOLDS, CppKind.CPP, Method.SWEEP, policy.sweep,
                              constants=CppConstants(*cell), diagnostics=diag)
    j = policy.depth
    worst = max(profs, key=lambda p: p.probe_ratio[j])
    if worst.probe_ratio[j] >= ROBUST_FACTOR:
        return _fails_certificate(x, y, CppKind.CPP, policy, worst, diag,
                                  [(p.z, p.w) for p in profs])
    diag["reason"] = "no passing cell, but the floor violation is not robust"
    return CppCertificate(Verdict.UNDETERMINED, CppKind.CPP, Method.SWEEP, policy.sweep,
                          diagnostics=diag)


def check_weak_cpp(x: Vec2, y: Vec2, search: Optional[SearchPolicy] = None) -> CppCertificate:
    """Weak CPP: some direction pair with some ``(r, mu)``."""
    policy = search or SearchPolicy()
    profs = _profiles(x, y, policy)
    radii, mus = policy.radii(), policy.mus()
    diag = {"policy": policy.to_dict(), "direction_pairs": len(profs)}
    best = None
    for p in profs:
        cell = _best_cell(p.rcrit, radii, mus)
        if cell is not None and (best is None or cell > best[0]):
            best = (cell, p)
    if best is not None:
        (r, mu), p = best
        return CppCertificate(Verdict.HOLDS, CppKind.WEAK, Method.SWEEP, policy.sweep,
                              constants=CppConstants(r, mu), witness_pair=(p.z, p.w),
                              diagnostics=diag)
    j = policy.depth
    if all(p.probe_ratio[j] >= ROBUST_FACTOR for p in profs):
        worst = max(profs, key=lambda p: p.probe_ratio[j])
        return _fails_certificate(x, y, CppKind.WEAK, policy, worst, diag, [(worst.z, worst.w)])
    diag["reason"] = "no passing cell, but some floor violation is not robust"
    return CppCertificate(Verdict.UNDETERMINED, CppKind.WEAK, Method.SWEEP, policy.sweep,
                          diagnostics=diag)


def resweep_holds(x: Vec2, y: Vec2, cert: CppCertificate, factor: int = 10) -> bool:
    """Re-run a Holds certificate at ``factor`` times the sweep density."""
    if not cert.holds:
        raise ValueError("only Holds certificates can be re-swept")
    sweep = cert.sweep * factor
    if cert.witness_pair is not None:
        pairs = [cert.witness_pair]
    else:
        pairs = direction_pairs(x, y)
    for z, w in pairs:
        if not check_mu_cpp(x, y, z, w, cert.constants, sweep).holds:
            return False
    return True


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def _require_l4(space: Space):
    if not (space.is_lp and space.p == 4.0 and space.dim == 2):
        raise WrongSpaceError(f"expected l_4 on the plane, got {space.describe()}")


def _l4_complement(v) -> np.ndarray:
    w = np.array([v[1] ** 3, -v[0] ** 3])
    return w / np.sum(w ** 4) ** 0.25


def l4_cpp_oracle(x: Vec2, y_img: Vec2, mu_floor_exp: int = 40,
                  sweep: int = DEFAULT_SWEEP) -> CppCertificate:
    """Closed-form CPP decision on the l_4 plane.

    ``((x, y), (x1, y1))`` fails to be a CPP exactly when ``x y = 0`` and
    ``x1 y1 != 0``. On the Holds side the radius comes from the explicit
    bound ``r < min{3|xy| / (8k + 6|xy|), 1}`` with ``k = 1 / ||(y^3, -x^3)||``
    (``r = 1`` when both pairs sit on axes) and ``mu`` is the largest power of
    two that the sweep validates. On the Fails side the counterexample is
    placed where the quadratic term ``6 a^2 k1^2 x1^2 y1^2 mu^2`` dominates.
    """
    X, Y = x.space, y_img.space
    _require_l4(X)
    _require_l4(Y)
    xc, yc = _unit_coords(x), _unit_coords(y_img)
    z0 = _l4_complement(xc)
    w0 = _l4_complement(yc)
    xy = float(xc[0] * xc[1])
    x1y1 = float(yc[0] * yc[1])
    depth = grid_depth()
    if abs(xy) < TOL_ORTH and abs(x1y1) >= TOL_ORTH:
        mu = 2.0 ** -depth
        r = 2.0 ** -depth
        k1 = 1.0 / np.sum(np.abs(np.array([yc[1] ** 3, -yc[0] ** 3])) ** 4) ** 0.25
        # keep b^2 (1 - mu^4) below the positive quadratic term
        b_mag = min(0.5 * r, k1 * abs(x1y1) * mu)
        # x sits on an axis, so a = (1 - b^4)^(1/4); the sign of b picks the cubic term's sign
        t_mag = b_mag / (1.0 - b_mag ** 4) ** 0.25
        best = None
        for sign in (1.0, -1.0):
            for w in (w0, -w0):
                cex = _counterexample(X, Y, xc, yc, z0, w, sign * t_mag, mu, r)
                if best is None or cex["excess_minus_one"] > best["excess_minus_one"]:
                    best = cex
        best["coarse"] = _coarse_counterexample(X, Y, xc, yc, [(s * z0, w) for s in (1.0, -1.0)
                                                               for w in (w0, -w0)], 1.0, 1.0, sweep)
        return CppCertificate(Verdict.FAILS, CppKind.CPP, Method.CLOSED_FORM_L4, sweep,
                              counterexample=best,
                              diagnostics={"xy": xy, "x1y1": x1y1, "k1": float(k1)})
    if abs(xy) < TOL_ORTH:
        r = 1.0
    else:
        k = 1.0 / np.sum(np.array([xc[1] ** 3, -xc[0] ** 3]) ** 4) ** 0.25
        r = float(0.5 * min(3 * abs(xy) / (8 * k + 6 * abs(xy)), 1.0))
    mus = 2.0 ** -np.arange(mu_floor_exp + 1)
    t = _t_grid(sweep)
    dom = _domain_side(X, xc, z0, t)
    rc = np.min([_profile(dom, _codomain_side(Y, yc, w, t, mus), r).rcrit for w in (w0, -w0)],
                axis=0)
    ok = np.nonzero(r < rc)[0]
    diag = {"xy": xy, "x1y1": x1y1, "r_bound": r}
    if ok.size == 0:
        diag["reason"] = f"no mu >= 2^-{mu_floor_exp} validated at the closed-form radius"
        return CppCertificate(Verdict.UNDETERMINED, CppKind.CPP, Method.CLOSED_FORM_L4, sweep,
                              diagnostics=diag)
    return CppCertificate(Verdict.HOLDS, CppKind.CPP, Method.CLOSED_FORM_L4, sweep,
                          constants=CppConstants(r, float(mus[ok[0]])), witness_pair=(z0, w0),
                          diagnostics=diag)


def constructive_mu_even_p(p: int, r: float, y_img) -> float:
    """Explicit ``mu`` making ``(x, y_img)`` a CPP from a Hilbert plane into l_p.

    Bounds every term of the binomial expansion of
    ``||a y + b mu w||_p^p`` on the ball of radius ``r`` and solves for ``mu``:
    ``mu = min(1, m (1 - r)^(p-2) / B)`` with ``m = p / 2`` and
    ``B = sum_{j=2..p} C(p, j) (1 + r)^(p-j) r^(j-2) k1^j |c_j|``,
    ``c_j = (x1 y1)^(p-j) (x1^(p(j-1)) + (-1)^j y1^(p(j-1)))``,
    ``k1 = 1 / ||(-y1^(p-1), x1^(p-1))||_p``.
    """
    if isinstance(p, float) and not p.is_integer():
        raise InvalidPError(f"p must be an even integer, got {p}")
    p = int(p)
    if p < 2 or p % 2:
        raise InvalidPError(f"p must be an even integer >= 2, got {p}")
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    yc = y_img.coords if isinstance(y_img, Vec2) else np.asarray(y_img, dtype=float)
    x1, y1 = float(yc[0]), float(yc[1])
    k1 = 1.0 / (abs(y1) ** (p * (p - 1)) + abs(x1) ** (p * (p - 1))) ** (1.0 / p)
    bound = 0.0
    for j in range(2, p + 1):
        c_j = abs(x1 * y1) ** (p - j) * abs(x1 ** (p * (j - 1)) + (-1) ** j * y1 ** (p * (j - 1)))
        bound += comb(p, j, exact=True) * (1 + r) ** (p - j) * r ** (j - 2) * k1 ** j * c_j
    m = p // 2
    return float(min(1.0, m * (1.0 - r) ** (p - 2) / bound))

"""Extreme contractions between two-dimensional smooth spaces.

:func:`classify_extreme` decides whether a norm-one operator is an extreme
point of the unit ball of the operator space, and on the negative side builds
an explicit decomposition ``T = (T1 + T2) / 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ._config import DEFAULT_GRID, DEFAULT_SWEEP, TOL_CERT, grid_depth
from .cpp import (CppCertificate, CppConstants, CppKind, Method, SearchPolicy, Verdict,
                  _codomain_side, _domain_side, _profile, _t_grid, check_cpp, check_mu_cpp,
                  constructive_mu_even_p, l4_cpp_oracle, ROBUST_FACTOR)
from .errors import (AttainmentNotIsolated, DecompositionNotFound, HypothesisError,
                     InvalidFamilyParams, NormNotOneError)
from .operators import Operator, norm_attainment_set, op_norm, rank, restricted_norm
from .orthogonality import bj_complement, complement_basis
from .spaces import Space, Vec2, is_smooth, is_strictly_convex, lp, euclidean, norm, radial_point

__all__ = [
    "ExtVerdict",
    "ExtCase",
    "ExtremalityVerdict",
    "classify_extreme",
    "check_hypotheses",
    "decompose_rank_one",
    "decompose_rank_two",
    "verify_witness",
    "generate_extreme_family",
    "construct_nontrivial_weak_cpp",
]

NORM_ONE_TOL = 1e-8
WITNESS_FLOOR = 1e-6
MAX_EUCLIDEAN_DIM = 8


class ExtVerdict(str, enum.Enum):
    EXTREME = "Extreme"
    NOT_EXTREME = "NotExtreme"
    UNDETERMINED = "Undetermined"


class ExtCase(str, enum.Enum):
    RANK_ONE_NOT_CPP = "RankOneNotCPP"
    RANK_TWO_NO_MU_CPP = "RankTwoNoMuCPP"
    TWO_INDEPENDENT_NORMERS = "TwoIndependentNormers"
    RANK_ONE_CPP = "RankOneCPP"
    RANK_TWO_MU_CPP = "RankTwoMuCPP"
    ORACLE_DECOMPOSITION = "OracleDecomposition"
    ORACLE_EXHAUSTED = "OracleExhausted"


@dataclass
class ExtremalityVerdict:
    verdict: ExtVerdict
    case: Optional[ExtCase]
    witness: Optional[Tuple[Operator, Operator]] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def extreme(self) -> bool:
        return self.verdict is ExtVerdict.EXTREME

    @property
    def not_extreme(self) -> bool:
        return self.verdict is ExtVerdict.NOT_EXTREME

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict.value, "case": self.case.value if self.case else None,
             "witness": None, "diagnostics": _jsonable(self.diagnostics)}
        if self.witness is not None:
            d["witness"] = {"T1": self.witness[0].matrix.tolist(),
                            "T2": self.witness[1].matrix.tolist()}
        return d


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


# --------------------------------------------------------------------------
# hypotheses
# --------------------------------------------------------------------------

def _smooth(space: Space) -> bool:
    if space.is_lp:
        return 1.0 < space.p < math.inf
    return is_smooth(space)[0]


def _strictly_convex(space: Space) -> bool:
    if space.is_lp:
        return 1.0 < space.p < math.inf
    return is_strictly_convex(space)[0]


def check_hypotheses(T: Operator) -> None:
    """Raise :class:`HypothesisError` unless the domain is a smooth plane and
    the codomain is a smooth, strictly convex plane (or a Euclidean space of
    dimension at most eight)."""
    X, Y = T.domain, T.codomain
    if X.dim != 2:
        raise HypothesisError("the domain must be two-dimensional")
    if not _smooth(X):
        raise HypothesisError(f"the domain {X.describe()} is not smooth")
    if Y.dim > 2:
        if not (Y.is_hilbert and Y.dim <= MAX_EUCLIDEAN_DIM):
            raise HypothesisError("codomains above dimension two must be Euclidean (dim <= 8)")
    elif not (_smooth(Y) and _strictly_convex(Y)):
        raise HypothesisError(f"the codomain {Y.describe()} must be smooth and strictly convex")


def _check_norm_one(T: Operator) -> float:
    n = op_norm(T)
    if abs(n - 1.0) > NORM_ONE_TOL:
        raise NormNotOneError(f"operator norm is {n!r}, expected 1")
    return n


# --------------------------------------------------------------------------
# decompositions
# --------------------------------------------------------------------------

def _killing_functional(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # g with g(x) = 0 and g(y) = 1
    return np.linalg.solve(np.array([x, y]), np.array([0.0, 1.0]))


def _codomain_complement(Y: Space, v: np.ndarray) -> np.ndarray:
    if Y.dim > 2:
        return complement_basis(Y, v)[0]
    return bj_complement(Y, v).direction


def _within_ball(T: Operator, S: Operator) -> bool:
    return op_norm(S) <= 1.0 + TOL_CERT


def _n_candidates(mu: float, n_max: int = 10 ** 6):
    n0 = math.floor(1.0 / mu) + 1  # smallest n with 1/n < mu
    for n in range(n0, min(n0 + 32, n_max + 1)):
        yield n
    n = n0 + 32
    while n <= n_max:
        yield n
        n *= 2


def decompose_rank_one(T: Operator, x, cert: CppCertificate) -> Tuple[Operator, Operator]:
    """``T_n = T + (1/n) w g``, ``S_n = T - (1/n) w g`` for the first admissible ``n``.

    ``g`` vanishes on ``x`` and equals one on the domain complement ``y`` of
    ``x``; ``w`` is the codomain complement of ``Tx``. Candidates start at the
    smallest ``n`` with ``1/n < mu`` and stop at ``n = 10^6``.
    """
    if not cert.holds or cert.constants is None:
        raise DecompositionNotFound("the certificate for (x, Tx) does not hold")
    X = T.domain
    xc = np.asarray(x.coords if isinstance(x, Vec2) else x, dtype=float)
    xc = xc / norm(X, xc)
    y = bj_complement(X, xc).direction
    tx = T.apply(xc)
    w = _codomain_complement(T.codomain, tx)
    perturb = np.outer(w, _killing_functional(xc, y))
    for n in _n_candidates(cert.constants.mu):
        t1 = Operator(T.matrix + perturb / n, T.domain, T.codomain)
        t2 = Operator(T.matrix - perturb / n, T.domain, T.codomain)
        if _within_ball(T, t1) and _within_ball(T, t2):
            if np.max(np.abs(t1.matrix - T.matrix)) <= WITNESS_FLOOR:
                break
            return t1, t2
    raise DecompositionNotFound("no n up to 10^6 gives a decomposition inside the unit ball")


def _isolation_gap(T: Operator, x: np.ndarray, r: float, grid: int = DEFAULT_GRID) -> float:
    """``1 - sup ||T h||`` over unit ``h`` at distance more than ``r`` from ``x`` and ``-x``."""
    theta = np.linspace(0.0, math.pi, grid, endpoint=False)
    pts = radial_point(T.domain, theta)
    from .spaces import norms
    far = (norms(T.domain, pts - x) > r) & (norms(T.domain, pts + x) > r)
    if not far.any():
        return 1.0
    return 1.0 - float(norms(T.codomain, pts[far] @ T.matrix.T).max())


def decompose_rank_two(T: Operator, x, mu: float, r: Optional[float] = None
                       ) -> Tuple[Operator, Operator, dict]:
    """``T1 y = (k + c) w``, ``T2 y = (k - c) w`` with ``T1 x = T2 x = Tx``.

    ``c = min{k, delta/2, eps} / 2`` where ``eps = mu - k`` and ``1 - delta``
    bounds ``||T h||`` away from ``±x``. When ``r`` is omitted the largest
    power-of-two radius at which the ``mu`` implication holds is used.
    Returns ``(T1, T2, diagnostics)``.
    """
    X = T.domain
    xc = np.asarray(x.coords if isinstance(x, Vec2) else x, dtype=float)
    xc = xc / norm(X, xc)
    y = bj_complement(X, xc).direction
    k = restricted_norm(T, y)
    if k <= 0.0:
        raise DecompositionNotFound("T vanishes on the complement direction")
    w = T.apply(y) / k
    eps = mu - k
    if eps <= 0.0:
        raise ValueError("mu must exceed ||Ty||")
    if r is None:
        tx = T.apply(xc)
        t = _t_grid(DEFAULT_SWEEP)
        prof = _profile(_domain_side(X, xc, y, t),
                        _codomain_side(T.codomain, tx, w, t, np.array([mu])), 0.0)
        radii = 2.0 ** -np.arange(grid_depth() + 1)
        ok = radii[radii < prof.rcrit[0]]
        if ok.size == 0:
            raise DecompositionNotFound(f"the mu implication fails at every radius (mu={mu})")
        r = float(ok[0])
    delta = _isolation_gap(T, xc, r)
    if delta <= 0.0:
        raise AttainmentNotIsolated(f"norm is attained away from ±x at radius {r}")
    c = 0.5 * min(k, delta / 2.0, eps)
    g = _killing_functional(xc, y)
    diag = {"k": k, "mu": mu, "epsilon": eps, "delta": delta, "r": r}
    while c > WITNESS_FLOOR:
        perturb = c * np.outer(w, g)
        t1 = Operator(T.matrix + perturb, T.domain, T.codomain)
        t2 = Operator(T.matrix - perturb, T.domain, T.codomain)
        if _within_ball(T, t1) and _within_ball(T, t2) \
                and np.max(np.abs(perturb)) > WITNESS_FLOOR:
            diag["c"] = c
            return t1, t2, diag
        c *= 0.5
    raise DecompositionNotFound("decomposition shrank below the witness floor")


def verify_witness(T: Operator, t1: Operator, t2: Operator, grid: int = 3 * DEFAULT_GRID + 1
                   ) -> bool:
    """Independent check of a decomposition: midpoint identity to 1e-12,
    both norms at most ``1 + TOL_CERT`` on a denser, offset grid, and a
    max-entry distance above the witness floor."""
    if np.max(np.abs(0.5 * (t1.matrix + t2.matrix) - T.matrix)) > 1e-12:
        return False
    if np.max(np.abs(t1.matrix - T.matrix)) <= WITNESS_FLOOR:
        return False
    return all(op_norm(S, grid=grid) <= 1.0 + TOL_CERT for S in (t1, t2))


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------

def _is_lp(space: Space, p: float) -> bool:
    return space.is_lp and space.p == p and space.dim == 2


def _rank_one_certificate(T: Operator, x: np.ndarray) -> CppCertificate:
    X, Y = T.domain, T.codomain
    tx = T.apply(x)
    tx = tx / norm(Y, tx)
    xv, yv = Vec2(x, X), Vec2(tx, Y)
    if _is_lp(X, 4.0) and _is_lp(Y, 4.0):
        return l4_cpp_oracle(xv, yv)
    if X.is_hilbert and X.dim == 2 and Y.is_lp and Y.dim == 2 and float(Y.p).is_integer() \
            and Y.p % 2 == 0:
        return _even_p_certificate(xv, yv)
    return check_cpp(xv, yv, SearchPolicy())


def _even_p_certificate(x: Vec2, y: Vec2, r: float = 0.5) -> CppCertificate:
    # Hilbert plane into even-p l_p: explicit mu, validated on both codomain directions
    p = int(y.space.p)
    mu = constructive_mu_even_p(p, r, y.coords)
    z0 = bj_complement(x.space, x.coords).direction
    w0 = bj_complement(y.space, y.coords).direction
    consts = CppConstants(r, mu)
    for w in (w0, -w0):
        if not check_mu_cpp(x, y, z0, w, consts).holds:
            return check_cpp(x, y)
    method = Method.HILBERT_IDENTITY if p == 2 else Method.CONSTRUCTIVE_EVEN_P
    return CppCertificate(Verdict.HOLDS, CppKind.CPP, method, DEFAULT_SWEEP, constants=consts,
                          witness_pair=(z0, w0))


def classify_extreme(T: Operator, policy: Optional[SearchPolicy] = None) -> ExtremalityVerdict:
    """Classify a norm-one operator.

    Two independent norming pairs give an extreme point. With a single pair
    ``±x``: a rank-one ``T`` is extreme exactly when ``(x, Tx)`` is not a CPP;
    a rank-two ``T`` fails to be extreme exactly when ``(x, Tx)`` satisfies the
    ``mu`` implication along ``(y, Ty/||Ty||)`` for some ``mu > ||Ty||``.
    """
    check_hypotheses(T)
    _check_norm_one(T)
    policy = policy or SearchPolicy()
    rk = rank(T)
    att = norm_attainment_set(T)
    diag = {"rank": rk, "M_T": [p.tolist() for p in att.points],
            "whole_sphere": att.whole_sphere, "arc": att.arc}
    if att.whole_sphere or att.arc or len(att.points) >= 2:
        if rk == 2:
            return ExtremalityVerdict(ExtVerdict.EXTREME, ExtCase.TWO_INDEPENDENT_NORMERS,
                                      diagnostics=diag)
        diag["reason"] = "rank one operator with several norming pairs"
        return ExtremalityVerdict(ExtVerdict.UNDETERMINED, None, diagnostics=diag)
    x = att.points[0]
    if rk == 1:
        return _classify_rank_one(T, x, diag)
    if T.codomain.dim > 2:
        raise HypothesisError("rank-two classification needs a two-dimensional codomain")
    return _classify_rank_two(T, x, policy, diag)


def _classify_rank_one(T: Operator, x: np.ndarray, diag: dict) -> ExtremalityVerdict:
    cert = _rank_one_certificate(T, x)
    diag["cpp"] = cert.to_dict()
    if cert.fails:
        return ExtremalityVerdict(ExtVerdict.EXTREME, ExtCase.RANK_ONE_NOT_CPP, diagnostics=diag)
    if not cert.holds:
        return ExtremalityVerdict(ExtVerdict.UNDETERMINED, ExtCase.RANK_ONE_CPP, diagnostics=diag)
    try:
        t1, t2 = decompose_rank_one(T, x, cert)
    except DecompositionNotFound as exc:
        diag["reason"] = str(exc)
        return ExtremalityVerdict(ExtVerdict.UNDETERMINED, ExtCase.RANK_ONE_CPP, diagnostics=diag)
    return ExtremalityVerdict(ExtVerdict.NOT_EXTREME, ExtCase.RANK_ONE_CPP, witness=(t1, t2),
                              diagnostics=diag)


def _classify_rank_two(T: Operator, x: np.ndarray, policy: SearchPolicy,
                       diag: dict) -> ExtremalityVerdict:
    X, Y = T.domain, T.codomain
    y = bj_complement(X, x).direction
    k = restricted_norm(T, y)
    tx = T.apply(x)
    w = T.apply(y) / k
    diag.update({"k": k, "y": y.tolist(), "w": w.tolist()})
    if k >= 1.0 - NORM_ONE_TOL:
        diag["reason"] = "the complement direction is norming too"
        return ExtremalityVerdict(ExtVerdict.EXTREME, ExtCase.TWO_INDEPENDENT_NORMERS,
                                  diagnostics=diag)
    mus = k * (1.0 + 2.0 ** -np.arange(policy.depth + 1))
    radii = policy.radii()
    t = _t_grid(policy.sweep)
    prof = _profile(_domain_side(X, x, y, t), _codomain_side(Y, tx, w, t, mus),
                    float(radii[-1]))
    for j, mu in enumerate(mus):
        ok = radii[radii < prof.rcrit[j]]
        if ok.size == 0:
            continue
        try:
            t1, t2, dd = decompose_rank_two(T, x, float(mu), float(ok[0]))
        except (DecompositionNotFound, AttainmentNotIsolated) as exc:
            diag["reason"] = str(exc)
            continue
        diag.update(dd)
        return ExtremalityVerdict(ExtVerdict.NOT_EXTREME, ExtCase.RANK_TWO_MU_CPP,
                                  witness=(t1, t2), diagnostics=diag)
    diag["mu_floor"] = float(mus[-1])
    if np.all(prof.probe_ratio >= ROBUST_FACTOR):
        return ExtremalityVerdict(ExtVerdict.EXTREME, ExtCase.RANK_TWO_NO_MU_CPP,
                                  diagnostics=diag)
    diag.setdefault("reason", "mu search neither passed nor failed robustly at the floor")
    return ExtremalityVerdict(ExtVerdict.UNDETERMINED, ExtCase.RANK_TWO_MU_CPP, diagnostics=diag)


# --------------------------------------------------------------------------
# families and constructions
# --------------------------------------------------------------------------

def generate_extreme_family(family: str, params: dict) -> Operator:
    """Members of the known rank-one extreme families.

    ``"L4RankOne"``: ``params = {"x1", "y1", "column"}`` with
    ``x1^4 + y1^4 = 1`` and ``x1 y1 != 0``; the operator on the l_4 plane has
    ``(x1, y1)`` in the given column (1 or 2) and zeros elsewhere.

    ``"L4ToEuclideanRankOne"``: ``params = {"x", "column"}`` with ``x`` a
    Euclidean unit vector of length ``n``; the operator maps the l_4 plane
    into ``R^n`` with ``x`` in the given column.
    """
    column = int(params.get("column", 1))
    if column not in (1, 2):
        raise InvalidFamilyParams("column must be 1 or 2")
    if family == "L4RankOne":
        x1, y1 = float(params["x1"]), float(params["y1"])
        if abs(x1 ** 4 + y1 ** 4 - 1.0) > 1e-10:
            raise InvalidFamilyParams("x1^4 + y1^4 must equal 1")
        if abs(x1 * y1) < 1e-12:
            raise InvalidFamilyParams("x1 * y1 must be nonzero")
        m = np.zeros((2, 2))
        m[:, column - 1] = (x1, y1)
        return Operator(m, lp(4), lp(4))
    if family == "L4ToEuclideanRankOne":
        x = np.asarray(params["x"], dtype=float)
        if x.ndim != 1 or x.size < 1:
            raise InvalidFamilyParams("x must be a vector")
        if abs(float(x @ x) - 1.0) > 1e-10:
            raise InvalidFamilyParams("x must be a Euclidean unit vector")
        m = np.zeros((x.size, 2))
        m[:, column - 1] = x
        return Operator(m, lp(4), euclidean(x.size) if x.size != 2 else lp(2))
    raise InvalidFamilyParams(f"unknown family {family!r}")


def construct_nontrivial_weak_cpp(space: Space) -> Tuple[Vec2, Vec2]:
    """A weak CPP ``(x, Tx)`` with ``Tx != ±x``.

    ``S e1 = e2``, ``S e2 = -e1`` has no real eigenvalue, so for
    ``T = S / ||S||`` and ``x`` in the norm-attainment set, ``Tx`` is never
    ``±x``; norm attainment makes ``(x, Tx)`` a weak CPP.
    """
    if space.dim != 2:
        raise HypothesisError("the construction lives on a plane")
    s = np.array([[0.0, -1.0], [1.0, 0.0]])
    S = Operator(s, space, space)
    T = S.scaled(1.0 / op_norm(S))
    x = norm_attainment_set(T).points[0]
    x = x / norm(space, x)
    return Vec2(x, space), Vec2(T.apply(x), space)

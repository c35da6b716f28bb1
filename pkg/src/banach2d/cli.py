"""``banach2d`` command line.

Exit codes: 0 success / Holds, 1 Fails (or a failed suite or oracle
disagreement), 2 malformed input, 3 Undetermined, 4 hypotheses or
normalization not met.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._config import DEFAULT_GRID, DEFAULT_SWEEP, grid_depth
from .cpp import CppConstants, SearchPolicy, Verdict, check_cpp, check_mu_cpp, check_weak_cpp
from .errors import Banach2DError, HypothesisError, NormNotOneError
from .extremality import ExtVerdict, classify_extreme, verify_witness
from .operators import Operator, parse_operator
from .oracle import MAG_MIN, brute_force_oracle
from .orthogonality import bj_complement, is_bj_orthogonal, is_isosceles_orthogonal
from .spaces import Vec2, norm, parse_space

EXIT_OK, EXIT_FAILS, EXIT_PARSE, EXIT_UNDETERMINED, EXIT_HYPOTHESIS = 0, 1, 2, 3, 4

_VERDICT_EXIT = {Verdict.HOLDS: EXIT_OK, Verdict.FAILS: EXIT_FAILS,
                 Verdict.UNDETERMINED: EXIT_UNDETERMINED}


class InputError(ValueError):
    """Malformed command-line input (exit code 2)."""


@dataclass
class RunReport:
    command: str
    inputs: dict
    result: object
    seed: int
    grid_metadata: dict
    elapsed_ms: float = 0.0
    exit_code: int = EXIT_OK
    lines: List[str] = field(default_factory=list)  # human-readable rendering

    def to_dict(self, timing: bool = False) -> dict:
        d = {"command": self.command, "inputs": self.inputs, "result": self.result,
             "seed": self.seed, "grid_metadata": self.grid_metadata}
        if timing:
            d["elapsed_ms"] = self.elapsed_ms
        return d


def _grid_metadata() -> dict:
    return {"op_norm_grid": DEFAULT_GRID, "cpp_sweep": DEFAULT_SWEEP,
            "depth": grid_depth(), "oracle_floor": MAG_MIN}


# --------------------------------------------------------------------------
# input parsing
# --------------------------------------------------------------------------

def _space(text: str):
    try:
        return parse_space(text)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _vector(text: str, space) -> np.ndarray:
    try:
        v = np.array([float(s) for s in text.split(",")])
    except ValueError as exc:
        raise InputError(f"malformed vector {text!r}") from exc
    if v.size != space.dim or not np.all(np.isfinite(v)):
        raise InputError(f"vector {text!r} does not have {space.dim} finite coordinates")
    return v


def _unit_vector(text: str, space) -> np.ndarray:
    v = _vector(text, space)
    n = norm(space, v)
    if n == 0.0:
        raise InputError(f"vector {text!r} is zero")
    return v / n


def _matrix(text: str) -> np.ndarray:
    try:
        rows = [[float(s) for s in row.split(",")] for row in text.split(";")]
        m = np.array(rows, dtype=float)
    except ValueError as exc:
        raise InputError(f"malformed matrix {text!r}") from exc
    if m.ndim != 2:
        raise InputError("matrix rows must have equal length")
    return m


def _load_json(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from exc


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_check_orth(args) -> RunReport:
    S = _space(args.space)
    x = _unit_vector(args.x, S)
    y = _vector(args.y, S)
    bj = is_bj_orthogonal(S, x, y)
    iso = is_isosceles_orthogonal(S, x, y)
    comp = bj_complement(S, x) if S.dim == 2 or S.is_hilbert else None
    result = {"bj": bj, "isosceles": iso, "x_normalized": x.tolist(),
              "complement": comp.to_dict() if comp else None}
    lines = [f"space        {S.describe()}", f"x (unit)     {x.tolist()}",
             f"bj           {str(bj).lower()}", f"isosceles    {str(iso).lower()}"]
    if comp:
        lines.append(f"complement   {comp.direction.tolist()}"
                     + ("  (non-unique)" if comp.non_unique else ""))
    return RunReport("check-orth", {"space": args.space, "x": args.x, "y": args.y}, result,
                     args.seed, _grid_metadata(), lines=lines)


def cmd_check_cpp(args) -> RunReport:
    if args.file:
        desc = _load_json(args.file)
        try:
            dom, cod = desc["domain"], desc.get("codomain", desc["domain"])
            xs = ",".join(str(c) for c in desc["x"])
            ys = ",".join(str(c) for c in desc["y"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"cpp descriptor is missing {exc}") from exc
        X, Y = parse_space(dom), parse_space(cod)
    else:
        if args.x is None or args.y is None:
            raise InputError("--x and --y are required without --file")
        dom = args.dom or args.space
        cod = args.cod or args.space or dom
        if dom is None:
            raise InputError("give --dom/--cod or --space")
        X, Y = _space(dom), _space(cod)
        xs, ys = args.x, args.y
    if X.dim != 2 or Y.dim != 2:
        raise InputError("CPP checks need two-dimensional spaces")
    x, y = Vec2(_unit_vector(xs, X), X), Vec2(_unit_vector(ys, Y), Y)
    if args.kind == "mu":
        if None in (args.z, args.w, args.r, args.mu):
            raise InputError("--kind mu needs --z, --w, --r and --mu")
        try:
            cert = check_mu_cpp(x, y, _vector(args.z, X), _vector(args.w, Y),
                                CppConstants(args.r, args.mu))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    else:
        fn = check_cpp if args.kind == "cpp" else check_weak_cpp
        cert = fn(x, y, SearchPolicy(strict=args.strict))
    res = cert.to_dict()
    lines = [f"pair      x = {x.coords.tolist()}  y = {y.coords.tolist()}",
             f"kind      {cert.kind.value}", f"verdict   {cert.verdict.value}",
             f"method    {cert.method.value}"]
    if cert.constants:
        lines.append(f"constants r = {cert.constants.r!r}  mu = {cert.constants.mu!r}")
    if cert.counterexample:
        lines.append(f"counterexample {json.dumps(res['counterexample'])}")
    inputs = {"kind": args.kind, "domain": X.describe(), "codomain": Y.describe(),
              "x": xs, "y": ys}
    return RunReport("check-cpp", inputs, res, args.seed, _grid_metadata(),
                     exit_code=_VERDICT_EXIT[cert.verdict], lines=lines)


def _operator_from_args(args) -> Operator:
    if args.file:
        try:
            return parse_operator(_load_json(args.file))
        except (ValueError, TypeError) as exc:
            raise InputError(str(exc)) from exc
    if args.matrix is None:
        raise InputError("give --matrix or --file")
    X = _space(args.dom or args.space or "lp:4:2")
    Y = _space(args.cod or args.space or args.dom or "lp:4:2")
    try:
        return Operator(_matrix(args.matrix), X, Y)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_classify(args) -> RunReport:
    T = _operator_from_args(args)
    v = classify_extreme(T)
    res = {"classification": v.to_dict()}
    code = EXIT_UNDETERMINED if v.verdict is ExtVerdict.UNDETERMINED else EXIT_OK
    lines = [f"operator  {T.matrix.tolist()}  ({T.domain.describe()} -> {T.codomain.describe()})",
             f"verdict   {v.verdict.value}", f"case      {v.case.value if v.case else '-'}"]
    if v.witness:
        ok = verify_witness(T, *v.witness)
        res["witness_verified"] = ok
        lines += [f"T1        {v.witness[0].matrix.tolist()}",
                  f"T2        {v.witness[1].matrix.tolist()}",
                  f"verified  {str(ok).lower()}"]
    if args.oracle:
        o = brute_force_oracle(T)
        agree = None
        if v.verdict is not ExtVerdict.UNDETERMINED:
            agree = v.not_extreme == o.not_extreme
            if not agree:
                code = EXIT_FAILS
        res["oracle"] = o.to_dict()
        res["agreement"] = agree
        lines += [f"oracle    {o.case.value}",
                  f"agree     {'-' if agree is None else str(agree).lower()}"]
    return RunReport("classify", {"operator": T.to_dict()}, res, args.seed, _grid_metadata(),
                     exit_code=code, lines=lines)


def cmd_verify_theorems(args) -> RunReport:
    from .verify import run_suite

    def live(r):
        if not args.json:
            print(f"{r.number:>3}  {r.tag:<17} {'PASS' if r.passed else 'FAIL'}  "
                  f"{r.elapsed_s:7.2f}s / {r.limit_s:g}s  {r.title}", flush=True)

    try:
        results = run_suite(args.only, seed=args.seed, report=live)
    except KeyError as exc:
        raise InputError(str(exc)) from exc
    passed = all(r.passed for r in results)
    res = {"criteria": [r.to_dict(timing=args.timing) for r in results], "all_passed": passed}
    lines = [f"{sum(r.passed for r in results)}/{len(results)} criteria passed"]
    return RunReport("verify-theorems", {"only": args.only}, res, args.seed, _grid_metadata(),
                     exit_code=EXIT_OK if passed else EXIT_FAILS, lines=lines)


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the run report as JSON")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--timing", action="store_true",
                        help="include elapsed_ms (breaks byte-identical reruns)")

    p = argparse.ArgumentParser(prog="banach2d", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("check-orth", parents=[common],
                       help="Birkhoff-James / isosceles orthogonality of x and y")
    o.add_argument("--space", required=True, help="e.g. lp:4:2, l2:3, linf:2, l1:2")
    o.add_argument("--x", required=True, help="comma-separated; normalized internally")
    o.add_argument("--y", required=True)
    o.set_defaults(func=cmd_check_orth)

    c = sub.add_parser("check-cpp", parents=[common], help="certify a (weak / mu) CPP")
    c.add_argument("--kind", choices=("cpp", "weak", "mu"), default="cpp")
    c.add_argument("--dom")
    c.add_argument("--cod")
    c.add_argument("--space", help="shorthand for equal domain and codomain")
    c.add_argument("--x")
    c.add_argument("--y")
    c.add_argument("--z", help="domain direction (kind mu)")
    c.add_argument("--w", help="codomain direction (kind mu)")
    c.add_argument("--r", type=float)
    c.add_argument("--mu", type=float)
    c.add_argument("--strict", action="store_true", help="also sweep the z-reversed directions")
    c.add_argument("--file", help="JSON {x, y, domain, codomain}; '-' reads stdin")
    c.set_defaults(func=cmd_check_cpp)

    k = sub.add_parser("classify", parents=[common], help="extremality of a norm-one operator")
    k.add_argument("--matrix", help="rows separated by ';', entries by ','")
    k.add_argument("--file", help="JSON {matrix, domain, codomain}; '-' reads stdin")
    k.add_argument("--dom")
    k.add_argument("--cod")
    k.add_argument("--space")
    k.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    k.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify-theorems", parents=[common], help="run the acceptance suite")
    v.add_argument("--only", help="criterion tag or number")
    v.set_defaults(func=cmd_verify_theorems)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        report = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (HypothesisError, NormNotOneError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except Banach2DError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE if isinstance(exc, ValueError) else EXIT_UNDETERMINED
    report.elapsed_ms = 1000.0 * (time.perf_counter() - t0)
    if args.json:
        print(json.dumps(report.to_dict(timing=args.timing), sort_keys=True))
    else:
        for line in report.lines:
            print(line)
        if args.timing:
            print(f"elapsed   {report.elapsed_ms:.1f} ms")
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

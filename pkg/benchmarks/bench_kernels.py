"""Compare the numba kernels with the pure-numpy fallback.

    python benchmarks/bench_kernels.py            # both paths, side by side
    python benchmarks/bench_kernels.py --worker   # current path only (internal)

Each path runs in its own interpreter because the backend is fixed at import
time by ``BANACH2D_DISABLE_NUMBA``.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit


def _cases():
    import numpy as np
    from banach2d import Operator, Vec2, check_cpp, classify_extreme, lp
    from banach2d import _kernels as K

    rng = np.random.default_rng(0)
    thetas = np.linspace(0.0, np.pi, 4096, endpoint=False)
    m = rng.normal(size=(2, 2))
    stack = rng.normal(size=(128, 2, 2))
    s = np.concatenate([-np.geomspace(1e-12, 1e8, 2048), np.geomspace(1e-12, 1e8, 2048)])
    y, w = np.array([0.6, -0.8]), np.array([0.8, 0.6])
    phi_x, nx = K.lp_excess(y, w, s, 4.0)
    phi_y = np.stack([K.lp_excess(y, w, mu * s, 3.0)[0] for mu in 2.0 ** -np.arange(21)])
    d = np.abs(s) / (1 + np.abs(s))
    L4 = lp(4)
    T = Operator(np.diag([1.0, 0.5]), L4, L4)
    x = Vec2([2 ** -0.25, 2 ** -0.25], L4)
    return {
        "ratio_grid": lambda: K.ratio_grid(m, 4.0, 3.0, thetas),
        "ratio_max_batch": lambda: K.ratio_max_batch(stack, 4.0, 4.0, thetas[::4]),
        "lp_excess": lambda: K.lp_excess(y, w, s, 4.0),
        "profile_combine": lambda: K.profile_combine(phi_x, nx, d, phi_y, 0 * phi_y, 1e-9, 1e-6),
        "check_cpp": lambda: check_cpp(x, x),
        "classify_extreme": lambda: classify_extreme(T),
    }


def worker(repeat: int) -> dict:
    from banach2d import USE_NUMBA
    out = {"numba": USE_NUMBA}
    for name, fn in _cases().items():
        fn()  # compile / warm caches
        n, _ = timeit.Timer(fn).autorange()
        out[name] = min(timeit.repeat(fn, number=n, repeat=repeat)) / n
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worker", action="store_true")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if args.worker:
        print(json.dumps(worker(args.repeat)))
        return
    results = {}
    for flag in ("0", "1"):
        env = dict(os.environ, BANACH2D_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(args.repeat)],
                             env=env, capture_output=True, text=True, check=True)
        results["numba" if flag == "0" else "numpy"] = json.loads(res.stdout)
    print(f"{'kernel':<18}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name in results["numpy"]:
        if name == "numba":
            continue
        a, b = results["numba"][name], results["numpy"][name]
        print(f"{name:<18}{a * 1e3:>10.3f}ms{b * 1e3:>10.3f}ms{b / a:>9.1f}x")


if __name__ == "__main__":
    main()

"""Time the hot kernels with numba on and off.

The JIT switch is read at import, so each mode runs in its own interpreter:

    python benchmarks/bench_kernels.py            # both modes, side by side
    python benchmarks/bench_kernels.py --repeat 5
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time


def _cases():
    from radial_plap.core import Constant, OddPower, PowerLaw, ProblemSpec, WeightSpec
    from radial_plap.opial import OpialSetup, opial_constant, run_random_suite
    from radial_plap.radial_ode import ShootSpec, solve

    setup = OpialSetup(1.3, 0.9, PowerLaw(1.5, -0.4), PowerLaw(0.7, 0.3), (0.0, 2.0))
    sinc = ProblemSpec(WeightSpec(Constant(1.0), 3, 2.0), math.pi, OddPower(1.0, 1))
    eps = 1e-6
    shoot = ShootSpec(epsilon=eps, u0=math.sin(eps) / eps,
                      du0=(eps * math.cos(eps) - math.sin(eps)) / eps ** 2, rtol=1e-11, atol=1e-14)
    plap = ProblemSpec(WeightSpec(PowerLaw(1.0, 0.5), 2, 3.0), 5.0, OddPower(1.0, 1))

    return {
        "opial_constant (power weights)": lambda: opial_constant(setup, 0.0, 2.0),
        "dopri5 sinc, rtol 1e-11": lambda: solve(sinc, shoot),
        "dopri5 p=3, a=t^0.5": lambda: solve(plap, ShootSpec(epsilon=1e-3, u0=1.0, du0=0.0)),
        "random Opial suite, 50 cases": lambda: run_random_suite(50, seed=1, workers=1),
    }


def child(repeat):
    from radial_plap import USE_NUMBA

    out = {"jit": USE_NUMBA, "rows": {}}
    for name, fn in _cases().items():
        t0 = time.perf_counter()
        fn()  # first call includes compilation in JIT mode
        first = time.perf_counter() - t0
        best = math.inf
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out["rows"][name] = {"first": first, "best": best}
    print(json.dumps(out))


def run_mode(disable, repeat):
    env = dict(os.environ)
    env.pop("RADIAL_PLAP_DISABLE_JIT", None)
    if disable:
        env["RADIAL_PLAP_DISABLE_JIT"] = "1"
    res = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        child(args.repeat)
        return

    jit = run_mode(False, args.repeat)
    py = run_mode(True, args.repeat)
    if not jit["jit"]:
        print("numba unavailable: both columns are interpreted")
    w = max(len(k) for k in jit["rows"])
    print(f"{'kernel':<{w}}  {'jit first':>10}  {'jit best':>10}  {'python':>10}  {'speedup':>8}")
    for name, r in jit["rows"].items():
        p = py["rows"][name]["best"]
        print(f"{name:<{w}}  {r['first']:>9.3f}s  {r['best']:>9.4f}s  {p:>9.4f}s  {p / r['best']:>7.1f}x")


if __name__ == "__main__":
    main()

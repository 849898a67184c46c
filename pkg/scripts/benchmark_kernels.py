#!/usr/bin/env python3
"""Benchmark the compiled motion kernel against the pure-Python fallback.

Runs the same closed-loop motion problem with both backends and reports
wall time, steps per second and the final-state agreement.
"""

import argparse
import math
import time

from tempofleet.control._kernels_py import run_motion as run_py
from tempofleet.control.kernels import compiled_backend


def problem():
    return {
        "cx": 0.0, "cy": 0.0, "scale": 2.4,
        "bx": [0.0, 0.083], "by": [0.333, -0.375],
        "rho": [0.167, 0.146], "w": [0.05, 0.05],
        "gx": 0.5, "gy": 0.2,
        "k1": 1.0, "k2": 5.0, "tau": 0.05,
        "kphi": 2.0, "kv": 2.0, "km": 0.01, "kalpha": 0.01,
        "mass": 1.0, "fric_kind": 2, "fric_a": 1.25, "fric_b": 0.5,
        "dst_x": 1.2, "dst_y": 0.48, "dst_r": 0.4, "ent_r": 0.1,
        "speed_tol": 1e-2,
        "x0": -1.5, "y0": 0.3, "vx0": 0.0, "vy0": 0.0,
        "mhat0": 0.0, "ahat0": 0.0,
    }


def bench(fn, prob, dt, t_max, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(prob, dt, t_max)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--t-max", type=float, default=20.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    prob = problem()
    steps = int(math.ceil(args.t_max / args.dt))

    t_py, r_py = bench(run_py, prob, args.dt, args.t_max, args.repeat)
    print(f"python   : {t_py:8.3f} s   {steps / t_py:12.0f} steps/s   "
          f"status={r_py[0]} t={r_py[1]:.3f}")

    cc = compiled_backend()
    if cc is None:
        print("compiled : unavailable")
        return
    t_cc, r_cc = bench(cc.run_motion, prob, args.dt, args.t_max, args.repeat)
    print(f"compiled : {t_cc:8.3f} s   {steps / t_cc:12.0f} steps/s   "
          f"status={r_cc[0]} t={r_cc[1]:.3f}")
    print(f"speedup  : {t_py / t_cc:.1f}x")
    dx = math.hypot(r_py[2] - r_cc[2], r_py[3] - r_cc[3])
    print(f"final position agreement: {dx:.3e}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Workloads exercise the hot path (normal-ordered products with exact
coefficients) at three scales: raw products of dense series, a mid-size
Morse solve, and the order-16 quartic spectrum behind the Gevrey check.

Run:  python3 benchmarks/bench_kernel.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time


def _run_workloads(label):
    from qmorse import BACKEND
    from qmorse.series import harmonic, q_op, t_op
    from qmorse import normal_form as nf

    assert BACKEND == label, f"expected {label} kernel, got {BACKEND}"
    results = {}

    caps = dict(t_cap=8, weight_cap="20")
    q = q_op(**caps)
    f = harmonic(**caps) + t_op(**caps) * (q**4)
    dense = f**3
    t0 = time.perf_counter()
    for _ in range(20):
        _ = dense * dense
    results["dense products (20x)"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    res = nf.quantum_morse(f, 8)
    assert res.verify()
    results["order-8 quartic solve + verify"] = time.perf_counter() - t0

    if not os.environ.get("QMORSE_BENCH_QUICK"):
        caps = dict(t_cap=16, weight_cap="40")
        q = q_op(**caps)
        f16 = harmonic(**caps) + t_op(**caps) * (q**4)
        t0 = time.perf_counter()
        nf.quantum_morse(f16, 16)
        results["order-16 quartic spectrum"] = time.perf_counter() - t0

    return results


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="skip the order-16 workload")
    ap.add_argument("--backend", choices=("cython", "python"), default=None,
                    help="internal: run one backend and print timings")
    args = ap.parse_args()

    if args.backend:
        results = _run_workloads(args.backend)
        for name, dt in results.items():
            print(f"{args.backend}\t{name}\t{dt:.3f}")
        return

    rows = {}
    for backend in ("cython", "python"):
        env = dict(os.environ)
        if backend == "python":
            env["QMORSE_PURE"] = "1"
        else:
            env.pop("QMORSE_PURE", None)
        if args.quick:
            env["QMORSE_BENCH_QUICK"] = "1"
        proc = subprocess.run(
            [sys.executable, __file__, "--backend", backend],
            env=env, capture_output=True, text=True,
        )
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            if backend == "cython":
                print("compiled kernel unavailable; only the pure backend was timed")
                continue
            raise SystemExit(1)
        for line in proc.stdout.strip().splitlines():
            name, workload, dt = line.split("\t")
            rows.setdefault(workload, {})[name] = float(dt)

    width = max(len(w) for w in rows)
    print(f"{'workload':<{width}}  {'cython':>8}  {'python':>8}  {'speedup':>7}")
    for workload, times in rows.items():
        cy = times.get("cython")
        py = times.get("python")
        ratio = f"{py / cy:.2f}x" if cy and py else "-"
        cy_s = f"{cy:.3f}s" if cy else "-"
        py_s = f"{py:.3f}s" if py else "-"
        print(f"{workload:<{width}}  {cy_s:>8}  {py_s:>8}  {ratio:>7}")


if __name__ == "__main__":
    main()

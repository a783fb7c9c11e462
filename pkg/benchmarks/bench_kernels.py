"""Compare the numba and numpy polynomial-product kernels.

Two measurements:

* in-process: ``mul_sparse`` on random operands with each backend, plus the
  pure Python dict loop the library falls back to for small products;
* end-to-end: a fixed operator workload run in a fresh interpreter with
  ``CHARPDIFF_NUMBA=1`` and ``CHARPDIFF_NUMBA=0``.

Usage: ``python3 benchmarks/bench_kernels.py [--quick] [--repeat N] [--json PATH]``
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from charpdiff import _kernels, coeffring
from charpdiff.coeffring import Polynomial, Ring

# (label, n, max degree per variable, terms per operand)
CASES = [
    ("n=1 deg<200", 1, 200, 150),
    ("n=2 deg<30", 2, 30, 300),
    ("n=2 deg<60", 2, 60, 1200),
    ("n=3 deg<15", 3, 15, 1500),
]
QUICK_CASES = CASES[:2]
P = 7

WORKLOAD = """
import time
from charpdiff import _kernels
from charpdiff.coeffring import Chart
from charpdiff.diffop import DiffOperator, VectorField
from charpdiff.frobcenter import frob_center
c = Chart.affine(7, 2)
x1, x2 = DiffOperator.x(c, 1), DiffOperator.x(c, 2)
d1, d2 = DiffOperator.d(c, 1), DiffOperator.d(c, 2)
theta = VectorField.from_operator((x1**3 + x2**2 * x1 + 1) * d1 + (x2**3 + 2 * x1) * d2)
frob_center(theta)  # warm-up (numba compile or cache load)
start = time.perf_counter()
for _ in range({reps}):
    frob_center(theta)
print(_kernels.BACKEND, time.perf_counter() - start)
"""


def random_operand(rng, n, max_deg, terms):
    exps = rng.integers(0, max_deg, size=(terms, n), dtype=np.int64)
    exps = np.unique(exps, axis=0)
    coeffs = rng.integers(1, P, size=exps.shape[0], dtype=np.int64)
    return exps, coeffs


def to_poly(ring, exps, coeffs):
    return Polynomial(ring, {tuple(int(v) for v in e): int(c) for e, c in zip(exps, coeffs)})


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def python_loop(a, b):
    saved = coeffring.KERNEL_MIN_WORK
    coeffring.KERNEL_MIN_WORK = float("inf")
    try:
        return a * b
    finally:
        coeffring.KERNEL_MIN_WORK = saved


def bench_in_process(cases, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for label, n, max_deg, terms in cases:
        ae, ac = random_operand(rng, n, max_deg, terms)
        be, bc = random_operand(rng, n, max_deg, terms)
        row = {"case": label, "work": int(len(ae) * len(be))}
        ref = _kernels.mul_sparse(ae, ac, be, bc, P, backend="numpy")
        row["numpy"] = best_of(lambda: _kernels.mul_sparse(ae, ac, be, bc, P, backend="numpy"), repeat)
        if _kernels.mul_packed_numba is not None:
            _kernels.mul_sparse(ae, ac, be, bc, P, backend="numba")  # compile
            got = _kernels.mul_sparse(ae, ac, be, bc, P, backend="numba")
            assert np.array_equal(got[0], ref[0]) and np.array_equal(got[1], ref[1])
            row["numba"] = best_of(
                lambda: _kernels.mul_sparse(ae, ac, be, bc, P, backend="numba"), repeat)
        ring = Ring(P, 1, n)
        a, b = to_poly(ring, ae, ac), to_poly(ring, be, bc)
        row["python"] = best_of(lambda: python_loop(a, b), max(1, repeat // 3))
        rows.append(row)
    return rows


def bench_end_to_end(reps):
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, CHARPDIFF_NUMBA=flag)
        proc = subprocess.run([sys.executable, "-c", WORKLOAD.format(reps=reps)],
                              env=env, capture_output=True, text=True, check=True)
        backend, seconds = proc.stdout.split()
        out[backend] = float(seconds)
    return out


def fmt(seconds):
    return "-" if seconds is None else f"{seconds * 1e3:9.2f} ms"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small cases only")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results to this file")
    args = ap.parse_args(argv)

    rows = bench_in_process(QUICK_CASES if args.quick else CASES, args.repeat)
    print(f"in-process products mod {P} (best of {args.repeat})")
    print(f"{'case':<14}{'work':>10}{'numba':>14}{'numpy':>14}{'python':>14}")
    for r in rows:
        print(f"{r['case']:<14}{r['work']:>10}{fmt(r.get('numba')):>14}"
              f"{fmt(r['numpy']):>14}{fmt(r['python']):>14}")

    e2e = bench_end_to_end(2 if args.quick else 10)
    print("\nend-to-end frob_center workload (fresh interpreter per backend)")
    for backend, seconds in e2e.items():
        print(f"  CHARPDIFF_NUMBA={'1' if backend == 'numba' else '0'} ({backend}): {fmt(seconds)}")

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"in_process": rows, "end_to_end": e2e}, fh, indent=2)


if __name__ == "__main__":
    main()
